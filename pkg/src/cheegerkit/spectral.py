"""Hodge Laplacians, spectral gaps and L^2 Cheeger constants.

With B_i the boundary matrix from i-cells, the Laplacian on C_i is

    Delta_i = B_i^T B_i + B_{i+1} B_{i+1}^T  (= d boundary + boundary d).

The nonzero spectrum of Delta_i splits into the nonzero spectrum of
B_{i+1} B_{i+1}^T (exact part) and of B_i^T B_i (coexact part).  The L^2
Cheeger constant h_i is the square root of the smallest eigenvalue of the
exact part restricted to i-cycles, and h^i the same for the coexact part on
i-cocycles.  Zero eigenvalues are always counted against exact betti numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import exact
from .complex import INF, format_number
from .errors import DimensionError, InvariantViolation

ZERO_TOL = 1e-9
RESIDUAL_TOL = 1e-8
DENSE_LIMIT = 2000


def _matrix(X, i: int) -> sp.csc_matrix:
    """Boundary from i-cells, empty outside the stored range."""
    return sp.csc_matrix(X.as_chain_complex().boundary(i), dtype=float)


def _check_dim(X, i: int):
    K = X.as_chain_complex()
    if not 0 <= i <= K.hi:
        raise DimensionError(f"dimension {i} out of range 0..{K.hi}")
    return K


def hodge_laplacian(X, i: int) -> sp.csr_matrix:
    """Delta_i = B_i^T B_i + B_{i+1} B_{i+1}^T as a sparse float matrix.

    For an augmented complex Delta_0 includes the all-ones augmentation term.
    """
    _check_dim(X, i)
    Bi = _matrix(X, i)
    Bn = _matrix(X, i + 1)
    return sp.csr_matrix(Bi.T @ Bi + Bn @ Bn.T)


def one_norm(M) -> float:
    """Maximum absolute column sum."""
    if sp.issparse(M):
        return float(abs(M).sum(axis=0).max()) if M.shape[1] else 0.0
    return float(np.abs(M).sum(axis=0).max()) if M.shape[1] else 0.0


def _eigh(L: sp.spmatrix, k: int | None = None):
    """Eigenpairs of a symmetric PSD matrix, ascending.

    Dense LAPACK up to DENSE_LIMIT rows; above that the k smallest pairs by
    shift-invert Lanczos around -1 (Delta + I is positive definite).
    """
    n = L.shape[0]
    if n <= DENSE_LIMIT or k is None or k >= n - 1:
        return scipy.linalg.eigh(L.toarray() if sp.issparse(L) else L)
    vals, vecs = spla.eigsh(sp.csc_matrix(L), k=k, sigma=-1.0, which="LM")
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


@dataclass
class SpectralReport:
    dim: int
    gap_exact: float
    gap_coexact: float
    hodge_gap: float
    betti_check: int
    tolerance: float
    zero_count: int
    max_residual: float
    norm: float
    eigenvalues: list[float] | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self, full_spectrum: bool = False) -> dict:
        out = {
            "dim": self.dim,
            "gap_exact": format_number(self.gap_exact),
            "gap_coexact": format_number(self.gap_coexact),
            "hodge_gap": format_number(self.hodge_gap),
            "betti_check": self.betti_check,
            "zero_count": self.zero_count,
            "tolerance": self.tolerance,
            "max_residual": format_number(self.max_residual),
            "notes": list(self.notes),
        }
        if full_spectrum and self.eigenvalues is not None:
            out["eigenvalues"] = [format_number(v) for v in self.eigenvalues]
        return out


def _smallest_positive_sq_singular(B: sp.spmatrix) -> float:
    """Smallest nonzero eigenvalue of B B^T (= of B^T B), rank taken exactly."""
    if B.shape[0] == 0 or B.shape[1] == 0:
        return INF
    r = exact.rank(B)
    if r == 0:
        return INF
    s = np.linalg.svd(B.toarray(), compute_uv=False)
    return float(s[r - 1] ** 2)


def spectral_report(X, i: int, tol: float = ZERO_TOL, keep_spectrum: bool = False) -> SpectralReport:
    """Spectral gap of Delta_i with zero detection confirmed by exact betti numbers."""
    K = _check_dim(X, i)
    L = hodge_laplacian(K, i)
    norm = one_norm(L)
    betti = exact.betti_numbers(K).get(i, 0)
    n = L.shape[0]
    notes = []
    if n == 0:
        return SpectralReport(i, INF, INF, INF, betti, tol, 0, 0.0, 0.0, [] if keep_spectrum else None, notes)
    vals, vecs = _eigh(L, k=min(n - 1, betti + 2))
    resid = np.linalg.norm(L @ vecs - vecs * vals, axis=0)
    max_res = float(resid.max()) if resid.size else 0.0
    if max_res > RESIDUAL_TOL * max(norm, 1.0):
        raise InvariantViolation(f"eigenpair residual {max_res:.3g} exceeds {RESIDUAL_TOL}*||Delta||")
    thresh = tol * max(norm, 1.0)
    zero_count = int(np.sum(vals < thresh))
    if zero_count != betti:
        raise InvariantViolation(
            f"Delta_{i} has {zero_count} eigenvalues below {thresh:.3g} but the exact betti number is {betti}"
        )
    hodge = float(vals[betti]) if betti < len(vals) else INF
    g_exact = _smallest_positive_sq_singular(K.boundary(i + 1))
    g_coexact = _smallest_positive_sq_singular(K.boundary(i))
    if betti == 0 and hodge != INF and abs(hodge - min(g_exact, g_coexact)) > 1e-9 * max(norm, 1.0):
        notes.append("hodge gap disagrees with the split spectra")
    return SpectralReport(
        i, g_exact, g_coexact, hodge, betti, tol, zero_count, max_res, norm,
        vals.tolist() if keep_spectrum else None, notes,
    )


def _restricted_min_eig(B_kernel: sp.spmatrix, B_op: sp.spmatrix) -> float | None:
    """Smallest eigenvalue of B_op B_op^T restricted to ker B_kernel (B_op maps into that space).

    Returns None when the kernel is trivial.
    """
    Bk = B_kernel.toarray()
    r = exact.rank(B_kernel) if Bk.size else 0
    n = Bk.shape[1]
    if n - r == 0:
        return None
    Q = exact.float_kernel_basis(Bk, r) if Bk.shape[0] else np.eye(n)
    Bo = B_op.toarray()
    G = Bo.T @ Q if Bo.size else np.zeros((0, Q.shape[1]))
    M = G.T @ G
    return float(scipy.linalg.eigvalsh(M)[0])


def cheeger_l2_down(X, i: int) -> float:
    """h_i(X, L^2, R): sqrt of the smallest eigenvalue of boundary-d on i-cycles.

    Returns 0 when H_i(X; R) != 0 and +inf when there are no nonzero i-cycles.
    """
    K = _check_dim(X, i)
    if exact.betti_numbers(K).get(i, 0) > 0:
        return 0.0
    lam = _restricted_min_eig(sp.csc_matrix(K.boundary(i)), sp.csc_matrix(K.boundary(i + 1)))
    if lam is None:
        return INF
    return math.sqrt(max(lam, 0.0))


def cheeger_l2_up(X, i: int) -> float:
    """h^i(X, L^2, R): sqrt of the smallest eigenvalue of d-boundary on i-cocycles.

    Computed by the same routine on the transposed complex.
    """
    K = _check_dim(X, i)
    return _down_on(K.transpose(), -i)


def _down_on(K, j: int) -> float:
    if exact.betti_numbers(K).get(j, 0) > 0:
        return 0.0
    lam = _restricted_min_eig(sp.csc_matrix(K.boundary(j)), sp.csc_matrix(K.boundary(j + 1)))
    if lam is None:
        return INF
    return math.sqrt(max(lam, 0.0))


def rayleigh_oracle(X, i: int) -> float:
    """h_i(L^2) by generalized Rayleigh quotients over an exact integer kernel basis.

    An independent path: no orthonormalization, no float kernel.
    """
    K = _check_dim(X, i)
    W = exact.nullspace(K.boundary(i)) if K.boundary(i).shape[0] else None
    n = K.size(i)
    if W is None:
        Wm = np.eye(n)
    else:
        if not W:
            return INF
        Wm = np.array([[float(v) for v in w] for w in W]).T
    Bn = K.boundary(i + 1).toarray().astype(float)
    G = Bn.T @ Wm
    vals = scipy.linalg.eigh(G.T @ G, Wm.T @ Wm, eigvals_only=True)
    return math.sqrt(max(float(vals[0]), 0.0))


@dataclass
class TildeL2:
    value: float
    inverse: float
    h2: float
    sandwich_ok: bool | None
    flag: str | None = None

    def to_json(self) -> dict:
        return {
            "value": format_number(self.value),
            "inverse": format_number(self.inverse),
            "h2": format_number(self.h2),
            "sandwich_ok": self.sandwich_ok,
            "flag": self.flag,
        }


def tilde_h2_l2(X, h2_complex=None, tol: float = 1e-9) -> TildeL2:
    """The modified constant in L^2 with the sandwich 1/h^2 <= 1/tilde <= 1/h^2 + 1.

    Any 2-chain splits uniquely into a cycle and a coexact part (they lie in
    orthogonal complements), so 1/tilde = sqrt(s^2 + 1) with s the reciprocal
    of the coexact gap, or s alone when every 2-chain is coexact.

    ``h2_complex`` lets h^2 be taken on a complex with the same 1- and
    2-cells but extra 3-cells (e.g. the 3-skeleton) where H^2 vanishes; the
    modified constant itself only sees d on 1-cochains and boundary on 2-chains.
    """
    K = X.as_chain_complex()
    if K.hi < 2 or K.size(2) == 0:
        return TildeL2(INF, 0.0, INF, None, "no 2-cells: empty infimum")
    D = sp.csc_matrix(K.boundary(2))
    r = exact.rank(D)
    n2 = K.size(2)
    if r == 0:
        inv = 1.0
    else:
        s = 1.0 / math.sqrt(_smallest_positive_sq_singular(D))
        inv = math.hypot(s, 1.0) if r < n2 else s
    H = (h2_complex if h2_complex is not None else X).as_chain_complex()
    if exact.betti_numbers(H).get(2, 0) > 0:
        return TildeL2(0.0, INF, 0.0, None, "H^2 != 0: the sandwich does not apply")
    h2 = cheeger_l2_up(H, 2)
    lo = 1.0 / h2 if h2 > 0 else INF
    ok = lo <= inv + tol and inv <= lo + 1 + tol
    if not ok:
        raise InvariantViolation(f"sandwich violated: 1/h2={lo}, 1/tilde={inv}")
    return TildeL2(1.0 / inv, inv, h2, ok)
