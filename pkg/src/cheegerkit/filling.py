"""Minimal fillings and L^p Cheeger constants.

For a boundary map A: C_{i+1} -> C_i and a cycle space V = im A (the exact
cycles), the reciprocal Cheeger constant is

    1/h = max over nonzero alpha in V of  F(alpha) / ||alpha||_p,
    F(alpha) = min { ||beta||_p : A beta = alpha }.

F is a norm on V, so the maximum is attained at an extreme point of the unit
ball of V.  The brute method enumerates those extreme points directly
(elementary vectors for p=1, box vertices for p=inf) and solves one exact LP
per point; for p=2 the maximum is a generalized eigenvalue.  The lp-enum
method walks the vertices of the dual polytope instead and is used as an
independent cross-check.

Coboundary constants h^i reuse the same code on the transposed complex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from . import exact
from .complex import EXACT, FLOAT, INF, Chain, ChainComplex, _as_norm, norm_of
from .errors import DimensionError, EnumerationCapError
from .lp import StandardLP

DEFAULT_CAP = 30
DEFAULT_BUDGET = 300_000

VARIANTS = ("plain", "exact", "coexact", "tilde")
METHODS = ("brute", "lp-enum", "heuristic")


@dataclass(frozen=True)
class FillingResult:
    value: object
    witness: Chain | None
    feasible: bool
    p: float = 1
    dual: tuple | None = None
    value_squared: Fraction | None = None

    def to_json(self) -> dict:
        from .complex import format_number

        out = {
            "feasible": self.feasible,
            "p": "inf" if self.p == INF else self.p,
            "value": format_number(self.value),
            "witness": self.witness.to_json() if self.witness is not None else None,
        }
        if self.value_squared is not None:
            out["value_squared"] = format_number(self.value_squared)
        return out


@dataclass
class CheegerValue:
    dim: int
    p: float
    variant: str
    method: str
    value: object
    inverse: object
    coboundary: bool = False
    witness_cycle: Chain | None = None
    witness_filling: Chain | None = None
    bound: str = "exact"  # "exact", or "upper" for heuristic values of h
    homology_rank: int = 0
    candidates: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def symbol(self) -> str:
        base = f"h^{self.dim}" if self.coboundary else f"h_{self.dim}"
        if self.variant in ("exact", "coexact"):
            base += f"[{self.variant}]"
        if self.variant == "tilde":
            base = "tilde_h^2"
        return base

    def to_json(self) -> dict:
        from .complex import format_number

        return {
            "symbol": self.symbol,
            "dim": self.dim,
            "p": "inf" if self.p == INF else self.p,
            "variant": self.variant,
            "method": self.method,
            "coboundary": self.coboundary,
            "value": format_number(self.value),
            "inverse": format_number(self.inverse),
            "bound": self.bound,
            "homology_rank": self.homology_rank,
            "candidates": self.candidates,
            "witness_cycle": self.witness_cycle.to_json() if self.witness_cycle is not None else None,
            "notes": list(self.notes),
        }


def _inv(x):
    if x == 0:
        return INF
    if x == INF:
        return Fraction(0) if isinstance(x, Fraction) else 0
    if isinstance(x, (int, Fraction)):
        return 1 / Fraction(x)
    return 1.0 / x


# -- fillings ----------------------------------------------------------------


def _int_rows(rows: Sequence[Sequence[Fraction]]) -> list[tuple[int, ...]]:
    return [exact.primitive(r) for r in rows]


class Filler:
    """Minimal L^p solutions of A beta = alpha for one fixed integer matrix A."""

    def __init__(self, A: sp.spmatrix, p=1, out_dim: int = 0, coboundary: bool = False):
        self.A = sp.csc_matrix(A, dtype=np.int64)
        self.m, self.n = self.A.shape
        self.p = _as_norm(p)
        self.out_dim = out_dim
        self._N = None
        self._lp = None
        self._l2 = None

    @property
    def constraints(self) -> list[tuple[int, ...]]:
        """Integer rows spanning the left kernel of A; alpha in im A iff N alpha = 0."""
        if self._N is None:
            self._N = _int_rows(exact.left_nullspace(self.A)) if self.m else []
        return self._N

    def is_boundary(self, alpha: Sequence) -> bool:
        for row in self.constraints:
            if sum(r * a for r, a in zip(row, alpha) if r and a) != 0:
                return False
        return True

    def _standard_lp(self) -> StandardLP:
        if self._lp is not None:
            return self._lp
        A, m, n = self.A, self.m, self.n
        if self.p == 1:
            M = sp.hstack([A, -A])
            c = [1] * (2 * n)
            lp = StandardLP(M, c)
        else:
            eye = sp.identity(n, dtype=np.int64, format="csc")
            top = sp.hstack([A, -A, sp.csc_matrix((m, n + 1), dtype=np.int64)])
            bot = sp.hstack([eye, eye, eye, sp.csc_matrix(-np.ones((n, 1), dtype=np.int64))])
            M = sp.vstack([top, bot])
            c = [0] * (3 * n) + [1]
            lp = StandardLP(M, c, fixed_rhs={m + k: 0 for k in range(n)})
        self._lp = lp
        return lp

    def fill(self, alpha: Sequence) -> FillingResult:
        alpha = [Fraction(v) for v in alpha]
        if len(alpha) != self.m:
            raise DimensionError(f"chain has {len(alpha)} entries, expected {self.m}")
        if not any(alpha):
            zero = Fraction(0) if self.p != 2 else 0.0
            return FillingResult(zero, Chain.zero(self.out_dim), True, self.p, value_squared=Fraction(0))
        if self.n == 0 or not self.is_boundary(alpha):
            return FillingResult(INF, None, False, self.p)
        if self.p == 2:
            return self._fill_l2(alpha)
        sol = self._standard_lp().solve(alpha)
        x = sol.x
        n = self.n
        beta = [x[k] - x[n + k] for k in range(n)]
        value = sum(abs(b) for b in beta) if self.p == 1 else max(abs(b) for b in beta)
        if value != sol.objective:
            raise ArithmeticError("LP objective disagrees with witness norm")
        witness = Chain(self.out_dim, {k: b for k, b in enumerate(beta) if b}, EXACT)
        return FillingResult(value, witness, True, self.p, dual=tuple(sol.y[: self.m]))

    def _fill_l2(self, alpha) -> FillingResult:
        if self._l2 is None:
            rows = exact.independent_rows(self.A)
            AR = sp.csr_matrix(self.A)[rows, :]
            G = (AR @ AR.T).tocsc()
            self._l2 = (rows, AR, G)
        rows, AR, G = self._l2
        y = exact.solve(G, [alpha[r] for r in rows])
        beta = exact.rmatvec(AR, y)
        sq = sum(b * b for b in beta)
        witness = Chain(self.out_dim, {k: b for k, b in enumerate(beta) if b}, EXACT)
        return FillingResult(math.sqrt(sq), witness, True, 2, value_squared=sq)


def _filling_matrix(X, dim: int, cofilling: bool):
    K = X.as_chain_complex()
    if cofilling:
        # d: C^{dim-1} -> C^{dim} is the transpose of the boundary out of dim
        if dim - 1 < K.lo:
            return sp.csc_matrix((K.size(dim), 0), dtype=np.int64)
        return K.boundary(dim).T.tocsc()
    if dim + 1 > K.hi:
        return sp.csc_matrix((K.size(dim), 0), dtype=np.int64)
    return K.boundary(dim + 1)


def min_filling(X, alpha: Chain, p=1) -> FillingResult:
    """Least L^p filling beta of alpha (boundary of beta equals alpha)."""
    p = _as_norm(getattr(p, "p", p))
    K = X.as_chain_complex()
    if not K.lo <= alpha.dim <= K.hi:
        raise DimensionError(f"dimension {alpha.dim} outside {K.lo}..{K.hi}")
    A = _filling_matrix(K, alpha.dim, False)
    return Filler(A, p, alpha.dim + 1).fill(alpha.to_exact().to_dense(K.size(alpha.dim)))


def min_cofilling(X, alpha: Chain, p=1) -> FillingResult:
    """Least L^p cochain beta with coboundary d beta equal to alpha."""
    p = _as_norm(getattr(p, "p", p))
    K = X.as_chain_complex()
    if not K.lo <= alpha.dim <= K.hi:
        raise DimensionError(f"dimension {alpha.dim} outside {K.lo}..{K.hi}")
    A = _filling_matrix(K, alpha.dim, True)
    return Filler(A, p, alpha.dim - 1).fill(alpha.to_exact().to_dense(K.size(alpha.dim)))


# -- extreme point enumeration ------------------------------------------------


def _binom_sum(n: int, top: int) -> int:
    return sum(math.comb(n, s) for s in range(1, top + 1))


def elementary_vectors(
    basis: Sequence[Sequence], constraints: Sequence[Sequence], n: int, budget: int = DEFAULT_BUDGET
) -> list[tuple[int, ...]]:
    """All elementary (minimal-support) vectors of V, up to scaling.

    ``basis`` spans V, ``constraints`` are rows with V = their common kernel.
    Uses either support subsets up to size rank(constraints) + 1, or zero sets
    of size dim V - 1, whichever is cheaper.  Output vectors are primitive
    integer tuples with a positive first nonzero entry, sorted.
    """
    d = len(basis)
    rho = len(constraints)
    if d == 0:
        return []
    cost1 = _binom_sum(n, min(rho + 1, n)) * (rho * (rho + 1) + 1)
    cost2 = math.comb(n, d - 1) * d * d
    count1 = _binom_sum(n, min(rho + 1, n))
    count2 = math.comb(n, d - 1)
    if min(count1, count2) > budget:
        raise EnumerationCapError(
            f"elementary-vector enumeration needs {min(count1, count2)} subsets (budget {budget}); "
            "use method='heuristic' or raise the budget"
        )
    found = set()
    if cost1 <= cost2 and count1 <= budget:
        cols = [[row[j] for row in constraints] for j in range(n)]
        for s in range(1, min(rho + 1, n) + 1):
            for S in itertools.combinations(range(n), s):
                rows = [[cols[j][r] for j in S] for r in range(rho)]
                ker = exact.small_kernel(rows, s) if rho else [[Fraction(1)]] if s == 1 else []
                if len(ker) != 1 or any(v == 0 for v in ker[0]):
                    continue
                vec = [0] * n
                for j, v in zip(S, ker[0]):
                    vec[j] = v
                found.add(exact.primitive(vec))
    else:
        wrows = [[b[j] for b in basis] for j in range(n)]
        for Z in itertools.combinations(range(n), d - 1):
            ker = exact.small_kernel([wrows[j] for j in Z], d)
            if len(ker) != 1:
                continue
            z = ker[0]
            vec = [sum(zk * b[j] for zk, b in zip(z, basis) if zk) for j in range(n)]
            found.add(exact.primitive(vec))
    return sorted(found)


def box_vertices(basis: Sequence[Sequence], n: int, budget: int = DEFAULT_BUDGET) -> list[tuple]:
    """Vertices of V intersected with the unit cube, one per +- pair."""
    d = len(basis)
    if d == 0:
        return []
    total = math.comb(n, d) * 2 ** (d - 1)
    if total > budget:
        raise EnumerationCapError(
            f"box-vertex enumeration needs {total} candidate solves (budget {budget}); "
            "use method='heuristic' or raise the budget"
        )
    wrows = [[Fraction(b[j]) for b in basis] for j in range(n)]
    found = set()
    eye = [[Fraction(int(a == b)) for b in range(d)] for a in range(d)]
    for S in itertools.combinations(range(n), d):
        R, piv = exact.small_rref([wrows[j] + eye[k] for k, j in enumerate(S)], 2 * d)
        if len(piv) < d or piv[d - 1] >= d:
            continue
        inv = [r[d:] for r in R]
        for signs in itertools.product((1, -1), repeat=d - 1):
            sigma = (1,) + signs
            z = [sum(inv[a][b] * sigma[b] for b in range(d)) for a in range(d)]
            vec = [sum(zk * w for zk, w in zip(z, wrows[j])) for j in range(n)]
            if all(abs(v) <= 1 for v in vec):
                first = next(v for v in vec if v)
                if first < 0:
                    vec = [-v for v in vec]
                found.add(tuple(vec))
    return sorted(found)


def sign_vertices(basis, M_rows, d, budget=DEFAULT_BUDGET):
    """Vertices z of {z : |M z|_inf <= 1} for an injective M given by rows."""
    nrows = len(M_rows)
    total = math.comb(nrows, d) * 2 ** (d - 1)
    if total > budget:
        raise EnumerationCapError(f"dual vertex enumeration needs {total} solves (budget {budget})")
    eye = [[Fraction(int(a == b)) for b in range(d)] for a in range(d)]
    found = set()
    for S in itertools.combinations(range(nrows), d):
        R, piv = exact.small_rref([list(M_rows[j]) + eye[k] for k, j in enumerate(S)], 2 * d)
        if len(piv) < d or piv[d - 1] >= d:
            continue
        inv = [r[d:] for r in R]
        for signs in itertools.product((1, -1), repeat=d - 1):
            sigma = (1,) + signs
            z = tuple(sum(inv[a][b] * sigma[b] for b in range(d)) for a in range(d))
            if all(abs(sum(m * zk for m, zk in zip(row, z))) <= 1 for row in M_rows):
                found.add(z)
    return sorted(found)


# -- Cheeger constants --------------------------------------------------------


class _Setup:
    """Shared exact data for one (complex, dimension) pair."""

    def __init__(self, K: ChainComplex, j: int):
        self.K = K
        self.j = j
        self.n = K.size(j)
        self.A = _filling_matrix(K, j, False)
        self.B = K.boundary(j) if j > K.lo else sp.csc_matrix((0, self.n), dtype=np.int64)
        cols = exact.independent_columns(self.A) if self.A.shape[1] and self.A.nnz else []
        self.cols = cols
        A = self.A.tocsc()
        self.W = [[int(v) for v in A[:, c].toarray().ravel()] for c in cols]
        self.rank_A = len(cols)
        self.rank_B = exact.rank(self.B) if self.B.shape[0] else 0
        self.dim_Z = self.n - self.rank_B
        self.homology_rank = self.dim_Z - self.rank_A

    def homology_representative(self) -> list[Fraction] | None:
        if self.homology_rank == 0:
            return None
        filler = Filler(self.A, 1)
        for z in exact.nullspace(self.B) if self.B.shape[0] else [
            [Fraction(int(i == k)) for i in range(self.n)] for k in range(self.n)
        ]:
            if not filler.is_boundary(z):
                return list(exact.primitive(z))
        raise AssertionError("homology rank positive but every cycle bounds")


def _resolve(X, i: int, coboundary: bool, variant: str):
    K = X.as_chain_complex()
    if variant not in ("plain", "exact", "coexact"):
        raise ValueError(f"unknown variant {variant!r}")
    if coboundary and variant == "exact":
        raise ValueError("use variant='coexact' for coboundary constants")
    if not coboundary and variant == "coexact":
        raise ValueError("use variant='exact' for boundary constants")
    if coboundary:
        K = K.transpose()
        j = -i
    else:
        j = i
    if not K.lo <= j <= K.hi:
        raise DimensionError(f"dimension {i} out of range")
    return K, j


def cheeger(
    X,
    i: int,
    p=1,
    variant: str = "plain",
    method: str = "brute",
    cap: int = DEFAULT_CAP,
    budget: int = DEFAULT_BUDGET,
    coboundary: bool = False,
    samples: int = 200,
    seed: int = 0,
) -> CheegerValue:
    """Cheeger constant h_i (or h^i with ``coboundary=True``) in the L^p norm.

    ``variant`` is "plain", "exact" (boundary side) or "coexact" (coboundary
    side).  Values are exact Fractions for p in {1, inf} with the brute and
    lp-enum methods; floats for p = 2.  The heuristic method returns an upper
    bound on h from random sampling.
    """
    p = _as_norm(getattr(p, "p", p))
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    K, j = _resolve(X, i, coboundary, variant)
    S = _Setup(K, j)
    res = CheegerValue(i, p, variant, method, None, None, coboundary, homology_rank=S.homology_rank)
    out_dim = i - 1 if coboundary else i + 1
    if variant == "plain" and S.homology_rank > 0:
        z = S.homology_representative()
        res.value = Fraction(0) if p != 2 else 0.0
        res.inverse = INF
        res.witness_cycle = Chain(i, dict(enumerate(z)), EXACT)
        res.notes.append("nonzero homology: some cycle has no filling")
        res.method = "exact-rank"
        return res
    if S.rank_A == 0:
        res.value = INF
        res.inverse = Fraction(0) if p != 2 else 0.0
        res.notes.append("no nonzero exact cycles: empty infimum")
        return res
    if method in ("brute", "lp-enum") and S.n > cap:
        raise EnumerationCapError(
            f"{S.n} cells in dimension {i} exceeds the enumeration cap {cap}; "
            "use method='heuristic' or pass a larger cap"
        )
    if p == 2:
        if method == "lp-enum":
            res.notes.append("lp-enum has no L2 form; used the exact-basis eigenproblem")
            res.method = "brute"
        if method == "heuristic":
            return _heuristic(S, res, p, samples, seed, out_dim)
        return _brute_l2(S, res, out_dim)
    if method == "heuristic":
        return _heuristic(S, res, p, samples, seed, out_dim)
    if method == "brute":
        return _brute(S, res, p, budget, out_dim)
    return _lp_enum(S, res, p, budget, out_dim)


def check_witness(X, res: CheegerValue) -> bool:
    """The witness filling fills the witness cycle and realizes the reported inverse.

    Recomputed from the boundary matrices, independently of the search that
    produced the pair.  Only exact values (p in {1, inf}) are checked.
    """
    if res.witness_cycle is None or res.witness_filling is None or res.p == 2:
        return res.witness_cycle is not None or res.value in (0, INF)
    K, j = _resolve(X, res.dim, res.coboundary, res.variant)
    A = _filling_matrix(K, j, False).tocsc()
    alpha = res.witness_cycle.to_exact().to_dense(K.size(j))
    beta = res.witness_filling.to_exact().to_dense(A.shape[1])
    image = [Fraction(0)] * A.shape[0]
    for col in range(A.shape[1]):
        if beta[col]:
            for r, v in zip(A.indices[A.indptr[col]:A.indptr[col + 1]], A.data[A.indptr[col]:A.indptr[col + 1]]):
                image[int(r)] += int(v) * beta[col]
    if image != alpha:
        return False
    na, nb = norm_of(alpha, res.p), norm_of(beta, res.p)
    return na != 0 and Fraction(nb) / Fraction(na) == res.inverse


def _finish(res: CheegerValue, best, filler_out, i, out_dim):
    ratio, alpha, fill = best
    res.inverse = ratio
    res.value = _inv(ratio)
    res.witness_cycle = Chain(i, dict(enumerate(alpha)), EXACT if isinstance(ratio, Fraction) else FLOAT)
    res.witness_filling = fill
    return res


def _brute(S: _Setup, res: CheegerValue, p, budget, out_dim) -> CheegerValue:
    filler = Filler(S.A, p, out_dim)
    if p == 1:
        cands = elementary_vectors(S.W, filler.constraints, S.n, budget)
    else:
        cands = box_vertices(S.W, S.n, budget)
    best = None
    for alpha in cands:
        fr = filler.fill(alpha)
        ratio = fr.value / (sum(abs(a) for a in alpha) if p == 1 else max(abs(a) for a in alpha))
        if best is None or ratio > best[0]:
            best = (ratio, list(alpha), fr.witness)
    res.candidates = len(cands)
    return _finish(res, best, None, res.dim, out_dim)


def _lp_enum(S: _Setup, res: CheegerValue, p, budget, out_dim) -> CheegerValue:
    d = S.rank_A
    W = S.W
    AT = sp.csr_matrix(S.A.T)
    # M = A^T W, an injective map R^d -> C_{i+1}
    M_rows = []
    for r in range(AT.shape[0]):
        row = AT.getrow(r)
        M_rows.append(
            tuple(sum(int(v) * W[k][c] for c, v in zip(row.indices, row.data)) for k in range(d))
        )
    WT = sp.csc_matrix(np.array(W, dtype=np.int64))  # d x n
    q = INF if p == 1 else 1
    dual_filler = Filler(WT, q, 0)
    if p == 1:
        zs = sign_vertices(W, M_rows, d, budget)
    else:
        kern = exact.nullspace(S.A)
        ker_rows = [exact.primitive(v) for v in kern]
        rowspace = [list(r) for r in M_rows]
        # elementary vectors of im(M) = im(A^T); each gives a vertex of the l1 ball
        basis = [list(c) for c in zip(*rowspace)]
        circuits = elementary_vectors(basis, ker_rows, len(M_rows), budget)
        zs = []
        Mmat = [list(r) for r in M_rows]
        for u in circuits:
            z = exact.solve(_Dense(Mmat), list(u))
            l1 = sum(abs(v) for v in u)
            zs.append(tuple(v / l1 for v in z))
    best = None
    for z in zs:
        y = [sum(z[k] * W[k][t] for k in range(d)) for t in range(S.n)]
        rhs = [sum(W[k][t] * y[t] for t in range(S.n)) for k in range(d)]
        g = dual_filler.fill(rhs)
        if best is None or g.value > best[0]:
            best = (g.value, g)
    res.candidates = len(zs)
    value, g = best
    # recover a primal witness cycle from the optimal dual of the last LP
    u = g.dual
    alpha = [sum(u[k] * W[k][t] for k in range(d)) for t in range(S.n)]
    alpha = list(exact.primitive(alpha))
    fr = Filler(S.A, p, out_dim).fill(alpha)
    norm = sum(abs(a) for a in alpha) if p == 1 else max(abs(a) for a in alpha)
    if fr.value / norm != value:
        res.notes.append("dual witness ratio differs from the vertex value")
    return _finish(res, (value, alpha, fr.witness), None, res.dim, out_dim)


class _Dense(list):
    @property
    def shape(self):
        return (len(self), len(self[0]) if self else 0)


def _brute_l2(S: _Setup, res: CheegerValue, out_dim) -> CheegerValue:
    A = S.A.toarray().astype(float)
    Wm = np.array(S.W, dtype=float).T  # n x d, exact integer basis of the exact cycles
    F = np.linalg.lstsq(A, Wm, rcond=None)[0]
    mu, vecs = scipy.linalg.eigh(F.T @ F, Wm.T @ Wm)
    v = vecs[:, -1]
    alpha = Wm @ v
    alpha /= np.linalg.norm(alpha)
    inv = math.sqrt(max(mu[-1], 0.0))
    res.inverse = inv
    res.value = _inv(inv)
    res.witness_cycle = Chain(res.dim, dict(enumerate(alpha.tolist())), FLOAT)
    res.witness_filling = Chain(out_dim, dict(enumerate((F @ v / np.linalg.norm(Wm @ v)).tolist())), FLOAT)
    res.candidates = S.rank_A
    return res


def _heuristic(S: _Setup, res: CheegerValue, p, samples, seed, out_dim) -> CheegerValue:
    rng = np.random.default_rng(seed)
    filler = Filler(S.A, p, out_dim)
    d = S.rank_A
    best = None
    for t in range(samples):
        if t < d:
            z = [0] * d
            z[t] = 1
        else:
            k = int(rng.integers(1, min(d, 4) + 1))
            z = [0] * d
            for idx in rng.choice(d, size=k, replace=False):
                z[int(idx)] = int(rng.integers(1, 4)) * (1 if rng.random() < 0.5 else -1)
        alpha = [sum(z[k] * S.W[k][c] for k in range(d) if z[k]) for c in range(S.n)]
        if not any(alpha):
            continue
        fr = filler.fill(alpha)
        norm = (sum(abs(a) for a in alpha) if p == 1 else max(abs(a) for a in alpha)) if p != 2 else math.sqrt(
            sum(a * a for a in alpha)
        )
        ratio = fr.value / norm
        if best is None or ratio > best[0]:
            best = (ratio, alpha, fr.witness)
    res.bound = "upper"
    res.candidates = samples
    res.notes.append("random sampling: the value is an upper bound on h")
    return _finish(res, best, None, res.dim, out_dim)


# -- the modified second coboundary constant ----------------------------------


class TildeDecomposer:
    """Cheapest split alpha = d beta + gamma with gamma closed, for 2-chains."""

    def __init__(self, X, p=1):
        self.X = X
        self.p = _as_norm(p)
        self.D = sp.csc_matrix(X.boundary(2), dtype=np.int64)  # C_2 -> C_1
        self.n1, self.n2 = self.D.shape
        self._lp = None
        self._l2 = None

    def _standard_lp(self):
        if self._lp is not None:
            return self._lp
        D, n1, n2 = self.D, self.n1, self.n2
        DT = D.T.tocsc()
        I2 = sp.identity(n2, dtype=np.int64, format="csc")
        Z = lambda r, c: sp.csc_matrix((r, c), dtype=np.int64)  # noqa: E731
        if self.p == 1:
            top = sp.hstack([DT, -DT, I2, -I2])
            bot = sp.hstack([Z(n1, 2 * n1), D, -D])
            M = sp.vstack([top, bot])
            c = [1] * (2 * n1 + 2 * n2)
            fixed = {n2 + k: 0 for k in range(n1)}
        else:
            I1 = sp.identity(n1, dtype=np.int64, format="csc")
            col1 = lambda r: sp.csc_matrix(-np.ones((r, 1), dtype=np.int64))  # noqa: E731
            # columns: b+ b- sb t1 g+ g- sg t2
            rows = [
                sp.hstack([DT, -DT, Z(n2, n1 + 1), I2, -I2, Z(n2, n2 + 1)]),
                sp.hstack([Z(n1, 3 * n1 + 1), D, -D, Z(n1, n2 + 1)]),
                sp.hstack([I1, I1, I1, col1(n1), Z(n1, 3 * n2 + 1)]),
                sp.hstack([Z(n2, 3 * n1 + 1), I2, I2, I2, col1(n2)]),
            ]
            M = sp.vstack(rows)
            c = [0] * (3 * n1) + [1] + [0] * (3 * n2) + [1]
            fixed = {k: 0 for k in range(n2, n2 + 2 * n1 + n2)}
        self._lp = StandardLP(M, c, fixed_rhs=fixed)
        return self._lp

    def decompose(self, alpha: Sequence):
        """Return (beta, gamma, cost) with alpha = d beta + gamma, boundary(gamma) = 0."""
        alpha = [Fraction(v) for v in alpha]
        n1, n2 = self.n1, self.n2
        if self.p == 2:
            return self._decompose_l2(alpha)
        sol = self._standard_lp().solve(alpha)
        x = sol.x
        if self.p == 1:
            beta = [x[k] - x[n1 + k] for k in range(n1)]
            off = 2 * n1
            gamma = [x[off + k] - x[off + n2 + k] for k in range(n2)]
            cost = sum(map(abs, beta)) + sum(map(abs, gamma))
        else:
            beta = [x[k] - x[n1 + k] for k in range(n1)]
            off = 3 * n1 + 1
            gamma = [x[off + k] - x[off + n2 + k] for k in range(n2)]
            cost = max(map(abs, beta), default=Fraction(0)) + max(map(abs, gamma), default=Fraction(0))
        if cost != sol.objective:
            raise ArithmeticError("decomposition cost disagrees with LP objective")
        return (
            Chain(1, dict(enumerate(beta)), EXACT),
            Chain(2, dict(enumerate(gamma)), EXACT),
            cost,
        )

    def _decompose_l2(self, alpha):
        # the split is the orthogonal one: gamma is the projection onto ker D
        rows = exact.independent_rows(self.D)
        DR = sp.csr_matrix(self.D)[rows, :]
        if rows:
            G = (DR @ DR.T).tocsc()
            w = exact.solve(G, exact.matvec(DR, alpha))
            coexact = exact.rmatvec(DR, w)
        else:
            coexact = [Fraction(0)] * self.n2
        gamma = [a - c for a, c in zip(alpha, coexact)]
        fr = Filler(self.D.T, 2, 1).fill(coexact)
        beta = fr.witness
        cost = fr.value + math.sqrt(sum(g * g for g in gamma))
        return beta, Chain(2, dict(enumerate(gamma)), EXACT), cost


def tilde_h2_decompose(X, alpha: Chain, p=1):
    """Cheapest decomposition alpha = d beta + gamma with gamma a 2-cycle."""
    if alpha.dim != 2:
        raise DimensionError("tilde decomposition takes a 2-chain")
    if X.as_chain_complex().hi < 2:
        raise DimensionError("complex has no 2-cells")
    dec = TildeDecomposer(X, _as_norm(getattr(p, "p", p)))
    return dec.decompose(alpha.to_exact().to_dense(dec.n2))


def tilde_h2(X, p=1, method: str = "brute", budget: int = DEFAULT_BUDGET, samples: int = 200, seed: int = 0):
    """The modified constant: inf over nonzero 2-chains of ||alpha|| / decomposition cost."""
    p = _as_norm(getattr(p, "p", p))
    K = X.as_chain_complex()
    res = CheegerValue(2, p, "tilde", method, None, None, True)
    if K.hi < 2 or K.size(2) == 0:
        res.value = INF
        res.inverse = Fraction(0)
        res.notes.append("no 2-cells: empty infimum")
        return res
    dec = TildeDecomposer(K, p)
    n2 = dec.n2
    if p == 2:
        return _tilde_l2(K, dec, res)
    if method == "heuristic":
        rng = np.random.default_rng(seed)
        cands = []
        for _ in range(samples):
            v = [int(x) for x in rng.integers(-2, 3, size=n2)]
            if any(v):
                cands.append(v)
        res.bound = "upper"
    elif p == 1:
        # the unit ball of l1 has the signed unit cells as its vertices
        cands = [[int(k == t) for k in range(n2)] for t in range(n2)]
    else:
        if 2 ** (n2 - 1) > budget:
            raise EnumerationCapError(f"2^{n2 - 1} sign vectors exceed the budget {budget}")
        cands = [[1] + list(s) for s in itertools.product((1, -1), repeat=n2 - 1)]
    best = None
    for alpha in cands:
        beta, gamma, cost = dec.decompose(alpha)
        norm = sum(map(abs, alpha)) if p == 1 else max(map(abs, alpha))
        ratio = cost / norm
        if best is None or ratio > best[0]:
            best = (ratio, alpha, beta, gamma)
    ratio, alpha, beta, gamma = best
    res.candidates = len(cands)
    res.inverse = ratio
    res.value = _inv(ratio)
    res.witness_cycle = Chain(2, dict(enumerate(alpha)), EXACT)
    res.witness_filling = beta
    return res


def _tilde_l2(K, dec: TildeDecomposer, res: CheegerValue) -> CheegerValue:
    D = dec.D.toarray().astype(float)
    r = exact.rank(dec.D)
    n2 = dec.n2
    if r == 0:
        inv = 1.0
    else:
        s = np.linalg.svd(D, compute_uv=False)
        inv_coexact = 1.0 / s[r - 1]
        inv = math.hypot(inv_coexact, 1.0) if r < n2 else inv_coexact
    res.inverse = inv
    res.value = 1.0 / inv
    res.method = "orthogonal"
    return res
