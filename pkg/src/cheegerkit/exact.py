"""Exact rational linear algebra on integer sparse matrices.

Thin wrappers around sympy's DomainMatrix over QQ (gmpy-backed when
available) returning plain Python Fractions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def _q(v) -> object:
    if isinstance(v, Fraction):
        return QQ(v.numerator, v.denominator)
    return QQ(int(v))


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def to_domain(M) -> DomainMatrix:
    """Sparse DomainMatrix over QQ from a scipy matrix or a list of rows."""
    if sp.issparse(M):
        m = sp.coo_matrix(M)
        dod: dict = {}
        for r, c, v in zip(m.row.tolist(), m.col.tolist(), m.data.tolist()):
            if v:
                dod.setdefault(r, {})[c] = QQ(int(v))
        return DomainMatrix(dod, m.shape, QQ)
    rows = [list(r) for r in M]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    dod = {}
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            if v != 0:
                dod.setdefault(i, {})[j] = _q(v)
    return DomainMatrix(dod, (nrows, ncols), QQ)


def rank(M) -> int:
    if min(M.shape) == 0:
        return 0
    if sp.issparse(M) and M.nnz == 0:
        return 0
    return int(to_domain(M).rank())


def nullspace(M) -> list[list[Fraction]]:
    """Basis of the right kernel as Fraction vectors (rref-normalized)."""
    nrows, ncols = M.shape
    if ncols == 0:
        return []
    if nrows == 0 or (sp.issparse(M) and M.nnz == 0):
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ns = to_domain(M).nullspace()
    return [[_frac(v) for v in row] for row in ns.to_list()]


def left_nullspace(M) -> list[list[Fraction]]:
    return nullspace(M.T if sp.issparse(M) else list(map(list, zip(*M))))


def rref(M) -> tuple[list[list[Fraction]], tuple[int, ...]]:
    R, piv = to_domain(M).rref()
    return [[_frac(v) for v in row] for row in R.to_list()], tuple(piv)


def independent_rows(M) -> list[int]:
    """Indices of a maximal set of linearly independent rows (first-come)."""
    if M.shape[0] == 0:
        return []
    _, piv = to_domain(M.T if sp.issparse(M) else list(map(list, zip(*M)))).rref()
    return list(piv)


def independent_columns(M) -> list[int]:
    if M.shape[1] == 0:
        return []
    _, piv = to_domain(M).rref()
    return list(piv)


def solve(M, b: Sequence) -> list[Fraction] | None:
    """One exact solution x of M x = b, or None if the system is inconsistent."""
    nrows, ncols = M.shape
    aug = to_domain(M).to_dense()
    bcol = DomainMatrix([[_q(v)] for v in b], (nrows, 1), QQ)
    R, piv = aug.hstack(bcol).rref()
    if ncols in piv:
        return None
    rows = R.to_list()
    x = [Fraction(0)] * ncols
    for r, c in enumerate(piv):
        x[c] = _frac(rows[r][ncols])
    return x


def matvec(M: sp.spmatrix, x: Sequence) -> list:
    """Exact product of an integer sparse matrix with a Fraction/int vector."""
    M = sp.csr_matrix(M)
    out = []
    for i in range(M.shape[0]):
        s = 0
        for j, v in zip(M.indices[M.indptr[i]:M.indptr[i + 1]], M.data[M.indptr[i]:M.indptr[i + 1]]):
            xj = x[j]
            if xj:
                s += int(v) * xj
        out.append(s)
    return out


def rmatvec(M: sp.spmatrix, y: Sequence) -> list:
    return matvec(sp.csr_matrix(M.T), y)


def primitive(vec: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers with first nonzero entry positive."""
    den = 1
    for v in vec:
        if v:
            den = den * Fraction(v).denominator // math.gcd(den, Fraction(v).denominator)
    ints = [int(Fraction(v) * den) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    if g == 0:
        return tuple(ints)
    ints = [v // g for v in ints]
    for v in ints:
        if v:
            if v < 0:
                ints = [-w for w in ints]
            break
    return tuple(ints)


def betti_numbers(X) -> dict[int, int]:
    """Rational betti numbers b_i = dim C_i - rank d_i - rank d_{i+1}."""
    ranks = {k: rank(X.boundary(k)) for k in range(X.lo + 1, X.hi + 1)}
    return {
        k: X.size(k) - ranks.get(k, 0) - ranks.get(k + 1, 0)
        for k in range(X.lo, X.hi + 1)
    }


def float_kernel_basis(B: np.ndarray, r: int) -> np.ndarray:
    """Orthonormal basis of ker B (columns), given the exact rank r of B."""
    n = B.shape[1]
    if n == 0:
        return np.zeros((0, 0))
    if r == 0:
        return np.eye(n)
    # pivoted QR of B^T is rank revealing: the trailing n - r columns of Q
    # are orthogonal to the row space of B
    q, _, _ = scipy.linalg.qr(B.T, mode="full", pivoting=True)
    return q[:, r:].copy()


def small_rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Plain Fraction Gauss-Jordan; faster than DomainMatrix for tiny systems."""
    R = [[Fraction(v) for v in r] for r in rows]
    piv = []
    r = 0
    for c in range(ncols):
        k = next((i for i in range(r, len(R)) if R[i][c] != 0), None)
        if k is None:
            continue
        R[r], R[k] = R[k], R[r]
        pv = R[r][c]
        if pv != 1:
            R[r] = [v / pv for v in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        piv.append(c)
        r += 1
        if r == len(R):
            break
    return R[:r], piv


def small_kernel(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Kernel basis of a small dense rational matrix."""
    R, piv = small_rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -R[r][f]
        basis.append(v)
    return basis
