"""Smith normal form over the integers with unimodular transforms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class SNFResult:
    """U @ M @ V == D with U, V unimodular and d_1 | d_2 | ... on the diagonal."""

    U: list | None
    D: list
    V: list | None
    shape: tuple[int, int]

    @property
    def diagonal(self) -> list[int]:
        m, n = self.shape
        return [self.D[k][k] for k in range(min(m, n))]

    @property
    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal if d != 0]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def torsion(self) -> list[int]:
        return [d for d in self.invariant_factors if d > 1]


def _as_rows(M) -> list[list[int]]:
    if sp.issparse(M):
        M = M.toarray()
    if isinstance(M, np.ndarray):
        return [[int(v) for v in row] for row in M.tolist()]
    return [[int(v) for v in row] for row in M]


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _near_quotient(a: int, b: int) -> int:
    """Integer q minimizing |a - q b| (ties toward zero remainder sign of a)."""
    q, r = divmod(a, b)
    if 2 * abs(r) > abs(b):
        q += 1 if (r > 0) == (b > 0) else -1
    return q


def smith_normal_form(M, transforms: bool = True) -> SNFResult:
    """Smith normal form by repeated smallest-pivot elimination.

    Arbitrary-precision Python integers throughout.  With ``transforms=False``
    the unimodular matrices are not accumulated, which is noticeably faster
    when only invariant factors are needed.
    """
    A = _as_rows(M)
    m = len(A)
    n = len(A[0]) if m else (M.shape[1] if hasattr(M, "shape") else 0)
    U = _identity(m) if transforms else None
    V = _identity(n) if transforms else None

    def swap_rows(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            if U is not None:
                U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            if V is not None:
                for row in V:
                    row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):
        # row_dst -= q * row_src
        if q:
            rs, rd = A[src], A[dst]
            for k in range(n):
                if rs[k]:
                    rd[k] -= q * rs[k]
            if U is not None:
                us, ud = U[src], U[dst]
                for k in range(m):
                    if us[k]:
                        ud[k] -= q * us[k]

    def add_col(src, dst, q):
        # col_dst -= q * col_src
        if q:
            for row in A:
                if row[src]:
                    row[dst] -= q * row[src]
            if V is not None:
                for row in V:
                    if row[src]:
                        row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            p = A[t][t]
            moved = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(t, i, _near_quotient(A[i][t], p))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(t, j, _near_quotient(A[t][j], p))
            # a smaller remainder in the pivot row or column becomes the new pivot
            rem = [(abs(A[i][t]), i, "r") for i in range(t + 1, m) if A[i][t]]
            rem += [(abs(A[t][j]), j, "c") for j in range(t + 1, n) if A[t][j]]
            if rem:
                _, k, kind = min(rem)
                if kind == "r":
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            # divisibility fix-up: fold an offending row into the pivot row
            for i in range(t + 1, m):
                if any(A[i][j] % p for j in range(t + 1, n)):
                    add_row(i, t, -1)
                    moved = True
                    break
            if not moved:
                break
        if A[t][t] < 0:
            A[t] = [-v for v in A[t]]
            if U is not None:
                U[t] = [-v for v in U[t]]
        t += 1
    return SNFResult(U, A, V, (m, n))


def check_snf(M, res: SNFResult) -> bool:
    """Independent exact check of U M V = D, unimodularity and divisibility."""
    A = _as_rows(M)
    m, n = res.shape
    U, V, D = res.U, res.V, res.D
    for i in range(m):
        for j in range(n):
            if i != j and D[i][j] != 0:
                return False
    diag = res.diagonal
    nz = [d for d in diag if d != 0]
    if any(d < 0 for d in diag) or diag[: len(nz)] != nz:
        return False
    if any(nz[k + 1] % nz[k] for k in range(len(nz) - 1)):
        return False
    if U is None or V is None:
        return True
    UM = [[sum(U[i][k] * A[k][j] for k in range(m) if U[i][k]) for j in range(n)] for i in range(m)]
    UMV = [[sum(UM[i][k] * V[k][j] for k in range(n) if UM[i][k]) for j in range(n)] for i in range(m)]
    if UMV != [list(r) for r in D]:
        return False
    return abs(int_det(U)) == 1 and abs(int_det(V)) == 1


def int_det(M: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free Bareiss elimination."""
    A = [list(map(int, r)) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if A[i][k]), None)
            if piv is None:
                return 0
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]
