"""Exact linear programs in standard form, min c.x s.t. M x = b, x >= 0.

HiGHS proposes a primal/dual pair in floating point; the pair is then rounded
to rationals and certified by exact arithmetic (primal feasibility, dual
feasibility, equal objectives).  If rounding fails we rebuild the vertex from
its support with exact linear algebra, and as a last resort run an exact
Fraction simplex with Bland's rule.  Whatever path is taken, the returned
solution has passed the exact optimality check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import highspy
import numpy as np
import scipy.sparse as sp

from . import exact

log = logging.getLogger(__name__)

ROUND_DENOMINATOR = 10**7
SUPPORT_TOL = 1e-9


class LPError(RuntimeError):
    pass


class InfeasibleError(LPError):
    pass


class UnboundedError(LPError):
    pass


@dataclass(frozen=True)
class LPSolution:
    x: list[Fraction]
    y: list[Fraction]
    objective: Fraction
    route: str  # "rounded" | "support" | "simplex"


def certify(M: sp.csr_matrix, MT: sp.csr_matrix, b, c, x, y) -> bool:
    """Exact optimality check of a primal/dual pair for the standard-form LP."""
    if any(v < 0 for v in x):
        return False
    if exact.matvec(M, x) != list(b):
        return False
    red = exact.matvec(MT, y)
    if any(r > cj for r, cj in zip(red, c)):
        return False
    return sum(cj * xj for cj, xj in zip(c, x) if xj) == sum(bi * yi for bi, yi in zip(b, y) if bi)


def _round(vals, den=ROUND_DENOMINATOR) -> list[Fraction]:
    out = []
    for v in vals:
        v = float(v)
        r = round(v)
        if abs(v - r) < 1e-11:
            out.append(Fraction(int(r)))
        else:
            out.append(Fraction(v).limit_denominator(den))
    return out


class StandardLP:
    """Standard-form LP with a fixed constraint matrix and a changing right side."""

    def __init__(self, M: sp.spmatrix, c: Sequence, fixed_rhs: dict[int, object] | None = None):
        M = sp.csc_matrix(M, dtype=np.int64)
        self.M = M
        self.Mr = sp.csr_matrix(M)
        self.MT = sp.csr_matrix(M.T)
        self.c = [Fraction(v) for v in c]
        self.m, self.n = M.shape
        self.fixed_rhs = dict(fixed_rhs or {})
        self._highs = None
        self._dual_sign = None

    def _model(self):
        if self._highs is not None:
            return self._highs
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("random_seed", 0)
        lp = highspy.HighsLp()
        lp.num_col_ = self.n
        lp.num_row_ = self.m
        lp.col_cost_ = np.array([float(v) for v in self.c])
        lp.col_lower_ = np.zeros(self.n)
        lp.col_upper_ = np.full(self.n, highspy.kHighsInf)
        lp.row_lower_ = np.zeros(self.m)
        lp.row_upper_ = np.zeros(self.m)
        lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
        lp.a_matrix_.start_ = self.M.indptr.astype(np.int32)
        lp.a_matrix_.index_ = self.M.indices.astype(np.int32)
        lp.a_matrix_.value_ = self.M.data.astype(float)
        h.passModel(lp)
        self._highs = h
        return h

    def full_rhs(self, b_head: Sequence) -> list[Fraction]:
        b = [Fraction(0)] * self.m
        for i, v in enumerate(b_head):
            b[i] = Fraction(v)
        for i, v in self.fixed_rhs.items():
            b[i] = Fraction(v)
        return b

    def solve(self, b_head: Sequence) -> LPSolution:
        b = self.full_rhs(b_head)
        h = self._model()
        bf = np.array([float(v) for v in b])
        h.changeRowsBounds(self.m, np.arange(self.m, dtype=np.int32), bf, bf)
        h.run()
        status = h.getModelStatus()
        if status == highspy.HighsModelStatus.kInfeasible:
            raise InfeasibleError("LP reported infeasible")
        if status in (highspy.HighsModelStatus.kUnbounded, highspy.HighsModelStatus.kUnboundedOrInfeasible):
            raise UnboundedError("LP reported unbounded")
        sol = h.getSolution()
        xf = np.array(sol.col_value)
        yf = np.array(sol.row_dual)
        xf[xf < 0] = 0.0
        x = _round(xf)
        signs = (self._dual_sign,) if self._dual_sign else (1, -1)
        for s in signs:
            y = _round(s * yf)
            if certify(self.Mr, self.MT, b, self.c, x, y):
                self._dual_sign = s
                return LPSolution(x, y, sum(ci * xi for ci, xi in zip(self.c, x)), "rounded")
        res = self._from_support(b, xf, yf)
        if res is not None:
            return res
        log.info("falling back to exact simplex (%d x %d)", self.m, self.n)
        x, y = bland_simplex(self.Mr, b, self.c)
        if not certify(self.Mr, self.MT, b, self.c, x, y):
            raise LPError("exact simplex produced an uncertified pair")
        return LPSolution(x, y, sum(ci * xi for ci, xi in zip(self.c, x)), "simplex")

    def _from_support(self, b, xf, yf) -> LPSolution | None:
        S = [j for j in range(self.n) if xf[j] > SUPPORT_TOL]
        sub = self.M[:, S]
        xs = exact.solve(sub, b) if S else ([] if all(v == 0 for v in b) else None)
        if xs is None or any(v < 0 for v in xs):
            return None
        x = [Fraction(0)] * self.n
        for j, v in zip(S, xs):
            x[j] = v
        for s in ((self._dual_sign,) if self._dual_sign else (1, -1)):
            red = self.M.T @ (s * yf)
            tight = [j for j in range(self.n) if abs(float(self.c[j]) - red[j]) < 1e-7]
            T = sorted(set(tight) | set(S))
            y = exact.solve(self.M[:, T].T, [self.c[j] for j in T]) if T else [Fraction(0)] * self.m
            if y is not None and certify(self.Mr, self.MT, b, self.c, x, y):
                return LPSolution(x, y, sum(ci * xi for ci, xi in zip(self.c, x)), "support")
        return None


def bland_simplex(M: sp.spmatrix, b: Sequence, c: Sequence, max_pivots: int = 100000):
    """Two-phase dense tableau simplex over Fractions with Bland's rule.

    Returns an optimal primal x and dual y.  Raises InfeasibleError or
    UnboundedError.
    """
    A = [[Fraction(int(v)) for v in row] for row in sp.csr_matrix(M).toarray().tolist()]
    b = [Fraction(v) for v in b]
    c = [Fraction(v) for v in c]
    m, n = len(A), (len(A[0]) if A else len(c))
    # flip rows so that b >= 0
    flip = [1] * m
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
            flip[i] = -1
    # tableau columns: n structural + m artificial, last is rhs
    T = [A[i] + [Fraction(int(i == k)) for k in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    N = n + m

    def pivot(r, col):
        pv = T[r][col]
        T[r] = [v / pv for v in T[r]]
        for i in range(m):
            if i != r and T[i][col]:
                f = T[i][col]
                Ti, Tr = T[i], T[r]
                T[i] = [a - f * bb for a, bb in zip(Ti, Tr)]
        basis[r] = col

    def run(cost, allowed):
        for _ in range(max_pivots):
            # reduced costs
            cb = [cost[j] for j in basis]
            enter = None
            for j in range(N):
                if not allowed[j] or j in basis:
                    continue
                rc = cost[j] - sum(cb[i] * T[i][j] for i in range(m) if T[i][j])
                if rc < 0:
                    enter = j
                    break
            if enter is None:
                return
            best = None
            for i in range(m):
                if T[i][enter] > 0:
                    ratio = T[i][-1] / T[i][enter]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                raise UnboundedError("objective unbounded below")
            pivot(best[1], enter)
        raise LPError("pivot limit reached")

    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    run(phase1, [True] * N)
    if sum(T[i][-1] for i in range(m) if basis[i] >= n) != 0:
        raise InfeasibleError("no feasible point")
    # drive artificials out of the basis where possible; drop redundant rows
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is not None:
                pivot(i, col)
    # artificials still basic sit on redundant zero rows and never re-enter
    run(c + [Fraction(0)] * m, [True] * n + [False] * m)
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i][-1]
    # dual from the final basis: y^T B = c_B on the active rows
    rows = [i for i in range(m) if basis[i] < n]
    Bcols = [basis[i] for i in rows]
    y = [Fraction(0)] * m
    if Bcols:
        sub = [[A[r][j] for j in Bcols] for r in range(m)]
        subT = [list(col) for col in zip(*sub)]
        sol = exact.solve(_DenseShim(subT), [c[j] for j in Bcols])
        if sol is not None:
            y = sol
    y = [yi * f for yi, f in zip(y, flip)]
    return x, y


class _DenseShim(list):
    """List-of-rows matrix with a .shape attribute for exact.solve."""

    @property
    def shape(self):
        return (len(self), len(self[0]) if self else 0)
