from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp

from cheegerkit import exact
from cheegerkit.lp import InfeasibleError, StandardLP, UnboundedError, bland_simplex, certify
from cheegerkit.snf import check_snf, int_det, smith_normal_form


def test_rank_and_nullspace():
    M = sp.csc_matrix(np.array([[1, 2, 3], [2, 4, 6], [1, 0, 1]]))
    assert exact.rank(M) == 2
    ker = exact.nullspace(M)
    assert len(ker) == 1
    assert exact.matvec(M, ker[0]) == [0, 0, 0]
    assert exact.primitive([Fraction(1, 2), Fraction(-1, 3)]) == (3, -2)


def test_solve_inconsistent():
    M = sp.csc_matrix(np.array([[1, 1], [1, 1]]))
    assert exact.solve(M, [1, 2]) is None
    x = exact.solve(M, [2, 2])
    assert exact.matvec(M, x) == [2, 2]


def test_snf_examples():
    res = smith_normal_form([[2, 4], [6, 8]])
    assert res.diagonal == [2, 4]
    assert check_snf([[2, 4], [6, 8]], res)
    assert abs(int_det([[2, 4], [6, 8]])) == 8
    assert smith_normal_form([[2]]).D == [[2]]
    I = [[int(i == j) for j in range(4)] for i in range(4)]
    r = smith_normal_form(I)
    assert r.D == I and r.U == I and r.V == I


def test_snf_random_rectangular():
    rng = np.random.default_rng(11)
    for _ in range(30):
        m, n = rng.integers(1, 9, size=2)
        M = rng.integers(-9, 10, size=(m, n)).tolist()
        res = smith_normal_form(M)
        assert check_snf(M, res)
        d = res.invariant_factors
        assert all(b % a == 0 for a, b in zip(d, d[1:]))


def test_snf_zero_and_empty():
    assert smith_normal_form([[0, 0], [0, 0]]).invariant_factors == []
    assert int_det([]) == 1


def test_lp_certified_route():
    # min x1 + x2 + x3 s.t. x1 - x2 = 1, x2 + x3 = 2
    M = sp.csc_matrix(np.array([[1, -1, 0], [0, 1, 1]]))
    lp = StandardLP(M, [1, 1, 1])
    sol = lp.solve([1, 2])
    assert sol.objective == 3
    assert certify(sp.csr_matrix(M), sp.csr_matrix(M.T), [1, 2], [1, 1, 1], sol.x, sol.y)


def test_bland_simplex_matches():
    M = sp.csc_matrix(np.array([[1, 1, 1, 0], [1, -1, 0, 1]]))
    c = [Fraction(-1), Fraction(-2), 0, 0]
    x, y = bland_simplex(M, [4, 2], c)
    assert sum(ci * xi for ci, xi in zip(c, x)) == -8
    assert certify(sp.csr_matrix(M), sp.csr_matrix(M.T), [4, 2], c, x, y)


def test_bland_simplex_infeasible_and_unbounded():
    M = sp.csc_matrix(np.array([[1, 1]]))
    with pytest.raises(InfeasibleError):
        bland_simplex(M, [-1], [1, 1])
    M = sp.csc_matrix(np.array([[1, -1]]))
    with pytest.raises(UnboundedError):
        bland_simplex(M, [1], [-1, 0])


def test_lp_agrees_with_exact_simplex_on_random_fillings():
    rng = np.random.default_rng(5)
    for _ in range(10):
        A = rng.integers(-1, 2, size=(4, 6))
        M = sp.csc_matrix(np.hstack([A, -A]))
        x0 = rng.integers(0, 3, size=12)
        b = [int(v) for v in M @ x0]
        sol = StandardLP(M, [1] * 12).solve(b)
        xs, _ = bland_simplex(M, b, [1] * 12)
        assert sol.objective == sum(xs)
