import math

import numpy as np
import pytest

from cheegerkit.complex import INF, build_simplicial
from cheegerkit.constructors import cycle_graph, full_simplex, hypercube_skeleton, named_complex
from cheegerkit.errors import DimensionError
from cheegerkit.spectral import (
    cheeger_l2_down,
    cheeger_l2_up,
    hodge_laplacian,
    rayleigh_oracle,
    spectral_report,
    tilde_h2_l2,
)
from cheegerkit.verify import CHECKS


def _run(cid):
    out = CHECKS[cid][1]()
    assert out.ok, out.detail


def test_gap_is_min_of_split_constants():
    _run("spectral.full_spectrum")


def test_down_equals_shifted_up():
    _run("spectral.down_equals_up_shifted")


def test_zero_count_matches_betti():
    _run("spectral.zero_count_matches_betti")


def test_residuals_small():
    _run("spectral.eigen_residual")


def test_rayleigh_oracle_agrees():
    _run("spectral.rayleigh_oracle")


def test_tilde_sandwich():
    _run("spectral.tilde_sandwich")


def test_triangle_graph_laplacian_with_augmentation():
    C3 = cycle_graph(3)
    assert np.allclose(hodge_laplacian(C3, 0).toarray(), 3 * np.eye(3))
    assert cheeger_l2_down(C3, 0) == pytest.approx(math.sqrt(3))
    # the loop carries homology
    assert cheeger_l2_down(C3, 1) == 0 and cheeger_l2_up(C3, 1) == 0


def test_filled_triangle_constants():
    T = full_simplex(2)
    for v in (cheeger_l2_down(T, 0), cheeger_l2_up(T, 1), cheeger_l2_down(T, 1), cheeger_l2_up(T, 2)):
        assert v == pytest.approx(math.sqrt(3))


def test_single_edge_up_laplacian():
    assert hodge_laplacian(build_simplicial([[0, 1]]), 1).toarray().tolist() == [[2.0]]


def test_cube_square_laplacians():
    L2 = hodge_laplacian(hypercube_skeleton(3, 2), 2).toarray()
    assert np.allclose(np.diag(L2), 4)
    L3 = hodge_laplacian(hypercube_skeleton(3, 3), 2).toarray()
    assert np.allclose(np.diag(L3), 5)
    # the only square sharing no edge with square 0 is its parallel copy, coupled through the cube
    assert sorted(L3[0].tolist()) == [-1.0, 0.0, 0.0, 0.0, 0.0, 5.0]


def test_torus_report():
    rep = spectral_report(named_complex("torus-7"), 1)
    assert rep.zero_count == rep.betti_check == 2
    assert rep.hodge_gap == pytest.approx(rep.gap_exact)
    assert rep.gap_coexact == pytest.approx(7.0)
    data = rep.to_json()
    assert data["betti_check"] == 2 and "eigenvalues" not in data


def test_rayleigh_matches_direct():
    for X in (named_complex("rp2-6"), hypercube_skeleton(3, 2)):
        for i in range(2):
            assert rayleigh_oracle(X, i) == pytest.approx(cheeger_l2_down(X, i), abs=1e-9)


def test_dimension_out_of_range():
    with pytest.raises(DimensionError):
        spectral_report(cycle_graph(4), 5)


def test_tilde_without_two_cells_is_flagged():
    t = tilde_h2_l2(cycle_graph(4))
    assert t.value == INF and t.flag


def test_tilde_on_hypercube_with_three_skeleton():
    t = tilde_h2_l2(hypercube_skeleton(4, 2), hypercube_skeleton(4, 3))
    assert t.h2 == pytest.approx(2.0)
    assert t.inverse == pytest.approx(math.sqrt(1.25))
    assert t.sandwich_ok
    assert 1 / t.h2 <= t.inverse <= 1 / t.h2 + 1
