import itertools
from fractions import Fraction

import pytest

from cheegerkit import exact
from cheegerkit.complex import INF, Chain, apply_boundary, apply_coboundary, build_simplicial
from cheegerkit.constructors import (
    cycle_graph,
    full_simplex,
    graph_complex,
    hypercube_skeleton,
    named_complex,
    path_graph,
    simplex_boundary,
)
from cheegerkit.errors import EnumerationCapError
from cheegerkit.filling import (
    cheeger,
    check_witness,
    elementary_vectors,
    min_cofilling,
    min_filling,
    tilde_h2,
    tilde_h2_decompose,
)
from cheegerkit.verify import CHECKS


def _run(cid):
    out = CHECKS[cid][1]()
    assert out.ok, out.detail


def test_witnesses_verify():
    _run("filling.witnesses_verify")


def test_zero_iff_homology():
    _run("filling.zero_iff_homology")


def test_norm_comparison_constants():
    _run("filling.norm_comparison_constants")


def test_l2_matches_spectral():
    _run("filling.l2_matches_spectral")


def test_transpose_duality():
    _run("filling.transpose_duality")


def test_reorder_stable():
    _run("filling.reorder_stable")


def test_h0_is_two_over_diameter():
    _run("filling.h0_two_over_diameter")


# values frozen from the brute and lp-enum oracles, which agree on all of them
K4 = graph_complex(4, list(itertools.combinations(range(4), 2)), name="K4")
FROZEN = [
    # complex, i, coboundary, (p=1, p=inf)
    (simplex_boundary(3), 0, False, ("2", "2")),
    (simplex_boundary(3), 1, False, ("2", "2")),
    (simplex_boundary(3), 1, True, ("2", "2")),
    (simplex_boundary(3), 2, False, ("0", "0")),
    (simplex_boundary(3), 2, True, ("2", "2")),
    (named_complex("rp2-6"), 0, False, ("2", "3")),
    (named_complex("rp2-6"), 1, False, ("3/5", "2/5")),
    (named_complex("rp2-6"), 1, True, ("3", "2")),
    (named_complex("rp2-6"), 2, True, ("2/5", "3/5")),
    (hypercube_skeleton(3, 2), 0, False, ("2/3", "1")),
    (hypercube_skeleton(3, 2), 1, False, ("2", "1")),
    (hypercube_skeleton(3, 2), 1, True, ("1", "2/3")),
    (hypercube_skeleton(3, 2), 2, True, ("1", "2")),
    (K4, 0, False, ("2", "2")),
    (K4, 1, True, ("2", "2")),
]


@pytest.mark.parametrize("X,i,cob,want", FROZEN, ids=lambda v: getattr(v, "name", None) or str(v))
def test_frozen_values(X, i, cob, want):
    variant = "coexact" if cob else "plain"
    got = [cheeger(X, i, p, variant=variant, coboundary=cob, method="lp-enum" if p == INF else "brute").value for p in (1, INF)]
    assert [str(v) for v in got] == list(want)


def test_dual_norms_swap_between_adjacent_dimensions():
    # with H_i = H_{i+1} = 0 over R, h_i in L^1 equals h^{i+1} in L^inf and vice versa
    for X, i in [(named_complex("rp2-6"), 1), (hypercube_skeleton(3, 2), 0), (hypercube_skeleton(3, 2), 1), (simplex_boundary(3), 1)]:
        for p, q in ((1, INF), (INF, 1)):
            a = cheeger(X, i, p, method="lp-enum" if p == INF else "brute").value
            b = cheeger(X, i + 1, q, variant="coexact", coboundary=True, method="lp-enum" if q == INF else "brute").value
            assert a == b


def test_brute_and_lp_enum_agree():
    # rp2 at p=1 exceeds the lp-enum budget; its values are frozen above instead
    for X in (hypercube_skeleton(3, 2), simplex_boundary(3)):
        for i in range(X.dims + 1):
            for cob in (False, True):
                if cob and i == 0:
                    continue
                var = "coexact" if cob else "plain"
                a = cheeger(X, i, 1, variant=var, coboundary=cob, method="brute")
                b = cheeger(X, i, 1, variant=var, coboundary=cob, method="lp-enum")
                assert a.value == b.value


def test_triangle_filled_by_itself():
    X = full_simplex(2)
    alpha = apply_boundary(X, Chain.unit(2, 0))
    fr = min_filling(X, alpha, 1)
    assert fr.value == 1 and fr.witness == Chain.unit(2, 0)
    z = min_filling(X, Chain.zero(1), 1)
    assert z.value == 0 and z.witness.is_zero()


def test_tetrahedron_face_filled_by_itself():
    X = simplex_boundary(3)
    alpha = apply_boundary(X, Chain.unit(2, 0))
    fr = min_filling(X, alpha, 1)
    assert fr.value == 1
    assert apply_boundary(X, fr.witness) == alpha


def test_non_boundary_has_no_filling():
    X = cycle_graph(5)
    z = exact.nullspace(X.boundary(1))[0]
    fr = min_filling(X, Chain(1, dict(enumerate(z))), 1)
    assert not fr.feasible and fr.value == INF


def test_cofilling():
    X = cycle_graph(4)
    alpha = apply_coboundary(X, Chain(0, {0: 1, 2: -1}))
    fr = min_cofilling(X, alpha, 1)
    assert fr.feasible
    assert apply_coboundary(X, fr.witness) == alpha
    # the indicator of one edge on a circle is never exact
    assert not min_cofilling(X, Chain.unit(1, 0), 1).feasible


def test_single_edge_h0():
    assert cheeger(path_graph(2), 0, 1).value == 2


def test_circle_has_zero_h1():
    for n in (3, 5, 8):
        v = cheeger(cycle_graph(n), 1, 1)
        assert v.value == 0 and v.method == "exact-rank"


def test_tetrahedron_h1_elementary_cycles():
    # triangles have ratio 3 and squares ratio 2; the minimum wins
    v = cheeger(simplex_boundary(3), 1, 1)
    assert v.value == 2 and v.witness_cycle.norm(1) == 4
    assert check_witness(simplex_boundary(3), v)


def test_empty_infimum_is_infinite():
    v = cheeger(named_complex("rp2-6"), 2, 1)
    assert v.value == INF and v.inverse == 0


def test_cap_and_heuristic():
    X = hypercube_skeleton(4, 2)
    with pytest.raises(EnumerationCapError, match="heuristic"):
        cheeger(X, 1, 1, cap=10)
    exact_v = cheeger(hypercube_skeleton(3, 2), 1, 1).value
    h = cheeger(hypercube_skeleton(3, 2), 1, 1, method="heuristic", samples=50, seed=1)
    assert h.bound == "upper" and h.value >= exact_v


def test_elementary_vectors_of_triangle_boundary():
    # the image of the boundary of one triangle: a single circuit up to sign
    basis = [[1, -1, 1]]
    vs = elementary_vectors(basis, [], 3)
    assert len(vs) == 1 and sorted(map(abs, vs[0])) == [1, 1, 1]


def test_tilde_decomposition_cases():
    X = hypercube_skeleton(4, 2)
    beta, gamma, cost = tilde_h2_decompose(X, Chain.unit(2, 0), 1)
    assert cost == Fraction(35, 12)
    assert cost <= 10 * 4 ** 2
    assert apply_boundary(X, gamma).is_zero()
    # a closed 2-chain splits with beta = 0
    S = simplex_boundary(3)
    alpha = Chain(2, dict(enumerate(exact.primitive(exact.nullspace(S.boundary(2))[0]))))
    beta, gamma, cost = tilde_h2_decompose(S, alpha, 1)
    assert beta.is_zero() and gamma == alpha and cost == alpha.norm(1)


def test_tilde_l2_coexact_input_has_no_closed_part():
    X = hypercube_skeleton(3, 2)
    alpha = apply_coboundary(X, Chain(1, {0: 1, 5: -2}))
    beta, gamma, cost = tilde_h2_decompose(X, alpha, 2)
    assert gamma.is_zero()


def test_tilde_without_two_cells():
    v = tilde_h2(cycle_graph(4), 1)
    assert v.value == INF


def test_tilde_l1_value():
    v = tilde_h2(build_simplicial([[0, 1, 2]]), 1)
    assert v.value > 0 and v.inverse >= 1
