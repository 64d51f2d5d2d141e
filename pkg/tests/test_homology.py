from fractions import Fraction

import pytest

from cheegerkit.constructors import (
    cycle_graph,
    elementary_two_group,
    hypercube_skeleton,
    named_complex,
    simplex_boundary,
    zn_presentation,
)
from cheegerkit.errors import ComplexError, DimensionError
from cheegerkit.homology import (
    HomologyGroup,
    betti_numbers,
    chain_contraction_probe,
    diameter,
    fundamental_class,
    graph_diameter,
    homology,
    homology_all,
)
from cheegerkit.verify import CHECKS


def _run(cid):
    out = CHECKS[cid][1]()
    assert out.ok, out.detail


def test_snf_random_matrices():
    _run("homology.snf_random")


def test_torsion_matches_cover_group():
    _run("homology.torsion_consistency")


def test_fundamental_class():
    _run("homology.fundamental_class")


def test_probe_on_three_sphere():
    _run("homology.contraction_probe")


def _groups(X):
    return {i: str(g) for i, g in homology_all(X).items()}


def test_circle():
    assert str(homology(cycle_graph(5), 1)) == "Z"


@pytest.mark.parametrize(
    "name,want",
    [
        ("rp2-6", {0: "0", 1: "Z/2", 2: "0"}),
        ("torus-7", {0: "0", 1: "Z^2", 2: "Z"}),
        ("klein-8", {0: "0", 1: "Z + Z/2", 2: "0"}),
        ("moore-z2", {0: "0", 1: "0", 2: "Z/2", 3: "0"}),
        ("sphere-3", {0: "0", 1: "0", 2: "0", 3: "Z"}),
        ("lens(3,1)", {0: "0", 1: "Z/3", 2: "0", 3: "Z"}),
        ("lens(5,2)", {0: "0", 1: "Z/5", 2: "0", 3: "Z"}),
    ],
)
def test_named_homology(name, want):
    assert _groups(named_complex(name)) == want


def test_euler_characteristics():
    assert named_complex("torus-7").euler_characteristic() == 0
    assert named_complex("rp2-6").euler_characteristic() == 1
    assert named_complex("klein-8").euler_characteristic() == 0


def test_hypercube_second_betti():
    assert homology(hypercube_skeleton(4, 2), 2) == HomologyGroup(7)


def test_cyclic_presentations():
    for n in (2, 5, 12, 64):
        assert homology(zn_presentation(n), 1).torsion == (n,)
    assert homology(zn_presentation(1), 1).is_trivial()


def test_elementary_two_groups():
    assert homology(elementary_two_group(2), 1).torsion == (2, 2)
    assert str(homology(elementary_two_group(2), 2)) == "Z"
    assert homology(elementary_two_group(3), 2).betti == 3


def test_group_helpers():
    g = HomologyGroup(0, (2, 6))
    assert g.order == 12 and g.exponent == 6 and str(g) == "Z/2 + Z/6"
    assert HomologyGroup(1).order is None
    assert HomologyGroup(0).is_trivial() and str(HomologyGroup(0)) == "0"
    assert g.to_json() == {"betti": 0, "torsion": [2, 6], "group": "Z/2 + Z/6"}


def test_unaugmented_betti():
    X = named_complex("torus-7", augmented=False)
    b = betti_numbers(X)
    assert (b[0], b[1], b[2]) == (1, 2, 1)


def test_diameters():
    assert diameter(hypercube_skeleton(5, 2)) == 5
    assert diameter(cycle_graph(9)) == 4
    assert graph_diameter([[1], [0, 2], [1]]) == 2


def test_fundamental_class_errors():
    with pytest.raises(DimensionError):
        fundamental_class(named_complex("rp2-6"))


def test_probe_on_lens_spaces():
    rep = chain_contraction_probe(named_complex("lens(3,1)"))
    assert rep.exponent == 3 and rep.telescoping_ok
    assert rep.denominators == {2: 3, 3: 3}
    assert rep.max_norms == {1: 1, 2: Fraction(13, 3), 3: Fraction(19, 3)}
    rep = chain_contraction_probe(named_complex("lens(5,2)"))
    assert rep.exponent == 5 and rep.telescoping_ok
    assert rep.denominators == {2: 5, 3: 5}


def test_probe_on_simplex_boundary():
    rep = chain_contraction_probe(simplex_boundary(4))
    assert rep.multiples == [0, 0, 0, 0, 1] and rep.carriers == [4]
    assert rep.exponent == 1 and rep.notes


def test_probe_rejects_non_spheres():
    with pytest.raises((ComplexError, DimensionError)):
        chain_contraction_probe(named_complex("moore-z2"))
    with pytest.raises(DimensionError):
        chain_contraction_probe(named_complex("torus-7"))
