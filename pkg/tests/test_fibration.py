from fractions import Fraction

from cheegerkit.complex import INF
from cheegerkit.constructors import build_fibration, cycle_graph, identity_fibration
from cheegerkit.fibration import leray_serre_check
from cheegerkit.verify import CHECKS


def test_leray_serre_suite():
    out = CHECKS["fibration.leray_serre"][1]()
    assert out.ok, out.detail


def test_prism_values():
    rep = leray_serre_check(build_fibration("prism"), 1)
    assert (rep.D, rep.C) == (3, 2)
    assert rep.inv_h0_E == 1 and rep.rhs0 == Fraction(27, 2) and rep.provable0 == Fraction(5, 2)
    assert rep.inv_h1_E == 1 and rep.rhs1 == 6 and rep.provable1 == 5
    assert rep.ok and rep.witnesses


def test_identity_has_trivial_fibers():
    rep = leray_serre_check(identity_fibration(cycle_graph(5)), 1)
    assert rep.C == 1 and rep.inv_h0_fiber_max == 0 and rep.inv_h1_fiber_max == 0
    assert rep.provable0 == rep.inv_h0_B
    assert rep.ok


def test_point_base():
    rep = leray_serre_check(build_fibration("point", n=4), 1)
    assert rep.inv_h0_B == 0 and rep.ok
    # with a point base everything comes from the single fiber
    assert rep.provable0 == rep.inv_h0_fiber_max


def test_witnesses_within_provable_bound():
    rep = leray_serre_check(build_fibration("product", seed=0, nb=4, nf=2), INF)
    assert all(w.valid and w.within_provable and w.within_displayed for w in rep.witnesses)
    assert {w.kind for w in rep.witnesses} == {"filling", "cofilling"}
    data = rep.to_json()
    assert data["ok"] and data["p"] == "inf"


def test_l2_fibration_uses_exact_witnesses_only():
    # extremal L2 cycles are float eigenvectors; the integral witnesses still verify exactly
    for kind in ("prism", "identity"):
        rep = leray_serre_check(build_fibration(kind), 2)
        assert rep.ok and len(rep.witnesses) == 8
