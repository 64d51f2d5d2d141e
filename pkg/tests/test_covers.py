from fractions import Fraction

import pytest

from cheegerkit import exact
from cheegerkit.constructors import elementary_two_group, named_complex, simplex_boundary, zn_presentation
from cheegerkit.errors import InfiniteCoverError
from cheegerkit.homology import betti_numbers, diameter, torsdiameter_report, universal_abelian_cover
from cheegerkit.verify import CHECKS


def test_cover_checks():
    out = CHECKS["homology.cover_checks"][1]()
    assert out.ok, out.detail


def test_rp2_cover_is_a_sphere():
    cov = universal_abelian_cover(named_complex("rp2-6"))
    assert cov.total.counts() == (12, 30, 20)
    assert all(cov.check().values())
    assert betti_numbers(cov.total.with_augmentation(False)) == {0: 1, 1: 0, 2: 1}
    assert cov.total.with_augmentation(False).euler_characteristic() == 2


def test_cyclic_cover_diameters():
    for n in (2, 3, 7, 10):
        cov = universal_abelian_cover(zn_presentation(n))
        assert cov.group.order == n
        assert diameter(cov.total) == n // 2


def test_elementary_two_group_ratio():
    for k in (1, 2, 3):
        rep = torsdiameter_report([elementary_two_group(k)])
        assert rep.rows[0].ratio == k + 1
        assert rep.rows[0].h1_order == 2 ** k


def test_trivial_h1_has_ratio_one():
    row = torsdiameter_report([simplex_boundary(3)]).rows[0]
    assert row.h1_order == 1 and row.ratio == 1


def test_report_slope_and_bound():
    rep = torsdiameter_report([zn_presentation(n) for n in (2, 4, 8, 16)])
    assert rep.all_within_bound()
    assert [r.ratio for r in rep.rows] == [Fraction(2), Fraction(3), Fraction(5), Fraction(9)]
    assert rep.slope is not None and 0 < rep.slope < 1


def test_infinite_h1_rejected():
    with pytest.raises(InfiniteCoverError):
        universal_abelian_cover(named_complex("klein-8"))
    with pytest.raises(InfiniteCoverError):
        universal_abelian_cover(named_complex("torus-7"))


def test_deck_transformations_preserve_boundary():
    from cheegerkit.homology import deck_commutes_with_boundary

    cov = universal_abelian_cover(named_complex("lens(3,1)"))
    assert deck_commutes_with_boundary(cov)
    assert exact.betti_numbers(cov.total.chain_complex()).get(1, 0) == 0
