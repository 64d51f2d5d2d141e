from fractions import Fraction

import numpy as np
import pytest

from cheegerkit.errors import NotRationalHomologySphere
from cheegerkit.surgery import (
    FramedLink,
    meridian_contraction,
    min_dominant_slope,
    parse_q_range,
    presentation_matrix,
    random_link,
    require_rhs,
    surgery_h1,
    torsion_growth_table,
)
from cheegerkit.verify import CHECKS


def _run(cid):
    out = CHECKS[cid][1]()
    assert out.ok, out.detail


def test_det_matches_snf():
    _run("surgery.det_matches_snf")


def test_dominance_nonzero_det():
    _run("surgery.dominance_nonzero_det")


def test_contraction_factor():
    _run("surgery.contraction_factor")


def test_presentation_roundtrip():
    _run("surgery.presentation_roundtrip")


def test_unknot_gives_lens_homology():
    h = surgery_h1(FramedLink.unknot(), 5)
    assert str(h.group) == "Z/5" and h.determinant == 5
    z = surgery_h1(FramedLink.unknot(), 0)
    assert str(z.group) == "Z" and not z.rational_homology_sphere


def test_hopf_table():
    assert surgery_h1(FramedLink.hopf(), 3).group.order == 8
    rows = torsion_growth_table(FramedLink.hopf(), range(2, 11))
    assert [r.order for r in rows] == [q * q - 1 for q in range(2, 11)]
    assert surgery_h1(FramedLink.hopf(), 1).group.betti == 1


def test_min_dominant_slope():
    assert min_dominant_slope(FramedLink.hopf()) == 2
    assert min_dominant_slope(FramedLink(((0, 0), (0, 0)))) == 1
    assert min_dominant_slope(FramedLink(((0, 6), (6, 0)))) == 7
    assert min_dominant_slope(FramedLink(((0, 2, 4), (2, 0, 1), (4, 1, 0)))) == 7


def test_hopf_contraction_step():
    cert = meridian_contraction(FramedLink.hopf(), 4, [1, 0], maxiter=1)
    assert cert.iterates[1] == [0, Fraction(-1, 4)]
    assert cert.ratios == [Fraction(1, 4)] and cert.halving


def test_unlinked_contracts_in_one_step():
    cert = meridian_contraction(FramedLink(((0, 0), (0, 0))), 3, [2, -1])
    assert cert.iterates[1] == [0, 0] and cert.converged and len(cert.ratios) == 1


def test_contraction_warns_without_dominance():
    cert = meridian_contraction(FramedLink.hopf(), 1, [1, 0], maxiter=3)
    assert not cert.contracting and cert.notes
    with pytest.raises(ValueError):
        meridian_contraction(FramedLink.hopf(), 0, [1, 0])
    with pytest.raises(ValueError):
        meridian_contraction(FramedLink.hopf(), 2, [1])


def test_link_parsing():
    assert FramedLink.from_text("0,1\n1,0") == FramedLink(((0, 1), (1, 0)))
    assert FramedLink.from_text("[[2]]").Lk == ((2,),)
    L = FramedLink.from_text('{"Lk": [[0, 1], [1, 0]], "names": ["a", "b"]}')
    assert L.names == ("a", "b")
    with pytest.raises(ValueError):
        FramedLink(((0, 1), (2, 0)))
    with pytest.raises(ValueError):
        FramedLink(((0, 1),))


def test_require_rhs():
    with pytest.raises(NotRationalHomologySphere):
        require_rhs(FramedLink.unknot(), 0)
    assert require_rhs(FramedLink.unknot(), 2).determinant == 2


def test_q_range_parsing():
    assert list(parse_q_range("2:5")) == [2, 3, 4, 5]
    assert list(parse_q_range("7")) == [7]
    with pytest.raises(ValueError):
        parse_q_range("5:2")


def test_random_link_symmetric():
    L = random_link(4, np.random.default_rng(0))
    M = np.array(L.Lk)
    assert (M == M.T).all()
    assert presentation_matrix(L, 2)[0][0] == L.Lk[0][0] + 2
