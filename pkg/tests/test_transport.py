from fractions import Fraction

import numpy as np
import pytest

from cheegerkit.complex import Chain, apply_boundary
from cheegerkit.constructors import hypercube_skeleton
from cheegerkit.errors import ComplexError, OracleViolation
from cheegerkit.transport import (
    HypercubeWord,
    TransportStep,
    certificate_from_steps,
    compose,
    composition_bound,
    composition_law_holds,
    decomposition_round_bound,
    expfill,
    hypercube_contract_word,
    hypercube_decompose,
    hypercube_laplacian_ratio,
    random_closed_word,
    verify_certificate,
    verify_decomposition,
    word_cycle,
)
from cheegerkit.verify import CHECKS, expfill_case


def _run(cid):
    out = CHECKS[cid][1]()
    assert out.ok, out.detail


def test_certificates_verify_independently():
    _run("transport.certificates_verify")


def test_word_contraction_bound():
    _run("transport.word_contraction_bound")


def test_decomposition_ratio():
    _run("transport.decomposition_ratio")


def test_expfill_bound():
    _run("transport.expfill_bound")


def test_composition_bound():
    _run("transport.composition_bound")


def test_backtrack_needs_no_squares():
    w = HypercubeWord.from_coordinates(3, [0, 0])
    res = hypercube_contract_word(w)
    assert res.squares == 0 and res.filling.is_zero()


def test_commutator_needs_one_square():
    X = hypercube_skeleton(3, 2)
    w = HypercubeWord(3, ((0, 1), (1, 1), (0, -1), (1, -1)))
    res = hypercube_contract_word(w, X)
    assert res.squares == 1 and res.filling.norm(1) == 1
    assert apply_boundary(X, res.filling) == word_cycle(X, w.coordinates)
    assert verify_certificate(X, res.certificate) == []


def test_word_validation():
    with pytest.raises(ComplexError):
        HypercubeWord(3, ((0, 1), (0, 1)))
    with pytest.raises(ComplexError):
        HypercubeWord.from_coordinates(3, [0, 1])
    with pytest.raises(ComplexError):
        HypercubeWord.from_coordinates(2, [3, 3])


def test_random_word_is_closed_and_filled():
    rng = np.random.default_rng(0)
    X = hypercube_skeleton(5, 2)
    for _ in range(5):
        w = random_closed_word(5, 20, rng)
        res = hypercube_contract_word(w, X)
        assert apply_boundary(X, res.filling) == word_cycle(X, w.coordinates)
        assert res.squares <= 5 * len(w)


def _step(c, c2, C):
    return TransportStep(c, c2, C, Fraction(C.norm(1), c.norm(1)), c.norm(1))


def test_composition_law_counterexample():
    # a free first move (x = 0) leaves c' = c, so the composite costs y, not xy + x = 0
    X = hypercube_skeleton(3, 2)
    sq = Chain.unit(2, 0)
    c = apply_boundary(X, sq)
    first = certificate_from_steps(1, 1, [_step(c, c, Chain.zero(2))])
    second = certificate_from_steps(1, 1, [_step(c, Chain.zero(1), -sq)])
    assert first.total_cost == 0 and second.total_cost == Fraction(1, 4)
    hypothesis, law = composition_law_holds(first, second)
    assert not hypothesis and not law
    both = compose(first, second)
    assert both.total_cost == composition_bound(first, second) == Fraction(1, 4)
    assert verify_certificate(X, both) == []


def test_compose_rejects_broken_chain():
    X = hypercube_skeleton(3, 2)
    c = apply_boundary(X, Chain.unit(2, 0))
    a = certificate_from_steps(1, 1, [_step(c, Chain.zero(1), -Chain.unit(2, 0))])
    with pytest.raises(ValueError):
        compose(a, a)


def test_expfill_bound_value():
    X, alpha, oracle, x = expfill_case()
    res = expfill(oracle, alpha, Fraction(1, 2), x, tol=Fraction(1, 100), X=X)
    assert res.bound == 2 * x * alpha.norm(1)
    assert res.within_bound
    assert apply_boundary(X, res.filling) == alpha - res.residual


def test_expfill_catches_bad_oracle():
    X, alpha, _, _ = expfill_case()

    def lazy(c):
        return c, Chain.zero(2)

    with pytest.raises(OracleViolation, match="step 0"):
        expfill(lazy, alpha, Fraction(1, 2), 1, X=X)

    def wrong_boundary(c):
        return c.scale(Fraction(1, 2)), Chain.zero(2)

    with pytest.raises(OracleViolation, match="boundary"):
        expfill(wrong_boundary, alpha, Fraction(1, 2), 1, X=X)
    with pytest.raises(ValueError):
        expfill(lazy, alpha, 1, 1)


def test_decomposition_of_zero_has_no_rounds():
    dec = hypercube_decompose(Chain.zero(2), 4)
    assert dec.rounds == [] and dec.cost == 0


def test_decomposition_round_bound():
    assert hypercube_laplacian_ratio(6) == Fraction(1, 2)
    assert decomposition_round_bound(6, Fraction(1, 10**9)) == 30
    assert decomposition_round_bound(6, Fraction(1, 10), 0) == 0


def test_decomposition_reconstructs():
    dec = hypercube_decompose(Chain.unit(2, 3), 4, Fraction(1, 10**4))
    assert verify_decomposition(dec) == []
    assert all(r.ratio <= Fraction(1, 3) for r in dec.rounds)
    with pytest.raises(ComplexError):
        hypercube_decompose(Chain.unit(2, 0), 2)
