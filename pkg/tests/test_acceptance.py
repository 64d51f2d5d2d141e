"""Acceptance criteria, one test each, with their tolerances and runtime limits.

Every test prints a single "criterion N: PASS/FAIL" line; the collected
lines are repeated in the pytest terminal summary.
"""

import functools
import time
from fractions import Fraction

import numpy as np
import pytest

from cheegerkit import exact, spectral
from cheegerkit.complex import INF, Chain, apply_boundary
from cheegerkit.constructors import (
    build_fibration,
    hypercube_skeleton,
    named_complex,
    simplex_boundary,
    zn_presentation,
)
from cheegerkit.fibration import leray_serre_check
from cheegerkit.filling import cheeger
from cheegerkit.homology import (
    chain_contraction_probe,
    diameter,
    homology,
    torsdiameter_report,
    universal_abelian_cover,
)
from cheegerkit.snf import check_snf, smith_normal_form
from cheegerkit.surgery import FramedLink, meridian_contraction, min_dominant_slope, surgery_h1
from cheegerkit.transport import (
    hypercube_contract_word,
    hypercube_decompose,
    hypercube_laplacian_ratio,
    random_closed_word,
    verify_decomposition,
    word_cycle,
)
from cheegerkit.verify import (
    cover_fixtures,
    fibration_cases,
    fixture_complexes,
    h0_graph,
    random_two_complexes,
    sandwich_cases,
    small_complexes,
    surgery_links,
)

RESULTS: dict[int, str] = {}
TOL = 1e-9


def criterion(n: int, limit: float | None = None):
    """Time the test, record a pass/fail line, and enforce the runtime limit."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            t = time.perf_counter()
            ok = False
            try:
                fn(*args, **kwargs)
                ok = True
            finally:
                dt = time.perf_counter() - t
                slow = limit is not None and dt >= limit
                status = "PASS" if ok and not slow else "FAIL"
                extra = f", limit {limit:g} s" if limit is not None else ""
                line = f"criterion {n}: {status} ({dt:.2f} s{extra})"
                RESULTS[n] = line
                print(line)
            assert not slow, f"criterion {n} took {dt:.1f} s, limit {limit} s"

        return wrapper

    return deco


def _zero_dims(X):
    bet = exact.betti_numbers(X.chain_complex())
    return [i for i in range(X.dims + 1) if bet.get(i, 0) == 0]


def _close(a, b, tol):
    return a == b == INF or abs(a - b) <= tol


@criterion(1, 10)
def test_c01_boundary_squared_zero():
    outs = [hypercube_skeleton(d, min(d, 3)) for d in range(1, 9)]
    outs += [simplex_boundary(n) for n in range(1, 6)]
    outs += fixture_complexes()
    from cheegerkit.constructors import random_complex

    outs += [random_complex(7, 2, 0.5, s) for s in range(25)] + [random_complex(6, 3, 0.4, s) for s in range(25)]
    assert len(outs) >= 50 + 13
    for X in outs:
        for i in range(1, X.dims + 1):
            prod = (X.boundary(i) @ X.boundary(i + 1)) if i + 1 <= X.dims else None
            if prod is not None:
                assert prod.count_nonzero() == 0, (X.name, i)
        # augmentation composed with the first boundary
        assert (X.boundary(0) @ X.boundary(1)).count_nonzero() == 0


@criterion(2, 60)
def test_c02_hodge_gap_and_rayleigh():
    pairs = 0
    for X in random_two_complexes(20):
        for i in _zero_dims(X):
            rep = spectral.spectral_report(X, i)
            m = min(spectral.cheeger_l2_down(X, i), spectral.cheeger_l2_up(X, i))
            if not (m == INF and rep.hodge_gap == INF):
                assert abs(rep.hodge_gap - m * m) <= TOL * max(rep.norm, 1.0), (X.name, i)
            assert _close(spectral.cheeger_l2_down(X, i), spectral.rayleigh_oracle(X, i), TOL), (X.name, i)
            pairs += 1
    assert pairs >= 20


@criterion(3)
def test_c03_down_equals_shifted_up():
    pairs = 0
    for X in random_two_complexes(20) + small_complexes():
        dims = _zero_dims(X)
        for i in dims:
            if i + 1 in dims:
                assert _close(spectral.cheeger_l2_down(X, i), spectral.cheeger_l2_up(X, i + 1), TOL), (X.name, i)
                pairs += 1
    assert pairs > 0


@criterion(4)
def test_c04_tilde_sandwich():
    for X, H in sandwich_cases():
        t = spectral.tilde_h2_l2(X, H)
        assert t.flag is None, (X.name, t.flag)
        assert 1 / t.h2 - TOL <= t.inverse <= 1 / t.h2 + 1 + TOL, X.name


@criterion(5, 60)
def test_c05_h0_two_over_diameter():
    for s in range(20):
        G = h0_graph(s)
        assert G.size(0) <= 40
        v = cheeger(G, 0, 1, method="brute", cap=40)
        assert v.value == Fraction(2, diameter(G)), G.name


@criterion(6, 30)
def test_c06_hypercube_word_contraction():
    rng = np.random.default_rng(2024)
    for deg in range(3, 8):
        X = hypercube_skeleton(deg, 2)
        for _ in range(20):
            w = random_closed_word(deg, 2 * int(rng.integers(1, 21)), rng)
            assert len(w) <= 40
            res = hypercube_contract_word(w, X)
            assert apply_boundary(X, res.filling) == word_cycle(X, w.coordinates)
            assert res.filling.norm(1) <= 2 * deg * len(w)


@criterion(7, 60)
def test_c07_hypercube_decomposition():
    rng = np.random.default_rng(7)
    tol = Fraction(1, 10**9)
    for deg in range(3, 8):
        X = hypercube_skeleton(deg, 3)
        n2 = X.size(2)
        chains = [Chain.unit(2, k) for k in (0, n2 // 2, n2 - 1)]
        for _ in range(10):
            cells = rng.choice(n2, size=min(6, n2), replace=False)
            chains.append(Chain(2, {int(k): int(v) for k, v in zip(cells, rng.integers(-3, 4, size=len(cells))) if v}))
        bound = hypercube_laplacian_ratio(deg)
        for c in chains:
            dec = hypercube_decompose(c, deg, tol, X)
            assert all(r.ratio <= bound for r in dec.rounds)
            assert verify_decomposition(dec) == []
            assert dec.residual.norm(1) < tol or c.is_zero()
            assert dec.cost <= 10 * deg * deg * c.norm(1)


@criterion(8, 30)
def test_c08_snf_and_torsion():
    rng = np.random.default_rng(8)
    for _ in range(200):
        m, n = (int(v) for v in rng.integers(1, 13, size=2))
        M = rng.integers(-9, 10, size=(m, n)).tolist()
        assert check_snf(M, smith_normal_form(M)), M
    assert str(homology(named_complex("rp2-6"), 1)) == "Z/2"
    for n in range(1, 65):
        assert homology(zn_presentation(n), 1).torsion == ((n,) if n > 1 else ())
    assert homology(hypercube_skeleton(4, 2), 2).betti == 7


@criterion(9, 30)
def test_c09_surgery():
    rng = np.random.default_rng(9)
    for L in surgery_links(50):
        assert L.n <= 6 and all(-3 <= v <= 3 for row in L.Lk for v in row)
        q0 = min_dominant_slope(L)
        for q in range(q0, q0 + 11):
            h = surgery_h1(L, q)
            assert h.determinant != 0 and h.group.order == abs(h.determinant)
        s = L.max_row_sum()
        if s:
            a = [int(v) for v in rng.integers(-3, 4, size=L.n)]
            for q in (q0, s + 1, 2 * s):
                cert = meridian_contraction(L, q, a, maxiter=20)
                assert all(r <= Fraction(s, q) for r in cert.ratios)
            assert meridian_contraction(L, 2 * s, a, maxiter=20).max_ratio <= Fraction(1, 2)
    for q in range(1, 20):
        assert surgery_h1(FramedLink.unknot(), q).group.torsion == ((q,) if q > 1 else ())
        assert surgery_h1(FramedLink.hopf(), q).determinant == q * q - 1
        if q > 1:
            assert surgery_h1(FramedLink.hopf(), q).group.order == q * q - 1


@criterion(10, 60)
def test_c10_covers():
    for X in cover_fixtures():
        cov = universal_abelian_cover(X)
        assert all(cov.check().values()), (X.name, cov.check())
    cov = universal_abelian_cover(named_complex("rp2-6"))
    bet = exact.betti_numbers(cov.total.with_augmentation(False).chain_complex())
    assert (bet[0], bet[1], bet[2]) == (1, 0, 1)
    for n in range(2, 16):
        assert diameter(universal_abelian_cover(zn_presentation(n)).total) == n // 2
    rep = torsdiameter_report(cover_fixtures())
    assert rep.all_within_bound()
    table = rep.to_json()
    assert len(table["rows"]) == len(cover_fixtures())


@criterion(11, 60)
def test_c11_leray_serre():
    cases = fibration_cases()
    assert len(cases) == 7
    for F in cases:
        rep = leray_serre_check(F, 1, method="brute")
        assert rep.first_holds and rep.second_holds, rep.to_json()
        assert rep.witnesses and rep.witnesses_valid, rep.to_json()


@criterion(12, 120)
def test_c12_contraction_probe():
    rep = chain_contraction_probe(simplex_boundary(4))
    assert rep.telescoping_ok
    assert any(k != 0 for k in rep.multiples)
    assert rep.fundamental_class.norm(1) == 5


@criterion(13)
def test_c13_cross_method_agreement():
    checked = 0
    for X in small_complexes() + [c for c in random_two_complexes(20) if sum(c.counts()) <= 30]:
        if sum(X.counts()) > 30:
            continue
        for i in range(X.dims + 1):
            a = float(cheeger(X, i, 2, method="brute", cap=30).value)
            assert _close(a, spectral.cheeger_l2_down(X, i), 1e-7), (X.name, i)
            checked += 1
    assert checked >= 10
    rng = np.random.default_rng(13)
    for X in small_complexes() + [named_complex("rp2-6")]:
        perms = {i: [int(v) for v in rng.permutation(X.size(i))] for i in range(X.dims + 1)}
        Y = X.permuted(perms)
        for i in range(X.dims + 1):
            assert cheeger(X, i, 1).value == cheeger(Y, i, 1).value, (X.name, i)
