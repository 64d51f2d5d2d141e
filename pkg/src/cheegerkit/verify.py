"""Batch re-verification of every module invariant.

Each check is a function returning an :class:`Outcome`.  ``MANIFEST`` maps
every invariant statement to the check that runs it and to the pytest node
that freezes it; :func:`manifest_problems` reports gaps in that mapping.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import exact, spectral
from .complex import EXACT, INF, Chain, apply_boundary, complex_to_json, norm_of
from .constructors import (
    build_fibration,
    cycle_graph,
    full_simplex,
    graph_complex,
    hypercube_cell_count,
    hypercube_skeleton,
    named_complex,
    path_graph,
    random_complex,
    random_connected_graph,
    simplex_boundary,
)
from .errors import InvariantViolation
from .filling import cheeger, check_witness, min_filling
from .homology import (
    chain_contraction_probe,
    diameter,
    fundamental_class,
    homology,
    torsdiameter_report,
    universal_abelian_cover,
)
from .snf import check_snf, int_det, smith_normal_form
from .surgery import (
    FramedLink,
    meridian_contraction,
    min_dominant_slope,
    presentation_matrix,
    random_link,
    surgery_h1,
)
from .transport import (
    certificate_from_steps,
    compose,
    composition_bound,
    decomposition_round_bound,
    expfill,
    hypercube_contract_word,
    hypercube_decompose,
    hypercube_laplacian_ratio,
    random_closed_word,
    verify_certificate,
    verify_decomposition,
    verify_word_contraction,
)

SUITES = ("complex", "spectral", "filling", "transport", "homology", "constructors", "surgery", "fibration", "cli")
SPECTRAL_TOL = 1e-9
CROSS_TOL = 1e-7


@dataclass
class Outcome:
    ok: bool
    detail: str = ""
    counterexample: dict | None = None


@dataclass
class CheckResult:
    id: str
    suite: str
    ok: bool
    detail: str
    counterexample: dict | None
    seconds: float

    def to_json(self) -> dict:
        out = {"id": self.id, "suite": self.suite, "ok": self.ok, "detail": self.detail,
               "seconds": round(self.seconds, 3)}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass(frozen=True)
class Invariant:
    module: str
    statement: str
    check: str
    test: str


CHECKS: dict[str, tuple[str, Callable[[], Outcome]]] = {}


def check(check_id: str, suite: str):
    def deco(fn):
        CHECKS[check_id] = (suite, fn)
        return fn

    return deco


# -- shared fixtures ---------------------------------------------------------------


def fixture_complexes():
    """Every named fixture at a representative parameter."""
    names = ["rp2-6", "torus-7", "klein-8", "moore-z2", "sphere-3", "zn-presentation(3)", "z2^2", "lens(3,1)", "lens(5,2)"]
    return [named_complex(n) for n in names]


def constructor_outputs():
    out = [hypercube_skeleton(d, min(d, 3)) for d in range(1, 9)]
    out += [simplex_boundary(n) for n in range(1, 6)]
    out += fixture_complexes()
    out += [random_complex(7, 2, 0.5, s) for s in range(25)]
    out += [random_complex(6, 3, 0.4, s) for s in range(25)]
    return out


def random_two_complexes(count: int = 20):
    return [random_complex(7, 2, 0.5, s) for s in range(count)]


def small_complexes():
    """Complexes with at most 30 cells in the dimensions that matter."""
    return [
        simplex_boundary(2), simplex_boundary(3), cycle_graph(5), path_graph(4),
        graph_complex(4, list(itertools.combinations(range(4), 2)), name="K4"),
        full_simplex(3), hypercube_skeleton(3, 2),
    ]


def _dump(X) -> dict:
    return complex_to_json(X)


# -- complex-core ------------------------------------------------------------------


@check("complex.boundary_squared_zero", "complex")
def _bb_zero() -> Outcome:
    outputs = constructor_outputs()
    for X in outputs:
        for i in range(1, X.dims + 1):
            m = (X.boundary(i - 1) @ X.boundary(i)).tocsc()
            m.eliminate_zeros()
            if m.nnz:
                return Outcome(False, f"{X.name}: boundary squared nonzero in dim {i}", _dump(X))
    return Outcome(True, f"{len(outputs)} complexes")


@check("complex.coboundary_is_transpose", "complex")
def _cob_transpose() -> Outcome:
    for X in fixture_complexes():
        for i in range(X.dims):
            d = X.coboundary_matrix(i)
            b = X.boundary_matrix(i + 1)
            if (d != b.T).nnz:
                return Outcome(False, f"{X.name}: coboundary {i} is not the transposed boundary", _dump(X))
    return Outcome(True)


@check("complex.norm_comparison", "complex")
def _norm_cmp() -> Outcome:
    rng = np.random.default_rng(0)
    ps = (1, 2, INF)
    for _ in range(200):
        N = int(rng.integers(1, 40))
        vals = [Fraction(int(v), int(rng.integers(1, 5))) for v in rng.integers(-9, 10, size=N)]
        for p, q in itertools.combinations(ps, 2):
            np_, nq = float(norm_of(vals, p)), float(norm_of(vals, q))
            e = 1 / p - (0 if q == INF else 1 / q)
            if not (nq <= np_ * (1 + 1e-12) and np_ <= N ** e * nq * (1 + 1e-12)):
                return Outcome(False, f"norm comparison fails for p={p}, q={q}", {"chain": [str(v) for v in vals]})
    return Outcome(True, "200 random chains")


@check("complex.deterministic_order", "complex")
def _deterministic() -> Outcome:
    for build in (lambda: named_complex("rp2-6"), lambda: random_complex(7, 2, 0.5, 3), lambda: hypercube_skeleton(4, 3)):
        a, b = build(), build()
        if complex_to_json(a) != complex_to_json(b):
            return Outcome(False, f"{a.name}: two builds differ")
    return Outcome(True)


# -- spectral ------------------------------------------------------------------


def _zero_dims(X):
    bet = exact.betti_numbers(X.chain_complex())
    return [i for i in range(0, X.dims + 1) if bet.get(i, 0) == 0], bet


@check("spectral.full_spectrum", "spectral")
def _full_spectrum() -> Outcome:
    n = 0
    for X in random_two_complexes() + small_complexes():
        dims, _ = _zero_dims(X)
        for i in dims:
            rep = spectral.spectral_report(X, i)
            d, u = spectral.cheeger_l2_down(X, i), spectral.cheeger_l2_up(X, i)
            m = min(d, u)
            if m == INF and rep.hodge_gap == INF:
                continue
            if abs(rep.hodge_gap - m * m) > SPECTRAL_TOL * max(rep.norm, 1.0):
                return Outcome(False, f"{X.name} dim {i}: gap {rep.hodge_gap} vs {m * m}", _dump(X))
            n += 1
    return Outcome(True, f"{n} (complex, dim) pairs")


@check("spectral.down_equals_up_shifted", "spectral")
def _l2easy0() -> Outcome:
    n = 0
    for X in random_two_complexes() + small_complexes():
        dims, _ = _zero_dims(X)
        for i in dims:
            if i + 1 in dims:
                a, b = spectral.cheeger_l2_down(X, i), spectral.cheeger_l2_up(X, i + 1)
                if not (a == b == INF or abs(a - b) <= SPECTRAL_TOL):
                    return Outcome(False, f"{X.name} dim {i}: {a} vs {b}", _dump(X))
                n += 1
    return Outcome(True, f"{n} pairs")


@check("spectral.zero_count_matches_betti", "spectral")
def _zero_count() -> Outcome:
    for X in random_two_complexes(10) + fixture_complexes()[:5]:
        for i in range(0, X.dims + 1):
            try:
                spectral.spectral_report(X, i)
            except InvariantViolation as exc:
                return Outcome(False, f"{X.name} dim {i}: {exc}", _dump(X))
    return Outcome(True)


@check("spectral.eigen_residual", "spectral")
def _residual() -> Outcome:
    for X in random_two_complexes(10):
        for i in range(0, X.dims + 1):
            rep = spectral.spectral_report(X, i, keep_spectrum=True)
            if rep.max_residual > spectral.RESIDUAL_TOL * max(rep.norm, 1.0):
                return Outcome(False, f"{X.name} dim {i}: residual {rep.max_residual}", _dump(X))
    return Outcome(True)


@check("spectral.rayleigh_oracle", "spectral")
def _rayleigh() -> Outcome:
    for X in random_two_complexes():
        dims, _ = _zero_dims(X)
        for i in dims:
            a, b = spectral.cheeger_l2_down(X, i), spectral.rayleigh_oracle(X, i)
            if not (a == b == INF or abs(a - b) <= SPECTRAL_TOL):
                return Outcome(False, f"{X.name} dim {i}: {a} vs Rayleigh {b}", _dump(X))
    return Outcome(True)


def sandwich_cases():
    """(complex, complex on which h^2 is taken) pairs with H^2 = 0 and 2-cells."""
    cases = [(hypercube_skeleton(d, 2), hypercube_skeleton(d, 3)) for d in (3, 4, 5)]
    cases += [(named_complex("rp2-6"), None), (full_simplex(3).skeleton(2), full_simplex(3)), (full_simplex(3), None)]
    for s in range(40):
        X = random_complex(8, 2, 0.4, s)
        if X.dims == 2 and exact.betti_numbers(X.chain_complex()).get(2, 0) == 0:
            cases.append((X, None))
    return cases


@check("spectral.tilde_sandwich", "spectral")
def _sandwich() -> Outcome:
    for X, H in sandwich_cases():
        try:
            t = spectral.tilde_h2_l2(X, H)
        except InvariantViolation as exc:
            return Outcome(False, f"{X.name}: {exc}", _dump(X))
        if t.flag or not t.sandwich_ok:
            return Outcome(False, f"{X.name}: sandwich not established ({t.flag})", _dump(X))
    return Outcome(True, f"{len(sandwich_cases())} complexes")


# -- filling -------------------------------------------------------------------


@check("filling.witnesses_verify", "filling")
def _witnesses() -> Outcome:
    n = 0
    for X in small_complexes() + [named_complex("rp2-6")]:
        for i in range(0, X.dims + 1):
            for p in (1, INF):
                for cob in (False, True):
                    if cob and i == 0:
                        continue
                    v = cheeger(X, i, p, variant="coexact" if cob else "plain", coboundary=cob, method="lp-enum" if p == INF else "brute")
                    if v.method in ("brute", "lp-enum") and v.witness_cycle is not None and not check_witness(X, v):
                        return Outcome(False, f"{X.name} {v.symbol} p={p}: witness fails", _dump(X))
                    n += 1
    for X in small_complexes():
        for i in range(0, X.dims):
            z = exact.nullspace(X.boundary(i)) if X.boundary(i).shape[0] else []
            for vec in z[:3]:
                alpha = Chain(i, dict(enumerate(vec)), EXACT)
                fr = min_filling(X, alpha, 1)
                if fr.feasible and apply_boundary(X, fr.witness) != alpha:
                    return Outcome(False, f"{X.name}: filling of a {i}-cycle has the wrong boundary", _dump(X))
    return Outcome(True, f"{n} constants")


@check("filling.zero_iff_homology", "filling")
def _zero_iff() -> Outcome:
    cases = small_complexes() + [named_complex("rp2-6"), named_complex("torus-7")]
    for X in cases:
        bet = exact.betti_numbers(X.chain_complex())
        for i in range(0, X.dims + 1):
            for p in (1, 2, INF):
                v = cheeger(X, i, p, method="lp-enum" if p == INF else "brute", cap=60)
                if (v.value == 0) != (bet.get(i, 0) > 0):
                    return Outcome(False, f"{X.name} h_{i} p={p} = {v.value} with betti {bet.get(i, 0)}", _dump(X))
    return Outcome(True)


@check("filling.norm_comparison_constants", "filling")
def _norm_constants() -> Outcome:
    n = 0
    for X in small_complexes():
        for i in range(0, X.dims + 1):
            if X.size(i) > 20:
                continue
            N = X.size(i) + (X.size(i + 1) if i + 1 <= X.dims else 0)
            vals = {p: cheeger(X, i, p, method="lp-enum" if p == INF else "brute").value for p in (1, 2, INF)}
            for p, q in itertools.combinations((1, 2, INF), 2):
                a, b = float(vals[p]), float(vals[q])
                if a in (0, INF) or b in (0, INF):
                    if (a in (0, INF)) != (b in (0, INF)) or (a == 0) != (b == 0):
                        return Outcome(False, f"{X.name} h_{i}: degenerate mismatch {a} vs {b}", _dump(X))
                    continue
                k = N ** abs(1 / p - (0 if q == INF else 1 / q))
                if a > k * b * (1 + 1e-9) or b > k * a * (1 + 1e-9):
                    return Outcome(False, f"{X.name} h_{i}: p={p} {a}, q={q} {b}, factor {k}", _dump(X))
                n += 1
    return Outcome(True, f"{n} comparisons")


@check("filling.l2_matches_spectral", "filling")
def _l2_cross() -> Outcome:
    for X in small_complexes() + random_two_complexes(5):
        for i in range(0, X.dims + 1):
            if X.size(i) > 30:
                continue
            a = float(cheeger(X, i, 2, cap=30).value)
            b = spectral.cheeger_l2_down(X, i)
            if not (a == b == INF or abs(a - b) <= CROSS_TOL):
                return Outcome(False, f"{X.name} h_{i}: brute {a} vs spectral {b}", _dump(X))
    return Outcome(True)


@check("filling.transpose_duality", "filling")
def _duality() -> Outcome:
    for X in small_complexes():
        T = X.transpose()
        for i in range(1, X.dims + 1):
            for p in (1, INF):
                meth = "lp-enum" if p == INF else "brute"
                a = cheeger(X, i, p, variant="coexact", coboundary=True, method=meth)
                b = cheeger(T, -i, p, variant="exact", method=meth)
                if a.value != b.value:
                    return Outcome(False, f"{X.name} h^{i} p={p}: {a.value} vs transposed {b.value}", _dump(X))
    return Outcome(True)


@check("filling.reorder_stable", "filling")
def _reorder() -> Outcome:
    rng = np.random.default_rng(1)
    for X in small_complexes() + [named_complex("rp2-6")]:
        for _ in range(2):
            perms = {i: [int(v) for v in rng.permutation(X.size(i))] for i in range(X.dims + 1)}
            Y = X.permuted(perms)
            for i in range(0, X.dims + 1):
                a, b = cheeger(X, i, 1).value, cheeger(Y, i, 1).value
                if a != b:
                    return Outcome(False, f"{X.name} h_{i}: {a} vs reordered {b}", {"complex": _dump(X), "perms": perms})
    return Outcome(True)


@check("filling.h0_two_over_diameter", "filling")
def _h0_diam() -> Outcome:
    for s in range(20):
        G = h0_graph(s)
        v = cheeger(G, 0, 1, cap=40)
        want = Fraction(2, diameter(G))
        if v.value != want:
            return Outcome(False, f"{G.name}: h_0 = {v.value}, 2/diam = {want}", _dump(G))
    return Outcome(True, "20 graphs")


def h0_graph(seed: int):
    """Sparse connected graph with at most 40 vertices for the h_0 identity."""
    rng = np.random.default_rng(10_000 + seed)
    n = int(rng.integers(6, 41))
    return random_connected_graph(n, 1.5 / n, seed)


# -- transport -----------------------------------------------------------------


@check("transport.certificates_verify", "transport")
def _certs() -> Outcome:
    rng = np.random.default_rng(2)
    for deg in (3, 4, 5):
        X = hypercube_skeleton(deg, 2)
        for _ in range(5):
            w = random_closed_word(deg, 2 * int(rng.integers(2, 10)), rng)
            res = hypercube_contract_word(w, X)
            errs = verify_certificate(X, res.certificate) + verify_word_contraction(res, X)
            if errs:
                return Outcome(False, f"deg {deg}: {errs[0]}", {"deg": deg, "word": w.coordinates})
    return Outcome(True)


@check("transport.word_contraction_bound", "transport")
def _word_bound() -> Outcome:
    rng = np.random.default_rng(3)
    worst = Fraction(0)
    for deg in range(3, 8):
        X = hypercube_skeleton(deg, 2)
        for _ in range(5):
            w = random_closed_word(deg, 2 * int(rng.integers(1, 21)), rng)
            res = hypercube_contract_word(w, X)
            if res.squares > deg * len(w) or res.filling.norm(1) > 2 * deg * len(w):
                return Outcome(False, f"deg {deg}: {res.squares} squares for length {len(w)}", {"deg": deg, "word": w.coordinates})
            worst = max(worst, res.measured_constant)
    return Outcome(True, f"largest ||F|| / (deg len) = {worst}")


@check("transport.decomposition_ratio", "transport")
def _decomp() -> Outcome:
    for deg in (3, 4, 5, 6):
        X = hypercube_skeleton(deg, 3)
        c = Chain.unit(2, 0)
        dec = hypercube_decompose(c, deg, Fraction(1, 10**9), X)
        bound = hypercube_laplacian_ratio(deg)
        if any(r.ratio > bound for r in dec.rounds) or verify_decomposition(dec):
            return Outcome(False, f"deg {deg}: ratio above {bound} or reconstruction fails", {"deg": deg})
        if len(dec.rounds) > decomposition_round_bound(deg, Fraction(1, 10**9)):
            return Outcome(False, f"deg {deg}: too many rounds", {"deg": deg})
    return Outcome(True)


def halving_oracle(X, alpha: Chain):
    """Step oracle c -> c/2 carried by half of a scaled minimal filling of alpha.

    Every iterate is a multiple t alpha, so the chain -(t/2) F with
    boundary(F) = alpha carries c to c/2 at cost ||F|| / (2 ||alpha||).
    """
    F = min_filling(X, alpha, 1).witness
    n0 = alpha.norm(1)

    def oracle(c: Chain):
        t = c.norm(1) / n0
        return c.scale(Fraction(1, 2)), F.scale(-t / 2)

    return oracle, Fraction(F.norm(1), 2 * n0)


def expfill_case():
    X = hypercube_skeleton(4, 2)
    from .transport import word_cycle

    alpha = word_cycle(X, [0, 1, 2, 0, 1, 2])
    oracle, x = halving_oracle(X, alpha)
    return X, alpha, oracle, x


@check("transport.expfill_bound", "transport")
def _expfill() -> Outcome:
    X, alpha, oracle, x = expfill_case()
    res = expfill(oracle, alpha, Fraction(1, 2), x, tol=Fraction(1, 10**6), X=X)
    if not res.within_bound:
        return Outcome(False, f"filling norm {res.filling.norm(1)} exceeds {res.bound}")
    if apply_boundary(X, res.filling) != alpha - res.residual:
        return Outcome(False, "expfill output does not fill alpha up to the residual")
    if verify_certificate(X, res.certificate):
        return Outcome(False, "expfill certificate fails independent verification")
    return Outcome(True, f"{len(res.certificate.steps)} steps")


@check("transport.composition_bound", "transport")
def _composition() -> Outcome:
    X, alpha, oracle, x = expfill_case()
    res = expfill(oracle, alpha, Fraction(1, 2), x, tol=Fraction(1, 10**3), X=X)
    steps = res.certificate.steps
    for k in range(1, len(steps)):
        first = certificate_from_steps(1, 1, steps[:k])
        second = certificate_from_steps(1, 1, steps[k:])
        total = compose(first, second).total_cost
        if total > composition_bound(first, second):
            return Outcome(False, f"split at {k}: composite cost {total} exceeds x + y ||c'||/||c||")
    return Outcome(True, f"{len(steps) - 1} splits")


# -- homology ------------------------------------------------------------------


@check("homology.snf_random", "homology")
def _snf() -> Outcome:
    rng = np.random.default_rng(5)
    mats = []
    for _ in range(200):
        m, n = (int(v) for v in rng.integers(1, 13, size=2))
        mats.append(rng.integers(-9, 10, size=(m, n)).tolist())
    for X in fixture_complexes():
        for i in range(1, X.dims + 1):
            mats.append(X.boundary(i).toarray().tolist())
    for M in mats:
        if not check_snf(M, smith_normal_form(M)):
            return Outcome(False, "SNF check failed", {"matrix": M})
    return Outcome(True, f"{len(mats)} matrices")


@check("homology.torsion_consistency", "homology")
def _torsion() -> Outcome:
    for X in fixture_complexes():
        h = homology(X, 1)
        if h.order is None:
            continue
        cov = universal_abelian_cover(X)
        if cov.group.order != h.order or math.prod(h.torsion) != h.order:
            return Outcome(False, f"{X.name}: |H_1| = {h.order}, cover group {cov.group.order}", _dump(X))
    return Outcome(True)


def cover_fixtures():
    out = [named_complex(n) for n in ("rp2-6", "moore-z2", "sphere-3", "zn-presentation(3)", "z2^2", "lens(3,1)")]
    out += [named_complex(f"zn-presentation({n})") for n in (2, 4, 5, 6, 7)]
    return out


@check("homology.cover_checks", "homology")
def _covers() -> Outcome:
    for X in cover_fixtures():
        cov = universal_abelian_cover(X)
        bad = [k for k, v in cov.check().items() if not v]
        if bad:
            return Outcome(False, f"{X.name}: cover fails {bad}", _dump(X))
    cov = universal_abelian_cover(named_complex("rp2-6"))
    bet = exact.betti_numbers(cov.total.chain_complex())
    if (bet.get(0), bet.get(1), bet.get(2)) != (0, 0, 1):
        return Outcome(False, f"RP^2 cover betti numbers {bet}")
    for n in range(2, 12):
        cov = universal_abelian_cover(named_complex(f"zn-presentation({n})"))
        if diameter(cov.total) != n // 2:
            return Outcome(False, f"Z/{n} cover diameter {diameter(cov.total)}")
    rep = torsdiameter_report(cover_fixtures())
    if not rep.all_within_bound():
        return Outcome(False, "diameter ratio exceeds |H_1|", rep.to_json())
    return Outcome(True)


@check("homology.fundamental_class", "homology")
def _fundamental() -> Outcome:
    for name in ("sphere-3", "lens(3,1)", "lens(5,2)"):
        X = named_complex(name)
        fc = fundamental_class(X)
        if any(abs(v) != 1 for v in fc) or exact.rank(X.boundary(3)) != X.size(3) - 1:
            return Outcome(False, f"{name}: fundamental class not an orientation", _dump(X))
    return Outcome(True)


@check("homology.contraction_probe", "homology")
def _probe() -> Outcome:
    rep = chain_contraction_probe(simplex_boundary(4))
    if not rep.telescoping_ok or not rep.carriers:
        return Outcome(False, "probe sum is not the fundamental class", rep.to_json())
    return Outcome(True, f"carriers {rep.carriers}")


# -- constructors --------------------------------------------------------------


@check("constructors.validate", "constructors")
def _validate() -> Outcome:
    for X in constructor_outputs():
        try:
            X.validate()
        except Exception as exc:  # noqa: BLE001
            return Outcome(False, f"{X.name}: {exc}", _dump(X))
    return Outcome(True)


@check("constructors.hypercube_counts", "constructors")
def _cube_counts() -> Outcome:
    for deg in range(1, 11):
        for i in range(deg + 1):
            want = math.comb(deg, i) * 2 ** (deg - i)
            if hypercube_cell_count(deg, i) != want:
                return Outcome(False, f"deg {deg} dim {i}")
    for deg in range(1, 9):
        X = hypercube_skeleton(deg, min(deg, 3))
        if X.counts() != tuple(hypercube_cell_count(deg, i) for i in range(min(deg, 3) + 1)):
            return Outcome(False, f"built hypercube {deg} has counts {X.counts()}")
    return Outcome(True)


@check("constructors.seeded_reproducible", "constructors")
def _seeded() -> Outcome:
    for build in (lambda: random_complex(8, 2, 0.4, 11), lambda: random_connected_graph(20, 0.1, 5),
                  lambda: build_fibration("product", seed=3, nb=4, nf=2).E):
        if complex_to_json(build()) != complex_to_json(build()):
            return Outcome(False, "seeded generator not reproducible")
    rng_a, rng_b = np.random.default_rng(9), np.random.default_rng(9)
    if random_closed_word(5, 20, rng_a) != random_closed_word(5, 20, rng_b):
        return Outcome(False, "random word not reproducible")
    return Outcome(True)


def fibration_cases():
    cases = [build_fibration("prism"), build_fibration("identity")]
    cases += [build_fibration("product", seed=s, nb=4, nf=2) for s in range(5)]
    return cases


@check("fibration.leray_serre", "fibration")
def _leray_serre() -> Outcome:
    from .fibration import leray_serre_check

    for F in fibration_cases():
        for p in (1, INF):
            rep = leray_serre_check(F, p, method="brute" if p == 1 else "auto")
            if not rep.ok:
                return Outcome(False, f"{F.name} p={p}: inequality or witness fails", rep.to_json())
    return Outcome(True, f"{len(fibration_cases())} fibrations")


# -- surgery -------------------------------------------------------------------


def surgery_links(count: int = 50):
    rng = np.random.default_rng(6)
    return [random_link(int(rng.integers(1, 7)), rng) for _ in range(count)]


@check("surgery.det_matches_snf", "surgery")
def _surgery_det() -> Outcome:
    for L in surgery_links():
        q0 = min_dominant_slope(L)
        for q in range(q0, q0 + 11):
            h = surgery_h1(L, q)
            if h.determinant != int_det(presentation_matrix(L, q)):
                return Outcome(False, "determinant mismatch", {"Lk": L.to_json(), "q": q})
            if h.determinant and h.group.order != abs(h.determinant):
                return Outcome(False, f"|H_1| = {h.group.order} but det = {h.determinant}", {"Lk": L.to_json(), "q": q})
    for q in range(1, 12):
        if surgery_h1(FramedLink.unknot(), q).group.torsion != ((q,) if q > 1 else ()):
            return Outcome(False, f"unknot at q={q}")
        h = surgery_h1(FramedLink.hopf(), q)
        if h.group.order != abs(q * q - 1) and q != 1:
            return Outcome(False, f"Hopf at q={q}: {h.group}")
    return Outcome(True)


@check("surgery.dominance_nonzero_det", "surgery")
def _dominance() -> Outcome:
    for L in surgery_links():
        q = min_dominant_slope(L)
        if surgery_h1(L, q).determinant == 0:
            return Outcome(False, "dominant matrix with zero determinant", {"Lk": L.to_json(), "q": q})
    return Outcome(True)


@check("surgery.contraction_factor", "surgery")
def _contraction() -> Outcome:
    rng = np.random.default_rng(7)
    for L in surgery_links():
        s = L.max_row_sum()
        if s == 0:
            continue
        a = [int(v) for v in rng.integers(-3, 4, size=L.n)]
        for q in (s + 1, 2 * s):
            cert = meridian_contraction(L, q, a, maxiter=30)
            if cert.max_ratio > cert.factor_bound:
                return Outcome(False, "observed step ratio above the row-sum bound", {"Lk": L.to_json(), "q": q})
            if q == 2 * s and not cert.halving:
                return Outcome(False, "factor above 1/2 at q = 2 * row sum", {"Lk": L.to_json()})
        rho = max(abs(np.linalg.eigvalsh(np.array(L.Lk, dtype=float)))) / (s + 1)
        cert = meridian_contraction(L, s + 1, a, maxiter=200)
        if rho < 1 and not cert.converged and any(a):
            return Outcome(False, "iteration with spectral radius < 1 did not converge", {"Lk": L.to_json()})
    return Outcome(True)


@check("surgery.presentation_roundtrip", "surgery")
def _roundtrip() -> Outcome:
    for L in surgery_links():
        for q in (-3, 0, 5):
            M = presentation_matrix(L, q)
            back = tuple(tuple(M[i][j] - (q if i == j else 0) for j in range(L.n)) for i in range(L.n))
            if back != L.Lk:
                return Outcome(False, "qI + Lk - qI != Lk", {"Lk": L.to_json(), "q": q})
    return Outcome(True)


# -- cli -----------------------------------------------------------------------


@check("cli.deterministic_output", "cli")
def _cli_det() -> Outcome:
    from .cli import run_to_string

    for argv in (["generate", "--hypercube", "3", "--skeleton", "2"],
                 ["cheeger", "--named", "rp2-6", "--dim", "1"],
                 ["homology", "--named", "lens(3,1)"],
                 ["surgery", "--link", "hopf", "--q-range", "2:6"]):
        a, b = run_to_string(argv), run_to_string(argv)
        if a != b:
            return Outcome(False, f"output differs between runs: {' '.join(argv)}")
    return Outcome(True)


@check("cli.exit_codes", "cli")
def _cli_codes() -> Outcome:
    from .cli import main

    import contextlib
    import io

    sink = io.StringIO()
    with contextlib.redirect_stdout(sink), contextlib.redirect_stderr(sink):
        codes = {
            "usage": main(["cheeger", "--no-such-flag"]),
            "input": main(["homology", "--input", "/nonexistent/complex.json"]),
            "ok": main(["homology", "--named", "rp2-6"]),
        }
    want = {"usage": 2, "input": 3, "ok": 0}
    if codes != want:
        return Outcome(False, f"exit codes {codes}, expected {want}")
    return Outcome(True)


@check("cli.manifest_complete", "cli")
def _manifest() -> Outcome:
    probs = manifest_problems()
    return Outcome(not probs, "; ".join(probs[:3]))


# -- manifest ------------------------------------------------------------------

MANIFEST: tuple[Invariant, ...] = (
    Invariant("complex-core", "boundary of boundary is zero for every constructor output", "complex.boundary_squared_zero", "tests/test_complex.py::test_boundary_squared_zero_everywhere"),
    Invariant("complex-core", "coboundary matrix is the transposed boundary matrix", "complex.coboundary_is_transpose", "tests/test_complex.py::test_coboundary_is_transpose"),
    Invariant("complex-core", "L^p norms of a chain compare with the N^(1/p-1/q) factor", "complex.norm_comparison", "tests/test_complex.py::test_norm_comparison"),
    Invariant("complex-core", "cell ordering is deterministic", "complex.deterministic_order", "tests/test_complex.py::test_rebuild_is_identical"),
    Invariant("spectral", "Hodge gap equals the squared smaller L2 Cheeger constant when H_i = 0", "spectral.full_spectrum", "tests/test_spectral.py::test_gap_is_min_of_split_constants"),
    Invariant("spectral", "h_i = h^(i+1) in L2 when H_i = H_(i+1) = 0", "spectral.down_equals_up_shifted", "tests/test_spectral.py::test_down_equals_shifted_up"),
    Invariant("spectral", "zero eigenvalue count equals the exact betti number", "spectral.zero_count_matches_betti", "tests/test_spectral.py::test_zero_count_matches_betti"),
    Invariant("spectral", "eigenpair residuals are below 1e-8 times the Laplacian norm", "spectral.eigen_residual", "tests/test_spectral.py::test_residuals_small"),
    Invariant("spectral", "L2 constant agrees with Rayleigh minimization over an exact kernel basis", "spectral.rayleigh_oracle", "tests/test_spectral.py::test_rayleigh_oracle_agrees"),
    Invariant("spectral", "1/h^2 <= 1/tilde h^2 <= 1/h^2 + 1 when H^2 = 0", "spectral.tilde_sandwich", "tests/test_spectral.py::test_tilde_sandwich"),
    Invariant("filling", "filling witnesses satisfy their boundary equation and achieve the reported ratio", "filling.witnesses_verify", "tests/test_filling.py::test_witnesses_verify"),
    Invariant("filling", "h_i = 0 exactly when H_i is nonzero", "filling.zero_iff_homology", "tests/test_filling.py::test_zero_iff_homology"),
    Invariant("filling", "constants in different L^p norms compare with the N^|1/p-1/q| factor", "filling.norm_comparison_constants", "tests/test_filling.py::test_norm_comparison_constants"),
    Invariant("filling", "brute L2 constant agrees with the spectral value", "filling.l2_matches_spectral", "tests/test_filling.py::test_l2_matches_spectral"),
    Invariant("filling", "h^i on X equals h_(-i) on the transposed complex", "filling.transpose_duality", "tests/test_filling.py::test_transpose_duality"),
    Invariant("filling", "brute L1 constants are stable under cell reordering", "filling.reorder_stable", "tests/test_filling.py::test_reorder_stable"),
    Invariant("filling", "h_0 of a connected graph in L1 is 2 / diameter", "filling.h0_two_over_diameter", "tests/test_filling.py::test_h0_is_two_over_diameter"),
    Invariant("transport", "certificates verify independently in exact arithmetic", "transport.certificates_verify", "tests/test_transport.py::test_certificates_verify_independently"),
    Invariant("transport", "word contraction emits at most deg * length squares", "transport.word_contraction_bound", "tests/test_transport.py::test_word_contraction_bound"),
    Invariant("transport", "decomposition residual ratio per round is at most (deg-2)/(deg+2)", "transport.decomposition_ratio", "tests/test_transport.py::test_decomposition_ratio"),
    Invariant("transport", "expfill output norm is at most x/(1-a) times the input norm", "transport.expfill_bound", "tests/test_transport.py::test_expfill_bound"),
    Invariant("transport", "composite transport cost obeys x + y ||c'||/||c||", "transport.composition_bound", "tests/test_transport.py::test_composition_bound"),
    Invariant("homology-integral", "SNF has U M V = D, unimodular U and V, and a divisibility chain", "homology.snf_random", "tests/test_homology.py::test_snf_random_matrices"),
    Invariant("homology-integral", "torsion order matches the cover group order", "homology.torsion_consistency", "tests/test_homology.py::test_torsion_matches_cover_group"),
    Invariant("homology-integral", "covers have a free deck action, multiplicative Euler characteristic and exact quotient", "homology.cover_checks", "tests/test_covers.py::test_cover_checks"),
    Invariant("homology-integral", "top kernel of a closed orientable 3-complex is generated by an orientation vector", "homology.fundamental_class", "tests/test_homology.py::test_fundamental_class"),
    Invariant("homology-integral", "contraction probe telescopes to the fundamental class", "homology.contraction_probe", "tests/test_homology.py::test_probe_on_three_sphere"),
    Invariant("constructors", "every constructor output validates", "constructors.validate", "tests/test_constructors.py::test_outputs_validate"),
    Invariant("constructors", "hypercube cell counts match the closed form", "constructors.hypercube_counts", "tests/test_constructors.py::test_hypercube_counts"),
    Invariant("constructors", "fibration witnesses verify and both inequalities hold", "fibration.leray_serre", "tests/test_fibration.py::test_leray_serre_suite"),
    Invariant("constructors", "seeded generators are reproducible", "constructors.seeded_reproducible", "tests/test_constructors.py::test_seeded_reproducible"),
    Invariant("surgery", "|det(qI + Lk)| equals |H_1| from the SNF", "surgery.det_matches_snf", "tests/test_surgery.py::test_det_matches_snf"),
    Invariant("surgery", "diagonal dominance gives a nonzero determinant", "surgery.dominance_nonzero_det", "tests/test_surgery.py::test_dominance_nonzero_det"),
    Invariant("surgery", "meridian contraction ratios stay below the row-sum factor and converge", "surgery.contraction_factor", "tests/test_surgery.py::test_contraction_factor"),
    Invariant("surgery", "presentation matrix minus qI recovers Lk", "surgery.presentation_roundtrip", "tests/test_surgery.py::test_presentation_roundtrip"),
    Invariant("cli", "subcommands are deterministic", "cli.deterministic_output", "tests/test_cli.py::test_deterministic_output"),
    Invariant("cli", "verify covers every invariant through the manifest", "cli.manifest_complete", "tests/test_verify.py::test_manifest_complete"),
    Invariant("cli", "exit codes are 0 success, 1 failure, 2 usage, 3 input", "cli.exit_codes", "tests/test_cli.py::test_exit_codes"),
)


def manifest_problems(root: Path | None = None) -> list[str]:
    """Gaps between the manifest, the registered checks and the test files."""
    probs = []
    ids = [inv.check for inv in MANIFEST]
    for cid in ids:
        if cid not in CHECKS:
            probs.append(f"manifest names unknown check {cid}")
    for cid in CHECKS:
        if cid not in ids:
            probs.append(f"check {cid} is not in the manifest")
    modules = {inv.module for inv in MANIFEST}
    for m in ("complex-core", "spectral", "filling", "transport", "homology-integral", "constructors", "surgery", "cli"):
        if m not in modules:
            probs.append(f"module {m} has no invariants in the manifest")
    if root is None:
        root = Path(__file__).resolve().parents[2]
    if (root / "tests").is_dir():
        for inv in MANIFEST:
            path, _, name = inv.test.partition("::")
            f = root / path
            if not f.is_file() or f"def {name}(" not in f.read_text():
                probs.append(f"test {inv.test} not found")
    return probs


def run(suite: str = "all", only: list[str] | None = None) -> list[CheckResult]:
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    out = []
    for cid, (s, fn) in CHECKS.items():
        if suite != "all" and s != suite:
            continue
        if only and cid not in only:
            continue
        t = time.perf_counter()
        try:
            o = fn()
        except Exception as exc:  # noqa: BLE001 - a crash is a failed check
            o = Outcome(False, f"{type(exc).__name__}: {exc}")
        out.append(CheckResult(cid, s, o.ok, o.detail, o.counterexample, time.perf_counter() - t))
    return out
