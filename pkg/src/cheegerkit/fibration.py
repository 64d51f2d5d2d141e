"""Comparison of Cheeger constants along a graph fibration E -> B.

Both displayed inequalities are checked with exact brute-force constants for
E, B and every fiber, and the constructive fillings from the proof are built
and verified: a lift of the base filling corrected fiberwise for 0-cycles,
and fiberwise cofillings plus a pulled-back base cofilling for coexact
1-cocycles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .complex import EXACT, INF, Chain, _as_norm, apply_boundary, apply_coboundary, format_number, operator_bound
from .constructors import GraphFibration
from .filling import cheeger, min_cofilling, min_filling
from .errors import InvariantViolation

FIBRATION_CAP = 80
FLOAT_TOL = 1e-9


def _pick(method: str, p, coboundary: bool) -> str:
    # both are exact; dual-vertex walking is much cheaper for sup-norm cocycles
    if method != "auto":
        return method
    return "lp-enum" if coboundary and p == INF else "brute"


def _inverse_h0(X, p, cap, method="auto"):
    if X.size(0) <= 1:
        return Fraction(0), None
    v = cheeger(X, 0, p, method=_pick(method, p, False), cap=cap)
    return v.inverse, v


def _inverse_h1_coexact(X, p, cap, method="auto"):
    if X.dims < 1 or X.size(1) == 0:
        return Fraction(0), None
    v = cheeger(X, 1, p, method=_pick(method, p, True), variant="coexact", coboundary=True, cap=cap)
    return v.inverse, v


def _le(a, b, p) -> bool:
    if p == 2:
        return a <= b + FLOAT_TOL * max(1.0, abs(b))
    return a <= b


@dataclass
class WitnessCheck:
    kind: str  # "filling" or "cofilling"
    valid: bool
    ratio: object
    provable_bound: object
    displayed_bound: object

    @property
    def within_provable(self) -> bool:
        return self.valid and self.ratio <= self.provable_bound * (1 + FLOAT_TOL) if not isinstance(self.ratio, Fraction) else self.valid and self.ratio <= self.provable_bound

    @property
    def within_displayed(self) -> bool:
        return self.valid and _le(self.ratio, self.displayed_bound, 1 if isinstance(self.ratio, Fraction) else 2)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "valid": self.valid,
            "ratio": format_number(self.ratio),
            "provable_bound": format_number(self.provable_bound),
            "displayed_bound": format_number(self.displayed_bound),
            "within_provable": self.within_provable,
            "within_displayed": self.within_displayed,
        }


@dataclass
class LeraySerreReport:
    name: str
    p: float
    D: int
    C: int
    inv_h0_E: object
    inv_h0_B: object
    inv_h0_fiber_max: object
    inv_h1_E: object
    inv_h1_B: object
    inv_h1_fiber_max: object
    rhs0: object
    rhs1: object
    provable0: object
    provable1: object
    witnesses: list[WitnessCheck] = field(default_factory=list)

    @property
    def first_holds(self) -> bool:
        return _le(self.inv_h0_E, self.rhs0, self.p)

    @property
    def second_holds(self) -> bool:
        return _le(self.inv_h1_E, self.rhs1, self.p)

    @property
    def witnesses_valid(self) -> bool:
        return all(w.valid and w.within_provable and w.within_displayed for w in self.witnesses)

    @property
    def ok(self) -> bool:
        return self.first_holds and self.second_holds and self.witnesses_valid

    def to_json(self) -> dict:
        f = format_number
        return {
            "name": self.name,
            "p": "inf" if self.p == INF else self.p,
            "D": self.D,
            "C": self.C,
            "inv_h0": {"E": f(self.inv_h0_E), "B": f(self.inv_h0_B), "fiber_max": f(self.inv_h0_fiber_max)},
            "inv_h1_coexact": {"E": f(self.inv_h1_E), "B": f(self.inv_h1_B), "fiber_max": f(self.inv_h1_fiber_max)},
            "rhs0": f(self.rhs0),
            "rhs1": f(self.rhs1),
            "provable0": f(self.provable0),
            "provable1": f(self.provable1),
            "first_holds": self.first_holds,
            "second_holds": self.second_holds,
            "witnesses": [w.to_json() for w in self.witnesses],
            "ok": self.ok,
        }


def _pow(C: int, e):
    """C ** e for e in {0, 1/2, 1}, exact where possible."""
    if e == 0:
        return 1
    if e == 1:
        return C
    return C ** 0.5


def lift_filling(F: GraphFibration, alpha: Chain, p, fibers) -> Chain:
    """Filling of a 0-cycle on E from a lifted base filling plus fiber corrections."""
    E, B = F.E, F.B
    # push alpha down
    pushed: dict[int, Fraction] = {}
    for v, c in alpha.coeffs.items():
        b = F.vertex_map[v]
        pushed[b] = pushed.get(b, 0) + c
    eta = min_filling(B, Chain(0, pushed, EXACT), p)
    if not eta.feasible:
        raise InvariantViolation("projected 0-cycle has no filling in the base")
    # lift each base edge to its first preimage, keeping orientation
    ends_E, ends_B = E.edge_list(), B.edge_list()
    first_lift = {}
    for e, t in enumerate(F.edge_map):
        if t is not None and t not in first_lift:
            first_lift[t] = e
    lifted: dict[int, Fraction] = {}
    for t, c in (eta.witness.coeffs.items() if eta.witness is not None else []):
        e = first_lift[t]
        same = F.vertex_map[ends_E[e][0]] == ends_B[t][0]
        lifted[e] = lifted.get(e, 0) + (c if same else -c)
    lift = Chain(1, lifted, EXACT)
    r = apply_boundary(E, lift) - alpha
    total = lift
    for b, (Fb, verts, emap) in fibers.items():
        local = {v: k for k, v in enumerate(verts)}
        rb = {local[v]: c for v, c in r.coeffs.items() if F.vertex_map[v] == b}
        if not rb:
            continue
        fr = min_filling(Fb, Chain(0, rb, EXACT), p)
        if not fr.feasible:
            raise InvariantViolation(f"fiber residual over {b} is not a 0-cycle")
        beta = Chain(1, {emap[k]: c for k, c in fr.witness.coeffs.items()}, EXACT)
        total = total - beta
    return total


def lift_cofilling(F: GraphFibration, alpha: Chain, p, fibers) -> Chain:
    """Cofilling of a coexact 1-cocycle on E: fiber cofillings plus a pulled-back base cofilling."""
    E, B = F.E, F.B
    beta: dict[int, Fraction] = {}
    for b, (Fb, verts, emap) in fibers.items():
        if Fb.dims < 1 or Fb.size(1) == 0:
            continue
        restr = {k: alpha.coeffs[e] for k, e in enumerate(emap) if e in alpha.coeffs}
        if not restr:
            continue
        fr = min_cofilling(Fb, Chain(1, restr, EXACT), p)
        if not fr.feasible:
            raise InvariantViolation(f"restriction to the fiber over {b} is not coexact")
        for k, c in fr.witness.coeffs.items():
            beta[verts[k]] = beta.get(verts[k], 0) + c
    fiber_part = Chain(0, beta, EXACT)
    rest = alpha - apply_coboundary(E, fiber_part)
    ends_E, ends_B = E.edge_list(), B.edge_list()
    gamma: dict[int, Fraction] = {}
    for e, t in enumerate(F.edge_map):
        val = rest.coeffs.get(e, Fraction(0))
        if t is None:
            if val != 0:
                raise InvariantViolation(f"corrected cocycle is nonzero on vertical edge {e}")
            continue
        same = F.vertex_map[ends_E[e][0]] == ends_B[t][0]
        val = val if same else -val
        if t in gamma and gamma[t] != val:
            raise InvariantViolation(f"lifts of base edge {t} carry different values")
        gamma[t] = val
    eta = min_cofilling(B, Chain(1, gamma, EXACT), p)
    if not eta.feasible:
        raise InvariantViolation("descended cocycle is not coexact on the base")
    pulled = {v: eta.witness.coeffs[F.vertex_map[v]] for v in range(E.size(0)) if F.vertex_map[v] in eta.witness.coeffs}
    return fiber_part + Chain(0, pulled, EXACT)


def _norm(c: Chain, p):
    v = c.norm(p)
    return float(v) if p == 2 else v


def leray_serre_check(
    F: GraphFibration, p=1, cap: int = FIBRATION_CAP, extra_witnesses: int = 4, method: str = "auto"
) -> LeraySerreReport:
    """Exact constants for E, B and fibers, both inequalities, and the proof's witnesses.

    ``method`` is passed to :func:`cheeger`; "auto" uses dual-vertex walking
    for sup-norm cocycles and extreme-point enumeration otherwise.
    """
    p = _as_norm(getattr(p, "p", p))
    D, C = F.max_degree, F.max_fiber
    E, B = F.E, F.B
    fibers = {b: F.fiber_complex(b) for b in sorted(F.fibers)}
    iE0, vE0 = _inverse_h0(E, p, cap, method)
    iB0, _ = _inverse_h0(B, p, cap, method)
    iF0 = max(_inverse_h0(Fb, p, cap, method)[0] for Fb, _, _ in fibers.values())
    iE1, vE1 = _inverse_h1_coexact(E, p, cap, method)
    iB1, _ = _inverse_h1_coexact(B, p, cap, method)
    iF1 = max(_inverse_h1_coexact(Fb, p, cap, method)[0] for Fb, _, _ in fibers.values())
    rhs0 = 2 * D * (iB0 + 1) * (iF0 + 1)
    rhs1 = C * (iB1 + 1) * (iF1 + 1)
    # bounds the proofs actually give: the push-forward of a 0-cycle can grow by
    # C^(1-1/p), the pullback of a 0-cochain by C^(1/p), and the fiber
    # correction d(beta) by the coboundary operator norm A
    e_push = 0 if p == 1 else (1 if p == INF else Fraction(1, 2))
    e_pull = 1 if p == 1 else (0 if p == INF else Fraction(1, 2))
    A = operator_bound(E, 0, coboundary=True)
    prov0 = iB0 * _pow(C, e_push) + iF0 * (2 * D * iB0 * _pow(C, e_push) + 1)
    prov1 = iF1 + _pow(C, e_pull) * iB1 * (1 + A * iF1)
    report = LeraySerreReport(F.name, p, D, C, iE0, iB0, iF0, iE1, iB1, iF1, rhs0, rhs1, prov0, prov1)

    cycles = []
    # extremal cycles are float unit vectors at p = 2; only exact ones can be lifted exactly
    if vE0 is not None and vE0.witness_cycle is not None and vE0.witness_cycle.mode == EXACT:
        cycles.append(vE0.witness_cycle)
    for v in range(1, min(E.size(0), 1 + extra_witnesses)):
        cycles.append(Chain(0, {0: 1, v: -1}, EXACT))
    for alpha in cycles:
        fill = lift_filling(F, alpha, p, fibers)
        valid = apply_boundary(E, fill) == alpha
        ratio = _norm(fill, p) / _norm(alpha, p)
        report.witnesses.append(WitnessCheck("filling", valid, ratio, prov0, rhs0))

    cocycles = []
    if vE1 is not None and vE1.witness_cycle is not None and vE1.witness_cycle.mode == EXACT:
        cocycles.append(vE1.witness_cycle)
    for v in range(min(E.size(0), extra_witnesses)):
        cocycles.append(apply_coboundary(E, Chain(0, {v: 1}, EXACT)))
    for alpha in cocycles:
        if alpha.is_zero():
            continue
        cof = lift_cofilling(F, alpha, p, fibers)
        valid = apply_coboundary(E, cof) == alpha
        ratio = _norm(cof, p) / _norm(alpha, p)
        report.witnesses.append(WitnessCheck("cofilling", valid, ratio, prov1, rhs1))
    return report
