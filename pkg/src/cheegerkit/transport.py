"""Transport certificates, the geometric-series filling scheme, and the two
hypercube filling algorithms (word contraction and Laplacian decomposition).

A cycle c is transported to c' for cost x by a chain C with
boundary(C) = c' - c and ||C|| <= x ||c||.  Certificates record every step
and are re-checked by ``verify_certificate``, which recomputes boundaries from
the cell structure rather than from the production matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .complex import EXACT, INF, Chain, CellComplex, apply_boundary, apply_coboundary, format_number
from .constructors import hypercube_skeleton
from .errors import ComplexError, InvariantViolation, OracleViolation

CHAIN_NORM = "chain"
WORD_LENGTH = "word-length"


@dataclass(frozen=True)
class TransportStep:
    """One move: boundary(chain) = target - source, ||chain|| <= cost * ref_norm.

    ``ref_norm`` is ||source|| for chain transports and the word length for
    word contraction, where the natural size of a loop is its letter count.
    """

    source: Chain
    target: Chain
    chain: Chain
    cost: object
    ref_norm: object

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "chain": self.chain.to_json(),
            "cost": format_number(self.cost),
            "ref_norm": format_number(self.ref_norm),
        }


@dataclass
class TransportCertificate:
    dim: int
    p: float
    steps: list[TransportStep] = field(default_factory=list)
    total_cost: object = Fraction(0)
    norm_trace: list = field(default_factory=list)
    kind: str = CHAIN_NORM
    initial_ref: object = Fraction(0)

    @property
    def total_chain(self) -> Chain:
        out = Chain.zero(self.dim + 1)
        for s in self.steps:
            out = out + s.chain
        return out

    def filling(self) -> Chain:
        """A chain whose boundary is (first source) - (last target)."""
        return -self.total_chain

    def to_json(self, full: bool = True) -> dict:
        out = {
            "dim": self.dim,
            "p": "inf" if self.p == INF else self.p,
            "kind": self.kind,
            "total_cost": format_number(self.total_cost),
            "initial_ref": format_number(self.initial_ref),
            "norm_trace": [format_number(v) for v in self.norm_trace],
            "num_steps": len(self.steps),
        }
        if full:
            out["steps"] = [s.to_json() for s in self.steps]
        return out


def _ratio(num, den):
    if den == 0:
        return Fraction(0) if num == 0 else INF
    return Fraction(num) / Fraction(den) if isinstance(num, (int, Fraction)) and isinstance(den, (int, Fraction)) else num / den


def certificate_from_steps(dim, p, steps, kind=CHAIN_NORM, initial_ref=None) -> TransportCertificate:
    cert = TransportCertificate(dim, p, list(steps), kind=kind)
    if steps:
        ref0 = steps[0].ref_norm if initial_ref is None else initial_ref
        cert.initial_ref = ref0
        cert.total_cost = _ratio(cert.total_chain.norm(p), ref0)
        cert.norm_trace = [steps[0].source.norm(p)] + [s.target.norm(p) for s in steps]
    return cert


def compose(first: TransportCertificate, second: TransportCertificate) -> TransportCertificate:
    """Concatenate c -> c' (cost x) with c' -> c'' (cost y).

    The true cost of the composite is at most x + y ||c'|| / ||c||.  The
    familiar bound xy + x follows when ||c'|| <= x ||c||, which
    ``composition_law_holds`` checks; it does not hold in general (x = 0
    leaves c' = c and the composite costs y).
    """
    if first.steps and second.steps and first.steps[-1].target != second.steps[0].source:
        raise ValueError("certificates do not chain: end of the first is not the start of the second")
    return certificate_from_steps(first.dim, first.p, first.steps + second.steps, first.kind, first.initial_ref)


def composition_bound(first: TransportCertificate, second: TransportCertificate):
    """x + y * ||c'|| / ||c||, the provable cost of the composite."""
    x, y = first.total_cost, second.total_cost
    c0 = first.steps[0].source.norm(first.p)
    c1 = second.steps[0].source.norm(second.p)
    return x + y * _ratio(c1, c0)


def composition_law_holds(first: TransportCertificate, second: TransportCertificate) -> tuple[bool, bool]:
    """(hypothesis ||c'|| <= x ||c||, composite cost <= xy + x)."""
    x, y = first.total_cost, second.total_cost
    c0 = first.steps[0].source.norm(first.p)
    c1 = second.steps[0].source.norm(second.p)
    total = compose(first, second).total_cost
    return c1 <= x * c0, total <= x * y + x


# -- independent verification ----------------------------------------------


def _boundary_dict(X: CellComplex, c: Chain) -> dict:
    """Boundary via column access on the incidence; a plain dict, no Chain arithmetic."""
    B = X.boundary(c.dim).tocsc()
    out: dict[int, Fraction] = {}
    for j, v in c.coeffs.items():
        for r, s in zip(B.indices[B.indptr[j]:B.indptr[j + 1]].tolist(), B.data[B.indptr[j]:B.indptr[j + 1]].tolist()):
            out[r] = out.get(r, 0) + s * Fraction(v)
    return {k: v for k, v in out.items() if v != 0}


def _diff(a: Chain, b: Chain) -> dict:
    out = {k: Fraction(v) for k, v in a.coeffs.items()}
    for k, v in b.coeffs.items():
        out[k] = out.get(k, 0) - Fraction(v)
    return {k: v for k, v in out.items() if v != 0}


def verify_certificate(X: CellComplex, cert: TransportCertificate) -> list[str]:
    """Re-check every step exactly.  Returns a list of problems (empty when valid)."""
    problems = []
    for n, s in enumerate(cert.steps):
        if _boundary_dict(X, s.chain) != _diff(s.target, s.source):
            problems.append(f"step {n}: boundary of the chain is not target - source")
        if s.chain.norm(cert.p) > s.cost * s.ref_norm:
            problems.append(f"step {n}: chain norm exceeds cost * reference norm")
        if cert.kind == CHAIN_NORM and s.ref_norm != s.source.norm(cert.p):
            problems.append(f"step {n}: reference norm is not the source norm")
        if n and cert.steps[n - 1].target != s.source:
            problems.append(f"step {n}: does not start where step {n - 1} ended")
    if cert.steps:
        total = cert.total_chain.norm(cert.p)
        if total > cert.total_cost * cert.initial_ref:
            problems.append("total chain exceeds the claimed total cost")
    return problems


# -- geometric series filling ---------------------------------------------------


@dataclass
class ExpFillResult:
    filling: Chain
    certificate: TransportCertificate
    residual: Chain
    bound: object

    @property
    def within_bound(self) -> bool:
        return self.filling.norm(self.certificate.p) <= self.bound


def expfill(
    step_oracle: Callable[[Chain], tuple[Chain, Chain]],
    alpha: Chain,
    a,
    x,
    tol=Fraction(1, 10**9),
    X: CellComplex | None = None,
    p=1,
    max_steps: int = 10_000,
) -> ExpFillResult:
    """Fill alpha by repeatedly transporting it to a smaller cycle.

    ``step_oracle(c)`` returns (c', C) with boundary(C) = c' - c,
    ||c'|| <= a ||c|| and ||C|| <= x ||c||.  Each contract is checked as the
    iteration runs; a broken contract raises OracleViolation naming the step.
    The result fills alpha up to a residual of norm below ``tol``, with total
    norm at most x / (1 - a) * ||alpha||.
    """
    if not 0 < a < 1:
        raise ValueError("need 0 < a < 1")
    steps = []
    c = alpha
    n = 0
    while c.norm(p) >= tol and not c.is_zero():
        if n >= max_steps:
            raise OracleViolation(f"no convergence after {max_steps} steps", step=n)
        c_next, C = step_oracle(c)
        nc = c.norm(p)
        if c_next.norm(p) > a * nc:
            raise OracleViolation(f"step {n}: ||c'|| = {c_next.norm(p)} exceeds a ||c|| = {a * nc}", step=n)
        if C.norm(p) > x * nc:
            raise OracleViolation(f"step {n}: ||C|| = {C.norm(p)} exceeds x ||c|| = {x * nc}", step=n)
        if X is not None and apply_boundary(X, C) != c_next - c:
            raise OracleViolation(f"step {n}: boundary of the transport chain is not c' - c", step=n)
        steps.append(TransportStep(c, c_next, C, x, nc))
        c = c_next
        n += 1
    cert = certificate_from_steps(alpha.dim, p, steps, CHAIN_NORM, alpha.norm(p))
    filling = cert.filling() if steps else Chain.zero(alpha.dim + 1)
    bound = Fraction(x) / (1 - Fraction(a)) * alpha.norm(p) if isinstance(a, (int, Fraction)) else x / (1 - a) * alpha.norm(p)
    res = ExpFillResult(filling, cert, c, bound)
    if not res.within_bound:
        raise OracleViolation("filling exceeds the geometric series bound despite a valid oracle")
    return res


# -- hypercube words ---------------------------------------------------------------


@dataclass(frozen=True)
class HypercubeWord:
    """An edge loop at the origin of {0,1}^deg: letters (coordinate, sign).

    The sign is +1 when the letter raises its coordinate from 0 to 1 and -1
    when it lowers it, so it is determined by the position in the walk and is
    checked on construction.
    """

    deg: int
    letters: tuple[tuple[int, int], ...]

    def __post_init__(self):
        v = 0
        for c, s in self.letters:
            if not 0 <= c < self.deg:
                raise ComplexError(f"coordinate {c} outside 0..{self.deg - 1}")
            want = -1 if v >> c & 1 else 1
            if s != want:
                raise ComplexError(f"letter ({c}, {s:+d}) cannot be taken from vertex {v:b}")
            v ^= 1 << c
        if v != 0:
            raise ComplexError("word does not close: some coordinate toggles an odd number of times")

    @classmethod
    def from_coordinates(cls, deg: int, coords: Sequence[int]) -> "HypercubeWord":
        v = 0
        letters = []
        for c in coords:
            letters.append((int(c), -1 if v >> c & 1 else 1))
            v ^= 1 << c
        return cls(deg, tuple(letters))

    @property
    def coordinates(self) -> list[int]:
        return [c for c, _ in self.letters]

    def __len__(self):
        return len(self.letters)


def random_closed_word(deg: int, length: int, rng: np.random.Generator) -> HypercubeWord:
    """Each chosen coordinate appears an even number of times, in random order."""
    half = [int(c) for c in rng.integers(0, deg, size=length // 2)]
    coords = half + half
    rng.shuffle(coords)
    return HypercubeWord.from_coordinates(deg, coords)


def _edge_id(c: int, v: int):
    return ((c,), v & ~(1 << c))


def _square_id(a: int, b: int, v: int):
    lo, hi = min(a, b), max(a, b)
    return ((lo, hi), v & ~(1 << a) & ~(1 << b))


def word_cycle(X: CellComplex, w: Sequence[int]) -> Chain:
    """The 1-chain traced by a coordinate walk from the origin."""
    out: dict[int, int] = {}
    v = 0
    for c in w:
        e = X.index(1, _edge_id(c, v))
        out[e] = out.get(e, 0) + (-1 if v >> c & 1 else 1)
        v ^= 1 << c
    return Chain(1, out, EXACT)


def _swap_sign(v: int, a: int, b: int) -> int:
    """epsilon with path(a then b) - path(b then a) = epsilon * boundary(square), from v.

    For a < b the square's boundary runs a, then b, then back; the first edge
    of the (a, b) path is the +a edge of the square exactly when v has b clear.
    """
    if a > b:
        return -_swap_sign(v, b, a)
    s_a = -1 if v >> a & 1 else 1
    return s_a if not v >> b & 1 else -s_a


@dataclass
class WordContraction:
    word: HypercubeWord
    filling: Chain
    squares: int
    certificate: TransportCertificate

    @property
    def measured_constant(self) -> Fraction:
        """||F||_1 / (deg * len(w)), the empirical constant in the deg * length bound."""
        if not len(self.word):
            return Fraction(0)
        return Fraction(self.filling.norm(1), self.word.deg * len(self.word))

    def to_json(self, full: bool = False) -> dict:
        return {
            "deg": self.word.deg,
            "length": len(self.word),
            "squares": self.squares,
            "filling_norm": format_number(self.filling.norm(1)),
            "measured_constant": format_number(self.measured_constant),
            "filling": self.filling.to_json(),
            "certificate": self.certificate.to_json(full),
        }


def hypercube_contract_word(w: HypercubeWord, X: CellComplex | None = None) -> WordContraction:
    """Fill the loop of w by squares of the 2-skeleton.

    Repeatedly find the leftmost pair of letters on the same coordinate with
    no repeat in between (by pigeonhole they are at most deg apart), commute
    the right one leftward past the letters in between, one square per
    transposition, and cancel the now adjacent pair.
    """
    if X is None:
        X = hypercube_skeleton(w.deg, 2)
    word = w.coordinates
    F: dict[int, int] = {}
    steps = []
    squares = 0
    while word:
        seen = {}
        i = j = None
        for t, c in enumerate(word):
            if c in seen:
                i, j = seen[c], t
                break
            seen[c] = t
        if j is None:
            raise InvariantViolation("closed word without a repeated coordinate")
        src = word_cycle(X, word)
        round_chain: dict[int, int] = {}
        for t in range(j, i + 1, -1):
            a, b = word[t - 1], word[t]
            v = 0
            for c in word[: t - 1]:
                v ^= 1 << c
            eps = _swap_sign(v, a, b)
            q = X.index(2, _square_id(a, b, v))
            round_chain[q] = round_chain.get(q, 0) + eps
            word[t - 1], word[t] = word[t], word[t - 1]
            squares += 1
        del word[i : i + 2]
        for q, e in round_chain.items():
            F[q] = F.get(q, 0) + e
        tgt = word_cycle(X, word)
        chain = -Chain(2, round_chain, EXACT)
        ref = len(word) + 2
        steps.append(TransportStep(src, tgt, chain, Fraction(chain.norm(1), ref), ref))
    cert = certificate_from_steps(1, 1, steps, WORD_LENGTH, len(w))
    return WordContraction(w, Chain(2, F, EXACT), squares, cert)


# -- hypercube Laplacian decomposition ------------------------------------------------


def hypercube_laplacian_ratio(deg: int) -> Fraction:
    return Fraction(deg - 2, deg + 2)


def decomposition_round_bound(deg: int, tol, start_norm=1) -> int:
    """Rounds needed for the residual to fall below tol when each round shrinks by the ratio."""
    if start_norm == 0:
        return 0
    return max(0, math.ceil(math.log(float(start_norm) / float(tol)) / math.log((deg + 2) / (deg - 2))))


@dataclass
class DecompositionRound:
    norm_before: Fraction
    norm_after: Fraction

    @property
    def ratio(self) -> Fraction:
        return self.norm_after / self.norm_before


@dataclass
class HypercubeDecomposition:
    deg: int
    c: Chain
    x: Chain
    y: Chain
    residual: Chain
    rounds: list[DecompositionRound]
    ambient: CellComplex

    @property
    def cost(self) -> Fraction:
        return self.x.norm(1) + self.y.norm(1)

    @property
    def cost_ratio(self):
        n = self.c.norm(1)
        return self.cost / n if n else Fraction(0)

    def to_json(self, full: bool = False) -> dict:
        out = {
            "deg": self.deg,
            "rounds": len(self.rounds),
            "ratios": [format_number(r.ratio) for r in self.rounds],
            "ratio_bound": format_number(hypercube_laplacian_ratio(self.deg)),
            "x_norm": format_number(self.x.norm(1)),
            "y_norm": format_number(self.y.norm(1)),
            "residual_norm": format_number(self.residual.norm(1)),
            "cost_ratio": format_number(self.cost_ratio),
        }
        if full:
            out.update(x=self.x.to_json(), y=self.y.to_json(), residual=self.residual.to_json())
        return out


def _parallel_sum(X: CellComplex, c: Chain, deg: int) -> Chain:
    """Sum over parallel squares at distance one, by translating each square."""
    out: dict[int, Fraction] = {}
    cells = X.cells[2]
    for k, v in c.coeffs.items():
        free, base = cells[k]
        for t in range(deg):
            if t in free:
                continue
            n = X.index(2, (free, base ^ (1 << t)))
            out[n] = out.get(n, 0) + v
    return Chain(2, out, EXACT)


def hypercube_decompose(c: Chain, deg: int, tol=1e-9, X: CellComplex | None = None) -> HypercubeDecomposition:
    """Split a 2-chain of the cube as c = d x + y + residual with y closed.

    Uses Delta c = (deg + 2) c - P c, where P sums the parallel squares at
    distance one, rearranged as
        c = (d bd c + bd d c) / (deg + 2) + P c / (deg + 2),
    and repeats on the last term, whose norm is at most (deg-2)/(deg+2) of
    the previous one.  Runs in the 3-skeleton; arithmetic is exact.
    """
    if deg < 3:
        raise ComplexError("the decomposition needs deg >= 3")
    if X is None:
        X = hypercube_skeleton(deg, 3)
    c = c.to_exact()
    tol = Fraction(tol) if not isinstance(tol, Fraction) else tol
    bound = hypercube_laplacian_ratio(deg)
    k = Fraction(1, deg + 2)
    x = Chain.zero(1)
    y = Chain.zero(2)
    cur = c
    rounds = []
    limit = decomposition_round_bound(deg, tol, c.norm(1)) + 1
    while cur.norm(1) >= tol and not cur.is_zero():
        if len(rounds) > limit:
            raise InvariantViolation("decomposition exceeded its round bound")
        x = x + apply_boundary(X, cur).scale(k)
        y = y + apply_boundary(X, apply_coboundary(X, cur)).scale(k)
        nxt = _parallel_sum(X, cur, deg).scale(k)
        r = DecompositionRound(cur.norm(1), nxt.norm(1))
        if r.ratio > bound:
            raise InvariantViolation(f"round {len(rounds)}: ratio {r.ratio} exceeds {bound}")
        rounds.append(r)
        cur = nxt
    return HypercubeDecomposition(deg, c, x, y, cur, rounds, X)


def verify_decomposition(dec: HypercubeDecomposition) -> list[str]:
    """Independent exact check, with boundaries recomputed from the cube cells."""
    problems = []
    deg = dec.deg
    X = dec.ambient
    # d x from cell geometry: a 1-cochain on edges pushed to the squares containing them
    sq = X.cells[2]
    dx: dict[int, Fraction] = {}
    for n, (free, base) in enumerate(sq):
        a, b = free
        total = Fraction(0)
        # boundary(square) = a@base + b@base|a - a@base|b - b@base
        for (coord, vb), s in (((a, base), 1), ((b, base | 1 << a), 1), ((a, base | 1 << b), -1), ((b, base), -1)):
            e = X.index(1, ((coord,), vb))
            total += s * dec.x.coeffs.get(e, 0)
        if total:
            dx[n] = total
    recon = dict(dx)
    for k, v in dec.y.coeffs.items():
        recon[k] = recon.get(k, 0) + v
    for k, v in dec.residual.coeffs.items():
        recon[k] = recon.get(k, 0) + v
    recon = {k: v for k, v in recon.items() if v != 0}
    if recon != dict(dec.c.coeffs):
        problems.append("c != d x + y + residual")
    by: dict[int, Fraction] = {}
    for n, v in dec.y.coeffs.items():
        (a, b), base = sq[n]
        for (coord, vb), s in (((a, base), 1), ((b, base | 1 << a), 1), ((a, base | 1 << b), -1), ((b, base), -1)):
            e = X.index(1, ((coord,), vb))
            by[e] = by.get(e, 0) + s * v
    if any(v != 0 for v in by.values()):
        problems.append("y is not closed")
    bound = hypercube_laplacian_ratio(deg)
    for t, r in enumerate(dec.rounds):
        if r.ratio > bound:
            problems.append(f"round {t}: ratio {r.ratio} exceeds {bound}")
    return problems


def verify_word_contraction(res: WordContraction, X: CellComplex | None = None) -> list[str]:
    """Recompute the boundary of F square by square and compare with the loop."""
    w = res.word
    if X is None:
        X = hypercube_skeleton(w.deg, 2)
    sq = X.cells[2]
    bd: dict = {}
    for n, v in res.filling.coeffs.items():
        (a, b), base = sq[n]
        for key, s in ((((a,), base), 1), (((b,), base | 1 << a), 1), (((a,), base | 1 << b), -1), (((b,), base), -1)):
            bd[key] = bd.get(key, 0) + s * v
    loop: dict = {}
    v = 0
    for c in w.coordinates:
        key = ((c,), v & ~(1 << c))
        loop[key] = loop.get(key, 0) + (-1 if v >> c & 1 else 1)
        v ^= 1 << c
    bd = {k: x for k, x in bd.items() if x}
    loop = {k: x for k, x in loop.items() if x}
    problems = []
    if bd != loop:
        problems.append("boundary of the filling differs from the loop")
    if res.filling.norm(1) > 2 * w.deg * len(w):
        problems.append("filling exceeds 2 * deg * length")
    problems += verify_certificate(X, res.certificate)
    return problems
