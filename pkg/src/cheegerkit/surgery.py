"""Homology of simultaneous slope-q Dehn surgery on a framed link in S^3.

H_1 of the surgered manifold is generated by the meridians mu_i with the
relations q mu_i + sum_j Lk_ij mu_j = 0, so it is the cokernel of qI + Lk.
The diagonal of Lk carries the framing self-linking lk(lambda_i, L_i).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .complex import format_number
from .errors import NotRationalHomologySphere
from .homology import HomologyGroup
from .snf import int_det, smith_normal_form


@dataclass(frozen=True)
class FramedLink:
    Lk: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        M = tuple(tuple(int(v) for v in row) for row in self.Lk)
        n = len(M)
        if any(len(r) != n for r in M):
            raise ValueError("linking matrix must be square")
        if any(M[i][j] != M[j][i] for i in range(n) for j in range(n)):
            raise ValueError("linking matrix must be symmetric")
        object.__setattr__(self, "Lk", M)
        if self.names is not None and len(self.names) != n:
            raise ValueError("one name per component")

    @property
    def n(self) -> int:
        return len(self.Lk)

    @classmethod
    def unknot(cls, framing: int = 0) -> "FramedLink":
        return cls(((framing,),), ("U",))

    @classmethod
    def hopf(cls) -> "FramedLink":
        return cls(((0, 1), (1, 0)), ("A", "B"))

    @classmethod
    def from_json(cls, data) -> "FramedLink":
        if isinstance(data, dict):
            return cls(tuple(map(tuple, data["Lk"])), tuple(data["names"]) if data.get("names") else None)
        return cls(tuple(map(tuple, data)))

    @classmethod
    def from_text(cls, text: str) -> "FramedLink":
        """JSON (matrix or {"Lk": ...}) or CSV rows of integers."""
        text = text.strip()
        if text.startswith("[") or text.startswith("{"):
            return cls.from_json(json.loads(text))
        rows = [[int(v) for v in line.replace(";", ",").split(",") if v.strip()] for line in text.splitlines() if line.strip()]
        return cls(tuple(map(tuple, rows)))

    def to_json(self) -> dict:
        return {"Lk": [list(r) for r in self.Lk], "names": list(self.names) if self.names else None}

    def max_row_sum(self) -> int:
        """max_i sum_j |Lk_ij|, the L^1 operator norm of Lk (it is symmetric)."""
        return max((sum(abs(v) for v in row) for row in self.Lk), default=0)


def random_link(n: int, rng: np.random.Generator, lo: int = -3, hi: int = 3) -> FramedLink:
    A = rng.integers(lo, hi + 1, size=(n, n))
    S = np.triu(A) + np.triu(A, 1).T
    return FramedLink(tuple(map(tuple, S.tolist())))


def presentation_matrix(link: FramedLink, q: int) -> list[list[int]]:
    """q I + Lk: row i is the relation q mu_i + sum_j Lk_ij mu_j = 0."""
    return [[link.Lk[i][j] + (q if i == j else 0) for j in range(link.n)] for i in range(link.n)]


@dataclass(frozen=True)
class SurgeryHomology:
    group: HomologyGroup
    determinant: int

    @property
    def rational_homology_sphere(self) -> bool:
        return self.determinant != 0

    def to_json(self) -> dict:
        return {**self.group.to_json(), "order": self.group.order, "determinant": self.determinant,
                "rational_homology_sphere": self.rational_homology_sphere}


def surgery_h1(link: FramedLink, q: int) -> SurgeryHomology:
    """H_1 as the cokernel of qI + Lk, from the Smith normal form."""
    M = presentation_matrix(link, q)
    n = link.n
    if n == 0:
        return SurgeryHomology(HomologyGroup(0), 1)
    res = smith_normal_form(M, transforms=False)
    factors = res.invariant_factors
    betti = n - len(factors)
    return SurgeryHomology(HomologyGroup(betti, tuple(f for f in factors if f > 1)), int_det(M))


def min_dominant_slope(link: FramedLink) -> int:
    """Smallest q >= 1 making qI + Lk strictly diagonally dominant with positive diagonal."""
    q = 1
    for i, row in enumerate(link.Lk):
        off = sum(abs(v) for j, v in enumerate(row) if j != i)
        q = max(q, off - row[i] + 1, -row[i] + 1)
    return q


@dataclass
class ContractionCertificate:
    q: int
    factor_bound: Fraction
    halving: bool
    iterates: list[list[Fraction]]
    ratios: list[Fraction]
    converged: bool
    contracting: bool
    notes: list[str] = field(default_factory=list)

    @property
    def max_ratio(self) -> Fraction:
        return max(self.ratios, default=Fraction(0))

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "factor_bound": format_number(self.factor_bound),
            "halving": self.halving,
            "steps": len(self.ratios),
            "max_ratio": format_number(self.max_ratio),
            "ratios": [format_number(r) for r in self.ratios],
            "converged": self.converged,
            "contracting": self.contracting,
            "final": [format_number(v) for v in self.iterates[-1]],
            "notes": list(self.notes),
        }


def _l1(v) -> Fraction:
    return sum((abs(x) for x in v), Fraction(0))


def meridian_contraction(link: FramedLink, q: int, a: Sequence, tol=Fraction(1, 10**9), maxiter: int = 200) -> ContractionCertificate:
    """Iterate a -> -(1/q) Lk a on meridian coordinates.

    In H_1 each mu_i equals -(1/q) sum_j Lk_ij mu_j, so every iterate is
    homologous to the input class.  The per-step L^1 factor is at most
    (max row sum of |Lk|) / q, which is <= 1/2 once q is twice the row sum.
    """
    if q == 0:
        raise ValueError("slope q must be nonzero")
    n = link.n
    cur = [Fraction(v) for v in a]
    if len(cur) != n:
        raise ValueError(f"vector has {len(cur)} entries, link has {n} components")
    bound = Fraction(link.max_row_sum(), abs(q))
    tol = Fraction(tol)
    cert = ContractionCertificate(q, bound, bound <= Fraction(1, 2), [cur], [], False, bound < 1)
    if not cert.contracting:
        cert.notes.append("factor bound >= 1: the iteration is not certified to contract")
    for _ in range(maxiter):
        if _l1(cur) < tol:
            cert.converged = True
            break
        nxt = [-sum((link.Lk[i][j] * cur[j] for j in range(n)), Fraction(0)) / q for i in range(n)]
        r = _l1(nxt) / _l1(cur)
        if r > bound:
            raise ArithmeticError(f"step ratio {r} exceeds the row-sum bound {bound}")
        cert.ratios.append(r)
        cert.iterates.append(nxt)
        cur = nxt
    else:
        cert.converged = _l1(cur) < tol
    return cert


@dataclass(frozen=True)
class TorsionRow:
    q: int
    order: int | None
    group: str
    rhs: bool


def torsion_growth_table(link: FramedLink, q_range: Iterable[int]) -> list[TorsionRow]:
    rows = []
    for q in q_range:
        h = surgery_h1(link, q)
        rows.append(TorsionRow(q, h.group.order, str(h.group), h.rational_homology_sphere))
    return rows


def require_rhs(link: FramedLink, q: int) -> SurgeryHomology:
    h = surgery_h1(link, q)
    if not h.rational_homology_sphere:
        raise NotRationalHomologySphere(f"det(qI + Lk) = 0 at q = {q}")
    return h


def parse_q_range(text: str) -> range:
    """"a:b" inclusive."""
    lo, _, hi = text.partition(":")
    lo_i, hi_i = int(lo), int(hi or lo)
    if hi_i < lo_i:
        raise ValueError(f"empty slope range {text!r}")
    return range(lo_i, hi_i + 1)


def det_matches(link: FramedLink, q: int) -> bool:
    h = surgery_h1(link, q)
    if h.determinant == 0:
        return h.group.betti > 0
    return h.group.order == abs(h.determinant) and math.prod(h.group.torsion) == abs(h.determinant)
