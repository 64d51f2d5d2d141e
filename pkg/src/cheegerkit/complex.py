"""Finite polyhedral chain complexes, chains, and L^p norms.

A :class:`CellComplex` stores signed integer incidence per dimension.  When the
complex is augmented there is one extra cell in dimension -1 and the boundary
of every vertex is that cell, so a connected complex has vanishing H_0.

Cells carry optional attaching data used by the cover builder: endpoints for
1-cells and closed edge words for 2-cells.  Simplicial and cubical
constructors fill these in automatically.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ComplexError, DimensionError, MalformedFacetError

EXACT = "exact"
FLOAT = "float"
FLOAT_DROP_TOL = 1e-14

INF = math.inf


def _as_norm(p) -> float:
    if isinstance(p, str):
        p = p.strip().lower()
        if p in ("inf", "infinity", "max", "oo"):
            return INF
        if p in ("m", "mass"):
            return 1
        p = int(p)
    if p in (1, 2):
        return int(p)
    if p == INF:
        return INF
    raise ValueError(f"unsupported norm p={p!r}; expected 1, 2 or inf")


@dataclass(frozen=True)
class NormSpec:
    """Which L^p norm to use.  The mass norm on complexes is the L^1 norm."""

    p: float = 1

    def __post_init__(self):
        object.__setattr__(self, "p", _as_norm(self.p))

    @classmethod
    def mass(cls) -> "NormSpec":
        return cls(1)

    def __str__(self):
        return "inf" if self.p == INF else str(self.p)


def norm_of(values: Iterable, p) -> object:
    """L^p norm of a sequence of coefficients.

    Exact (a Fraction or int) for p in {1, inf} on exact input; a float for p=2.
    """
    p = _as_norm(p)
    vals = list(values)
    if p == 1:
        return sum((abs(v) for v in vals), Fraction(0) if _all_exact(vals) else 0.0)
    if p == INF:
        if not vals:
            return Fraction(0) if _all_exact(vals) else 0.0
        return max(abs(v) for v in vals)
    return math.sqrt(sum(float(v) * float(v) for v in vals))


def _all_exact(vals) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in vals)


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    return Fraction(x)


@dataclass(frozen=True)
class Chain:
    """A sparse chain (or cochain) on the cells of one dimension.

    ``coeffs`` maps cell index to coefficient; zero coefficients are never
    stored.  ``mode`` is ``"exact"`` (Fractions) or ``"float"``.
    """

    dim: int
    coeffs: Mapping[int, object] = field(default_factory=dict)
    mode: str = EXACT

    def __post_init__(self):
        if self.mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown coefficient mode {self.mode!r}")
        clean = {}
        for k, v in dict(self.coeffs).items():
            if self.mode == EXACT:
                v = to_fraction(v)
                if v != 0:
                    clean[int(k)] = v
            else:
                v = float(v)
                if abs(v) > FLOAT_DROP_TOL:
                    clean[int(k)] = v
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def zero(cls, dim: int, mode: str = EXACT) -> "Chain":
        return cls(dim, {}, mode)

    @classmethod
    def unit(cls, dim: int, index: int, coeff=1, mode: str = EXACT) -> "Chain":
        return cls(dim, {index: coeff}, mode)

    @classmethod
    def from_dense(cls, dim: int, values: Sequence, mode: str | None = None) -> "Chain":
        values = list(values)
        if mode is None:
            mode = EXACT if _all_exact(values) else FLOAT
        return cls(dim, {i: v for i, v in enumerate(values) if v != 0}, mode)

    def to_dense(self, size: int) -> list:
        zero = Fraction(0) if self.mode == EXACT else 0.0
        out = [zero] * size
        for k, v in self.coeffs.items():
            if k >= size:
                raise DimensionError(f"cell index {k} out of range for {size} cells")
            out[k] = v
        return out

    def to_array(self, size: int) -> np.ndarray:
        out = np.zeros(size)
        for k, v in self.coeffs.items():
            out[k] = float(v)
        return out

    def to_float(self) -> "Chain":
        return Chain(self.dim, {k: float(v) for k, v in self.coeffs.items()}, FLOAT)

    def to_exact(self) -> "Chain":
        return Chain(self.dim, {k: to_fraction(v) for k, v in self.coeffs.items()}, EXACT)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def norm(self, p=1):
        return norm_of(self.coeffs.values(), p)

    def _check(self, other: "Chain"):
        if other.dim != self.dim:
            raise DimensionError(f"cannot combine chains of dimension {self.dim} and {other.dim}")

    def __add__(self, other: "Chain") -> "Chain":
        self._check(other)
        mode = EXACT if self.mode == other.mode == EXACT else FLOAT
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return Chain(self.dim, out, mode)

    def __neg__(self) -> "Chain":
        return Chain(self.dim, {k: -v for k, v in self.coeffs.items()}, self.mode)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scale(self, c) -> "Chain":
        if self.mode == EXACT and isinstance(c, (int, Fraction)):
            return Chain(self.dim, {k: v * c for k, v in self.coeffs.items()}, EXACT)
        return Chain(self.dim, {k: float(v) * float(c) for k, v in self.coeffs.items()}, FLOAT)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return self.dim == other.dim and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.dim, tuple(self.coeffs.items())))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "mode": self.mode,
            "coeffs": [[k, format_number(v)] for k, v in self.coeffs.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Chain":
        mode = data.get("mode", EXACT)
        raw = data.get("coeffs", [])
        items = raw.items() if isinstance(raw, Mapping) else raw
        coeffs = {}
        for k, v in items:
            coeffs[int(k)] = to_fraction(v) if mode == EXACT else float(v)
        return cls(int(data["dim"]), coeffs, mode)


def format_number(v) -> object:
    """Rationals print exactly as "n/d"; floats with 12 significant digits."""
    if isinstance(v, bool):
        return v
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return float(f"{float(v):.12g}")
    return v


def _freeze(m: sp.spmatrix) -> sp.csc_matrix:
    m = sp.csc_matrix(m, dtype=np.int64, copy=True)
    m.eliminate_zeros()
    m.sort_indices()
    for arr in (m.data, m.indices, m.indptr):
        arr.flags.writeable = False
    return m


def _id(x):
    """JSON-friendly cell id: tuples become lists recursively."""
    if isinstance(x, tuple):
        return [_id(v) for v in x]
    return x


def _unjson_id(x):
    if isinstance(x, list):
        return tuple(_unjson_id(v) for v in x)
    return x


class ChainComplex:
    """Bare algebraic chain complex: cell counts and boundary maps.

    ``sizes[k]`` is the rank of C_k for ``lo <= k <= hi``; ``boundary(k)`` maps
    C_k to C_{k-1} and is an empty matrix outside the stored range.  This is
    the shape the filling and homology code works with; it also serves as the
    formal transpose used for coboundary constants.
    """

    def __init__(self, sizes: Mapping[int, int], boundaries: Mapping[int, sp.spmatrix], name: str = ""):
        self.sizes = {int(k): int(v) for k, v in sizes.items()}
        self.lo = min(self.sizes)
        self.hi = max(self.sizes)
        self._bd = {}
        for k, m in boundaries.items():
            m = _freeze(m)
            if m.shape != (self.size(k - 1), self.size(k)):
                raise ComplexError(f"boundary {k} has shape {m.shape}, expected {(self.size(k - 1), self.size(k))}")
            self._bd[int(k)] = m
        self.name = name

    def size(self, k: int) -> int:
        return self.sizes.get(k, 0)

    def boundary(self, k: int) -> sp.csc_matrix:
        m = self._bd.get(k)
        if m is None:
            return sp.csc_matrix((self.size(k - 1), self.size(k)), dtype=np.int64)
        return m

    def transpose(self) -> "ChainComplex":
        """Cochain complex re-indexed as a chain complex: T_j = C^{-j}."""
        sizes = {-k: n for k, n in self.sizes.items()}
        bds = {-k + 1: self.boundary(k).T for k in range(self.lo + 1, self.hi + 1)}
        return ChainComplex(sizes, bds, name=f"{self.name}^T" if self.name else "transpose")

    def as_chain_complex(self) -> "ChainComplex":
        return self


class CellComplex:
    """Finite polyhedral complex with exact signed incidence.

    Parameters
    ----------
    cells:
        ``cells[i]`` is the ordered list of ids of the i-cells, i = 0..dims.
    incidence:
        ``incidence[i]`` for i = 1..dims, an integer matrix of shape
        (#cells[i-1], #cells[i]).  ``incidence[0]`` is ignored and rebuilt from
        ``augmented``.
    edge_ends:
        Optional (tail, head) vertex indices for each 1-cell.
    face_words:
        Optional closed edge walk ``[(edge, +-1), ...]`` for each 2-cell.
    allow_degenerate:
        Permit positive-dimensional cells with zero boundary (loops, CW cells
        attached by a commutator).
    """

    def __init__(
        self,
        cells: Sequence[Sequence[Hashable]],
        incidence: Sequence[sp.spmatrix | None],
        augmented: bool = True,
        name: str = "",
        edge_ends: Sequence[tuple[int, int]] | None = None,
        face_words: Sequence[Sequence[tuple[int, int]]] | None = None,
        labels: Sequence[Sequence[str]] | None = None,
        allow_degenerate: bool = False,
        validate: bool = True,
    ):
        if not cells:
            raise ComplexError("a complex needs at least one dimension of cells")
        self.cells = tuple(tuple(c) for c in cells)
        self.dims = len(self.cells) - 1
        self.augmented = bool(augmented)
        self.name = name
        self.allow_degenerate = allow_degenerate
        self.labels = tuple(tuple(l) for l in labels) if labels is not None else None
        n0 = len(self.cells[0])
        aug = np.ones((1, n0), dtype=np.int64) if self.augmented else np.zeros((0, n0), dtype=np.int64)
        mats = [_freeze(sp.csc_matrix(aug))]
        for i in range(1, self.dims + 1):
            m = incidence[i] if i < len(incidence) else None
            if m is None:
                raise ComplexError(f"missing incidence for dimension {i}")
            mats.append(_freeze(m))
        self.incidence = tuple(mats)
        self.edge_ends = tuple(tuple(map(int, e)) for e in edge_ends) if edge_ends is not None else None
        self.face_words = (
            tuple(tuple((int(e), int(s)) for e, s in w) for w in face_words) if face_words is not None else None
        )
        self._index = None
        if validate:
            self.validate()

    # -- sizes and maps ---------------------------------------------------

    def size(self, i: int) -> int:
        if i == -1:
            return 1 if self.augmented else 0
        if 0 <= i <= self.dims:
            return len(self.cells[i])
        return 0

    @property
    def lo(self) -> int:
        return -1 if self.augmented else 0

    @property
    def hi(self) -> int:
        return self.dims

    def counts(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cells)

    def boundary(self, k: int) -> sp.csc_matrix:
        """Lenient boundary map C_k -> C_{k-1}; empty outside the complex."""
        if 0 <= k <= self.dims:
            return self.incidence[k]
        return sp.csc_matrix((self.size(k - 1), self.size(k)), dtype=np.int64)

    def boundary_matrix(self, i: int) -> sp.csc_matrix:
        """The signed incidence matrix of the boundary map from i-cells.

        For i = 0 this is the augmentation row when the complex is augmented
        and an empty 0 x n0 matrix otherwise.
        """
        if not 0 <= i <= self.dims:
            raise DimensionError(f"dimension {i} out of range 0..{self.dims}")
        return self.incidence[i]

    def coboundary_matrix(self, i: int) -> sp.csc_matrix:
        """d: C^i -> C^{i+1}, the transpose of the boundary from (i+1)-cells."""
        return self.boundary(i + 1).T.tocsc()

    def chain_complex(self) -> ChainComplex:
        sizes = {k: self.size(k) for k in range(self.lo, self.hi + 1)}
        bds = {k: self.boundary(k) for k in range(self.lo + 1, self.hi + 1)}
        return ChainComplex(sizes, bds, name=self.name)

    def as_chain_complex(self) -> ChainComplex:
        return self.chain_complex()

    def transpose(self) -> ChainComplex:
        return self.chain_complex().transpose()

    def index(self, i: int, cell_id) -> int:
        if self._index is None:
            self._index = [{c: k for k, c in enumerate(cs)} for cs in self.cells]
        return self._index[i][cell_id]

    # -- validation -------------------------------------------------------

    def validate(self) -> None:
        for i in range(1, self.dims + 1):
            prod = (self.incidence[i - 1] @ self.incidence[i]).tocsc()
            prod.eliminate_zeros()
            if prod.nnz:
                raise ComplexError(f"boundary of boundary is nonzero in dimension {i}")
            if not self.allow_degenerate:
                nz = np.diff(self.incidence[i].indptr)
                if (nz == 0).any():
                    bad = int(np.flatnonzero(nz == 0)[0])
                    raise ComplexError(f"{i}-cell {self.cells[i][bad]!r} has zero boundary")
        if self.augmented:
            row = self.incidence[0]
            if not (row.nnz == len(self.cells[0]) and (row.data == 1).all()):
                raise ComplexError("augmentation must have exactly one +1 per vertex")
        if self.edge_ends is not None:
            if self.dims < 1 or len(self.edge_ends) != len(self.cells[1]):
                raise ComplexError("edge_ends must list one (tail, head) per edge")
            b1 = self.incidence[1].tocsc()
            for e, (t, h) in enumerate(self.edge_ends):
                col = dict(zip(b1.indices[b1.indptr[e]:b1.indptr[e + 1]], b1.data[b1.indptr[e]:b1.indptr[e + 1]]))
                expect = {}
                expect[h] = expect.get(h, 0) + 1
                expect[t] = expect.get(t, 0) - 1
                expect = {k: v for k, v in expect.items() if v}
                if col != expect:
                    raise ComplexError(f"edge {e} endpoints {(t, h)} disagree with incidence")
        if self.face_words is not None:
            if self.dims < 2 or len(self.face_words) != len(self.cells[2]):
                raise ComplexError("face_words must list one word per 2-cell")
            if self.edge_ends is None:
                raise ComplexError("face_words require edge_ends")
            b2 = self.incidence[2].tocsc()
            for f, word in enumerate(self.face_words):
                if not _word_closes(word, self.edge_ends):
                    raise ComplexError(f"word of 2-cell {f} is not a closed walk")
                col = dict(zip(b2.indices[b2.indptr[f]:b2.indptr[f + 1]], b2.data[b2.indptr[f]:b2.indptr[f + 1]]))
                acc = {}
                for e, s in word:
                    acc[e] = acc.get(e, 0) + s
                acc = {k: v for k, v in acc.items() if v}
                if acc != col:
                    raise ComplexError(f"word of 2-cell {f} disagrees with incidence")

    # -- misc -------------------------------------------------------------

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * n for i, n in enumerate(self.counts()))

    def skeleton(self, k: int) -> "CellComplex":
        k = min(k, self.dims)
        return CellComplex(
            self.cells[: k + 1],
            [None] + list(self.incidence[1 : k + 1]),
            augmented=self.augmented,
            name=f"{self.name}[{k}]" if self.name else "",
            edge_ends=self.edge_ends if k >= 1 else None,
            face_words=self.face_words if k >= 2 else None,
            labels=self.labels[: k + 1] if self.labels else None,
            allow_degenerate=self.allow_degenerate,
            validate=False,
        )

    def with_augmentation(self, augmented: bool) -> "CellComplex":
        return CellComplex(
            self.cells,
            [None] + list(self.incidence[1:]),
            augmented=augmented,
            name=self.name,
            edge_ends=self.edge_ends,
            face_words=self.face_words,
            labels=self.labels,
            allow_degenerate=self.allow_degenerate,
            validate=False,
        )

    def permuted(self, perms: Mapping[int, Sequence[int]]) -> "CellComplex":
        """Reorder cells; ``perms[i][new] = old`` for each permuted dimension."""
        perm = [list(perms.get(i, range(len(self.cells[i])))) for i in range(self.dims + 1)]
        inv = [np.argsort(p) for p in perm]
        cells = [[self.cells[i][o] for o in perm[i]] for i in range(self.dims + 1)]
        mats = [None]
        for i in range(1, self.dims + 1):
            m = self.incidence[i].tocoo()
            mats.append(sp.coo_matrix((m.data, (inv[i - 1][m.row], inv[i][m.col])), shape=m.shape))
        ends = None
        if self.edge_ends is not None:
            ends = [tuple(int(inv[0][v]) for v in self.edge_ends[o]) for o in perm[1]]
        words = None
        if self.face_words is not None:
            words = [[(int(inv[1][e]), s) for e, s in self.face_words[o]] for o in perm[2]]
        return CellComplex(cells, mats, self.augmented, self.name, ends, words, None, self.allow_degenerate)

    def one_skeleton_adjacency(self) -> list[list[int]]:
        n0 = len(self.cells[0])
        adj = [set() for _ in range(n0)]
        if self.dims >= 1:
            for t, h in self.edge_list():
                if t != h:
                    adj[t].add(h)
                    adj[h].add(t)
        return [sorted(a) for a in adj]

    def edge_list(self) -> list[tuple[int, int]]:
        if self.dims < 1:
            return []
        if self.edge_ends is not None:
            return list(self.edge_ends)
        ends = _ends_from_incidence(self.incidence[1])
        if ends is None:
            raise ComplexError("edges without endpoint data and non-standard incidence")
        return ends

    def digest(self) -> str:
        payload = json.dumps(complex_to_json(self, include_hash=False), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def __repr__(self):
        nm = f" {self.name!r}" if self.name else ""
        return f"<CellComplex{nm} counts={self.counts()} augmented={self.augmented}>"


def _word_closes(word, ends) -> bool:
    if not word:
        return True
    pos = None
    start = None
    for e, s in word:
        t, h = ends[e]
        a, b = (t, h) if s > 0 else (h, t)
        if pos is None:
            start = a
        elif pos != a:
            return False
        pos = b
    return pos == start


def _ends_from_incidence(b1: sp.csc_matrix):
    b1 = b1.tocsc()
    ends = []
    for e in range(b1.shape[1]):
        rows = b1.indices[b1.indptr[e]:b1.indptr[e + 1]]
        vals = b1.data[b1.indptr[e]:b1.indptr[e + 1]]
        col = dict(zip(rows.tolist(), vals.tolist()))
        tails = [r for r, v in col.items() if v == -1]
        heads = [r for r, v in col.items() if v == 1]
        if len(col) == 2 and len(tails) == 1 and len(heads) == 1:
            ends.append((tails[0], heads[0]))
        else:
            return None
    return ends


def _derive_words(b2: sp.csc_matrix, ends: Sequence[tuple[int, int]]):
    """Order the signed edges of each 2-cell into a closed walk, if possible."""
    b2 = b2.tocsc()
    words = []
    for f in range(b2.shape[1]):
        rows = b2.indices[b2.indptr[f]:b2.indptr[f + 1]].tolist()
        vals = b2.data[b2.indptr[f]:b2.indptr[f + 1]].tolist()
        if any(abs(v) != 1 for v in vals) or not rows:
            return None
        letters = []
        for e, s in zip(rows, vals):
            t, h = ends[e]
            letters.append((e, s, t, h) if s > 0 else (e, s, h, t))
        word = [letters.pop(0)]
        while letters:
            cur = word[-1][3]
            nxt = next((k for k, l in enumerate(letters) if l[2] == cur), None)
            if nxt is None:
                return None
            word.append(letters.pop(nxt))
        if word[-1][3] != word[0][2]:
            return None
        words.append([(e, s) for e, s, _, _ in word])
    return words


# -- constructors ------------------------------------------------------------


def _sort_key(v):
    return (type(v).__name__, v) if not isinstance(v, (int, float)) else ("", v)


def build_simplicial(facets: Iterable[Sequence[Hashable]], augmented: bool = True, name: str = "") -> CellComplex:
    """Downward closure of a list of facets, oriented by ascending vertex order.

    Cells of each dimension are listed lexicographically by sorted vertex
    index.  Vertices are sorted by label (falling back to type name, label).
    """
    facets = [list(f) for f in facets]
    if not facets:
        raise MalformedFacetError("no facets given")
    verts = set()
    for f in facets:
        if not f:
            raise MalformedFacetError("empty facet")
        if len(set(f)) != len(f):
            raise MalformedFacetError(f"duplicate vertex in facet {f!r}")
        verts.update(f)
    try:
        order = sorted(verts)
    except TypeError:
        order = sorted(verts, key=_sort_key)
    vidx = {v: i for i, v in enumerate(order)}
    dims = max(len(f) for f in facets) - 1
    simplices = [set() for _ in range(dims + 1)]
    for f in facets:
        s = tuple(sorted(vidx[v] for v in f))
        for k in range(1, len(s) + 1):
            for face in itertools.combinations(s, k):
                simplices[k - 1].add(face)
    cells = [sorted(s) for s in simplices]
    return simplicial_from_cells(cells, order, augmented=augmented, name=name)


def simplicial_from_cells(cells, vertex_labels, augmented=True, name="") -> CellComplex:
    """Assemble a CellComplex from sorted vertex-index tuples per dimension."""
    index = [{c: k for k, c in enumerate(cs)} for cs in cells]
    mats = [None]
    for i in range(1, len(cells)):
        rows, cols, vals = [], [], []
        for k, s in enumerate(cells[i]):
            for j in range(len(s)):
                face = s[:j] + s[j + 1 :]
                rows.append(index[i - 1][face])
                cols.append(k)
                vals.append(-1 if j % 2 else 1)
        mats.append(sp.coo_matrix((vals, (rows, cols)), shape=(len(cells[i - 1]), len(cells[i]))))
    ends = [(s[0], s[1]) for s in cells[1]] if len(cells) > 1 else None
    words = None
    if len(cells) > 2:
        e = index[1]
        words = [[(e[(a, b)], 1), (e[(b, c)], 1), (e[(a, c)], -1)] for a, b, c in cells[2]]
    ids = [list(cs) for cs in cells]
    ids[0] = [vertex_labels[s[0]] for s in cells[0]]
    labels = [[",".join(str(vertex_labels[v]) for v in s) for s in cs] for cs in cells]
    return CellComplex(ids, mats, augmented, name, ends, words, labels)


def from_incidence(
    sizes: Sequence[int],
    triples: Iterable[Sequence[int]],
    augmented: bool = True,
    name: str = "",
    cell_ids=None,
    edge_ends=None,
    face_words=None,
    allow_degenerate: bool = False,
) -> CellComplex:
    """Build a complex from explicit sparse incidence triples (dim, row, col, sign)."""
    dims = len(sizes) - 1
    buckets = {i: ([], [], []) for i in range(1, dims + 1)}
    for d, r, c, s in triples:
        d = int(d)
        if d == 0:
            continue
        if d not in buckets:
            raise DimensionError(f"incidence triple in dimension {d} outside 1..{dims}")
        buckets[d][0].append(int(r))
        buckets[d][1].append(int(c))
        buckets[d][2].append(int(s))
    mats = [None]
    for i in range(1, dims + 1):
        r, c, v = buckets[i]
        mats.append(sp.coo_matrix((v, (r, c)), shape=(sizes[i - 1], sizes[i])).tocsc())
    if cell_ids is None:
        cell_ids = [list(range(n)) for n in sizes]
    if edge_ends is None and dims >= 1:
        edge_ends = _ends_from_incidence(mats[1])
    if face_words is None and dims >= 2 and edge_ends is not None:
        face_words = _derive_words(mats[2], edge_ends)
    return CellComplex(cell_ids, mats, augmented, name, edge_ends, face_words, None, allow_degenerate)


# -- chain operations ------------------------------------------------------


def chain_complex_of(X) -> ChainComplex:
    return X.as_chain_complex()


def _matvec_exact(m: sp.csc_matrix, c: Chain, out_dim: int) -> Chain:
    m = m.tocsc()
    out: dict[int, object] = {}
    for j, v in c.coeffs.items():
        for r, s in zip(m.indices[m.indptr[j]:m.indptr[j + 1]], m.data[m.indptr[j]:m.indptr[j + 1]]):
            out[int(r)] = out.get(int(r), 0) + int(s) * v
    return Chain(out_dim, out, c.mode)


def apply_boundary(X, c: Chain) -> Chain:
    """The boundary of an i-chain, an (i-1)-chain."""
    lo = X.lo
    if not lo + 1 <= c.dim <= X.hi:
        raise DimensionError(f"no boundary map out of dimension {c.dim}")
    _check_support(X, c)
    return _matvec_exact(X.boundary(c.dim), c, c.dim - 1)


def apply_coboundary(X, c: Chain) -> Chain:
    """The coboundary d = transpose of the boundary, from i- to (i+1)-cochains."""
    if not X.lo <= c.dim <= X.hi - 1:
        raise DimensionError(f"no coboundary map out of dimension {c.dim}")
    _check_support(X, c)
    return _matvec_exact(X.boundary(c.dim + 1).T.tocsc(), c, c.dim + 1)


def _check_support(X, c: Chain):
    n = X.size(c.dim)
    if c.coeffs and max(c.coeffs) >= n:
        raise DimensionError(f"chain has cell index {max(c.coeffs)} but only {n} cells in dimension {c.dim}")


def chain_norm(c: Chain, n: NormSpec | object = 1):
    p = n.p if isinstance(n, NormSpec) else n
    return c.norm(p)


def operator_bound(X, i: int, coboundary: bool = True) -> int:
    """Local constant A with ||d c||_p <= A ||c||_p for every p in {1, 2, inf}.

    A = (max number of incident cells on either side) * (max |incidence entry|).
    For the coboundary out of dimension i the relevant matrix is the boundary
    from dimension i+1; for the boundary out of dimension i it is boundary(i).
    """
    m = X.boundary(i + 1 if coboundary else i).tocsc()
    if m.nnz == 0:
        return 0
    col_counts = np.diff(m.indptr)
    row_counts = np.bincount(m.indices, minlength=m.shape[0])
    return int(max(col_counts.max(), row_counts.max()) * np.abs(m.data).max())


# -- JSON -----------------------------------------------------------------


def complex_to_json(X: CellComplex, include_hash: bool = True) -> dict:
    trip = []
    for i in range(1, X.dims + 1):
        m = X.incidence[i].tocoo()
        order = np.lexsort((m.row, m.col))
        for k in order:
            trip.append([i, int(m.row[k]), int(m.col[k]), int(m.data[k])])
    out = {
        "schema_version": 1,
        "name": X.name,
        "augmented": X.augmented,
        "cells": [[_id(c) for c in cs] for cs in X.cells],
        "incidence": trip,
    }
    if X.edge_ends is not None:
        out["edges"] = [list(e) for e in X.edge_ends]
    if X.face_words is not None:
        out["face_words"] = [[list(l) for l in w] for w in X.face_words]
    if X.allow_degenerate:
        out["allow_degenerate"] = True
    if include_hash:
        out["hash"] = X.digest()
    return out


def complex_from_json(data: Mapping) -> CellComplex:
    """Parse the complex JSON format; either facets or explicit incidence."""
    if not isinstance(data, Mapping):
        raise ComplexError("complex JSON must be an object")
    name = data.get("name", "")
    augmented = bool(data.get("augmented", True))
    if "facets" in data:
        return build_simplicial(data["facets"], augmented=augmented, name=name)
    if "cells" not in data or "incidence" not in data:
        raise ComplexError("complex JSON needs either 'facets' or 'cells' plus 'incidence'")
    cells = [[_unjson_id(c) for c in cs] for cs in data["cells"]]
    sizes = [len(cs) for cs in cells]
    return from_incidence(
        sizes,
        data["incidence"],
        augmented=augmented,
        name=name,
        cell_ids=cells,
        edge_ends=data.get("edges"),
        face_words=data.get("face_words"),
        allow_degenerate=bool(data.get("allow_degenerate", False)),
    )


def load_complex(path) -> CellComplex:
    with open(path) as fh:
        text = fh.read()
    if not text.strip():
        raise ComplexError(f"{path}: empty file")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ComplexError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return complex_from_json(data)
