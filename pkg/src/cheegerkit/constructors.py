"""Deterministic generators for the complexes used in tests and experiments."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .complex import CellComplex, build_simplicial, simplicial_from_cells
from .errors import ComplexError

MAX_CELLS = 2_000_000


# -- hypercubes ----------------------------------------------------------------


def hypercube_cell_count(deg: int, i: int) -> int:
    return math.comb(deg, i) * 2 ** (deg - i)


def hypercube_skeleton(deg: int, k: int, augmented: bool = True) -> CellComplex:
    """The k-skeleton of the deg-dimensional cube {0,1}^deg.

    Vertices are bitmasks.  An i-cell is (free coordinates, base vertex) with
    the free bits of the base cleared.  Orientation is the translation
    invariant product orientation: the boundary of the cell with free
    coordinates f_1 < ... < f_i is sum_j (-1)^(j-1) (F_j^1 - F_j^0), where F_j^e
    fixes coordinate f_j to e.
    """
    if deg < 1 or not 1 <= k <= min(deg, 3):
        raise ComplexError(f"need 1 <= k <= min(deg, 3), got deg={deg}, k={k}")
    total = sum(hypercube_cell_count(deg, i) for i in range(k + 1))
    if total > MAX_CELLS:
        raise ComplexError(f"hypercube deg={deg} k={k} has {total} cells, above the size cap {MAX_CELLS}")
    cells = []
    for i in range(k + 1):
        cs = []
        for free in itertools.combinations(range(deg), i):
            mask = sum(1 << f for f in free)
            for base in range(1 << deg):
                if base & mask == 0:
                    cs.append((free, base))
        cells.append(cs)
    index = [{c: n for n, c in enumerate(cs)} for cs in cells]
    mats = [None]
    for i in range(1, k + 1):
        rows, cols, vals = [], [], []
        for n, (free, base) in enumerate(cells[i]):
            for j, f in enumerate(free):
                rest = free[:j] + free[j + 1:]
                sign = -1 if j % 2 else 1
                rows += [index[i - 1][(rest, base | (1 << f))], index[i - 1][(rest, base)]]
                cols += [n, n]
                vals += [sign, -sign]
        mats.append(sp.coo_matrix((vals, (rows, cols)), shape=(len(cells[i - 1]), len(cells[i]))))
    ends = [(index[0][((), b)], index[0][((), b | (1 << f[0]))]) for f, b in cells[1]]
    words = None
    if k >= 2:
        e = index[1]
        words = []
        for (a, b), base in cells[2]:
            words.append([
                (e[((a,), base)], 1),
                (e[((b,), base | (1 << a))], 1),
                (e[((a,), base | (1 << b))], -1),
                (e[((b,), base)], -1),
            ])
    ids = [[c[1] for c in cells[0]]] + [[c for c in cs] for cs in cells[1:]]
    return CellComplex(ids, mats, augmented, f"hypercube({deg},{k})", ends, words)


def hypercube_cell_index(X: CellComplex, free: Sequence[int], base: int) -> int:
    return X.index(len(free), (tuple(free), base))


# -- simplicial families -------------------------------------------------------


def simplex_boundary(n: int, augmented: bool = True) -> CellComplex:
    """Boundary of the n-simplex, a triangulated (n-1)-sphere."""
    if n < 1:
        raise ComplexError("simplex boundary needs n >= 1")
    facets = list(itertools.combinations(range(n + 1), n))
    return build_simplicial(facets, augmented, name=f"simplex-boundary({n})")


def full_simplex(n: int, augmented: bool = True) -> CellComplex:
    return build_simplicial([list(range(n + 1))], augmented, name=f"simplex({n})")


def cycle_graph(n: int, augmented: bool = True) -> CellComplex:
    return build_simplicial([(i, (i + 1) % n) for i in range(n)], augmented, name=f"cycle({n})")


def path_graph(n: int, augmented: bool = True) -> CellComplex:
    if n == 1:
        return build_simplicial([[0]], augmented, name="path(1)")
    return build_simplicial([(i, i + 1) for i in range(n - 1)], augmented, name=f"path({n})")


def graph_complex(n: int, edges: Sequence[tuple[int, int]], augmented: bool = True, name: str = "") -> CellComplex:
    """A graph as a 1-complex; isolated vertices are kept."""
    edges = sorted({tuple(sorted(e)) for e in edges})
    cells = [[(v,) for v in range(n)], list(edges)]
    return simplicial_from_cells(cells, list(range(n)), augmented, name)


def random_connected_graph(n: int, extra: float, seed: int, augmented: bool = True) -> CellComplex:
    """Random spanning tree plus each remaining edge with probability ``extra``."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    edges = set()
    for k in range(1, n):
        a = int(perm[k])
        b = int(perm[rng.integers(0, k)])
        edges.add((min(a, b), max(a, b)))
    for a, b in itertools.combinations(range(n), 2):
        if (a, b) not in edges and rng.random() < extra:
            edges.add((a, b))
    return graph_complex(n, edges, augmented, name=f"random-graph({n},{extra},{seed})")


def random_complex(n: int, dim: int, p: float, seed: int, augmented: bool = True) -> CellComplex:
    """Linial-Meshulam style: full (dim-1)-skeleton of the simplex on n vertices,
    each dim-simplex kept independently with probability p."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    cells = [list(itertools.combinations(range(n), k + 1)) for k in range(dim)]
    top = [s for s in itertools.combinations(range(n), dim + 1) if rng.random() < p]
    if top:
        cells.append(top)
    return simplicial_from_cells(cells, list(range(n)), augmented, name=f"random({n},{dim},{p},{seed})")


# -- named fixtures ------------------------------------------------------------

RP2_6 = [
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
    (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
]

TORUS_7 = [(i, (i + 1) % 7, (i + 3) % 7) for i in range(7)] + [(i, (i + 2) % 7, (i + 3) % 7) for i in range(7)]

# 8-vertex Klein bottle, obtained from a 3x4 grid Klein bottle by edge
# contractions satisfying the link condition, down to 8 vertices
KLEIN_8 = [
    (0, 1, 4), (0, 1, 7), (0, 2, 3), (0, 2, 5), (0, 3, 4), (0, 5, 7),
    (1, 2, 3), (1, 2, 6), (1, 3, 5), (1, 4, 5), (1, 6, 7), (2, 5, 6),
    (3, 4, 7), (3, 5, 6), (3, 6, 7), (4, 5, 7),
]

NAMED = ("rp2-6", "torus-7", "klein-8", "zn-presentation(n)", "z2^k", "moore-z2", "lens(n,q)", "sphere-3")


def suspension(facets: Sequence[Sequence[int]], top: str = "n", bottom: str = "s"):
    out = []
    for f in facets:
        out.append(tuple(f) + (top,))
        out.append(tuple(f) + (bottom,))
    return out


def zn_presentation(n: int, augmented: bool = True) -> CellComplex:
    """One vertex, one loop edge a, one 2-cell attached along a^n: H_1 = Z/n."""
    if n < 1:
        raise ComplexError("n must be positive")
    mats = [None, sp.csc_matrix((1, 1), dtype=np.int64), sp.csc_matrix(np.array([[n]], dtype=np.int64))]
    return CellComplex(
        [["v"], ["a"], ["r"]], mats, augmented, f"zn-presentation({n})",
        edge_ends=[(0, 0)], face_words=[[(0, 1)] * n], allow_degenerate=True,
    )


def presentation_complex(generators: int, relators: Sequence[Sequence[tuple[int, int]]], name: str = "",
                         augmented: bool = True) -> CellComplex:
    """Presentation 2-complex: one vertex, a loop per generator, a 2-cell per
    relator given as a word of (generator, +-1) letters."""
    rows, cols, vals = [], [], []
    for r, word in enumerate(relators):
        acc = {}
        for g, s in word:
            acc[g] = acc.get(g, 0) + s
        for g, v in acc.items():
            if v:
                rows.append(g)
                cols.append(r)
                vals.append(v)
    mats = [
        None,
        sp.csc_matrix((1, generators), dtype=np.int64),
        sp.coo_matrix((vals, (rows, cols)), shape=(generators, len(relators))),
    ]
    return CellComplex(
        [["v"], [f"x{g}" for g in range(generators)], [f"r{r}" for r in range(len(relators))]],
        mats, augmented, name or f"presentation({generators},{len(relators)})",
        edge_ends=[(0, 0)] * generators, face_words=[list(w) for w in relators], allow_degenerate=True,
    )


def elementary_two_group(k: int, augmented: bool = True) -> CellComplex:
    """Presentation complex of (Z/2)^k: squares and commutators of k generators."""
    rel = [[(g, 1), (g, 1)] for g in range(k)]
    for a, b in itertools.combinations(range(k), 2):
        rel.append([(a, 1), (b, 1), (a, -1), (b, -1)])
    return presentation_complex(k, rel, f"z2^{k}", augmented)


def lens_space(n: int, q: int, augmented: bool = True) -> CellComplex:
    """Lens space L(n, q) as a Delta-complex: the quotient of the join of two
    3n-gons (a triangulated 3-sphere) by the free Z/n action rotating the first
    polygon by 3 steps and the second by 3q steps.

    Cells are orbits of simplices.  Each orbit is represented by its least
    translate; an oriented simplex maps to its representative with the sign of
    the vertex permutation, which makes the quotient boundary well defined.
    """
    if n < 2 or math.gcd(n, q) != 1:
        raise ComplexError("lens space needs n >= 2 and gcd(n, q) = 1")
    m = 3 * n

    def act(v, s):
        if v < m:
            return (v + 3 * s) % m
        return m + (v - m + 3 * q * s) % m

    def rep(simplex):
        """(representative, sign) for an ascending vertex tuple."""
        best = None
        for s in range(n):
            img = [act(v, s) for v in simplex]
            key = tuple(sorted(img))
            if best is None or key < best[0]:
                best = (key, img)
        key, img = best
        return key, _perm_sign(img)

    simplices = [set() for _ in range(4)]
    for i in range(m):
        for j in range(m):
            tet = (i, (i + 1) % m, m + j, m + (j + 1) % m)
            for k in range(1, 5):
                for face in itertools.combinations(sorted(tet), k):
                    simplices[k - 1].add(face)
    reps = [sorted({rep(sx)[0] for sx in simplices[k]}) for k in range(4)]
    index = [{r: t for t, r in enumerate(rs)} for rs in reps]
    mats = [None]
    for k in range(1, 4):
        acc = {}
        for c, r in enumerate(reps[k]):
            for j in range(len(r)):
                face = r[:j] + r[j + 1:]
                fr, sign = rep(face)
                key = (index[k - 1][fr], c)
                acc[key] = acc.get(key, 0) + (-1 if j % 2 else 1) * sign
        items = [(rc, v) for rc, v in acc.items() if v]
        mats.append(sp.coo_matrix(
            ([v for _, v in items], ([rc[0] for rc, _ in items], [rc[1] for rc, _ in items])),
            shape=(len(reps[k - 1]), len(reps[k])),
        ))
    ends = []
    B1 = mats[1].tocsc()
    for e in range(B1.shape[1]):
        col = dict(zip(B1.indices[B1.indptr[e]:B1.indptr[e + 1]].tolist(), B1.data[B1.indptr[e]:B1.indptr[e + 1]].tolist()))
        ends.append((next(r for r, v in col.items() if v < 0), next(r for r, v in col.items() if v > 0)))
    words = []
    for f, r in enumerate(reps[2]):
        word = []
        for a, b in ((0, 1), (1, 2), (0, 2)):
            er, sign = rep((r[a], r[b]))
            word.append((index[1][er], sign if b != 2 or a != 0 else -sign))
        words.append(word)
    ids = [[rr for rr in rs] for rs in reps]
    return CellComplex(ids, mats, augmented, f"lens({n},{q})", ends, words)


def _perm_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (distinct entries)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def named_complex(name: str, augmented: bool = True) -> CellComplex:
    """Fixture library.  Accepts rp2-6, torus-7, klein-8, moore-z2, sphere-3,
    zn-presentation(n), z2^k and lens(n,q)."""
    key = name.strip().lower()
    if key == "rp2-6":
        return build_simplicial(RP2_6, augmented, name="rp2-6")
    if key == "torus-7":
        return build_simplicial(TORUS_7, augmented, name="torus-7")
    if key == "klein-8":
        return build_simplicial(KLEIN_8, augmented, name="klein-8")
    if key == "moore-z2":
        facets = [tuple(str(v) for v in f) for f in RP2_6]
        return build_simplicial(suspension(facets), augmented, name="moore-z2")
    if key == "sphere-3":
        X = simplex_boundary(4, augmented)
        return X
    m = re.fullmatch(r"zn-presentation\((\d+)\)", key)
    if m:
        return zn_presentation(int(m.group(1)), augmented)
    m = re.fullmatch(r"z2\^(\d+)", key)
    if m:
        return elementary_two_group(int(m.group(1)), augmented)
    m = re.fullmatch(r"lens\((\d+),\s*(\d+)\)", key)
    if m:
        return lens_space(int(m.group(1)), int(m.group(2)), augmented)
    raise KeyError(f"unknown complex name {name!r}; known: {', '.join(NAMED)}")


# -- graph fibrations ------------------------------------------------------------


@dataclass
class GraphFibration:
    """A surjective simplicial map of connected graphs with connected fibers.

    ``vertex_map[v]`` is the base vertex of total-space vertex v; an edge of
    E maps to a base edge or collapses to a vertex (``edge_map[e]`` is then
    None).
    """

    E: CellComplex
    B: CellComplex
    vertex_map: list[int]
    edge_map: list[int | None]
    fibers: dict[int, list[int]] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if not self.fibers:
            fib = {b: [] for b in range(self.B.size(0))}
            for v, b in enumerate(self.vertex_map):
                fib[b].append(v)
            self.fibers = fib
        self.validate()

    @property
    def max_fiber(self) -> int:
        return max(len(f) for f in self.fibers.values())

    @property
    def max_degree(self) -> int:
        deg = 0
        for X in (self.E, self.B):
            adj = X.one_skeleton_adjacency()
            deg = max(deg, max((len(a) for a in adj), default=0))
        return deg

    def fiber_complex(self, b: int) -> tuple[CellComplex, list[int], list[int]]:
        """Induced fiber subgraph over b, with its vertex and edge index maps."""
        verts = self.fibers[b]
        local = {v: k for k, v in enumerate(verts)}
        ends = self.E.edge_list()
        edges = [e for e in range(len(ends)) if self.edge_map[e] is None and self.vertex_map[ends[e][0]] == b]
        F = graph_complex(len(verts), [(local[ends[e][0]], local[ends[e][1]]) for e in edges],
                          self.E.augmented, name=f"fiber({b})")
        # graph_complex sorts edges; recover the map from local edges to E edges
        order = {tuple(sorted((local[ends[e][0]], local[ends[e][1]]))): e for e in edges}
        emap = [order[c] for c in F.cells[1]] if F.dims >= 1 else []
        return F, verts, emap

    def validate(self):
        E, B = self.E, self.B
        if len(self.vertex_map) != E.size(0):
            raise ComplexError("vertex map must cover every vertex of E")
        if set(self.vertex_map) != set(range(B.size(0))):
            raise ComplexError("projection is not surjective on vertices")
        eE, eB = E.edge_list(), B.edge_list()
        hit = set()
        for e, (t, h) in enumerate(eE):
            bt, bh = self.vertex_map[t], self.vertex_map[h]
            tgt = self.edge_map[e]
            if tgt is None:
                if bt != bh:
                    raise ComplexError(f"edge {e} collapses but its ends map to different vertices")
                continue
            if set(eB[tgt]) != {bt, bh} or bt == bh:
                raise ComplexError(f"edge {e} is not mapped simplicially")
            hit.add(tgt)
        if hit != set(range(len(eB))):
            raise ComplexError("projection is not surjective on edges")
        from .homology import graph_diameter

        for b in self.fibers:
            F, _, _ = self.fiber_complex(b)
            try:
                graph_diameter(F.one_skeleton_adjacency())
            except ComplexError as exc:
                raise ComplexError(f"fiber over {b} is disconnected") from exc
        graph_diameter(E.one_skeleton_adjacency())
        graph_diameter(B.one_skeleton_adjacency())


def _edge_lookup(X: CellComplex):
    return {tuple(sorted(e)): k for k, e in enumerate(X.edge_list())}


def product_fibration(base: CellComplex, fiber: CellComplex, name: str = "") -> GraphFibration:
    """E = base x fiber (graph box product) projecting onto the base."""
    nb, nf = base.size(0), fiber.size(0)
    vid = lambda b, f: b * nf + f  # noqa: E731
    edges = []
    for b in range(nb):
        for t, h in fiber.edge_list():
            edges.append((vid(b, t), vid(b, h)))
    for t, h in base.edge_list():
        for f in range(nf):
            edges.append((vid(t, f), vid(h, f)))
    E = graph_complex(nb * nf, edges, base.augmented, name=name or f"{base.name}x{fiber.name}")
    vmap = [v // nf for v in range(nb * nf)]
    blook = _edge_lookup(base)
    emap = []
    for t, h in E.edge_list():
        bt, bh = vmap[t], vmap[h]
        emap.append(None if bt == bh else blook[tuple(sorted((bt, bh)))])
    return GraphFibration(E, base, vmap, emap, name=E.name)


def identity_fibration(X: CellComplex) -> GraphFibration:
    return GraphFibration(X, X, list(range(X.size(0))), list(range(X.size(1))), name=f"id({X.name})")


def point_base_fibration(E: CellComplex) -> GraphFibration:
    B = graph_complex(1, [], E.augmented, name="point")
    return GraphFibration(E, B, [0] * E.size(0), [None] * E.size(1), name=f"{E.name}->point")


def build_fibration(kind: str, **params) -> GraphFibration:
    """Named fibration families.

    prism: triangular prism over the triangle, vertical edges as fibers.
    identity: X -> X for X = cycle(n) (param n, default 5).
    point: any connected graph over a single vertex (param n for a cycle).
    product: random connected base and fiber graphs (params nb, nf, seed).
    """
    if kind == "prism":
        return product_fibration(cycle_graph(3), path_graph(2), name="prism")
    if kind == "identity":
        return identity_fibration(cycle_graph(params.get("n", 5)))
    if kind == "point":
        return point_base_fibration(cycle_graph(params.get("n", 5)))
    if kind == "product":
        seed = params.get("seed", 0)
        nb = params.get("nb", 4)
        nf = params.get("nf", 3)
        base = random_connected_graph(nb, params.get("extra", 0.3), seed)
        fib = random_connected_graph(nf, params.get("extra", 0.3), seed + 1000)
        return product_fibration(base, fib, name=f"product(seed={seed})")
    raise KeyError(f"unknown fibration kind {kind!r}")


def leray_serre_check(F: GraphFibration, p=1, **kw):
    from .fibration import leray_serre_check as _check

    return _check(F, p, **kw)
