"""Integer homology, universal abelian covers, cover diameters, and the
chain-contraction probe for rational homology 3-spheres."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from . import exact
from .complex import EXACT, CellComplex, Chain, format_number
from .errors import ComplexError, DimensionError, InfiniteCoverError, InvariantViolation
from .snf import SNFResult, smith_normal_form


@dataclass(frozen=True)
class HomologyGroup:
    """Z^betti plus the cyclic groups Z/t for t in ``torsion`` (a divisibility chain)."""

    betti: int
    torsion: tuple[int, ...] = ()

    @property
    def order(self) -> int | None:
        """Number of elements, or None when the group is infinite."""
        if self.betti:
            return None
        return math.prod(self.torsion)

    @property
    def exponent(self) -> int:
        """Least common multiple of element orders of the torsion part."""
        return self.torsion[-1] if self.torsion else 1

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.torsion

    def is_trivial(self) -> bool:
        return self.betti == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.betti:
            parts.append("Z" if self.betti == 1 else f"Z^{self.betti}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"betti": self.betti, "torsion": list(self.torsion), "group": str(self)}


def snf(M, transforms: bool = True) -> SNFResult:
    return smith_normal_form(M, transforms=transforms)


def _dense(M) -> list[list[int]]:
    return [[int(v) for v in row] for row in sp.csr_matrix(M).toarray().tolist()]


def homology(X, i: int) -> HomologyGroup:
    """H_i(X; Z) of the (possibly augmented) chain complex."""
    K = X.as_chain_complex()
    if not K.lo <= i <= K.hi:
        raise DimensionError(f"dimension {i} outside {K.lo}..{K.hi}")
    n = K.size(i)
    rank_in = exact.rank(K.boundary(i)) if i > K.lo else 0
    out = K.boundary(i + 1) if i < K.hi else sp.csc_matrix((n, 0), dtype=np.int64)
    if out.shape[1] and out.nnz:
        res = smith_normal_form(_dense(out), transforms=False)
        factors = res.invariant_factors
    else:
        factors = []
    betti = n - rank_in - len(factors)
    return HomologyGroup(betti, tuple(f for f in factors if f > 1))


def homology_all(X) -> dict[int, HomologyGroup]:
    K = X.as_chain_complex()
    return {i: homology(K, i) for i in range(max(K.lo, 0), K.hi + 1)}


def betti_numbers(X) -> dict[int, int]:
    return exact.betti_numbers(X.as_chain_complex())


# -- graph utilities ----------------------------------------------------------


def bfs_distances(adj: Sequence[Sequence[int]], src: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[src] = 0
    q = deque([src])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def graph_diameter(adj: Sequence[Sequence[int]]) -> int:
    """Diameter of a connected graph by BFS from every vertex."""
    best = 0
    for s in range(len(adj)):
        d = bfs_distances(adj, s)
        if min(d) < 0:
            raise ComplexError("graph is disconnected")
        best = max(best, max(d))
    return best


def diameter(X: CellComplex) -> int:
    return graph_diameter(X.one_skeleton_adjacency())


def bfs_tree(X: CellComplex, root: int = 0):
    """BFS spanning tree of the 1-skeleton from ``root``.

    Returns (tree edge set, parent edge per vertex as (edge, sign)) where the
    sign is +1 when the edge points from parent to child.
    """
    ends = X.edge_list()
    inc = [[] for _ in range(X.size(0))]
    for e, (t, h) in enumerate(ends):
        inc[t].append((e, h, 1))
        inc[h].append((e, t, -1))
    parent = {root: None}
    tree = set()
    q = deque([root])
    while q:
        u = q.popleft()
        for e, w, s in sorted(inc[u]):
            if w not in parent:
                parent[w] = (e, s, u)
                tree.add(e)
                q.append(w)
    if len(parent) != X.size(0):
        raise ComplexError("complex is disconnected")
    return tree, parent


def tree_path(parent, v: int) -> list[tuple[int, int]]:
    """Signed edges of the tree path from the root to v."""
    path = []
    while parent[v] is not None:
        e, s, u = parent[v]
        path.append((e, s))
        v = u
    return path[::-1]


# -- universal abelian cover -------------------------------------------------


@dataclass
class FiniteAbelianGroup:
    """Z/d_1 x ... x Z/d_k with elements as tuples of residues."""

    factors: tuple[int, ...]

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*[range(d) for d in self.factors]))

    def add(self, a, b):
        return tuple((x + y) % d for x, y, d in zip(a, b, self.factors))

    def neg(self, a):
        return tuple((-x) % d for x, d in zip(a, self.factors))

    def scale(self, a, k: int):
        return tuple((x * k) % d for x, d in zip(a, self.factors))

    @property
    def zero(self):
        return tuple(0 for _ in self.factors)

    def index(self, g) -> int:
        idx = 0
        for x, d in zip(g, self.factors):
            idx = idx * d + x
        return idx


@dataclass
class CoverComplex:
    base: CellComplex
    group: FiniteAbelianGroup
    edge_labels: list[tuple[int, ...]]
    total: CellComplex
    fiber: dict[int, list[list[int]]]  # dim -> base cell -> total cell per group element
    projection: dict[int, list[int]]  # dim -> total cell -> base cell
    deck: dict[int, list[list[int]]] = field(default_factory=dict)  # dim -> g -> permutation

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.group.factors

    def check(self) -> dict[str, bool]:
        return {
            "free": deck_action_free(self),
            "transitive": deck_action_transitive(self),
            "euler": self.total.euler_characteristic() == self.group.order * self.base.euler_characteristic(),
            "quotient": quotient_recovers_base(self),
            "boundary_squared_zero": _bb_zero(self.total),
        }


def _bb_zero(X: CellComplex) -> bool:
    for i in range(1, X.dims + 1):
        m = (X.boundary(i - 1) @ X.boundary(i)).tocsc()
        m.eliminate_zeros()
        if m.nnz:
            return False
    return True


def h1_labels(X: CellComplex):
    """Label every edge by its class in H_1(X; Z) as a tuple of residues.

    Tree edges get zero.  H_1 is the cokernel of the 2-boundary restricted to
    the non-tree edges; column operations of the Smith form give coordinates.
    Returns (group, labels, betti).
    """
    tree, parent = bfs_tree(X, 0)
    ne = X.size(1)
    nontree = [e for e in range(ne) if e not in tree]
    pos = {e: k for k, e in enumerate(nontree)}
    n2 = X.size(2) if X.dims >= 2 else 0
    rel = [[0] * n2 for _ in nontree]
    if n2:
        b2 = X.boundary(2).tocoo()
        for r, c, v in zip(b2.row, b2.col, b2.data):
            if int(r) in pos:
                rel[pos[int(r)]][int(c)] += int(v)
    if not nontree:
        return FiniteAbelianGroup(()), [() for _ in range(ne)], 0
    res = smith_normal_form(rel if n2 else [[0] for _ in nontree], transforms=True)
    diag = res.diagonal
    k = len(nontree)
    facs = [diag[t] if t < len(diag) else 0 for t in range(k)]
    betti = sum(1 for d in facs if d == 0)
    keep = [t for t, d in enumerate(facs) if d != 1]
    group = FiniteAbelianGroup(tuple(facs[t] for t in keep))
    labels = []
    for e in range(ne):
        if e in tree:
            labels.append(group.zero)
            continue
        col = pos[e]
        # coordinates of the generator e_col in the Smith basis: column col of U
        coords = tuple(res.U[t][col] for t in keep)
        labels.append(tuple(c % d if d else c for c, d in zip(coords, group.factors)))
    return group, labels, betti


def universal_abelian_cover(X: CellComplex) -> CoverComplex:
    """Finite cover with deck group H_1(X; Z), built cell by cell."""
    if X.dims < 1 or X.size(0) == 0:
        raise ComplexError("need a complex with edges")
    ends = X.edge_list()
    group, labels, betti = h1_labels(X)
    if betti:
        raise InfiniteCoverError(f"H_1 has rank {betti}; the universal abelian cover is infinite")
    G = group.elements()
    order = len(G)
    gidx = {g: k for k, g in enumerate(G)}
    counts = X.counts()

    def lift(cell, g):
        return cell * order + gidx[g]

    cells = [[(c, g) for c in X.cells[i] for g in G] for i in range(X.dims + 1)]
    mats = [None]
    # edges: (e, g) runs from (tail, g) to (head, g + label)
    rows, cols, vals = [], [], []
    for e, (t, h) in enumerate(ends):
        for g in G:
            col = lift(e, g)
            rows += [lift(t, g), lift(h, group.add(g, labels[e]))]
            cols += [col, col]
            vals += [-1, 1]
    mats.append(sp.coo_matrix((vals, (rows, cols)), shape=(counts[0] * order, counts[1] * order)))
    new_ends = []
    for e, (t, h) in enumerate(ends):
        for g in G:
            new_ends.append((lift(t, g), lift(h, group.add(g, labels[e]))))
    new_words = None
    # vertex potentials: the group offset of each vertex along a path from a
    # base vertex of the cell, used to lift cells of dimension >= 2
    if X.dims >= 2:
        words = X.face_words
        if words is None:
            raise ComplexError("lifting 2-cells needs edge words")
        rows, cols, vals = [], [], []
        new_words = []
        for f, word in enumerate(words):
            total = group.zero
            for e, s in word:
                total = group.add(total, group.scale(labels[e], s))
            if total != group.zero:
                raise InvariantViolation(f"2-cell {f} has nonzero label sum {total}")
            for g in G:
                cur = g
                lw = []
                for e, s in word:
                    if s > 0:
                        lw.append((lift(e, cur), 1))
                        cur = group.add(cur, labels[e])
                    else:
                        cur = group.add(cur, group.neg(labels[e]))
                        lw.append((lift(e, cur), -1))
                new_words.append(lw)
                acc = {}
                for le, s in lw:
                    acc[le] = acc.get(le, 0) + s
                for le, s in acc.items():
                    if s:
                        rows.append(le)
                        cols.append(lift(f, g))
                        vals.append(s)
        # the word of a lifted face starts at the lift of its first vertex over g
        mats.append(sp.coo_matrix((vals, (rows, cols)), shape=(counts[1] * order, counts[2] * order)))
    for i in range(3, X.dims + 1):
        mats.append(_lift_higher(X, i, group, G, gidx, labels, order))
    total = CellComplex(
        cells,
        mats,
        augmented=X.augmented,
        name=f"cover({X.name})" if X.name else "cover",
        edge_ends=new_ends,
        face_words=new_words,
        allow_degenerate=X.allow_degenerate,
    )
    fiber = {i: [[lift(c, g) for g in G] for c in range(counts[i])] for i in range(X.dims + 1)}
    projection = {i: [k // order for k in range(counts[i] * order)] for i in range(X.dims + 1)}
    cover = CoverComplex(X, group, labels, total, fiber, projection)
    cover.deck = {
        i: [[lift(k // order, group.add(G[k % order], h)) for k in range(counts[i] * order)] for h in G]
        for i in range(X.dims + 1)
    }
    return cover


def _anchor(X: CellComplex, k: int, cell: int, verts) -> int:
    """Vertex that a lift (cell, g) places over g."""
    if k == 1:
        return X.edge_list()[cell][0]
    if k == 2:
        e, s = X.face_words[cell][0]
        t, h = X.edge_list()[e]
        return t if s > 0 else h
    return min(verts)


def _closure_edges(X: CellComplex, k: int, cell: int) -> list[int]:
    cur = {cell}
    for d in range(k, 1, -1):
        B = X.boundary(d).tocsc()
        nxt = set()
        for x in cur:
            nxt.update(int(r) for r in B.indices[B.indptr[x]:B.indptr[x + 1]])
        cur = nxt
    return sorted(cur)


def _potentials(X, k, cell, group, labels):
    """Group offset of every closure vertex relative to the cell's anchor.

    Raises when edge labels around some loop in the closure do not sum to zero,
    i.e. when the cell does not lift.
    """
    ends = X.edge_list()
    edges = _closure_edges(X, k, cell)
    verts = sorted({v for e in edges for v in ends[e]})
    root = _anchor(X, k, cell, verts)
    adj = {v: [] for v in verts}
    for e in edges:
        t, h = ends[e]
        adj[t].append((h, labels[e]))
        adj[h].append((t, group.neg(labels[e])))
    pot = {root: group.zero}
    q = deque([root])
    while q:
        u = q.popleft()
        for w, lab in adj[u]:
            val = group.add(pot[u], lab)
            if w not in pot:
                pot[w] = val
                q.append(w)
            elif pot[w] != val:
                raise InvariantViolation(f"{k}-cell {cell} does not lift: edge labels disagree")
    return pot


def _lift_higher(X, i, group, G, gidx, labels, order):
    """Lift i-cells (i >= 3): the face f of (c, g) is the lift of f whose
    anchor sits over g + potential_c(anchor f)."""
    B = X.boundary(i).tocsc()
    ends = X.edge_list()
    face_anchor = {}
    rows, cols, vals = [], [], []
    for c in range(B.shape[1]):
        pot = _potentials(X, i, c, group, labels)
        faces = B.indices[B.indptr[c]:B.indptr[c + 1]]
        signs = B.data[B.indptr[c]:B.indptr[c + 1]]
        for f in faces:
            f = int(f)
            if f not in face_anchor:
                fverts = {v for e in _closure_edges(X, i - 1, f) for v in ends[e]}
                face_anchor[f] = _anchor(X, i - 1, f, sorted(fverts))
        for g in G:
            for f, s in zip(faces, signs):
                h = group.add(g, pot[face_anchor[int(f)]])
                rows.append(int(f) * order + gidx[h])
                cols.append(c * order + gidx[g])
                vals.append(int(s))
    return sp.coo_matrix((vals, (rows, cols)), shape=(X.size(i - 1) * order, X.size(i) * order))


def deck_action_free(cover: CoverComplex) -> bool:
    G = cover.group.elements()
    for i, perms in cover.deck.items():
        for k, perm in enumerate(perms):
            if G[k] == cover.group.zero:
                if perm != list(range(len(perm))):
                    return False
                continue
            if any(perm[c] == c for c in range(len(perm))):
                return False
    return True


def deck_action_transitive(cover: CoverComplex) -> bool:
    for i, fibers in cover.fiber.items():
        for fib in fibers:
            orbit = {cover.deck[i][k][fib[0]] for k in range(len(cover.deck[i]))}
            if orbit != set(fib):
                return False
    return True


def deck_commutes_with_boundary(cover: CoverComplex) -> bool:
    X = cover.total
    for i in range(1, X.dims + 1):
        B = X.boundary(i).tocoo()
        for k in range(len(cover.deck[i])):
            pr, pc = cover.deck[i - 1][k], cover.deck[i][k]
            moved = sp.coo_matrix((B.data, ([pr[r] for r in B.row], [pc[c] for c in B.col])), shape=B.shape)
            if (moved.tocsc() != B.tocsc()).nnz:
                return False
    return True


def quotient_recovers_base(cover: CoverComplex) -> bool:
    """Summing incidence over fibers must give back the base incidence exactly."""
    X, T = cover.base, cover.total
    order = cover.group.order
    for i in range(1, X.dims + 1):
        B = T.boundary(i).tocoo()
        proj_r = cover.projection[i - 1]
        proj_c = cover.projection[i]
        # take one lift per base cell (g = 0) and push its boundary down
        first = {cover.fiber[i][c][0] for c in range(X.size(i))}
        acc = {}
        for r, c, v in zip(B.row, B.col, B.data):
            if int(c) in first:
                key = (proj_r[int(r)], proj_c[int(c)])
                acc[key] = acc.get(key, 0) + int(v)
        base = X.boundary(i).tocoo()
        want = {(int(r), int(c)): int(v) for r, c, v in zip(base.row, base.col, base.data)}
        got = {k: v for k, v in acc.items() if v}
        if got != want:
            return False
    del order
    return True


# -- diameter experiments -----------------------------------------------------


@dataclass
class TorsDiameterRow:
    name: str
    h1_order: int
    diam_base: int
    diam_cover: int

    @property
    def ratio(self) -> Fraction:
        # +1 so that single-vertex bases (diameter 0) stay meaningful
        return Fraction(self.diam_cover + 1, self.diam_base + 1)

    @property
    def within_fiber_bound(self) -> bool:
        return self.ratio <= self.h1_order

    @property
    def within_proved_bound(self) -> bool:
        return self.diam_cover <= self.h1_order * (2 * self.diam_base + 1) - 1

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "h1_order": self.h1_order,
            "diam_base": self.diam_base,
            "diam_cover": self.diam_cover,
            "ratio": format_number(self.ratio),
            "ratio_le_h1": self.within_fiber_bound,
        }


@dataclass
class TorsDiameterReport:
    rows: list[TorsDiameterRow]
    slope: float | None

    def all_within_bound(self) -> bool:
        return all(r.within_fiber_bound for r in self.rows)

    def to_json(self) -> dict:
        return {"rows": [r.to_json() for r in self.rows], "loglog_slope": format_number(self.slope)}


def torsdiameter_report(complexes: Sequence[CellComplex]) -> TorsDiameterReport:
    """Diameters of each complex and its universal abelian cover.

    Only ratio <= |H_1| is asserted, with ratio = (diam cover + 1)/(diam + 1).
    The log-log slope of ratio against |H_1| is reported for rows with
    nontrivial H_1.
    """
    rows = []
    for X in complexes:
        cov = universal_abelian_cover(X)
        row = TorsDiameterRow(X.name, cov.group.order, diameter(X), diameter(cov.total))
        if not row.within_proved_bound:
            raise InvariantViolation(f"{X.name}: cover diameter exceeds the fiber-count bound")
        rows.append(row)
    pts = [(math.log(r.h1_order), math.log(float(r.ratio))) for r in rows if r.h1_order > 1]
    slope = None
    if len({x for x, _ in pts}) >= 2:
        xs, ys = np.array(pts).T
        slope = float(np.polyfit(xs, ys, 1)[0])
    return TorsDiameterReport(rows, slope)


# -- chain contraction probe ---------------------------------------------------


@dataclass
class ProbeReport:
    name: str
    h1: HomologyGroup
    exponent: int
    fundamental_class: Chain
    multiples: list[Fraction]  # k_r with r - H(boundary r) = k_r [X]
    telescoping_ok: bool
    max_norms: dict[int, Fraction]
    cell_counts: tuple[int, ...]
    denominators: dict[int, int]
    partial: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def carriers(self) -> list[int]:
        return [r for r, k in enumerate(self.multiples) if k != 0]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "h1": self.h1.to_json(),
            "exponent": self.exponent,
            "multiples": [format_number(k) for k in self.multiples],
            "carriers": self.carriers,
            "telescoping_ok": self.telescoping_ok,
            "max_norms": {str(k): format_number(v) for k, v in self.max_norms.items()},
            "cell_counts": list(self.cell_counts),
            "lcm_denominators": {str(k): v for k, v in self.denominators.items()},
            "partial": self.partial,
            "notes": self.notes,
        }


def fundamental_class(X: CellComplex) -> list[int]:
    """Integral generator of ker of the top boundary on a closed orientable 3-complex."""
    if X.dims != 3:
        raise DimensionError("fundamental class needs a 3-dimensional complex")
    ker = exact.nullspace(X.boundary(3))
    if len(ker) != 1:
        raise ComplexError(f"top boundary kernel has rank {len(ker)}, expected 1")
    vec = list(exact.primitive(ker[0]))
    if any(abs(v) != 1 for v in vec):
        raise ComplexError("kernel generator is not an orientation (entries other than +-1)")
    return vec


def chain_contraction_probe(X: CellComplex, p=1) -> ProbeReport:
    """Build a chain contraction H skeleton by skeleton with L^1-minimal fillings.

    H(v) is the BFS tree path from the least vertex; on higher cells H(c)
    minimally fills c - H(boundary c).  On tetrahedra the cycle
    r - H(boundary r) is a rational multiple k_r of the fundamental class and
    the orientation-weighted sum of the k_r must equal 1.
    """
    from .filling import Filler

    if X.dims != 3 or not X.augmented:
        raise DimensionError("the probe expects an augmented 3-complex")
    bet = exact.betti_numbers(X.chain_complex())
    if any(bet.get(k, 0) for k in (0, 1, 2)) or bet.get(3, 0) != 1:
        raise ComplexError(f"not a rational homology 3-sphere: betti numbers {bet}")
    fc = fundamental_class(X)
    h1 = homology(X, 1)
    _, parent = bfs_tree(X, 0)
    counts = X.counts()
    H: dict[int, list[dict[int, Fraction]]] = {}
    # H on vertices: tree path from the root (as a 1-chain)
    H[0] = []
    for v in range(counts[0]):
        ch = {}
        for e, s in tree_path(parent, v):
            ch[e] = ch.get(e, 0) + s
        H[0].append({k: Fraction(c) for k, c in ch.items() if c})
    # H on C_{-1}: the base point, so that dH + Hd = id in degree 0
    H[-1] = [{0: Fraction(1)}]
    max_norms = {}
    notes = []
    for k in (1, 2):
        B = X.boundary(k).tocsc()
        filler = Filler(X.boundary(k + 1), p, k + 1)
        H[k] = []
        worst = Fraction(0)
        for c in range(counts[k]):
            z = _cycle_minus_H_boundary(B, H[k - 1], c, counts[k])
            fr = filler.fill(z)
            if not fr.feasible:
                raise InvariantViolation(f"{k}-cell {c}: c - H(boundary c) is not a boundary")
            H[k].append(dict(fr.witness.coeffs))
            worst = max(worst, fr.value)
        max_norms[k + 1] = worst
    max_norms[1] = max(sum(abs(v) for v in h.values()) for h in H[0]) if counts[0] else Fraction(0)
    B3 = X.boundary(3).tocsc()
    multiples = []
    total = [Fraction(0)] * counts[3]
    for r in range(counts[3]):
        z = _cycle_minus_H_boundary(B3, H[2], r, counts[3])
        # z is a 3-cycle, hence a multiple of the fundamental class
        piv = next(t for t in range(counts[3]) if fc[t])
        kr = z[piv] / fc[piv]
        if any(z[t] != kr * fc[t] for t in range(counts[3])):
            raise InvariantViolation(f"tetrahedron {r}: r - H(boundary r) is not a multiple of [X]")
        multiples.append(kr)
        for t in range(counts[3]):
            total[t] += fc[r] * z[t]
    telescoping = total == [Fraction(v) for v in fc]
    dens = {}
    for k in (1, 2):
        den = 1
        for h in H[k]:
            for v in h.values():
                den = den * v.denominator // math.gcd(den, v.denominator)
        dens[k + 1] = den
    notes.append("cycles are formed as c - H(boundary c); this differs from c + H(boundary c) only by sign convention")
    return ProbeReport(
        X.name, h1, h1.exponent, Chain(3, dict(enumerate(fc)), EXACT), multiples, telescoping,
        max_norms, counts, dens, notes=notes,
    )


def _cycle_minus_H_boundary(B, Hprev, c, n_unused):
    """Dense vector of c - H(boundary c) in dimension k, for cell c."""
    size = B.shape[1]
    out = {c: Fraction(1)}
    for f, s in zip(B.indices[B.indptr[c]:B.indptr[c + 1]], B.data[B.indptr[c]:B.indptr[c + 1]]):
        for cell, v in Hprev[int(f)].items():
            out[cell] = out.get(cell, 0) - int(s) * v
    vec = [Fraction(0)] * size
    for k, v in out.items():
        vec[k] += v
    return vec
