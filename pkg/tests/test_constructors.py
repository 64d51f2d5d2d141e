import math

import numpy as np
import pytest

from cheegerkit.constructors import (
    build_fibration,
    cycle_graph,
    full_simplex,
    graph_complex,
    hypercube_cell_count,
    hypercube_cell_index,
    hypercube_skeleton,
    named_complex,
    path_graph,
    product_fibration,
    random_complex,
    random_connected_graph,
    simplex_boundary,
)
from cheegerkit.errors import ComplexError
from cheegerkit.homology import diameter
from cheegerkit.verify import CHECKS


def _run(cid):
    out = CHECKS[cid][1]()
    assert out.ok, out.detail


def test_outputs_validate():
    _run("constructors.validate")


def test_hypercube_counts():
    _run("constructors.hypercube_counts")


def test_seeded_reproducible():
    _run("constructors.seeded_reproducible")


def test_cube_counts():
    assert hypercube_skeleton(3, 2).counts() == (8, 12, 6)
    assert hypercube_skeleton(3, 3).counts() == (8, 12, 6, 1)
    assert hypercube_cell_count(4, 2) == 24


def test_hypercube_skeleton_limits():
    with pytest.raises(ComplexError):
        hypercube_skeleton(5, 4)
    with pytest.raises(ComplexError):
        hypercube_skeleton(3, 0)


def test_hypercube_cell_lookup():
    X = hypercube_skeleton(4, 2)
    k = hypercube_cell_index(X, (0, 2), 0b1010)
    assert X.cells[2][k] == ((0, 2), 0b1010)


def test_simplex_boundaries():
    for n in range(1, 6):
        X = simplex_boundary(n)
        assert X.counts() == tuple(math.comb(n + 1, k + 1) for k in range(n))
    assert full_simplex(3).counts() == (4, 6, 4, 1)


def test_small_graphs():
    assert cycle_graph(6).counts() == (6, 6)
    assert path_graph(4).counts() == (4, 3)
    assert diameter(path_graph(4)) == 3
    assert graph_complex(3, [(2, 0), (1, 0)]).counts() == (3, 2)


def test_named_fixtures():
    assert named_complex("rp2-6").counts() == (6, 15, 10)
    assert named_complex("torus-7").counts() == (7, 21, 14)
    assert named_complex("klein-8").counts() == (8, 24, 16)
    assert named_complex("sphere-3").counts() == (5, 10, 10, 5)
    with pytest.raises(KeyError):
        named_complex("no-such-space")


def test_random_generators():
    g = random_connected_graph(15, 0.1, 4)
    assert g.size(0) == 15 and diameter(g) >= 1
    X = random_complex(7, 2, 0.5, 1)
    X.validate()
    assert X.dims <= 2
    assert random_complex(7, 2, 0.5, 1).digest() == X.digest()
    assert random_complex(7, 2, 0.5, 2).digest() != X.digest()


def test_prism_fibration():
    F = build_fibration("prism")
    assert F.E.counts() == (6, 9) and F.B.counts() == (3, 3)
    assert F.max_fiber == 2 and F.max_degree == 3
    assert sum(e is None for e in F.edge_map) == 3


def test_product_fibration_structure():
    F = build_fibration("product", seed=0, nb=4, nf=2)
    assert F.E.size(0) == 8 and F.max_fiber == 2
    assert all(len(v) == 2 for v in F.fibers.values())
    with pytest.raises(KeyError):
        build_fibration("nonsense")


def test_disconnected_fiber_rejected():
    fiber = graph_complex(2, [])
    with pytest.raises(ComplexError):
        product_fibration(path_graph(2), fiber)


def test_permutation_roundtrip_keeps_digest_shape():
    X = hypercube_skeleton(3, 2)
    rng = np.random.default_rng(0)
    Y = X.permuted({i: list(rng.permutation(X.size(i))) for i in range(3)})
    assert Y.counts() == X.counts()
