import json
from fractions import Fraction

import numpy as np
import pytest

from cheegerkit.complex import (
    INF,
    Chain,
    NormSpec,
    apply_boundary,
    apply_coboundary,
    build_simplicial,
    complex_from_json,
    complex_to_json,
    load_complex,
    norm_of,
    operator_bound,
)
from cheegerkit.constructors import hypercube_skeleton, named_complex, random_complex
from cheegerkit.errors import ComplexError, DimensionError
from cheegerkit.verify import CHECKS


def _run(cid):
    out = CHECKS[cid][1]()
    assert out.ok, out.detail


def test_boundary_squared_zero_everywhere():
    _run("complex.boundary_squared_zero")


def test_coboundary_is_transpose():
    _run("complex.coboundary_is_transpose")


def test_norm_comparison():
    _run("complex.norm_comparison")


def test_rebuild_is_identical():
    _run("complex.deterministic_order")


def test_single_triangle_closure():
    X = build_simplicial([[0, 1, 2]])
    assert X.counts() == (3, 3, 1)


def test_graph_without_faces():
    X = build_simplicial([[0, 1], [1, 2], [0, 2]])
    assert X.counts() == (3, 3)


def test_rp2_counts():
    assert named_complex("rp2-6").counts() == (6, 15, 10)


def test_edge_orientation():
    X = build_simplicial([[0, 1]])
    assert X.boundary_matrix(1).toarray().ravel().tolist() == [-1, 1]


def test_augmentation_row_is_all_ones():
    X = named_complex("torus-7")
    assert X.boundary_matrix(0).toarray().tolist() == [[1] * 7]
    assert X.with_augmentation(False).boundary_matrix(0).shape == (0, 7)


def test_cube_square_boundary():
    X = hypercube_skeleton(3, 2)
    c = apply_boundary(X, Chain.unit(2, 0))
    assert len(c.coeffs) == 4 and c.norm(1) == 4
    assert apply_boundary(X, c).is_zero()


def test_coboundary_of_zero():
    X = hypercube_skeleton(3, 2)
    assert apply_coboundary(X, Chain.zero(1)).is_zero()


def test_operator_bound_on_hypercube():
    X = hypercube_skeleton(4, 2)
    A = operator_bound(X, 1, coboundary=True)
    rng = np.random.default_rng(0)
    for _ in range(20):
        c = Chain(1, {int(k): int(v) for k, v in zip(rng.integers(0, X.size(1), 8), rng.integers(-5, 6, 8))})
        assert apply_coboundary(X, c).norm(1) <= A * c.norm(1)


def test_norms():
    assert Chain.unit(1, 3).norm(1) == 1 and Chain.unit(1, 3).norm(2) == 1 and Chain.unit(1, 3).norm(INF) == 1
    assert norm_of([3, -4], 2) == 5
    assert norm_of([3, -4], 1) == 7
    assert norm_of([3, -4], INF) == 4
    assert NormSpec.mass().p == 1
    with pytest.raises(ValueError):
        NormSpec(3)


def test_chain_arithmetic_is_exact():
    a = Chain(1, {0: Fraction(1, 3), 2: 1})
    b = Chain(1, {0: Fraction(2, 3)})
    assert (a + b).coeffs == {0: 1, 2: 1}
    assert (a - a).is_zero()
    assert Chain.from_json(a.to_json()) == a
    with pytest.raises(ValueError):
        a + Chain(2, {0: 1})


def test_apply_boundary_checks_dimension():
    X = hypercube_skeleton(3, 2)
    with pytest.raises(DimensionError):
        apply_boundary(X, Chain(5, {0: 1}))


def test_json_round_trip(tmp_path):
    X = named_complex("klein-8")
    data = complex_to_json(X)
    Y = complex_from_json(json.loads(json.dumps(data)))
    assert Y.digest() == X.digest()
    for i in range(1, X.dims + 1):
        assert (X.boundary(i) != Y.boundary(i)).nnz == 0
    path = tmp_path / "k.json"
    path.write_text(json.dumps({"facets": [[0, 1, 2], [0, 2, 3]], "name": "disk"}))
    assert load_complex(path).counts() == (4, 5, 2)


def test_load_errors(tmp_path):
    empty = tmp_path / "e.json"
    empty.write_text("")
    with pytest.raises(ComplexError, match="empty"):
        load_complex(empty)
    bad = tmp_path / "b.json"
    bad.write_text('{"facets": [[0, 1]\n,, ]}')
    with pytest.raises(ComplexError, match="line 2"):
        load_complex(bad)
    with pytest.raises(ComplexError):
        complex_from_json({"name": "nothing"})


def test_inconsistent_incidence_rejected():
    with pytest.raises(ComplexError):
        complex_from_json({"cells": [[0, 1], [[0, 1]], [[0, 1, 2]]], "incidence": [[1, 0, 0, -1], [1, 1, 0, 1], [2, 0, 0, 1]]})


def test_permuted_keeps_structure():
    X = named_complex("rp2-6")
    rng = np.random.default_rng(3)
    Y = X.permuted({i: list(rng.permutation(X.size(i))) for i in range(3)})
    Y.validate()
    assert Y.counts() == X.counts()
    assert Y.euler_characteristic() == X.euler_characteristic()


def test_random_complex_hash_is_stable():
    assert random_complex(8, 2, 0.9, 7).digest() == "db340558b7d537bef6a26b45f32bffcee87bfe2e4c45554e0f936aebbff3f99f"
