import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pabounds.curves import (
    CurveMeta,
    CurveSystem,
    InvalidCurveSystem,
    algebraic_consistency,
    bipartite_graph,
    gram_row_sums_from_graph,
    matrix_from_graph,
    validate,
)
from pabounds.family import build_f2prime, build_family, build_k3_k1_examples, load_system


def simple(N, genus=2, **meta):
    N = np.asarray(N)
    a = [CurveMeta(f"a{i}") for i in range(N.shape[0])]
    b = [CurveMeta(f"b{j}") for j in range(N.shape[1])]
    return CurveSystem(genus, a, b, N.tolist(), **meta)


def corpus():
    out = [build_family(g)[0] for g in (2, 3, 4, 5, 6, 7, 8, 9, 11, 13)]
    out.append(build_f2prime()[0])
    out.extend(s for s, _ in build_k3_k1_examples())
    return out


def test_f2_system_is_valid():
    system, _ = build_family(2)
    assert validate(system) == []
    assert system.matrix.tolist() == [[8]]


def test_negative_entry_reported():
    assert any(p.startswith("nonnegative") for p in validate(simple([[2, -1]])))


def test_disconnected_blocks_reported():
    assert any(p.startswith("connected") for p in validate(simple([[2, 0], [0, 2]])))


def test_separating_curve_needs_zero_homology():
    s = CurveSystem(2, [CurveMeta("a", separating=True, homology=[1, 0, 0, 0])], [CurveMeta("b")], [[2]])
    assert any(p.startswith("separating") for p in validate(s))


def test_homology_length_checked():
    s = CurveSystem(2, [CurveMeta("a", homology=[1, 0])], [CurveMeta("b")], [[2]])
    assert any(p.startswith("homology-length") for p in validate(s))


def test_pair_vectors_must_agree_up_to_sign():
    good = CurveSystem(
        2,
        [CurveMeta("a", homology=[1, 0, 0, 0], pair_id="p")],
        [CurveMeta("b", homology=[-1, 0, 0, 0], pair_id="p")],
        [[2]],
    )
    bad = CurveSystem(
        2,
        [CurveMeta("a", homology=[1, 0, 0, 0], pair_id="p")],
        [CurveMeta("b", homology=[0, 1, 0, 0], pair_id="p")],
        [[2]],
    )
    assert not any(p.startswith("pair") for p in validate(good))
    assert any(p.startswith("pair") for p in validate(bad))


def test_f2prime_graph_is_path_with_labels_two():
    G = bipartite_graph(build_f2prime()[0])
    assert G.number_of_edges() == 2
    assert sorted(d for _, d in G.degree()) == [1, 1, 2]
    assert {lab for _, _, lab in G.edges(data="label")} == {2}


def test_zero_matrix_graph_rejected():
    with pytest.raises(InvalidCurveSystem, match="connected"):
        bipartite_graph(simple([[0, 0], [0, 0]]))


def test_family_graph_labels_all_two():
    G = bipartite_graph(build_family(9)[0])
    assert {lab for _, _, lab in G.edges(data="label")} == {2}


@pytest.mark.parametrize("system", corpus(), ids=lambda s: s.name or str(s.genus))
def test_graph_round_trip_and_gram_row_sums(system):
    G = bipartite_graph(system)
    N = system.matrix
    assert np.array_equal(matrix_from_graph(G), N)
    assert gram_row_sums_from_graph(G) == (N @ N.T).sum(axis=1).tolist()


@pytest.mark.parametrize("system", corpus(), ids=lambda s: s.name or str(s.genus))
def test_corpus_is_algebraically_consistent(system):
    assert algebraic_consistency(system) == []


@pytest.mark.parametrize("name", ["genus2", "genus4", "genus5", "genus8", "f2prime", "kappa3", "kappa1"])
def test_fixture_json_round_trip(name):
    system, _ = load_system(name)
    again = CurveSystem.from_json(json.loads(system.dumps()))
    assert again == system
    entries = system.to_json()["intersections"]
    assert all(n != 0 for _, _, n in entries)


def test_out_of_range_entry_rejected():
    d = simple([[2]]).to_json()
    d["intersections"].append([3, 0, 1])
    with pytest.raises(InvalidCurveSystem):
        CurveSystem.from_json(d)


@st.composite
def connected_matrices(draw):
    m = draw(st.integers(1, 5))
    n = draw(st.integers(1, 5))
    N = np.array(draw(st.lists(st.lists(st.integers(0, 4), min_size=n, max_size=n), min_size=m, max_size=m)))
    # a spanning zigzag keeps the graph connected
    for i in range(m):
        for j in range(n):
            if i == j or i == j + 1 or (i >= n and j == n - 1) or (j >= m and i == m - 1):
                N[i, j] = max(N[i, j], 1)
    return N


@given(connected_matrices())
def test_random_round_trip(N):
    s = simple(N)
    assert validate(s) == []
    G = bipartite_graph(s)
    assert np.array_equal(matrix_from_graph(G), N)
    assert gram_row_sums_from_graph(G) == (N @ N.T).sum(axis=1).tolist()
