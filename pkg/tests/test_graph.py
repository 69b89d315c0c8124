import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.errors import ConfigInvalid, IndexOutOfRange, InvalidKernel, InvalidProbability, LengthMismatch, SelfLoop
from src.graph import (
    GRAPH_KINDS,
    Kernel,
    build_graph,
    complete_graph,
    empty_graph,
    gen_erdos_renyi,
    gen_graphon,
    graph_from_edge_list,
    latent_types,
    parse_edge_list,
    path_graph,
    read_edge_list,
    serialize_edge_list,
    star_graph,
    write_edge_list,
)


@st.composite
def edge_lists(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    if n == 1:
        return n, []
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1])
    return n, draw(st.lists(pairs, max_size=40))


@given(edge_lists())
def test_edge_list_graph_is_symmetric_and_simple(case):
    n, edges = case
    g = graph_from_edge_list(n, edges)
    for i, nb in enumerate(g.neighbors):
        assert i not in nb
        assert list(nb) == sorted(set(nb))
        for j in nb:
            assert i in g.neighbors[j]
    assert g.edge_count == len({tuple(sorted(e)) for e in edges})
    assert g.max_degree == max(len(nb) for nb in g.neighbors)


@given(edge_lists(), st.data())
def test_neighbor_sums_match_adjacency(case, data):
    n, edges = case
    g = graph_from_edge_list(n, edges)
    state = np.array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    dense = g.adjacency.toarray()
    assert np.array_equal(g.neighbor_sums(state), dense @ state)
    assert g.neighbor_sums(state).dtype == np.int64


def test_edge_list_rejects_bad_pairs():
    with pytest.raises(IndexOutOfRange):
        graph_from_edge_list(3, [(0, 3)])
    with pytest.raises(SelfLoop):
        graph_from_edge_list(3, [(1, 1)])


def test_neighbor_sums_length_checked():
    with pytest.raises(LengthMismatch):
        path_graph(3).neighbor_sums(np.zeros(4))


def test_neighbor_sums_accepts_probabilities():
    g = path_graph(3)
    assert np.allclose(g.neighbor_sums(np.array([0.5, 0.25, 1.0])), [0.25, 1.5, 0.25])


def test_deterministic_builders():
    assert complete_graph(5).max_degree == 4
    assert complete_graph(5).edge_count == 10
    assert empty_graph(4).edge_count == 0
    assert path_graph(4).edges == [(0, 1), (1, 2), (2, 3)]
    star = star_graph(5)
    assert star.degrees.tolist() == [4, 1, 1, 1, 1]


def test_erdos_renyi_is_reproducible_and_extreme_rhos():
    assert gen_erdos_renyi(30, 0.2, seed=4).fingerprint == gen_erdos_renyi(30, 0.2, seed=4).fingerprint
    assert gen_erdos_renyi(30, 0.2, seed=4).fingerprint != gen_erdos_renyi(30, 0.2, seed=5).fingerprint
    assert gen_erdos_renyi(6, 0.0, seed=1).edge_count == 0
    assert gen_erdos_renyi(6, 1.0, seed=1).edge_count == 15


def test_erdos_renyi_edge_density():
    g = gen_erdos_renyi(300, 0.1, seed=11)
    pairs = 300 * 299 / 2
    se = np.sqrt(pairs * 0.1 * 0.9)
    assert abs(g.edge_count - 0.1 * pairs) < 4 * se


def test_invalid_probability():
    with pytest.raises(InvalidProbability):
        gen_erdos_renyi(5, 1.5, seed=0)


def test_constant_one_graphon_equals_erdos_renyi():
    g, u = gen_graphon(40, 0.3, {"type": "constant", "value": 1.0}, seed=9)
    assert g.fingerprint == gen_erdos_renyi(40, 0.3, seed=9).fingerprint
    assert np.array_equal(u, latent_types(40, 9))


def test_block_kernel_separates_blocks():
    kernel = {"type": "block", "matrix": [[1.0, 0.0], [0.0, 1.0]]}
    g, u = gen_graphon(60, 1.0, kernel, seed=2)
    block = Kernel.from_spec(kernel).block_of(u)
    for i, j in g.edges:
        assert block[i] == block[j]


@pytest.mark.slow
def test_block_kernel_within_to_cross_density_ratio():
    kernel = {"type": "block", "matrix": [[0.8, 0.2], [0.2, 0.8]]}
    blocks = Kernel.from_spec(kernel)
    ratios = []
    for seed in range(500):
        g, u = gen_graphon(200, 0.5, kernel, seed=seed)
        block = blocks.block_of(u)
        sizes = np.bincount(block, minlength=2)
        within_pairs = sum(int(s) * (int(s) - 1) // 2 for s in sizes)
        cross_pairs = int(sizes[0]) * int(sizes[1])
        same = sum(1 for i, j in g.edges if block[i] == block[j])
        ratios.append((same / within_pairs) / ((g.edge_count - same) / cross_pairs))
    ratios = np.array(ratios)
    se = ratios.std(ddof=1) / np.sqrt(ratios.size)
    assert abs(ratios.mean() - 0.8 / 0.2) < 3 * se + 0.01


@pytest.mark.slow
def test_erdos_renyi_max_degree_within_twice_expected():
    n, rho = 500, 0.1
    within = [gen_erdos_renyi(n, rho, seed=seed).max_degree <= 2 * n * rho for seed in range(1000)]
    assert np.mean(within) >= 0.95


def test_kernel_validation():
    with pytest.raises(InvalidKernel):
        Kernel.from_spec({"type": "block", "matrix": [[0.5, 0.1], [0.2, 0.5]]})
    with pytest.raises(InvalidKernel):
        Kernel.from_spec({"type": "product", "breaks": [0.5], "values": [0.2]})
    with pytest.raises(InvalidKernel):
        Kernel.from_spec({"type": "wavelet"})


def test_product_kernel_values():
    k = Kernel.from_spec({"type": "product", "breaks": [0.5], "values": [0.2, 0.8]})
    assert k.evaluate(np.array([0.1]), np.array([0.9]))[0] == pytest.approx(0.16)


@settings(max_examples=25)
@given(edge_lists())
def test_edge_list_text_reproduces_graph(case):
    g = graph_from_edge_list(*case)
    assert parse_edge_list(serialize_edge_list(g)).fingerprint == g.fingerprint


def test_edge_list_comments_and_files(tmp_path):
    g = parse_edge_list("# header\n3\n0 1  # first\n\n2 1\n")
    assert g.edges == [(0, 1), (1, 2)]
    path = write_edge_list(g, tmp_path / "g.txt")
    assert path.read_text().splitlines() == ["3", "0 1", "1 2"]
    assert read_edge_list(path).fingerprint == g.fingerprint


def test_build_graph_specs(tmp_path):
    assert build_graph({"kind": "complete", "n": 4}).edge_count == 6
    assert build_graph({"kind": "edges", "n": 3, "edges": [[0, 2]]}).edges == [(0, 2)]
    path = write_edge_list(star_graph(4), tmp_path / "star.txt")
    assert build_graph({"kind": "file", "path": str(path)}).fingerprint == star_graph(4).fingerprint
    with pytest.raises(ConfigInvalid):
        build_graph({"kind": "lattice", "n": 4})
    assert set(GRAPH_KINDS) >= {"erdos_renyi", "graphon", "file"}
