import numpy as np
import pytest

from fairlinkbench.graph import (GraphFormatError, SensitiveLabels,
                                 UNREACHABLE, bfs_distances, connected_components,
                                 from_edges, graph_density, induced_density,
                                 largest_component_nodes, load_graph, save_graph,
                                 subgraph)


def test_from_edges_dedups_reversed_pairs():
    g = from_edges(3, [(0, 1), (1, 0), (1, 2)])
    assert g.m_edges == 2
    assert g.neighbors(1).tolist() == [0, 2]


def test_from_edges_empty():
    g = from_edges(2, [])
    assert g.m_edges == 0
    assert g.degrees.tolist() == [0, 0]


def test_from_edges_cycle_degrees():
    g = from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert g.m_edges == 4
    assert g.degrees.tolist() == [2, 2, 2, 2]


def test_from_edges_rejects_bad_input():
    with pytest.raises(ValueError, match="out of range"):
        from_edges(3, [(0, 3)])
    with pytest.raises(ValueError, match="self-loop"):
        from_edges(3, [(1, 1)])


def test_adjacency_symmetry_and_degree_sum():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(2, 40))
        pairs = rng.integers(0, n, size=(60, 2))
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        g = from_edges(n, pairs)
        assert int(g.degrees.sum()) == 2 * g.m_edges
        for u in range(n):
            for v in g.neighbors(u):
                assert u in g.neighbors(v)


def test_bfs_path_star_and_components():
    path = from_edges(3, [(0, 1), (1, 2)])
    assert bfs_distances(path, 0).tolist() == [0, 1, 2]
    star = from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert bfs_distances(star, 0).tolist() == [0, 1, 1, 1]
    two = from_edges(4, [(0, 1), (2, 3)])
    d = bfs_distances(two, 0)
    assert d.tolist() == [0, 1, UNREACHABLE, UNREACHABLE]


def _floyd_warshall(g):
    big = 10 ** 6
    d = np.full((g.n, g.n), big)
    np.fill_diagonal(d, 0)
    for u, v in g.edges:
        d[u, v] = d[v, u] = 1
    for k in range(g.n):
        d = np.minimum(d, d[:, k][:, None] + d[k])
    d[d >= big] = UNREACHABLE
    return d


def test_bfs_matches_floyd_warshall():
    rng = np.random.default_rng(11)
    for _ in range(10):
        n = int(rng.integers(2, 50))
        pairs = rng.integers(0, n, size=(n * 2, 2))
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        g = from_edges(n, pairs)
        fw = _floyd_warshall(g)
        for src in range(n):
            assert bfs_distances(g, src).tolist() == fw[src].tolist()


def test_induced_density():
    tri = from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert induced_density(tri, [0, 1, 2]) == 1.0
    empty = from_edges(3, [])
    assert induced_density(empty, [0, 1, 2]) == 0.0
    star = from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert induced_density(star, [0, 1, 2, 3]) == 0.5
    with pytest.raises(ValueError):
        induced_density(tri, [0])


def test_components_and_subgraph():
    g = from_edges(5, [(0, 1), (1, 2), (3, 4)])
    comp = connected_components(g)
    assert comp[0] == comp[1] == comp[2]
    assert comp[3] == comp[4] != comp[0]
    lcc = largest_component_nodes(g)
    assert lcc.tolist() == [0, 1, 2]
    sub, orig = subgraph(g, lcc)
    assert sub.n == 3 and sub.m_edges == 2
    assert orig.tolist() == [0, 1, 2]


def test_graph_density():
    assert graph_density(from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])) == pytest.approx(4 / 6)


def test_labels_validation():
    lab = SensitiveLabels(np.array([0, 1, 1]))
    assert lab.n0 == 1 and lab.n1 == 2
    with pytest.raises(ValueError):
        SensitiveLabels(np.array([0, 2]))


def test_load_save_roundtrip(tmp_path):
    edge_file = tmp_path / "g.edges.csv"
    label_file = tmp_path / "g.labels.csv"
    edge_file.write_text("0,1\n1,2\n")
    label_file.write_text("0,0\n1,1\n2,1\n")
    g, lab = load_graph(edge_file, label_file)
    assert g.n == 3 and g.m_edges == 2
    assert lab.s.tolist() == [0, 1, 1]

    out_e = tmp_path / "out.edges.csv"
    out_l = tmp_path / "out.labels.csv"
    save_graph(g, lab, out_e, out_l)
    assert out_e.read_bytes() == edge_file.read_bytes()
    assert out_l.read_bytes() == label_file.read_bytes()


def test_load_missing_label_names_node(tmp_path):
    (tmp_path / "e.csv").write_text("0,1\n1,2\n")
    (tmp_path / "l.csv").write_text("0,0\n1,1\n")
    with pytest.raises(GraphFormatError, match="node 2"):
        load_graph(tmp_path / "e.csv", tmp_path / "l.csv")


def test_load_reports_line_numbers(tmp_path):
    (tmp_path / "e.csv").write_text("0,1\nnot-a-pair\n")
    (tmp_path / "l.csv").write_text("0,0\n1,1\n")
    with pytest.raises(GraphFormatError, match=":2"):
        load_graph(tmp_path / "e.csv", tmp_path / "l.csv")
    (tmp_path / "l2.csv").write_text("0,0\n1,7\n")
    with pytest.raises(GraphFormatError, match="not in"):
        load_graph(tmp_path / "e.csv", tmp_path / "l2.csv")


def test_load_remaps_sparse_ids(tmp_path):
    (tmp_path / "e.csv").write_text("10,30\n30,20\n")
    (tmp_path / "l.csv").write_text("10,0\n20,1\n30,0\n")
    g, lab = load_graph(tmp_path / "e.csv", tmp_path / "l.csv",
                        mapping_file=tmp_path / "map.csv")
    assert g.n == 3 and g.m_edges == 2
    assert lab.s.tolist() == [0, 1, 0]
    assert (tmp_path / "map.csv").read_text() == "10,0\n20,1\n30,2\n"


def test_canonical_serialization_deterministic(tmp_path):
    lab = SensitiveLabels(np.array([0, 1, 0, 1]))
    g1 = from_edges(4, [(3, 0), (1, 0), (2, 1)])
    g2 = from_edges(4, [(0, 1), (0, 3), (1, 2)])
    for g, tag in ((g1, "a"), (g2, "b")):
        save_graph(g, lab, tmp_path / f"{tag}.e", tmp_path / f"{tag}.l")
    assert (tmp_path / "a.e").read_bytes() == (tmp_path / "b.e").read_bytes()
