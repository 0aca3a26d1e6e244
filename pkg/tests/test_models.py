import itertools

import numpy as np
import pytest

from fairlinkbench.graph import SensitiveLabels, from_edges
from fairlinkbench.models import (CrossWalkSpec, Embedding, FairwalkSpec, N2VSpec,
                                  NMFSpec, SVDSpec, WalkParams, boundary_scores,
                                  embed, model_spec_from_id, recommend_topk,
                                  split_edges, walk_step_distribution)

SMALL_WALK = WalkParams(walks=4, length=15, window=3, negatives=3, epochs=2)


def random_connected(rng, n, extra=1.0):
    pairs = [(int(rng.integers(0, i)), i) for i in range(1, n)]
    more = rng.integers(0, n, size=(int(extra * n), 2))
    pairs += [tuple(p) for p in more if p[0] != p[1]]
    return from_edges(n, pairs)


def labels_for(n, rng=None, pattern="alt"):
    if pattern == "alt":
        return SensitiveLabels((np.arange(n) % 2).astype(np.int8))
    s = (rng.random(n) < 0.5).astype(np.int8)
    if s.all() or not s.any():
        s[0] = 1 - s[0]
    return SensitiveLabels(s)


# --- splits -----------------------------------------------------------------

def test_split_sizes_and_partition():
    g = from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5),
                       (0, 3), (1, 4), (2, 5), (0, 4)])
    sp = split_edges(g, split_id=2, seed=7)
    assert sp.test_edges.shape[0] == 2
    assert sp.train_graph.m_edges == 8
    assert sp.train_graph.n == g.n
    union = np.vstack([sp.train_graph.edges, sp.test_edges])
    assert np.array_equal(np.unique(union, axis=0), g.edges)


def test_split_determinism_and_split_id_variation():
    rng = np.random.default_rng(3)
    g = random_connected(rng, 30, extra=2.0)
    a = split_edges(g, split_id=0, seed=11)
    b = split_edges(g, split_id=0, seed=11)
    c = split_edges(g, split_id=1, seed=11)
    assert np.array_equal(a.test_edges, b.test_edges)
    assert not np.array_equal(a.test_edges, c.test_edges)


def test_split_needs_enough_edges():
    with pytest.raises(ValueError):
        split_edges(from_edges(3, [(0, 1), (1, 2)]))


# --- SVD --------------------------------------------------------------------

def test_svd_clique_separation():
    cliques = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]
    g = from_edges(6, cliques)
    emb = embed(g, labels_for(6), SVDSpec(d=4))
    s = emb.score_matrix()
    within = min(s[u, v] for u, v in cliques)
    cross = max(s[u, v] for u in range(3) for v in range(3, 6))
    assert within > cross


def test_svd_full_rank_reconstruction():
    rng = np.random.default_rng(19)
    for _ in range(5):
        n = int(rng.integers(4, 50))
        g = random_connected(rng, n)
        emb = embed(g, labels_for(n), SVDSpec(d=n))
        assert np.abs(emb.score_matrix() - g.adjacency_matrix()).max() < 1e-6


def test_svd_deterministic():
    rng = np.random.default_rng(23)
    g = random_connected(rng, 25)
    a = embed(g, labels_for(25), SVDSpec(d=8), seed=1)
    b = embed(g, labels_for(25), SVDSpec(d=8), seed=1)
    assert np.array_equal(a.matrix, b.matrix)


def test_svd_zero_rows_for_isolated():
    g = from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)])
    sp = split_edges(from_edges(7, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (6, 0)]),
                     split_id=0, seed=5)
    train = sp.train_graph
    emb = embed(train, labels_for(7), SVDSpec(d=4))
    for u in np.flatnonzero(train.degrees == 0):
        assert np.allclose(emb.matrix[u], 0.0)


# --- NMF --------------------------------------------------------------------

def test_nmf_nonnegative_and_deterministic():
    rng = np.random.default_rng(29)
    g = random_connected(rng, 20)
    lab = labels_for(20)
    a = embed(g, lab, NMFSpec(d=6), seed=4)
    b = embed(g, lab, NMFSpec(d=6), seed=4)
    assert (a.matrix >= 0).all()
    assert np.array_equal(a.matrix, b.matrix)
    assert "converged" in a.params


# --- walk distributions -------------------------------------------------------

def test_n2v_uniform_step():
    g = from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    p = walk_step_distribution(g, labels_for(5), N2VSpec(), current=0)
    assert np.allclose(p, 0.25)


def test_n2v_pq_biased_step():
    # previous=0, current=1; neighbors of 1: {0 (back), 2 (shared w/ 0), 3 (far)}
    g = from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3)])
    spec = N2VSpec(p=2.0, q=4.0)
    p = walk_step_distribution(g, labels_for(4), spec, current=1, previous=0)
    raw = np.array([1 / 2.0, 1.0, 1 / 4.0])
    assert np.allclose(p, raw / raw.sum())


def test_fairwalk_group_stage():
    g = from_edges(4, [(0, 1), (0, 2), (0, 3)])
    lab = SensitiveLabels(np.array([0, 0, 0, 1]))
    p = walk_step_distribution(g, lab, FairwalkSpec(), current=0)
    # neighbors 1, 2 (group 0) and 3 (group 1)
    assert np.allclose(p, [0.25, 0.25, 0.5])


def test_fairwalk_single_group_uniform():
    g = from_edges(4, [(0, 1), (0, 2), (0, 3)])
    lab = SensitiveLabels(np.array([1, 0, 0, 0]))
    p = walk_step_distribution(g, lab, FairwalkSpec(), current=0)
    assert np.allclose(p, 1 / 3.0)


def test_fairwalk_per_group_mass():
    rng = np.random.default_rng(31)
    g = random_connected(rng, 30, extra=2.0)
    lab = labels_for(30, rng, pattern="rand")
    s = lab.s
    for u in range(30):
        nbrs = g.neighbors(u)
        if nbrs.size == 0:
            continue
        p = walk_step_distribution(g, lab, FairwalkSpec(), current=u)
        present = len(set(s[nbrs].tolist()))
        for grp in set(s[nbrs].tolist()):
            assert p[s[nbrs] == grp].sum() == pytest.approx(1.0 / present)


def test_walk_distributions_sum_to_one_on_support():
    rng = np.random.default_rng(37)
    g = random_connected(rng, 25, extra=1.5)
    lab = labels_for(25, rng, pattern="rand")
    for spec in (N2VSpec(), FairwalkSpec(), CrossWalkSpec()):
        for u in range(25):
            if g.degrees[u] == 0:
                continue
            p = walk_step_distribution(g, lab, spec, current=u, previous=None)
            assert p.sum() == pytest.approx(1.0, abs=1e-12)
            assert p.size == g.degrees[u]
            assert (p >= 0).all()


def test_walk_distribution_isolated_errors():
    g = from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        walk_step_distribution(g, labels_for(3), N2VSpec(), current=2)


def test_crosswalk_mass_split():
    # star center 0 with both groups present among leaves
    g = from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (3, 4)])
    lab = SensitiveLabels(np.array([0, 0, 0, 1, 1]))
    spec = CrossWalkSpec(alpha_cw=0.3, r=20, l=4)
    p = walk_step_distribution(g, lab, spec, current=0)
    nbrs = g.neighbors(0)
    same = lab.s[nbrs] == lab.s[0]
    assert p[same].sum() == pytest.approx(0.7)
    assert p[~same].sum() == pytest.approx(0.3)


def test_crosswalk_boundary_scores_higher_at_boundary():
    # two cliques of 5 joined by one bridge edge between nodes 4 and 5
    edges = list(itertools.combinations(range(5), 2)) + \
        list(itertools.combinations(range(5, 10), 2)) + [(4, 5)]
    g = from_edges(10, edges)
    lab = SensitiveLabels(np.array([0] * 5 + [1] * 5))
    rng = np.random.default_rng(3)
    m = boundary_scores(g, lab, r=50, l=4, rng=rng)
    interior = [0, 1, 2, 3]
    assert m[4] > max(m[i] for i in interior)


# --- walk embeddings ---------------------------------------------------------

@pytest.mark.parametrize("spec", [
    N2VSpec(d=8, walk=SMALL_WALK),
    N2VSpec(d=8, p=2.0, q=0.5, walk=SMALL_WALK),
    FairwalkSpec(d=8, walk=SMALL_WALK),
    CrossWalkSpec(d=8, walk=SMALL_WALK, r=5, l=3),
])
def test_walk_embeddings_deterministic(spec):
    rng = np.random.default_rng(41)
    g = random_connected(rng, 20, extra=1.5)
    lab = labels_for(20, rng, pattern="rand")
    a = embed(g, lab, spec, seed=9)
    b = embed(g, lab, spec, seed=9)
    assert np.array_equal(a.matrix, b.matrix)
    assert np.isfinite(a.matrix).all()


def test_n2v_separates_cliques_on_average():
    edges = list(itertools.combinations(range(8), 2)) + \
        list(itertools.combinations(range(8, 16), 2)) + [(0, 8)]
    g = from_edges(16, edges)
    lab = SensitiveLabels(np.array([0] * 8 + [1] * 8))
    wp = WalkParams(walks=8, length=20, window=4, negatives=4, epochs=3)
    emb = embed(g, lab, N2VSpec(d=8, walk=wp), seed=2)
    s = emb.score_matrix()
    within = np.mean([s[u, v] for u, v in itertools.combinations(range(8), 2)])
    cross = np.mean([s[u, v] for u in range(8) for v in range(8, 16)])
    assert within > cross


# --- recommendations -----------------------------------------------------------

def _manual_embedding(matrix):
    return Embedding(matrix=np.asarray(matrix, dtype=float), model_id="svd", params={})


def test_recommend_argmax():
    # scores: s(0,1)=2, s(0,2)=1 via crafted embedding rows
    emb = _manual_embedding([[1.0, 0.0], [2.0, 0.0], [1.0, 0.0]])
    g = from_edges(3, [])
    recs = recommend_topk(emb, g, k=1)
    assert recs.lists[0].tolist() == [1]


def test_recommend_excludes_self_and_train():
    rng = np.random.default_rng(43)
    for _ in range(5):
        n = int(rng.integers(6, 25))
        g = random_connected(rng, n, extra=1.5)
        emb = _manual_embedding(rng.normal(size=(n, 4)))
        recs = recommend_topk(emb, g, k=5)
        for u in range(n):
            nbrs = set(g.neighbors(u).tolist())
            for v in recs.lists[u]:
                assert v != u and v not in nbrs


def test_recommend_k_larger_than_candidates():
    g = from_edges(3, [(0, 1)])
    emb = _manual_embedding(np.eye(3))
    recs = recommend_topk(emb, g, k=10)
    assert sorted(recs.lists[0].tolist()) == [2]
    assert sorted(recs.lists[2].tolist()) == [0, 1]


def test_recommend_tie_break_ascending_id():
    emb = _manual_embedding(np.ones((5, 2)))  # all scores equal
    g = from_edges(5, [])
    recs = recommend_topk(emb, g, k=3)
    assert recs.lists[0].tolist() == [1, 2, 3]
    assert recs.lists[4].tolist() == [0, 1, 2]


def test_model_spec_parsing():
    spec = model_spec_from_id("crosswalk", {"embed_dim": "16", "cw_alpha": "0.7"})
    assert spec.d == 16 and spec.alpha_cw == 0.7
    with pytest.raises(ValueError):
        model_spec_from_id("gnn", {})
