"""Recommendation performance (Hit@k, AP@k, AUC) and dyadic fairness (SP@k, EO@k).

Hit/AP average over nodes holding at least one test edge; zero-train-degree
nodes are flagged out. SP compares recommendation rates between same-group
and cross-group candidate pairs; EO restricts the comparison to test edges.
A pair counts as recommended when either endpoint ranks the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, SensitiveLabels
from .models import Embedding, RankedRecs
from .seeding import derive_seed


class UndefinedMetric(ValueError):
    """The metric has no defined value for this input (e.g. empty dyad class)."""


@dataclass
class MetricReport:
    hit_at_k: float | None
    ap_at_k: float | None
    auc: float | None
    sp_at_k: float | None
    eo_at_k: float | None
    k: int
    eval_nodes: int = 0
    eval_pairs: int = 0
    flags: dict[str, str] = field(default_factory=dict)


def _test_partners(test_edges, n: int) -> dict[int, set[int]]:
    partners: dict[int, set[int]] = {}
    for u, v in np.asarray(test_edges).reshape(-1, 2):
        partners.setdefault(int(u), set()).add(int(v))
        partners.setdefault(int(v), set()).add(int(u))
    return partners


def _eligible(recs: RankedRecs, partners) -> list[int]:
    return [u for u in partners if not recs.excluded[u]]


def hit_at_k(recs: RankedRecs, test_edges) -> float:
    """Fraction of test-holding nodes whose top-k contains a test partner."""
    partners = _test_partners(test_edges, len(recs.lists))
    nodes = _eligible(recs, partners)
    if not nodes:
        raise UndefinedMetric("no eligible node holds a test edge")
    hits = sum(1.0 for u in nodes if partners[u] & set(recs.lists[u].tolist()))
    return hits / len(nodes)


def ap_at_k(recs: RankedRecs, test_edges) -> float:
    """Mean truncated average precision against each node's test partners."""
    partners = _test_partners(test_edges, len(recs.lists))
    nodes = _eligible(recs, partners)
    if not nodes:
        raise UndefinedMetric("no eligible node holds a test edge")
    total = 0.0
    for u in nodes:
        relevant = partners[u]
        hits = 0
        score = 0.0
        for rank, v in enumerate(recs.lists[u].tolist(), start=1):
            if v in relevant:
                hits += 1
                score += hits / rank
        total += score / min(len(relevant), recs.k)
    return total / len(nodes)


def sample_negative_pairs(g_train: Graph, test_edges, count: int, seed: int,
                          max_tries_factor: int = 50) -> np.ndarray:
    """Uniform non-edges (not train, not test, no self-pairs), canonical u<v."""
    n = g_train.n
    forbidden = g_train.has_edge_set()
    for u, v in np.asarray(test_edges).reshape(-1, 2):
        a, b = (int(u), int(v)) if u < v else (int(v), int(u))
        forbidden.add(a * n + b)
    available = n * (n - 1) // 2 - len(forbidden)
    if available <= 0:
        raise UndefinedMetric("graph too dense to sample negative pairs")
    rng = np.random.default_rng(derive_seed(seed, "neg"))
    out = np.empty((count, 2), dtype=np.int64)
    got = 0
    tries = 0
    max_tries = max_tries_factor * count + 1000
    while got < count and tries < max_tries:
        batch = max(count - got, 256)
        us = rng.integers(n, size=batch)
        vs = rng.integers(n, size=batch)
        tries += batch
        lo = np.minimum(us, vs)
        hi = np.maximum(us, vs)
        keys = lo * n + hi
        ok = lo != hi
        for i in np.flatnonzero(ok):
            if keys[i] not in forbidden:
                out[got] = (lo[i], hi[i])
                got += 1
                if got == count:
                    break
    if got < count:  # dense graph: enumerate the full complement instead
        iu, iv = np.triu_indices(n, k=1)
        keys = iu * n + iv
        mask = ~np.isin(keys, np.fromiter(forbidden, dtype=np.int64, count=len(forbidden)))
        pool = np.stack([iu[mask], iv[mask]], axis=1)
        take = min(count, pool.shape[0])
        idx = rng.choice(pool.shape[0], size=take, replace=count > pool.shape[0])
        return pool[idx]
    return out


def auc(emb: Embedding, test_edges, g_train: Graph,
        negative_samples: int | None = None, seed: int = 0) -> float:
    """P(score(test edge) > score(sampled non-edge)) with ties counted half."""
    test = np.asarray(test_edges).reshape(-1, 2)
    if test.shape[0] == 0:
        raise UndefinedMetric("no test edges")
    if negative_samples is None:
        negative_samples = max(10_000, test.shape[0])
    neg = sample_negative_pairs(g_train, test, negative_samples, seed)
    pos_scores = emb.score_pairs(test[:, 0], test[:, 1])
    neg_scores = emb.score_pairs(neg[:, 0], neg[:, 1])
    return _rank_auc(pos_scores, neg_scores)


def _rank_auc(pos: np.ndarray, neg: np.ndarray) -> float:
    """Mann-Whitney form of AUC with midranks (exact tie handling)."""
    scores = np.concatenate([pos, neg])
    labels = np.concatenate([np.ones(pos.size, bool), np.zeros(neg.size, bool)])
    order = np.argsort(scores, kind="stable")
    scores = scores[order]
    labels = labels[order]
    ranks = np.empty(scores.size)
    i = 0
    while i < scores.size:
        j = i
        while j < scores.size and scores[j] == scores[i]:
            j += 1
        ranks[i:j] = 0.5 * (i + 1 + j)
        i = j
    r_pos = ranks[labels].sum()
    u = r_pos - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def _pair_rec_matrix(recs: RankedRecs, n: int) -> np.ndarray:
    rec = np.zeros((n, n), dtype=bool)
    for u, lst in enumerate(recs.lists):
        rec[u, lst] = True
    return rec | rec.T


def dyadic_fairness(recs: RankedRecs, test_edges, labels: SensitiveLabels,
                    kind: str, g_train: Graph | None = None) -> float:
    """|recommendation rate for same-group dyads - rate for cross-group dyads|.

    kind="SP" rates over all candidate pairs (non-train, non-self);
    kind="EO" rates over test edges only. g_train is required for SP.
    """
    s = labels.s
    n = s.size
    pair_rec = _pair_rec_matrix(recs, n)
    if kind == "SP":
        if g_train is None:
            raise ValueError("SP needs the train graph to define candidate pairs")
        cand = np.triu(np.ones((n, n), dtype=bool), k=1)
        if g_train.m_edges:
            cand[g_train.edges[:, 0], g_train.edges[:, 1]] = False
        intra = (s[:, None] == s[None, :]) & cand
        inter = (s[:, None] != s[None, :]) & cand
        if not intra.any() or not inter.any():
            raise UndefinedMetric("a dyad class has no candidate pairs")
        return float(abs(pair_rec[intra].mean() - pair_rec[inter].mean()))
    if kind == "EO":
        test = np.asarray(test_edges).reshape(-1, 2)
        if test.shape[0] == 0:
            raise UndefinedMetric("no test edges")
        same = s[test[:, 0]] == s[test[:, 1]]
        if not same.any() or same.all():
            raise UndefinedMetric("a dyad class has no test edges")
        hit = pair_rec[test[:, 0], test[:, 1]]
        return float(abs(hit[same].mean() - hit[~same].mean()))
    raise ValueError(f"kind must be SP or EO, got {kind!r}")


def evaluate(emb: Embedding, recs: RankedRecs, split, labels: SensitiveLabels,
             k: int, auc_seed: int = 0, negative_samples: int | None = None) -> MetricReport:
    """All five metrics for one (embedding, split); failures become flags."""
    flags: dict[str, str] = {}
    if recs.excluded.any():
        flags["eval"] = f"zero_degree_nodes_excluded:{int(recs.excluded.sum())}"

    def attempt(name, fn):
        try:
            return fn()
        except UndefinedMetric as exc:
            flags[name] = f"undefined({exc})"
            return None

    test = split.test_edges
    hit = attempt("hit", lambda: hit_at_k(recs, test))
    ap = attempt("ap", lambda: ap_at_k(recs, test))
    auc_v = attempt("auc", lambda: auc(emb, test, split.train_graph,
                                       negative_samples, auc_seed))
    sp = attempt("sp", lambda: dyadic_fairness(recs, test, labels, "SP", split.train_graph))
    eo = attempt("eo", lambda: dyadic_fairness(recs, test, labels, "EO"))
    partners = _test_partners(test, labels.s.size)
    return MetricReport(hit_at_k=hit, ap_at_k=ap, auc=auc_v, sp_at_k=sp, eo_at_k=eo,
                        k=k, eval_nodes=len(_eligible(recs, partners)),
                        eval_pairs=int(np.asarray(test).reshape(-1, 2).shape[0]),
                        flags=flags)
