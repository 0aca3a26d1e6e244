"""Edge splitting, embedding models, and top-k recommendation.

Five models produce node embeddings scored by inner products:

  * svd       — truncated spectral factorization of the adjacency matrix
  * nmf       — multiplicative-update NMF of D^{-1/2} A D^{-1/2}
  * n2v       — random walks + skip-gram with negative sampling
  * fairwalk  — walks that first pick a neighbor group uniformly
  * crosswalk — walks reweighted toward group-boundary nodes

Everything is deterministic for a fixed seed (walk generation, negative
sampling, and training run in a fixed serialized order).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, SensitiveLabels, from_edges
from .seeding import derive_seed

log = logging.getLogger(__name__)

MODEL_IDS = ("svd", "nmf", "n2v", "fairwalk", "crosswalk")


@dataclass(frozen=True)
class SVDSpec:
    d: int = 64
    model_id: str = "svd"


@dataclass(frozen=True)
class NMFSpec:
    d: int = 64
    max_iter: int = 200
    tol: float = 1e-4
    model_id: str = "nmf"


@dataclass(frozen=True)
class WalkParams:
    walks: int = 10
    length: int = 80
    window: int = 10
    negatives: int = 5
    epochs: int = 5
    step_size: float = 0.025


@dataclass(frozen=True)
class N2VSpec:
    d: int = 64
    p: float = 1.0
    q: float = 1.0
    walk: WalkParams = field(default_factory=WalkParams)
    model_id: str = "n2v"


@dataclass(frozen=True)
class FairwalkSpec:
    d: int = 64
    walk: WalkParams = field(default_factory=WalkParams)
    model_id: str = "fairwalk"


@dataclass(frozen=True)
class CrossWalkSpec:
    d: int = 64
    alpha_cw: float = 0.5
    p_cw: float = 2.0
    r: int = 10
    l: int = 5
    walk: WalkParams = field(default_factory=WalkParams)
    model_id: str = "crosswalk"


@dataclass(frozen=True)
class SplitResult:
    train_graph: Graph
    test_edges: np.ndarray  # (t, 2), u < v
    split_id: int
    seed: int


@dataclass
class Embedding:
    matrix: np.ndarray            # n x d node representations
    model_id: str
    params: dict
    target: np.ndarray | None = None  # scoring counterpart; defaults to matrix

    def __post_init__(self):
        if self.matrix.ndim != 2 or self.matrix.shape[1] < 2:
            raise ValueError("embedding must be n x d with d >= 2")
        if not np.isfinite(self.matrix).all():
            raise ValueError("embedding has non-finite entries")
        if self.target is None:
            self.target = self.matrix

    def score_matrix(self) -> np.ndarray:
        return self.matrix @ self.target.T

    def score_pairs(self, us, vs) -> np.ndarray:
        return np.einsum("ij,ij->i", self.matrix[us], self.target[vs])


def split_edges(g: Graph, ratio: float = 0.8, split_id: int = 0, seed: int = 0) -> SplitResult:
    """Uniform random train/test edge partition; all n nodes stay in train."""
    m = g.m_edges
    if m < 5:
        raise ValueError("need at least 5 edges to split")
    n_test = int(math.floor((1.0 - ratio) * m + 0.5))
    rng = np.random.default_rng(derive_seed(seed, "split", split_id))
    perm = rng.permutation(m)
    test = g.edges[np.sort(perm[:n_test])]
    train = g.edges[np.sort(perm[n_test:])]
    return SplitResult(train_graph=from_edges(g.n, train), test_edges=test,
                       split_id=split_id, seed=seed)


# --- factorization models ---------------------------------------------------


def _svd_embed(train: Graph, spec: SVDSpec) -> Embedding:
    a = train.adjacency_matrix()
    w, q = np.linalg.eigh(a)
    order = np.argsort(-np.abs(w))[: min(spec.d, train.n)]
    lam = w[order]
    u = q[:, order]
    # deterministic eigenvector orientation
    flip = np.sign(u[np.abs(u).argmax(axis=0), np.arange(u.shape[1])])
    flip[flip == 0] = 1.0
    u = u * flip
    scale = np.sqrt(np.abs(lam))
    matrix = u * scale
    target = matrix * np.where(lam < 0, -1.0, 1.0)
    return Embedding(matrix=matrix, model_id="svd", params={"d": spec.d}, target=target)


def _nmf_embed(train: Graph, spec: NMFSpec, seed: int) -> Embedding:
    n = train.n
    deg = train.degrees.astype(float)
    dinv = np.zeros(n)
    dinv[deg > 0] = 1.0 / np.sqrt(deg[deg > 0])
    m = train.adjacency_matrix() * dinv[:, None] * dinv[None, :]
    d = min(spec.d, n)
    rng = np.random.default_rng(derive_seed(seed, "nmf"))
    scale = math.sqrt(max(m.mean(), 1e-12) / d)
    w = rng.random((n, d)) * scale + 1e-6
    h = rng.random((d, n)) * scale + 1e-6
    eps = 1e-12
    prev_loss = None
    converged = False
    for it in range(spec.max_iter):
        w *= (m @ h.T) / (w @ (h @ h.T) + eps)
        h *= (w.T @ m) / ((w.T @ w) @ h + eps)
        if it % 10 == 9 or it == spec.max_iter - 1:
            loss = float(np.linalg.norm(m - w @ h))
            if prev_loss is not None and abs(prev_loss - loss) <= spec.tol * max(prev_loss, eps):
                converged = True
                break
            prev_loss = loss
    if not converged:
        log.warning("nmf did not reach tol=%g within %d iterations", spec.tol, spec.max_iter)
    w[deg == 0] = 0.0
    if d < spec.d:
        w = np.pad(w, ((0, 0), (0, spec.d - d)))
    return Embedding(matrix=w, model_id="nmf",
                     params={"d": spec.d, "converged": converged})


# --- random-walk models -----------------------------------------------------


def _neighbor_probs_fairwalk(train: Graph, labels: SensitiveLabels) -> np.ndarray:
    """Per-edge-slot probabilities: pick a present group uniformly, then a member."""
    s = labels.s
    deg = train.degrees
    cnt1 = np.zeros(train.n)
    if train.indices.size:
        offsets = np.minimum(train.indptr[:-1], train.indices.size - 1)
        cnt1 = np.add.reduceat(s[train.indices].astype(float), offsets)
        cnt1[deg == 0] = 0.0
    cnt0 = deg - cnt1
    present = (cnt0 > 0).astype(float) + (cnt1 > 0).astype(float)
    u_of = np.repeat(np.arange(train.n), deg)
    v = train.indices
    group_size = np.where(s[v] == 1, cnt1[u_of], cnt0[u_of])
    return 1.0 / (present[u_of] * group_size)


def boundary_scores(train: Graph, labels: SensitiveLabels, r: int, l: int, rng) -> np.ndarray:
    """Fraction of other-group nodes among r truncated uniform walks of length l."""
    n = train.n
    deg = train.degrees
    scores = np.zeros(n)
    starts = np.repeat(np.flatnonzero(deg > 0), r)
    if starts.size == 0:
        return scores
    visited_other = np.zeros(n)
    s = labels.s
    cur = starts.copy()
    for _ in range(l):
        idx = (rng.random(cur.size) * deg[cur]).astype(np.int64)
        cur = train.indices[train.indptr[cur] + idx]
        np.add.at(visited_other, starts, (s[cur] != s[starts]).astype(float))
    nz = deg > 0
    scores[nz] = visited_other[nz] / (r * l)
    return scores


def _neighbor_probs_crosswalk(train: Graph, labels: SensitiveLabels,
                              spec: CrossWalkSpec, seed: int) -> np.ndarray:
    """Per-edge-slot probabilities with alpha_cw mass shifted across groups.

    Within each side the mass is proportional to the neighbor's boundary
    score raised to p_cw; a side with all-zero scores degrades to uniform,
    and a node whose neighbors are all one group keeps a uniform rule.
    """
    rng = np.random.default_rng(derive_seed(seed, "crosswalk-boundary"))
    mscore = boundary_scores(train, labels, spec.r, spec.l, rng)
    s = labels.s
    deg = train.degrees
    n = train.n
    u_of = np.repeat(np.arange(n), deg)
    v = train.indices
    same = s[v] == s[u_of]
    raw = np.power(mscore[v], spec.p_cw)

    sum_same = np.zeros(n)
    sum_diff = np.zeros(n)
    np.add.at(sum_same, u_of[same], raw[same])
    np.add.at(sum_diff, u_of[~same], raw[~same])
    cnt_same = np.zeros(n)
    cnt_diff = np.zeros(n)
    np.add.at(cnt_same, u_of[same], 1.0)
    np.add.at(cnt_diff, u_of[~same], 1.0)

    # all-zero boundary mass within a side: spread uniformly inside that side
    fix_same = (sum_same == 0) & (cnt_same > 0)
    fix_diff = (sum_diff == 0) & (cnt_diff > 0)
    raw = raw.copy()
    raw[same & fix_same[u_of]] = 1.0
    raw[~same & fix_diff[u_of]] = 1.0
    np.add.at(sum_same, u_of[same & fix_same[u_of]], 1.0)
    np.add.at(sum_diff, u_of[~same & fix_diff[u_of]], 1.0)

    probs = np.zeros(v.size)
    both = (cnt_same > 0) & (cnt_diff > 0)
    sel_same = same & both[u_of]
    sel_diff = ~same & both[u_of]
    probs[sel_same] = (1.0 - spec.alpha_cw) * raw[sel_same] / sum_same[u_of[sel_same]]
    probs[sel_diff] = spec.alpha_cw * raw[sel_diff] / sum_diff[u_of[sel_diff]]
    single = ~both
    if single.any():  # one side empty: uniform over the neighborhood
        probs[single[u_of]] = 1.0 / deg[u_of[single[u_of]]]
    return probs


def _padded_cdf(train: Graph, probs: np.ndarray) -> np.ndarray:
    """Per-node cumulative transition probabilities, right-padded with 1."""
    deg = train.degrees
    maxdeg = int(deg.max()) if train.n else 0
    cdf = np.ones((train.n, max(maxdeg, 1)))
    if probs.size:
        pos_in_row = np.arange(probs.size) - np.repeat(train.indptr[:-1], deg)
        rows = np.repeat(np.arange(train.n), deg)
        running = np.cumsum(probs)
        row_start_total = np.zeros(train.n)
        nz = deg > 0
        starts = train.indptr[:-1][nz]
        row_start_total[nz] = running[starts] - probs[starts]
        cdf[rows, pos_in_row] = running - row_start_total[rows]
    return cdf


def _walk_matrix(train: Graph, starts: np.ndarray, length: int, rng,
                 cdf: np.ndarray | None = None) -> np.ndarray:
    """Fixed-length walks from each start; uniform steps unless a cdf is given."""
    deg = train.degrees
    walks = np.empty((starts.size, length + 1), dtype=np.int64)
    walks[:, 0] = starts
    cur = starts.copy()
    for t in range(1, length + 1):
        r = rng.random(cur.size)
        if cdf is None:
            idx = (r * deg[cur]).astype(np.int64)
        else:
            idx = (cdf[cur] <= r[:, None]).sum(axis=1)
            idx = np.minimum(idx, deg[cur] - 1)
        cur = train.indices[train.indptr[cur] + idx]
        walks[:, t] = cur
    return walks


def _n2v_walks(train: Graph, spec: N2VSpec, starts: np.ndarray, rng) -> np.ndarray:
    """Second-order p/q-biased walks (slow path; p=q=1 uses the uniform path)."""
    walks = np.empty((starts.size, spec.walk.length + 1), dtype=np.int64)
    edge_sets = [set(train.neighbors(u).tolist()) for u in range(train.n)]
    for i, start in enumerate(starts):
        walk = [int(start)]
        for t in range(spec.walk.length):
            cur = walk[-1]
            nbrs = train.neighbors(cur)
            if len(walk) == 1:
                w = np.ones(nbrs.size)
            else:
                prev = walk[-2]
                w = np.empty(nbrs.size)
                for j, x in enumerate(nbrs):
                    if x == prev:
                        w[j] = 1.0 / spec.p
                    elif x in edge_sets[prev]:
                        w[j] = 1.0
                    else:
                        w[j] = 1.0 / spec.q
            w /= w.sum()
            walk.append(int(nbrs[np.searchsorted(np.cumsum(w), rng.random() * 1.0, side="right").clip(max=nbrs.size - 1)]))
        walks[i] = walk
    return walks


def _sgns(walks: np.ndarray, n: int, d: int, params: WalkParams, rng,
          chunk: int = 512) -> np.ndarray:
    """Skip-gram with negative sampling over a fixed walk corpus.

    Serialized, chunked updates in a fixed order; deterministic for a fixed
    rng state. Returns the input-vector matrix.
    """
    counts = np.bincount(walks.ravel(), minlength=n).astype(float)
    noise = counts ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())

    w_in = (rng.random((n, d)) - 0.5) / d
    w_out = np.zeros((n, d))

    length = walks.shape[1]
    offsets = [o for o in range(1, params.window + 1) if o < length]
    total_steps = params.epochs * sum(
        2 * walks.shape[0] * (length - o) for o in offsets)
    step = 0
    for _ in range(params.epochs):
        for o in offsets:
            left = walks[:, :-o].ravel()
            right = walks[:, o:].ravel()
            centers = np.concatenate([left, right])
            contexts = np.concatenate([right, left])
            for i in range(0, centers.size, chunk):
                c = centers[i:i + chunk]
                x = contexts[i:i + chunk]
                lr = params.step_size * max(1e-4, 1.0 - step / total_steps)
                step += c.size
                neg = np.searchsorted(noise_cdf, rng.random((c.size, params.negatives)))
                neg = np.minimum(neg, n - 1)
                ce = w_in[c]
                co = w_out[x]
                pos_g = (1.0 - _sigmoid(np.einsum("ij,ij->i", ce, co))) * lr
                d_in = pos_g[:, None] * co
                d_out = pos_g[:, None] * ce
                no = w_out[neg]
                neg_g = -_sigmoid(np.einsum("ij,ikj->ik", ce, no)) * lr
                d_in += np.einsum("ik,ikj->ij", neg_g, no)
                # average per row inside the chunk: repeated nodes would
                # otherwise stack gradients into one oversized step
                cnt_in = np.bincount(c, minlength=n)
                d_in /= cnt_in[c, None]
                rows_out = np.concatenate([x, neg.ravel()])
                cnt_out = np.bincount(rows_out, minlength=n)
                d_out /= cnt_out[x, None]
                d_out_neg = (neg_g[:, :, None] * ce[:, None, :]).reshape(-1, d)
                d_out_neg /= cnt_out[neg.ravel(), None]
                np.add.at(w_in, c, d_in)
                np.add.at(w_out, x, d_out)
                np.add.at(w_out, neg.ravel(), d_out_neg)
    return w_in


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -30, 30)))


def _walk_embed(train: Graph, labels: SensitiveLabels, spec, seed: int) -> Embedding:
    rng = np.random.default_rng(derive_seed(seed, "walks", spec.model_id))
    deg = train.degrees
    alive = np.flatnonzero(deg > 0)
    params = spec.walk
    d = spec.d
    if alive.size == 0:
        return Embedding(matrix=np.zeros((train.n, d)), model_id=spec.model_id,
                         params={"d": d, "empty_train": True})
    starts = np.concatenate([rng.permutation(alive) for _ in range(params.walks)])
    if isinstance(spec, N2VSpec) and (spec.p != 1.0 or spec.q != 1.0):
        walks = _n2v_walks(train, spec, starts, rng)
    elif isinstance(spec, FairwalkSpec):
        cdf = _padded_cdf(train, _neighbor_probs_fairwalk(train, labels))
        walks = _walk_matrix(train, starts, params.length, rng, cdf)
    elif isinstance(spec, CrossWalkSpec):
        cdf = _padded_cdf(train, _neighbor_probs_crosswalk(train, labels, spec, seed))
        walks = _walk_matrix(train, starts, params.length, rng, cdf)
    else:
        walks = _walk_matrix(train, starts, params.length, rng)
    mat = _sgns(walks, train.n, d, params, np.random.default_rng(derive_seed(seed, "sgns", spec.model_id)))
    mat[deg == 0] = 0.0
    return Embedding(matrix=mat, model_id=spec.model_id, params={"d": d})


def embed(train: Graph, labels: SensitiveLabels, spec, seed: int = 0) -> Embedding:
    """Train one model on the train graph; deterministic for a fixed seed."""
    if isinstance(spec, SVDSpec):
        return _svd_embed(train, spec)
    if isinstance(spec, NMFSpec):
        return _nmf_embed(train, spec, seed)
    if isinstance(spec, (N2VSpec, FairwalkSpec, CrossWalkSpec)):
        return _walk_embed(train, labels, spec, seed)
    raise TypeError(f"unknown model spec {spec!r}")


def walk_step_distribution(train: Graph, labels: SensitiveLabels, spec,
                           current: int, previous: int | None = None) -> np.ndarray:
    """Transition probabilities over train.neighbors(current) for a walk model."""
    nbrs = train.neighbors(current)
    if nbrs.size == 0:
        raise ValueError(f"node {current} has no neighbors")
    sl = slice(train.indptr[current], train.indptr[current + 1])
    if isinstance(spec, FairwalkSpec):
        return _neighbor_probs_fairwalk(train, labels)[sl].copy()
    if isinstance(spec, CrossWalkSpec):
        return _neighbor_probs_crosswalk(train, labels, spec, seed=0)[sl].copy()
    if isinstance(spec, N2VSpec):
        if previous is None:
            return np.full(nbrs.size, 1.0 / nbrs.size)
        prev_nbrs = set(train.neighbors(previous).tolist())
        w = np.ones(nbrs.size)
        for j, x in enumerate(nbrs):
            if x == previous:
                w[j] = 1.0 / spec.p
            elif x in prev_nbrs:
                w[j] = 1.0
            else:
                w[j] = 1.0 / spec.q
        return w / w.sum()
    raise TypeError(f"not a walk model: {spec!r}")


@dataclass
class RankedRecs:
    lists: list[np.ndarray]  # per node, up to k recommended nodes, best first
    k: int
    excluded: np.ndarray     # zero-train-degree nodes, flagged out of Hit/AP means


def recommend_topk(emb: Embedding, train: Graph, k: int = 10) -> RankedRecs:
    """Top-k highest-scoring non-neighbors per node; ties break by node id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = emb.score_matrix().astype(float)
    n = train.n
    np.fill_diagonal(scores, -np.inf)
    if train.m_edges:
        scores[train.edges[:, 0], train.edges[:, 1]] = -np.inf
        scores[train.edges[:, 1], train.edges[:, 0]] = -np.inf
    order = np.argsort(-scores, axis=1, kind="stable")
    lists = []
    for u in range(n):
        row = order[u, :k]
        row = row[np.isfinite(scores[u, row])]
        lists.append(row.copy())
    return RankedRecs(lists=lists, k=k, excluded=train.degrees == 0)


# --- CLI model spec parsing -------------------------------------------------


def model_spec_from_id(model_id: str, params: dict[str, str] | None = None):
    """Build a model spec from its CLI id plus optional config-key overrides."""
    params = params or {}
    d = int(params.get("embed_dim", 64))
    walk = WalkParams(
        walks=int(params.get("walks", 10)),
        length=int(params.get("walk_length", 80)),
        window=int(params.get("window", 10)),
        negatives=int(params.get("negatives", 5)),
        epochs=int(params.get("epochs", 5)),
        step_size=float(params.get("step_size", 0.025)),
    )
    if model_id == "svd":
        return SVDSpec(d=d)
    if model_id == "nmf":
        return NMFSpec(d=d, max_iter=int(params.get("nmf_iters", 200)),
                       tol=float(params.get("nmf_tol", 1e-4)))
    if model_id == "n2v":
        return N2VSpec(d=d, p=float(params.get("n2v_p", 1.0)),
                       q=float(params.get("n2v_q", 1.0)), walk=walk)
    if model_id == "fairwalk":
        return FairwalkSpec(d=d, walk=walk)
    if model_id == "crosswalk":
        return CrossWalkSpec(d=d, alpha_cw=float(params.get("cw_alpha", 0.5)),
                             p_cw=float(params.get("cw_p", 2.0)),
                             r=int(params.get("cw_r", 10)),
                             l=int(params.get("cw_l", 5)), walk=walk)
    raise ValueError(f"unknown model id {model_id!r} (expected one of {MODEL_IDS})")
