"""Structural bias measures and their group-disparity aggregations.

Node measures (closeness, betweenness, prestige, degree, constraint,
density, heterogeneity) are aggregated into a normalized group disparity

    omega = (mean over group 0 - mean over group 1) / global mean,

so 0 is parity and the sign tracks which group is favored. Effective
resistance yields three absolute group gaps (isolation, diameter, control).
Graph-level measures are assortativity, the mean cross-group shortest-path
length, the group power-law exponent ratio, and a random-walk information
unfairness score. A full profile packs all fourteen into one CSV row.

Measures needing connectivity run on the largest component and flag the
restriction; that never triggers on generated graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import (Graph, SensitiveLabels, _frontier_neighbors, bfs_distances,
                    induced_density, largest_component_nodes, subgraph)

MEASURE_NAMES = (
    "closeness", "betweenness", "prestige", "degree", "constraint",
    "density", "heterogeneity",
    "isolation", "diameter", "control",
    "assortativity", "avg_mixed_dist", "power_exp", "info_unfairness",
)

NODE_MEASURE_KINDS = ("closeness", "betweenness", "prestige", "degree",
                      "constraint", "density", "heterogeneity")

ER_VARIANTS = ("isolation", "diameter", "control")

RESTRICTED_FLAG = "restricted_to_largest_component"


class UndefinedMeasure(ValueError):
    """A measure has no defined value for this graph/labeling."""


# --- shortest-path machinery --------------------------------------------------

def all_pairs_distances(g: Graph) -> np.ndarray:
    """Dense hop-distance matrix; UNREACHABLE off-component."""
    out = np.empty((g.n, g.n), dtype=np.int64)
    for u in range(g.n):
        out[u] = bfs_distances(g, u)
    return out


def betweenness_values(g: Graph) -> np.ndarray:
    """Shortest-path betweenness over unordered pairs, endpoints excluded.

    Brandes' accumulation run from every source; the directed double count
    is halved at the end. No normalization.
    """
    n = g.n
    deg = g.degrees
    indptr, indices = g.indptr, g.indices
    bc = np.zeros(n)
    for src in range(n):
        dist = np.full(n, -1, dtype=np.int64)
        sigma = np.zeros(n)
        dist[src] = 0
        sigma[src] = 1.0
        levels = []
        frontier = np.array([src], dtype=np.int64)
        d = 0
        while frontier.size:
            levels.append(frontier)
            nbrs, reps = _frontier_neighbors(indptr, indices, frontier, deg)
            if nbrs.size == 0:
                break
            d += 1
            fresh = nbrs[dist[nbrs] == -1]
            frontier = np.unique(fresh)
            dist[frontier] = d
            onpath = dist[nbrs] == d
            np.add.at(sigma, nbrs[onpath], sigma[reps[onpath]])
        delta = np.zeros(n)
        for lvl in reversed(levels[1:]):
            nbrs, reps = _frontier_neighbors(indptr, indices, lvl, deg)
            pred = dist[nbrs] == dist[lvl[0]] - 1
            contrib = sigma[nbrs[pred]] / sigma[reps[pred]] * (1.0 + delta[reps[pred]])
            np.add.at(delta, nbrs[pred], contrib)
        delta[src] = 0.0
        bc += delta
    return bc / 2.0


# --- eigenvector machinery ----------------------------------------------------

def principal_eigen(g: Graph, tol: float = 1e-10, max_iter: int = 10_000):
    """(lambda, x) for the adjacency matrix: unit-norm, nonnegative x.

    Power iteration on A + I (the shift breaks the bipartite +/-lambda tie
    without moving eigenvectors).
    """
    n = g.n
    if n == 0:
        raise UndefinedMeasure("empty graph")
    x = np.full(n, 1.0 / np.sqrt(n))
    lam_shift = 1.0
    for _ in range(max_iter):
        y = _adjacency_sums(g, x) + x  # the +I shift
        norm = np.linalg.norm(y)
        if norm == 0.0:
            raise UndefinedMeasure("zero iterate in power iteration")
        y /= norm
        if np.abs(y - x).max() < tol:
            x = y
            lam_shift = norm
            break
        x = y
        lam_shift = norm
    x = np.abs(x)
    lam = lam_shift - 1.0
    return lam, x


def _adjacency_sums(g: Graph, x: np.ndarray) -> np.ndarray:
    """Per-node sum of x over neighbors."""
    out = np.zeros(g.n)
    if g.indices.size:
        # reduceat misreads empty rows: clip trailing offsets, zero deg-0 rows
        offsets = np.minimum(g.indptr[:-1], g.indices.size - 1)
        out = np.add.reduceat(x[g.indices], offsets, dtype=float)
        out[g.degrees == 0] = 0.0
    return out


# --- node measures --------------------------------------------------------


def node_measure(g: Graph, labels: SensitiveLabels, kind: str):
    """Per-node values for one measure.

    Returns (values, include_mask, flags). Nodes outside the largest
    component (path/eigen measures) or isolated nodes (neighborhood
    measures) are masked out, with a flag recording why.
    """
    if kind not in NODE_MEASURE_KINDS:
        raise ValueError(f"unknown node measure {kind!r}")
    n = g.n
    values = np.full(n, np.nan)
    include = np.ones(n, dtype=bool)
    flags: list[str] = []
    deg = g.degrees

    if kind == "degree":
        values = deg.astype(float)
        return values, include, flags

    if kind == "constraint":
        values = _adjacency_sums(g, deg.astype(float))
        return values, include, flags

    if kind in ("density", "heterogeneity"):
        isolated = deg == 0
        if isolated.any():
            include &= ~isolated
            flags.append("isolated_nodes_excluded")
        if kind == "heterogeneity":
            mean_s = np.zeros(n)
            nz = deg > 0
            sums = _adjacency_sums(g, labels.s.astype(float))
            mean_s[nz] = sums[nz] / deg[nz]
            values = 1.0 - 2.0 * np.abs(mean_s - 0.5)
            values[~nz] = np.nan
        else:
            for u in range(n):
                if deg[u] == 0:
                    continue
                nodes = np.append(g.neighbors(u), u)
                values[u] = 1.0 - induced_density(g, nodes)
        return values, include, flags

    # path / eigenvector measures: restrict to the largest component
    lcc = largest_component_nodes(g)
    restricted = lcc.size < n
    if restricted:
        flags.append(RESTRICTED_FLAG)
        sub, orig = subgraph(g, lcc)
    else:
        sub, orig = g, np.arange(n)
    include = np.zeros(n, dtype=bool)
    include[orig] = True

    if kind == "closeness":
        if sub.n >= 2:
            for i in range(sub.n):
                dist = bfs_distances(sub, i)
                values[orig[i]] = (sub.n - 1) / dist.sum()
        else:
            include[:] = False
            flags.append("too_small")
    elif kind == "betweenness":
        values[orig] = betweenness_values(sub)
    elif kind == "prestige":
        lam, x = principal_eigen(sub)
        if lam <= 0:
            include[:] = False
            flags.append("zero_spectral_radius")
        else:
            values[orig] = _adjacency_sums(sub, x) / lam
    return values, include, flags


def node_disparity(values: np.ndarray, labels: SensitiveLabels,
                   include: np.ndarray | None = None) -> float:
    """Normalized group-mean difference (group 0 minus group 1)."""
    values = np.asarray(values, dtype=float)
    if include is None:
        include = np.isfinite(values)
    else:
        include = np.asarray(include, dtype=bool) & np.isfinite(values)
    s = labels.s
    in0 = include & (s == 0)
    in1 = include & (s == 1)
    if not in0.any() or not in1.any():
        raise UndefinedMeasure("a group has no included nodes")
    global_mean = values[include].mean()
    if global_mean == 0.0:
        raise UndefinedMeasure("global mean is zero")
    return float((values[in0].mean() - values[in1].mean()) / global_mean)


# --- effective resistance -------------------------------------------------


def effective_resistance(g: Graph) -> np.ndarray:
    """Pairwise effective-resistance matrix of a connected graph.

    Spectral form: eigendecompose the Laplacian, drop the null eigenvalue
    (tolerance 1e-9), and assemble R from the pseudo-inverse.
    """
    n = g.n
    if n < 1:
        raise UndefinedMeasure("empty graph")
    a = g.adjacency_matrix()
    lap = np.diag(a.sum(axis=1)) - a
    w, v = np.linalg.eigh(lap)
    null = w <= 1e-9
    if null.sum() != 1:
        raise UndefinedMeasure("graph is not connected")
    vp = v[:, ~null]
    inv = vp * (1.0 / w[~null])
    pinv = inv @ vp.T
    d = np.diag(pinv)
    r = d[:, None] + d[None, :] - 2.0 * pinv
    r = 0.5 * (r + r.T)
    np.fill_diagonal(r, 0.0)
    return r


def _er_strengths(r: np.ndarray, g: Graph, variant: str) -> np.ndarray:
    if variant == "isolation":
        return r.sum(axis=1)
    if variant == "diameter":
        return r.max(axis=1)
    if variant == "control":
        out = np.zeros(g.n)
        for u in range(g.n):
            out[u] = r[u, g.neighbors(u)].sum()
        return out
    raise ValueError(f"unknown effective-resistance variant {variant!r}")


def er_group_gap(g: Graph, labels: SensitiveLabels, variant: str) -> float:
    """Absolute group-mean gap of a per-node resistance strength."""
    r = effective_resistance(g)
    return _er_gap_from(r, g, labels, variant)


def _er_gap_from(r: np.ndarray, g: Graph, labels: SensitiveLabels, variant: str) -> float:
    s = labels.s
    if not (s == 0).any() or not (s == 1).any():
        raise UndefinedMeasure("a group is empty")
    strength = _er_strengths(r, g, variant)
    return float(abs(strength[s == 0].mean() - strength[s == 1].mean()))


# --- graph-level measures ---------------------------------------------------


def assortativity(g: Graph, labels: SensitiveLabels) -> float:
    """Attribute assortativity of the binary labels over edge endpoints.

    Mixing matrix: intra-group edge fractions on the diagonal, half the
    inter-group fraction on each off-diagonal cell; marginals a_i = row sums.
    r = (trace - sum a_i^2) / (1 - sum a_i^2), in [-1, 1].
    """
    m = g.m_edges
    if m < 1:
        raise UndefinedMeasure("assortativity needs at least one edge")
    su = labels.s[g.edges[:, 0]]
    sv = labels.s[g.edges[:, 1]]
    e00 = float(((su == 0) & (sv == 0)).sum()) / m
    e11 = float(((su == 1) & (sv == 1)).sum()) / m
    inter = 1.0 - e00 - e11
    a0 = e00 + 0.5 * inter
    a1 = e11 + 0.5 * inter
    sum_ab = a0 * a0 + a1 * a1
    if sum_ab >= 1.0:
        if inter == 0.0:
            return 1.0
        raise UndefinedMeasure("degenerate mixing matrix")
    return float((e00 + e11 - sum_ab) / (1.0 - sum_ab))


def avg_mixed_dist(g: Graph, labels: SensitiveLabels) -> float:
    """Mean shortest-path length over all cross-group node pairs.

    Disconnected input restricts to the largest component (profile callers
    flag this).
    """
    lcc = largest_component_nodes(g)
    if lcc.size < g.n:
        sub, orig = subgraph(g, lcc)
        sub_labels = SensitiveLabels(labels.s[orig])
        return avg_mixed_dist(sub, sub_labels)
    s = labels.s
    nodes0 = np.flatnonzero(s == 0)
    nodes1 = np.flatnonzero(s == 1)
    if nodes0.size == 0 or nodes1.size == 0:
        raise UndefinedMeasure("a group is empty")
    smaller = nodes0 if nodes0.size <= nodes1.size else nodes1
    other_mask = s == (0 if smaller is nodes1 else 1)
    total = 0
    for u in smaller:
        dist = bfs_distances(g, u)
        total += int(dist[other_mask].sum())
    return total / (nodes0.size * nodes1.size)


def _power_exponent(degrees: np.ndarray) -> float:
    """Continuous MLE exponent with d_min = 1 over positive degrees."""
    return 1.0 + degrees.size / float(np.log(degrees / 0.5).sum())


def power_exp_ratio(g: Graph, labels: SensitiveLabels, min_group: int = 10) -> float:
    """Ratio of the groups' fitted degree-distribution exponents (group1/group0)."""
    deg = g.degrees
    kappas = []
    for grp in (0, 1):
        d = deg[(labels.s == grp) & (deg > 0)].astype(float)
        if d.size < min_group:
            raise UndefinedMeasure(f"group {grp} has fewer than {min_group} positive-degree nodes")
        if (d == 1).all():
            raise UndefinedMeasure(f"group {grp} degree distribution is degenerate")
        kappas.append(_power_exponent(d))
    return kappas[1] / kappas[0]


def ks_statistic(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov distance between value multisets."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise UndefinedMeasure("empty sample")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())


def info_unfairness(g: Graph, labels: SensitiveLabels, steps: int = 5) -> float:
    """Max KS distance among within/cross-group random-walk flow distributions.

    Flow A = average of the first `steps` powers of the degree-normalized
    transition matrix. The cross-group multiset pools both orientations,
    which makes the measure invariant under swapping the group labels.
    """
    lcc = largest_component_nodes(g)
    if lcc.size < g.n:
        sub, orig = subgraph(g, lcc)
        return info_unfairness(sub, SensitiveLabels(labels.s[orig]), steps)
    s = labels.s
    if not (s == 0).any() or not (s == 1).any():
        raise UndefinedMeasure("a group is empty")
    if g.n < 2:
        raise UndefinedMeasure("graph too small")
    deg = g.degrees.astype(float)
    p = g.adjacency_matrix() / deg[:, None]
    acc = np.zeros_like(p)
    pt = np.eye(g.n)
    for _ in range(steps):
        pt = pt @ p
        acc += pt
    acc /= steps
    off = ~np.eye(g.n, dtype=bool)
    same0 = (s[:, None] == 0) & (s[None, :] == 0) & off
    same1 = (s[:, None] == 1) & (s[None, :] == 1) & off
    cross = (s[:, None] != s[None, :])
    sets = {}
    if same0.any():
        sets["d00"] = acc[same0]
    if same1.any():
        sets["d11"] = acc[same1]
    sets["dx"] = acc[cross]
    if len(sets) < 2:
        raise UndefinedMeasure("not enough flow classes")
    keys = list(sets)
    best = 0.0
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            best = max(best, ks_statistic(sets[keys[i]], sets[keys[j]]))
    return best


# --- full profile ---------------------------------------------------------


@dataclass
class BiasProfile:
    """The fourteen structural bias values for one labeled graph."""
    values: dict[str, float | None]
    flags: dict[str, str] = field(default_factory=dict)

    def csv_cells(self) -> list[str]:
        cells = []
        for name in MEASURE_NAMES:
            v = self.values.get(name)
            cells.append("" if v is None else repr(float(v)))
        return cells

    def flags_cell(self) -> str:
        return ";".join(f"{k}:{v}" for k, v in sorted(self.flags.items()))


def profile_header() -> list[str]:
    return list(MEASURE_NAMES)


def bias_profile(g: Graph, labels: SensitiveLabels, steps: int = 5) -> BiasProfile:
    """Evaluate every measure, recording flags instead of aborting."""
    values: dict[str, float | None] = {}
    flags: dict[str, str] = {}

    def attempt(name, fn):
        try:
            values[name] = fn()
        except UndefinedMeasure as exc:
            values[name] = None
            flags[name] = f"undefined({exc})"

    for kind in NODE_MEASURE_KINDS:
        vals, include, measure_flags = node_measure(g, labels, kind)
        if measure_flags:
            flags[kind] = ";".join(measure_flags)
        attempt(kind, lambda v=vals, i=include: node_disparity(v, labels, i))

    lcc = largest_component_nodes(g)
    restricted = lcc.size < g.n
    if restricted:
        sub, orig = subgraph(g, lcc)
        sub_labels = SensitiveLabels(labels.s[orig])
    else:
        sub, sub_labels = g, labels
    try:
        r = effective_resistance(sub)
        for variant in ER_VARIANTS:
            attempt(variant, lambda v=variant: _er_gap_from(r, sub, sub_labels, v))
    except UndefinedMeasure as exc:
        for variant in ER_VARIANTS:
            values[variant] = None
            flags[variant] = f"undefined({exc})"
    if restricted:
        for variant in ER_VARIANTS + ("avg_mixed_dist", "info_unfairness"):
            flags[variant] = (flags.get(variant, "") + ";" if variant in flags else "") + RESTRICTED_FLAG

    attempt("assortativity", lambda: assortativity(g, labels))
    attempt("avg_mixed_dist", lambda: avg_mixed_dist(g, labels))
    attempt("power_exp", lambda: power_exp_ratio(g, labels))
    attempt("info_unfairness", lambda: info_unfairness(g, labels, steps))
    return BiasProfile(values=values, flags=flags)
