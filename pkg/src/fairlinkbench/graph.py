"""Undirected simple graph with compact adjacency, plus edge/label file I/O.

Nodes are dense integers 0..n-1. Edges are stored once in canonical
orientation (u < v) with a mirrored CSR adjacency for traversal. Graphs are
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNREACHABLE = -1  # bfs_distances sentinel for nodes not reached from the source


class GraphFormatError(ValueError):
    """Malformed edge or label file; message carries the offending line."""


@dataclass(frozen=True)
class Graph:
    n: int
    indptr: np.ndarray   # shape (n+1,), int64
    indices: np.ndarray  # concatenated sorted neighbor lists, int64
    edges: np.ndarray    # shape (m, 2), u < v, lexicographically sorted

    @property
    def m_edges(self) -> int:
        return self.edges.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def adjacency_matrix(self) -> np.ndarray:
        """Dense symmetric 0/1 adjacency (float64)."""
        a = np.zeros((self.n, self.n))
        if self.m_edges:
            a[self.edges[:, 0], self.edges[:, 1]] = 1.0
            a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a

    def has_edge_set(self) -> set[int]:
        """Packed keys u*n+v (u<v) for O(1) membership tests."""
        return set((self.edges[:, 0] * self.n + self.edges[:, 1]).tolist())


@dataclass(frozen=True)
class SensitiveLabels:
    s: np.ndarray  # per-node value in {0, 1}; 1 marks the sensitive group

    def __post_init__(self):
        arr = np.asarray(self.s, dtype=np.int8)
        if arr.ndim != 1:
            raise ValueError("labels must be a flat array")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        arr.setflags(write=False)
        object.__setattr__(self, "s", arr)

    @property
    def n0(self) -> int:
        return int((self.s == 0).sum())

    @property
    def n1(self) -> int:
        return int((self.s == 1).sum())


def from_edges(n: int, edges) -> Graph:
    """Build a simple graph from (possibly unordered, duplicated) node pairs.

    Self-loops and out-of-range endpoints are rejected; reversed duplicates
    collapse to a single edge.
    """
    if n < 0:
        raise ValueError("node count must be nonnegative")
    arr = np.asarray(list(edges), dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be pairs")
    if arr.size:
        if arr.min() < 0 or arr.max() >= n:
            bad = arr[(arr < 0).any(axis=1) | (arr >= n).any(axis=1)][0]
            raise ValueError(f"edge endpoint out of range: {tuple(bad)} with n={n}")
        if (arr[:, 0] == arr[:, 1]).any():
            bad = arr[arr[:, 0] == arr[:, 1]][0]
            raise ValueError(f"self-loop rejected: node {bad[0]}")
        canon = np.stack([arr.min(axis=1), arr.max(axis=1)], axis=1)
        canon = np.unique(canon, axis=0)
    else:
        canon = arr
    return _from_canonical(n, canon)


def _from_canonical(n: int, canon: np.ndarray) -> Graph:
    """CSR from deduplicated (u<v) edges, lexicographically sorted."""
    m = canon.shape[0]
    src = np.concatenate([canon[:, 0], canon[:, 1]])
    dst = np.concatenate([canon[:, 1], canon[:, 0]])
    order = np.lexsort((dst, src))
    indptr = np.zeros(n + 1, dtype=np.int64)
    if m:
        np.add.at(indptr, src + 1, 1)
    indptr = np.cumsum(indptr)
    indices = dst[order]
    for a in (indptr, indices, canon):
        a.setflags(write=False)
    return Graph(n=n, indptr=indptr, indices=indices, edges=canon)


def _frontier_neighbors(indptr, indices, frontier, deg):
    """All neighbors of frontier nodes, with the repeated source array."""
    cnt = deg[frontier]
    total = int(cnt.sum())
    if total == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    starts = indptr[frontier]
    before = np.concatenate(([0], np.cumsum(cnt)[:-1]))
    offs = np.repeat(starts - before, cnt) + np.arange(total)
    return indices[offs], np.repeat(frontier, cnt)


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distance from source to every node; UNREACHABLE where no path."""
    if not 0 <= source < g.n:
        raise IndexError(f"source {source} out of range for n={g.n}")
    deg = g.degrees
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while frontier.size:
        nbrs, _ = _frontier_neighbors(g.indptr, g.indices, frontier, deg)
        fresh = nbrs[dist[nbrs] == UNREACHABLE]
        frontier = np.unique(fresh)
        d += 1
        dist[frontier] = d
    return dist


def connected_components(g: Graph) -> np.ndarray:
    """Component id per node (ids ordered by first-seen node)."""
    comp = np.full(g.n, -1, dtype=np.int64)
    cid = 0
    for seed in range(g.n):
        if comp[seed] >= 0:
            continue
        dist = bfs_distances(g, seed)
        comp[dist != UNREACHABLE] = cid
        cid += 1
    return comp


def largest_component_nodes(g: Graph) -> np.ndarray:
    comp = connected_components(g)
    if comp.size == 0:
        return np.empty(0, np.int64)
    counts = np.bincount(comp)
    return np.flatnonzero(comp == counts.argmax())


def subgraph(g: Graph, nodes: np.ndarray) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on `nodes`; returns (subgraph, original node ids)."""
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[nodes] = np.arange(nodes.size)
    keep = (remap[g.edges[:, 0]] >= 0) & (remap[g.edges[:, 1]] >= 0)
    sub_edges = remap[g.edges[keep]]
    return _from_canonical(nodes.size, sub_edges), nodes


def induced_density(g: Graph, nodes) -> float:
    """Edges within `nodes` divided by C(|nodes|, 2)."""
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    k = nodes.size
    if k < 2:
        raise ValueError("induced density needs at least 2 nodes")
    mask = np.zeros(g.n, dtype=bool)
    mask[nodes] = True
    inside = int((mask[g.edges[:, 0]] & mask[g.edges[:, 1]]).sum())
    return 2.0 * inside / (k * (k - 1))


def graph_density(g: Graph) -> float:
    if g.n < 2:
        return 0.0
    return 2.0 * g.m_edges / (g.n * (g.n - 1))


def save_graph(g: Graph, labels: SensitiveLabels, edge_file, label_file) -> None:
    """Write canonical edge/label CSVs (deterministic for equal graphs)."""
    with open(edge_file, "w", encoding="utf-8") as f:
        for u, v in g.edges:
            f.write(f"{u},{v}\n")
    with open(label_file, "w", encoding="utf-8") as f:
        for node, s in enumerate(labels.s):
            f.write(f"{node},{s}\n")


def _parse_int_pair(line: str, path, lineno: int, what: str):
    parts = line.split(",")
    if len(parts) != 2:
        raise GraphFormatError(f"{path}:{lineno}: expected '{what}', got {line!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphFormatError(f"{path}:{lineno}: non-integer field in {line!r}") from None


def load_graph(edge_file, label_file, mapping_file=None):
    """Read edge/label CSVs into (Graph, SensitiveLabels).

    Arbitrary integer node ids are remapped to dense 0..n-1 (sorted order);
    pass mapping_file to persist "original,assigned" rows. Canonical files
    (dense ids, u<v, sorted) round-trip byte-identically through save_graph.
    """
    label_of: dict[int, int] = {}
    with open(label_file, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            node, s = _parse_int_pair(line, label_file, lineno, "node,s")
            if s not in (0, 1):
                raise GraphFormatError(f"{label_file}:{lineno}: label {s} for node {node} not in {{0,1}}")
            if node in label_of:
                raise GraphFormatError(f"{label_file}:{lineno}: duplicate label for node {node}")
            label_of[node] = s
    ids = sorted(label_of)
    remap = {orig: i for i, orig in enumerate(ids)}
    n = len(ids)

    pairs = []
    with open(edge_file, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            u, v = _parse_int_pair(line, edge_file, lineno, "u,v")
            for node in (u, v):
                if node not in remap:
                    raise GraphFormatError(
                        f"{edge_file}:{lineno}: label missing for node {node}")
            if u == v:
                raise GraphFormatError(f"{edge_file}:{lineno}: self-loop at node {u}")
            pairs.append((remap[u], remap[v]))

    g = from_edges(n, pairs)
    labels = SensitiveLabels(np.array([label_of[orig] for orig in ids], dtype=np.int8))
    if mapping_file is not None:
        with open(mapping_file, "w", encoding="utf-8") as f:
            for orig in ids:
                f.write(f"{orig},{remap[orig]}\n")
    return g, labels
