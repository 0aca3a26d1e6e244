"""Extended preferential-attachment graph generation.

The growth process starts from a star on m nodes and adds one node at a
time. Four independent extensions control the structure:

  * a binary group label assigned to every node up front (fraction alpha
    in group 0), independent of arrival order;
  * homophily-biased attachment: candidate weight deg(v) + (e^beta - 1)
    when v shares the new node's group;
  * anchor-mode growth: the new node first picks an anchor by the weights
    above, then draws its remaining neighbors from the anchor's ego
    network with per-hop weights;
  * a stochastic per-node edge count (gamma-distributed, affine in the
    anchor's degree, or fixed).

Generation is a pure function of the config (including its seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .graph import Graph, SensitiveLabels, bfs_distances, from_edges
from .seeding import derive_seed

HOMOPHILY_SCOPES = ("all_connections", "anchor_only")


class ConfigError(ValueError):
    """Invalid generation config or config file."""


class CalibrationRangeError(ValueError):
    """Target assortativity outside the reachable range for the config."""


@dataclass(frozen=True)
class GammaLaw:
    """m' ~ Gamma(shape=gamma, scale=mean/gamma); mean is preserved."""
    mean: float
    gamma: float

    def raw(self, rng) -> float:
        return rng.gamma(self.gamma, self.mean / self.gamma)


@dataclass(frozen=True)
class AffineLaw:
    """m' = round(a * deg(anchor) + b); anchor mode only."""
    a: float
    b: float


@dataclass(frozen=True)
class FixedLaw:
    value: int


@dataclass(frozen=True)
class GenConfig:
    n: int
    m: int
    alpha: float
    beta: float = 0.0
    anchor: bool = False
    homophily_scope: str = "all_connections"
    hop_weights: tuple | None = None
    edge_count_law: GammaLaw | AffineLaw | FixedLaw = None
    seed: int = 0

    def __post_init__(self):
        if self.edge_count_law is None:
            object.__setattr__(self, "edge_count_law", FixedLaw(self.m))
        self.validate()

    def validate(self):
        if self.m < 1:
            raise ConfigError("m must be >= 1")
        if self.n <= self.m:
            raise ConfigError("n must exceed m")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must be in (0, 1)")
        if self.beta < 0.0:
            raise ConfigError("beta must be >= 0")
        if self.homophily_scope not in HOMOPHILY_SCOPES:
            raise ConfigError(f"homophily_scope must be one of {HOMOPHILY_SCOPES}")
        if self.anchor and not self.hop_weights:
            raise ConfigError("anchor mode requires hop_weights")
        if isinstance(self.edge_count_law, AffineLaw) and not self.anchor:
            raise ConfigError("affine edge-count law requires anchor mode")
        if isinstance(self.edge_count_law, GammaLaw):
            if self.edge_count_law.gamma <= 0:
                raise ConfigError("gamma must be > 0")
            if abs(self.edge_count_law.mean - self.m) > 1e-9:
                raise ConfigError("gamma law mean must equal m")
        if self.hop_weights:
            hops = [h for h, _ in self.hop_weights]
            if any(h < 1 for h in hops) or sorted(hops) != hops or len(set(hops)) != len(hops):
                raise ConfigError("hop_weights hops must be distinct, increasing, >= 1")
            if any(w < 0 for _, w in self.hop_weights):
                raise ConfigError("hop weights must be >= 0")


def opinion_preset(n=1222, alpha=0.52, beta=0.0, seed=0) -> GenConfig:
    """Blog-style network: gamma-distributed edge counts, homophily on every draw."""
    return GenConfig(n=n, m=14, alpha=alpha, beta=beta, anchor=False,
                     homophily_scope="all_connections",
                     edge_count_law=GammaLaw(14.0, 0.08), seed=seed)


def friendship_preset(n=1034, alpha=0.66, beta=0.0, seed=0) -> GenConfig:
    """Ego-network style: anchor growth, steep hop weights, affine edge counts."""
    return GenConfig(n=n, m=3, alpha=alpha, beta=beta, anchor=True,
                     homophily_scope="anchor_only",
                     hop_weights=((1, 1e3), (2, 2.0), (3, 1.0)),
                     edge_count_law=AffineLaw(0.55, 3.0), seed=seed)


def collab_preset(n=860, alpha=0.53, beta=0.0, seed=0) -> GenConfig:
    """Co-authorship style: anchor growth confined to the anchor's neighbors."""
    return GenConfig(n=n, m=3, alpha=alpha, beta=beta, anchor=True,
                     homophily_scope="anchor_only",
                     hop_weights=((1, 1.0), (2, 0.0)),
                     edge_count_law=GammaLaw(3.0, 1.0), seed=seed)


PRESETS = {
    "opinion": opinion_preset,
    "friendship": friendship_preset,
    "collab": collab_preset,
}


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def assign_sensitive(n: int, alpha: float, rng) -> SensitiveLabels:
    """Exactly round(alpha*n) nodes get label 0; placement is a uniform shuffle."""
    if n < 2:
        raise ConfigError("need at least 2 nodes")
    if not 0.0 < alpha < 1.0:
        raise ConfigError("alpha must be in (0, 1)")
    n0 = _round_half_up(alpha * n)
    if n0 == 0 or n0 == n:
        raise ConfigError(f"alpha={alpha} leaves an empty group for n={n}")
    s = np.concatenate([np.zeros(n0, np.int8), np.ones(n - n0, np.int8)])
    rng.shuffle(s)
    return SensitiveLabels(s)


def _homophily_weights(deg, s_existing, s_new, beta):
    w = deg.astype(float).copy()
    if beta > 0:
        w[s_existing == s_new] += math.expm1(beta)
    return w


def attachment_weights(g: Graph, labels: SensitiveLabels, v_new: int, beta: float) -> np.ndarray:
    """Per-candidate attachment weights for node v_new over all other nodes.

    Weight(v) = deg(v) + (e^beta - 1) when v shares v_new's label; the new
    node itself gets weight 0.
    """
    if beta < 0:
        raise ConfigError("beta must be >= 0")
    w = _homophily_weights(g.degrees, labels.s, labels.s[v_new], beta)
    w[v_new] = 0.0
    return w


def sample_edge_count(law, anchor_deg, cap: int, rng) -> int:
    """Realize m' under the configured law, clamped to [1, cap]."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if isinstance(law, GammaLaw):
        mp = _round_half_up(law.raw(rng))
    elif isinstance(law, AffineLaw):
        if anchor_deg is None:
            raise ValueError("affine law requires the anchor degree")
        mp = _round_half_up(law.a * anchor_deg + law.b)
    elif isinstance(law, FixedLaw):
        mp = law.value
    else:
        raise TypeError(f"unknown edge-count law {law!r}")
    return max(1, min(mp, cap))


def _hop_weight(k: int, hop_weights) -> float:
    """Weight for a node k hops out; the last entry covers its hop and beyond."""
    terminal_hop, terminal_w = hop_weights[-1]
    if k >= terminal_hop:
        return terminal_w
    for h, w in hop_weights[:-1]:
        if h == k:
            return w
    return 0.0


def _weights_from_hops(hopdist: np.ndarray, hop_weights) -> np.ndarray:
    """Map hop distances to weights; anchor (hop 0) and unreachable excluded.

    If every configured weight zeroes out but other nodes are reachable, fall
    back to a uniform draw over the nearest reachable hop so growth never
    stalls.
    """
    w = np.zeros(hopdist.size)
    reachable = hopdist >= 1
    if not reachable.any():
        return w
    hops = np.unique(hopdist[reachable])
    for k in hops:
        w[hopdist == k] = _hop_weight(int(k), hop_weights)
    if w.sum() == 0.0:
        w[hopdist == hops.min()] = 1.0
    return w


def ego_distribution(g: Graph, anchor: int, hop_weights) -> np.ndarray:
    """Ego-network attachment weights around an anchor node."""
    if not 0 <= anchor < g.n:
        raise IndexError(f"anchor {anchor} out of range")
    dist = bfs_distances(g, anchor)
    return _weights_from_hops(dist, hop_weights)


def _sample_index(w: np.ndarray, rng) -> int:
    total = w.sum()
    if total <= 0.0:
        return int(rng.integers(w.size))
    c = np.cumsum(w)
    return int(np.searchsorted(c, rng.random() * c[-1], side="right"))


def _sample_distinct(k: int, w: np.ndarray, rng) -> list[int]:
    """Weighted sampling without replacement by sequential renormalization.

    All-zero weights fall back to uniform; if the support is smaller than k,
    the whole support is returned.
    """
    w = np.asarray(w, dtype=float).copy()
    support = np.flatnonzero(w > 0)
    if support.size == 0:
        w = np.ones(w.size)
        support = np.arange(w.size)
    if k >= support.size:
        return support.tolist()
    out = []
    for _ in range(k):
        j = _sample_index(w, rng)
        out.append(j)
        w[j] = 0.0
    return out


def _partial_hops(adj, n_existing: int, anchor: int, max_hop) -> np.ndarray:
    """Hop distances from the anchor over the partially grown graph."""
    dist = np.full(n_existing, -1, dtype=np.int64)
    dist[anchor] = 0
    frontier = [anchor]
    d = 0
    while frontier and (max_hop is None or d < max_hop):
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = d + 1
                    nxt.append(v)
        frontier = nxt
        d += 1
    return dist


def _max_needed_hop(hop_weights):
    terminal_hop, terminal_w = hop_weights[-1]
    if terminal_w > 0:
        return None
    positive = [h for h, w in hop_weights if w > 0]
    return max(positive) if positive else 1


def generate(config: GenConfig):
    """Run the growth process; returns (Graph, SensitiveLabels).

    The result has exactly config.n nodes, is connected and simple, and is
    a deterministic function of the config including its seed.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    labels = assign_sensitive(config.n, config.alpha, rng)
    s = labels.s
    n, m = config.n, config.m

    adj: list[list[int]] = [[] for _ in range(n)]
    deg = np.zeros(n)
    pairs: list[tuple[int, int]] = []

    def add_edge(a: int, b: int):
        adj[a].append(b)
        adj[b].append(a)
        deg[a] += 1.0
        deg[b] += 1.0
        pairs.append((a, b))

    for leaf in range(1, m):
        add_edge(0, leaf)

    boost = math.expm1(config.beta)
    max_hop = _max_needed_hop(config.hop_weights) if config.anchor else None

    for v in range(m, n):
        existing = v
        if config.anchor:
            w = _homophily_weights(deg[:v], s[:v], s[v], config.beta)
            u = _sample_index(w, rng)
            m_prime = sample_edge_count(config.edge_count_law, int(deg[u]), existing, rng)
            hops = _partial_hops(adj, v, u, max_hop)
            ew = _weights_from_hops(hops, config.hop_weights)
            if config.homophily_scope == "all_connections" and boost > 0:
                ew = ew * np.where(s[:v] == s[v], 1.0 + boost, 1.0)
            targets = _sample_distinct(m_prime, ew, rng) if ew.sum() > 0 else []
            for t in targets:
                add_edge(v, t)
            add_edge(v, u)
        else:
            w = _homophily_weights(deg[:v], s[:v], s[v], config.beta)
            m_prime = sample_edge_count(config.edge_count_law, None, existing, rng)
            for t in _sample_distinct(m_prime, w, rng):
                add_edge(v, t)

    return from_edges(n, pairs), labels


def calibrate_beta(config: GenConfig, target: float, reps: int = 3,
                   beta_max: float = 12.0, tol: float = 0.02, seed: int = 0) -> float:
    """Find beta whose mean assortativity over `reps` graphs matches `target`.

    Bisection over [0, beta_max] with a shared seed set per probe (common
    random numbers), then a validation draw at the returned beta. Raises
    CalibrationRangeError when the target lies outside the reachable range.
    """
    from .measures import assortativity

    if reps < 1:
        raise ValueError("reps must be >= 1")
    seeds = [derive_seed(seed, "calibrate", r) for r in range(reps)]

    def mean_assort(beta: float, rep_seeds) -> float:
        vals = []
        for sd in rep_seeds:
            g, labels = generate(replace(config, beta=beta, seed=sd))
            vals.append(assortativity(g, labels))
        return float(np.mean(vals))

    a_lo = mean_assort(0.0, seeds)
    a_hi = mean_assort(beta_max, seeds)
    if target < a_lo - tol or target > a_hi + tol:
        raise CalibrationRangeError(
            f"target {target} outside reachable assortativity [{a_lo:.3f}, {a_hi:.3f}]")

    lo, hi = 0.0, beta_max
    while hi - lo > 0.05:
        mid = 0.5 * (lo + hi)
        if mean_assort(mid, seeds) < target:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)

    # Flat response near 0 lets noise push bisection upward; prefer the
    # smallest beta that still meets the target.
    while beta > 0.02:
        cand = 0.5 * beta
        if abs(mean_assort(cand, seeds) - target) <= tol:
            beta = cand
        else:
            break

    check_seeds = [derive_seed(seed, "calibrate-check", r) for r in range(2 * reps)]
    achieved = mean_assort(beta, check_seeds)
    if abs(achieved - target) <= tol:
        return beta

    # One refinement pass with doubled reps around the current estimate.
    lo = max(0.0, beta - 0.2)
    hi = min(beta_max, beta + 0.2)
    wide_seeds = seeds + [derive_seed(seed, "calibrate2", r) for r in range(reps)]
    for _ in range(5):
        mid = 0.5 * (lo + hi)
        if mean_assort(mid, wide_seeds) < target:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    achieved = mean_assort(beta, check_seeds)
    if abs(achieved - target) > tol:
        raise CalibrationRangeError(
            f"could not reach target {target}: best beta {beta:.3f} gives {achieved:.3f}")
    return beta


# --- config file parsing ("key = value" lines) -------------------------------

_CONFIG_KEYS = ("n", "m", "alpha", "beta", "anchor", "homophily_scope",
                "hop_weights", "edge_count_law", "seed")


def parse_kv_text(text: str) -> dict[str, str]:
    """Parse 'key = value' lines; '#' starts a comment, blanks are skipped."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _parse_hop_weights(text: str):
    entries = []
    for part in text.split(","):
        part = part.strip()
        if ":" not in part:
            raise ConfigError(f"bad hop weight entry {part!r}")
        hop, w = part.split(":", 1)
        hop = hop.strip()
        terminal = hop.endswith("+")
        entries.append((int(hop.rstrip("+")), float(w), terminal))
    if any(t for *_, t in entries[:-1]):
        raise ConfigError("only the last hop-weight entry may be open-ended ('k+')")
    return tuple((h, w) for h, w, _ in entries)


def _parse_edge_count_law(text: str, m: int):
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "gamma":
        return GammaLaw(float(m), float(rest))
    if kind == "affine":
        a, b = (float(x) for x in rest.split(","))
        return AffineLaw(a, b)
    if kind == "fixed":
        return FixedLaw(int(rest))
    raise ConfigError(f"unknown edge-count law {text!r}")


def config_from_mapping(mapping: dict[str, str], base: GenConfig | None = None,
                        extra_keys=()) -> GenConfig:
    """Build a GenConfig from string key/values, optionally over a preset base.

    Keys outside the GenConfig fields (and `extra_keys`, which are ignored
    here so callers can share one file) are errors.
    """
    unknown = set(mapping) - set(_CONFIG_KEYS) - set(extra_keys)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    fields = {}
    for key in ("n", "m", "seed"):
        if key in mapping:
            fields[key] = int(mapping[key])
    for key in ("alpha", "beta"):
        if key in mapping:
            fields[key] = float(mapping[key])
    if "anchor" in mapping:
        val = mapping["anchor"].lower()
        if val not in ("true", "false"):
            raise ConfigError(f"anchor must be true or false, got {mapping['anchor']!r}")
        fields["anchor"] = val == "true"
    if "homophily_scope" in mapping:
        fields["homophily_scope"] = mapping["homophily_scope"]
    if "hop_weights" in mapping:
        fields["hop_weights"] = _parse_hop_weights(mapping["hop_weights"])
    if base is not None:
        m_eff = fields.get("m", base.m)
        if "edge_count_law" in mapping:
            fields["edge_count_law"] = _parse_edge_count_law(mapping["edge_count_law"], m_eff)
        elif "m" in fields and isinstance(base.edge_count_law, GammaLaw):
            fields["edge_count_law"] = GammaLaw(float(m_eff), base.edge_count_law.gamma)
        return replace(base, **fields)
    for key in ("n", "m", "alpha"):
        if key not in fields:
            raise ConfigError(f"config requires '{key}'")
    if "edge_count_law" in mapping:
        fields["edge_count_law"] = _parse_edge_count_law(mapping["edge_count_law"], fields["m"])
    return GenConfig(**fields)
