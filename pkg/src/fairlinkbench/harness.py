"""End-to-end orchestration: single runs, (alpha, beta) grid sweeps, corpus CSV.

One corpus row per (graph, split, model). Graph seeds are a stable hash of
(base_seed, alpha index, beta index, repeat), so editing the grid never
shifts existing cells. Sweeps resume by re-reading complete cells from the
output file and rewriting it in canonical order, which keeps interrupted
and uninterrupted runs byte-identical.
"""

from __future__ import annotations

import csv
import multiprocessing
import os
from dataclasses import dataclass, field, replace

from .generation import (ConfigError, GenConfig, PRESETS, config_from_mapping,
                         generate, parse_kv_text)
from .measures import MEASURE_NAMES, bias_profile
from .metrics import evaluate
from .models import MODEL_IDS, model_spec_from_id, recommend_topk, embed, split_edges
from .seeding import derive_seed

N_SPLITS = 5

METRIC_COLUMNS = ("hit10", "ap10", "auc", "sp10", "eo10")

CSV_COLUMNS = ("use_case", "n", "alpha", "beta", "repeat", "graph_seed",
               "split_id", "model") + MEASURE_NAMES + METRIC_COLUMNS + ("flags",)

MODEL_PARAM_KEYS = ("embed_dim", "walks", "walk_length", "window", "negatives",
                    "epochs", "step_size", "n2v_p", "n2v_q", "cw_alpha", "cw_p",
                    "cw_r", "cw_l", "nmf_iters", "nmf_tol")

SWEEP_KEYS = ("preset", "alpha_grid", "beta_grid", "repeats", "models", "k",
              "base_seed", "out")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


@dataclass
class EvalRecord:
    use_case: str
    n: int
    alpha: float
    beta: float
    repeat: int
    graph_seed: int
    split_id: int
    model: str
    bias: dict
    hit10: float | None = None
    ap10: float | None = None
    auc: float | None = None
    sp10: float | None = None
    eo10: float | None = None
    flags: str = ""

    def csv_row(self) -> list[str]:
        row = [self.use_case, str(self.n), _fmt(self.alpha), _fmt(self.beta),
               str(self.repeat), str(self.graph_seed), str(self.split_id), self.model]
        for name in MEASURE_NAMES:
            row.append(_fmt(self.bias.get(name)))
        for name in METRIC_COLUMNS:
            row.append(_fmt(getattr(self, name)))
        row.append(self.flags)
        return row


def _merge_flags(*flag_dicts) -> str:
    merged = {}
    for d in flag_dicts:
        merged.update(d)
    return ";".join(f"{k}={v}" for k, v in sorted(merged.items()))


def run_single(config: GenConfig, models, k: int = 10, seed: int | None = None,
               use_case: str = "custom", repeat: int = 0) -> list[EvalRecord]:
    """Generate one graph, profile it, run every model over 5 splits.

    A model failure yields a flagged record instead of aborting the run.
    """
    if seed is None:
        seed = config.seed
    g, labels = generate(config)
    profile = bias_profile(g, labels)
    records = []
    for split_id in range(N_SPLITS):
        split = split_edges(g, 0.8, split_id, seed)
        for spec in models:
            rec = EvalRecord(use_case=use_case, n=config.n, alpha=config.alpha,
                             beta=config.beta, repeat=repeat, graph_seed=seed,
                             split_id=split_id, model=spec.model_id,
                             bias=profile.values)
            try:
                emb = embed(split.train_graph, labels, spec,
                            derive_seed(seed, "embed", split_id, spec.model_id))
                recs = recommend_topk(emb, split.train_graph, k)
                report = evaluate(emb, recs, split, labels, k,
                                  auc_seed=derive_seed(seed, "auc", split_id, spec.model_id))
                rec.hit10 = report.hit_at_k
                rec.ap10 = report.ap_at_k
                rec.auc = report.auc
                rec.sp10 = report.sp_at_k
                rec.eo10 = report.eo_at_k
                rec.flags = _merge_flags(profile.flags, report.flags)
            except Exception as exc:  # isolate the failing (split, model) cell
                rec.flags = _merge_flags(
                    profile.flags, {"model_error": f"{type(exc).__name__}:{exc}"})
            records.append(rec)
    return records


@dataclass
class SweepSpec:
    base_config: GenConfig
    alpha_grid: list
    beta_grid: list
    repeats: int
    model_ids: list
    model_params: dict = field(default_factory=dict)
    k: int = 10
    base_seed: int = 0
    use_case: str = "custom"

    def validate(self):
        if not self.alpha_grid or not self.beta_grid:
            raise ConfigError("alpha_grid and beta_grid must be non-empty")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if not self.model_ids:
            raise ConfigError("at least one model required")
        for mid in self.model_ids:
            if mid not in MODEL_IDS:
                raise ConfigError(f"unknown model {mid!r}")

    def cells(self):
        for ai, alpha in enumerate(self.alpha_grid):
            for bi, beta in enumerate(self.beta_grid):
                for rep in range(self.repeats):
                    yield ai, bi, rep

    def cell_config(self, ai: int, bi: int, rep: int) -> GenConfig:
        seed = derive_seed(self.base_seed, ai, bi, rep)
        return replace(self.base_config, alpha=self.alpha_grid[ai],
                       beta=self.beta_grid[bi], seed=seed)


def sweep_spec_from_text(text: str, preset_override: str | None = None) -> SweepSpec:
    """Parse a sweep spec file (GenConfig keys plus grid lists)."""
    mapping = parse_kv_text(text)
    for bad in ("alpha", "beta"):
        if bad in mapping:
            raise ConfigError(f"'{bad}' is swept; use {bad}_grid")
    preset = preset_override or mapping.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r} (choose from {sorted(PRESETS)})")
        base = PRESETS[preset](alpha=0.5, beta=0.0)
        use_case = preset
    else:
        base = None
        use_case = "custom"
    gen_keys = ("n", "m", "anchor", "homophily_scope", "hop_weights",
                "edge_count_law", "seed")
    known = set(SWEEP_KEYS) | set(MODEL_PARAM_KEYS) | set(gen_keys)
    unknown = set(mapping) - known
    if unknown:
        raise ConfigError(f"unknown sweep keys: {sorted(unknown)}")
    gen_mapping = {k: v for k, v in mapping.items() if k in gen_keys}
    if base is None:
        gen_mapping.setdefault("alpha", "0.5")
        base_config = config_from_mapping(gen_mapping)
    else:
        base_config = config_from_mapping(gen_mapping, base=base)

    def floats(key, default):
        if key not in mapping:
            return default
        return [float(x) for x in mapping[key].split(",") if x.strip() != ""]

    alpha_grid = floats("alpha_grid", [0.5, 0.6, 0.7, 0.8, 0.9])
    beta_grid = floats("beta_grid", [0.0, 0.5, 1.0, 1.5, 2.0, 3.0])
    model_ids = [m.strip() for m in mapping.get("models", "svd").split(",") if m.strip()]
    model_params = {k: v for k, v in mapping.items() if k in MODEL_PARAM_KEYS}
    spec = SweepSpec(base_config=base_config, alpha_grid=alpha_grid,
                     beta_grid=beta_grid, repeats=int(mapping.get("repeats", 1)),
                     model_ids=model_ids, model_params=model_params,
                     k=int(mapping.get("k", 10)),
                     base_seed=int(mapping.get("base_seed", 0)),
                     use_case=use_case)
    spec.validate()
    return spec


def _cell_worker(payload):
    spec, ai, bi, rep = payload
    config = spec.cell_config(ai, bi, rep)
    models = [model_spec_from_id(mid, spec.model_params) for mid in spec.model_ids]
    records = run_single(config, models, k=spec.k, seed=config.seed,
                         use_case=spec.use_case, repeat=rep)
    return (ai, bi, rep), [r.csv_row() for r in records]


def _read_complete_cells(path, spec: SweepSpec) -> dict:
    """Rows of cells already fully present in an existing corpus file."""
    if not os.path.exists(path):
        return {}
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            return {}
        if tuple(header) != CSV_COLUMNS:
            raise ConfigError(f"existing corpus {path} has a different schema")
        rows = list(reader)
    alpha_key = {_fmt(float(a)): i for i, a in enumerate(spec.alpha_grid)}
    beta_key = {_fmt(float(b)): i for i, b in enumerate(spec.beta_grid)}
    by_cell: dict[tuple, list] = {}
    for row in rows:
        ai = alpha_key.get(row[2])
        bi = beta_key.get(row[3])
        if ai is None or bi is None:
            continue
        by_cell.setdefault((ai, bi, int(row[4])), []).append(row)
    expected = N_SPLITS * len(spec.model_ids)
    return {key: rows for key, rows in by_cell.items() if len(rows) == expected}


def sweep(spec: SweepSpec, out_path, workers: int = 1, deterministic: bool = True,
          progress=None) -> int:
    """Run the grid, streaming records to out_path; returns the row count.

    Cells already complete in out_path are reused, not recomputed. With
    deterministic=True results are written in grid order regardless of
    worker scheduling.
    """
    spec.validate()
    cache = _read_complete_cells(out_path, spec)
    all_cells = list(spec.cells())
    todo = [c for c in all_cells if c not in cache]
    payloads = [(spec, ai, bi, rep) for ai, bi, rep in todo]

    results_iter = ()
    pool = None
    if payloads:
        if workers > 1:
            pool = multiprocessing.get_context("spawn").Pool(workers)
            mapper = pool.imap if deterministic else pool.imap_unordered
            results_iter = mapper(_cell_worker, payloads)
        else:
            results_iter = map(_cell_worker, payloads)

    tmp_path = f"{out_path}.tmp"
    count = 0
    done = 0
    try:
        with open(tmp_path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            if deterministic:
                pending = iter(results_iter)
                for cell in all_cells:
                    if cell in cache:
                        rows = cache[cell]
                    else:
                        key, rows = next(pending)  # imap preserves payload order
                        if key != cell:
                            raise RuntimeError(f"worker returned {key}, expected {cell}")
                    for row in rows:
                        writer.writerow(row)
                        count += 1
                    f.flush()
                    done += 1
                    if progress:
                        progress(done, len(all_cells))
            else:
                for cell in all_cells:
                    if cell in cache:
                        for row in cache[cell]:
                            writer.writerow(row)
                            count += 1
                for key, rows in results_iter:
                    for row in rows:
                        writer.writerow(row)
                        count += 1
                    f.flush()
                    done += 1
                    if progress:
                        progress(done, len(all_cells))
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    os.replace(tmp_path, out_path)
    return count


def records_to_csv(records, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.csv_row())
