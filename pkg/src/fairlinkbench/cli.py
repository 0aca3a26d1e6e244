"""Command-line entry points.

Subcommands: generate, profile, split, run, sweep, calibrate-beta.
Configs and sweep specs use plain "key = value" files; presets are
opinion | friendship | collab.
"""

from __future__ import annotations

import argparse
import csv
import sys

from .generation import (ConfigError, PRESETS, calibrate_beta, config_from_mapping,
                         generate, parse_kv_text)
from .graph import load_graph, save_graph
from .harness import (MODEL_PARAM_KEYS, records_to_csv, run_single, sweep,
                      sweep_spec_from_text)
from .measures import bias_profile, profile_header
from .models import model_spec_from_id, split_edges


def _load_config(args, need_seed=True):
    mapping = {}
    if args.config:
        with open(args.config, encoding="utf-8") as f:
            mapping = parse_kv_text(f.read())
    base = None
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r} (choose from {sorted(PRESETS)})")
        base = PRESETS[args.preset](alpha=0.5)
    if need_seed and args.seed is not None:
        mapping["seed"] = str(args.seed)
    model_params = {k: v for k, v in mapping.items() if k in MODEL_PARAM_KEYS}
    gen_mapping = {k: v for k, v in mapping.items() if k not in MODEL_PARAM_KEYS}
    if base is None and not gen_mapping:
        raise ConfigError("either --preset or --config is required")
    config = config_from_mapping(gen_mapping, base=base)
    return config, model_params


def _cmd_generate(args):
    config, _ = _load_config(args)
    g, labels = generate(config)
    save_graph(g, labels, f"{args.out}.edges.csv", f"{args.out}.labels.csv")
    print(f"wrote {args.out}.edges.csv ({g.m_edges} edges) and {args.out}.labels.csv")


def _cmd_profile(args):
    g, labels = load_graph(args.edges, args.labels)
    profile = bias_profile(g, labels)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(profile_header() + ["flags"])
    writer.writerow(profile.csv_cells() + [profile.flags_cell()])
    if args.out:
        out.close()
        print(f"wrote {args.out}")


def _cmd_split(args):
    g, labels = load_graph(args.edges, args.labels)
    result = split_edges(g, ratio=args.ratio, split_id=args.split_id, seed=args.seed or 0)
    with open(f"{args.out}.train.csv", "w", encoding="utf-8") as f:
        for u, v in result.train_graph.edges:
            f.write(f"{u},{v}\n")
    with open(f"{args.out}.test.csv", "w", encoding="utf-8") as f:
        for u, v in result.test_edges:
            f.write(f"{u},{v}\n")
    print(f"wrote {args.out}.train.csv / {args.out}.test.csv "
          f"({result.train_graph.m_edges}/{result.test_edges.shape[0]} edges)")


def _cmd_run(args):
    config, model_params = _load_config(args)
    models = [model_spec_from_id(mid.strip(), model_params)
              for mid in args.models.split(",") if mid.strip()]
    records = run_single(config, models, k=args.k,
                         use_case=args.preset or "custom")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as f:
            records_to_csv(records, f)
        print(f"wrote {args.out} ({len(records)} records)")
    else:
        records_to_csv(records, sys.stdout)


def _cmd_sweep(args):
    with open(args.spec, encoding="utf-8") as f:
        spec = sweep_spec_from_text(f.read(), preset_override=args.preset)

    def progress(done, total):
        print(f"\rcells {done}/{total}", end="", file=sys.stderr, flush=True)

    count = sweep(spec, args.out, workers=args.workers,
                  deterministic=args.deterministic, progress=progress)
    print(file=sys.stderr)
    print(f"wrote {args.out} ({count} records)")


def _cmd_calibrate_beta(args):
    config, _ = _load_config(args)
    beta = calibrate_beta(config, target=args.target, reps=args.reps,
                          seed=args.seed or 0)
    print(repr(beta))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairlinkbench",
        description="Synthetic-graph benchmark harness for fair link prediction")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--preset", choices=sorted(PRESETS), default=None)
        p.add_argument("--config", default=None, help="key = value config file")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("generate", help="generate one graph into edge/label files")
    common(p)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("profile", help="compute the bias profile of a graph")
    p.add_argument("--edges", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_profile)

    p = sub.add_parser("split", help="write one train/test edge split")
    p.add_argument("--edges", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--ratio", type=float, default=0.8)
    p.add_argument("--split-id", type=int, default=0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(fn=_cmd_split)

    p = sub.add_parser("run", help="run one config through the full pipeline")
    common(p)
    p.add_argument("--models", default="svd", help="comma-separated model ids")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep", help="run an (alpha, beta) grid sweep to a corpus CSV")
    p.add_argument("--spec", required=True, help="sweep spec file")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("calibrate-beta", help="find beta matching a target assortativity")
    common(p)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--reps", type=int, default=3)
    p.set_defaults(fn=_cmd_calibrate_beta)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
