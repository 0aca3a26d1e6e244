import csv
import io
import subprocess
import sys

import pytest

import fairlinkbench.harness as harness
from fairlinkbench.generation import ConfigError, FixedLaw, GenConfig
from fairlinkbench.harness import (CSV_COLUMNS, records_to_csv, run_single,
                                   sweep, sweep_spec_from_text)
from fairlinkbench.models import model_spec_from_id

SMALL_CFG = GenConfig(n=60, m=3, alpha=0.5, beta=1.0, edge_count_law=FixedLaw(3), seed=5)
SVD16 = model_spec_from_id("svd", {"embed_dim": "16"})

TINY_SPEC = """
preset = opinion
n = 100
alpha_grid = 0.5,0.7
beta_grid = 0,2
repeats = 1
models = svd
embed_dim = 16
base_seed = 9
"""


def test_run_single_record_count():
    records = run_single(SMALL_CFG, [SVD16], k=5)
    assert len(records) == 5
    assert {r.split_id for r in records} == set(range(5))
    nmf = model_spec_from_id("nmf", {"embed_dim": "8"})
    records = run_single(SMALL_CFG, [SVD16, nmf], k=5)
    assert len(records) == 10


def test_run_single_bias_columns_shared():
    records = run_single(SMALL_CFG, [SVD16], k=5)
    first = records[0].bias
    assert all(r.bias == first for r in records)


def test_run_single_rerun_identical_bytes():
    out1, out2 = io.StringIO(), io.StringIO()
    records_to_csv(run_single(SMALL_CFG, [SVD16], k=5), out1)
    records_to_csv(run_single(SMALL_CFG, [SVD16], k=5), out2)
    assert out1.getvalue() == out2.getvalue()


def test_run_single_isolates_model_failures(monkeypatch):
    real_embed = harness.embed
    calls = {"i": 0}

    def flaky(train, labels, spec, seed=0):
        calls["i"] += 1
        if calls["i"] == 3:
            raise RuntimeError("synthetic failure")
        return real_embed(train, labels, spec, seed)

    monkeypatch.setattr(harness, "embed", flaky)
    records = run_single(SMALL_CFG, [SVD16], k=5)
    assert len(records) == 5
    flagged = [r for r in records if "model_error" in r.flags]
    clean = [r for r in records if "model_error" not in r.flags]
    assert len(flagged) == 1 and len(clean) == 4
    assert flagged[0].hit10 is None


def test_sweep_counts_and_determinism(tmp_path):
    spec = sweep_spec_from_text(TINY_SPEC)
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    count = sweep(spec, out_a, workers=1)
    assert count == 2 * 2 * 1 * 5 * 1  # grid x repeats x splits x models
    sweep(spec, out_b, workers=1)
    assert out_a.read_bytes() == out_b.read_bytes()


def test_sweep_resume_equivalence(tmp_path):
    spec = sweep_spec_from_text(TINY_SPEC)
    full = tmp_path / "full.csv"
    sweep(spec, full, workers=1)
    lines = full.read_text().splitlines(keepends=True)
    # truncate mid-cell: header + 7 rows = one complete cell + 2 orphan rows
    partial = tmp_path / "partial.csv"
    partial.write_text("".join(lines[:8]))
    sweep(spec, partial, workers=1)
    assert partial.read_bytes() == full.read_bytes()


def test_sweep_rows_unique_on_key(tmp_path):
    spec = sweep_spec_from_text(TINY_SPEC)
    out = tmp_path / "c.csv"
    sweep(spec, out, workers=1)
    with open(out, newline="") as f:
        rows = list(csv.DictReader(f))
    keys = [(r["alpha"], r["beta"], r["repeat"], r["split_id"], r["model"]) for r in rows]
    assert len(keys) == len(set(keys))
    assert list(rows[0].keys()) == list(CSV_COLUMNS)


def test_sweep_spec_validation():
    with pytest.raises(ConfigError):
        sweep_spec_from_text("preset = opinion\nbeta_grid =\n")
    with pytest.raises(ConfigError, match="unknown"):
        sweep_spec_from_text("preset = opinion\nbogus_key = 3\n")
    with pytest.raises(ConfigError, match="alpha"):
        sweep_spec_from_text("preset = opinion\nalpha = 0.5\n")
    with pytest.raises(ConfigError, match="model"):
        sweep_spec_from_text("preset = opinion\nmodels = gnn\n").validate()


def test_sweep_seed_derivation_stable_under_grid_edits(tmp_path):
    # appending a beta value must not change seeds of existing cells
    spec1 = sweep_spec_from_text("preset = opinion\nn = 80\nalpha_grid = 0.5\nbeta_grid = 0\nmodels = svd\nembed_dim = 8\n")
    spec2 = sweep_spec_from_text("preset = opinion\nn = 80\nalpha_grid = 0.5\nbeta_grid = 0,1\nmodels = svd\nembed_dim = 8\n")
    assert spec1.cell_config(0, 0, 0).seed == spec2.cell_config(0, 0, 0).seed


def test_cli_end_to_end(tmp_path):
    def run_cli(*args):
        return subprocess.run([sys.executable, "-m", "fairlinkbench.cli", *args],
                              capture_output=True, text=True)

    out = run_cli("generate", "--preset", "collab", "--seed", "3",
                  "--config", "/dev/null", "--out", str(tmp_path / "g"))
    assert out.returncode == 0, out.stderr
    assert (tmp_path / "g.edges.csv").exists()

    out = run_cli("profile", "--edges", str(tmp_path / "g.edges.csv"),
                  "--labels", str(tmp_path / "g.labels.csv"),
                  "--out", str(tmp_path / "p.csv"))
    assert out.returncode == 0, out.stderr
    header = (tmp_path / "p.csv").read_text().splitlines()[0]
    assert header.startswith("closeness,betweenness")

    spec_file = tmp_path / "spec.txt"
    spec_file.write_text("preset = opinion\nn = 80\nalpha_grid = 0.5\n"
                         "beta_grid = 0\nmodels = svd\nembed_dim = 8\n")
    out = run_cli("sweep", "--spec", str(spec_file), "--out", str(tmp_path / "corpus.csv"))
    assert out.returncode == 0, out.stderr
    assert (tmp_path / "corpus.csv").read_text().count("\n") == 6  # header + 5

    out = run_cli("run", "--preset", "opinion", "--config", str(tmp_path / "cfg.txt"))
    assert out.returncode == 2  # missing config file reported, not crashed


def test_cli_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.txt"
    cfg.write_text("n = 50\nm = 3\nalpha = 0.5\nwhat = 1\n")
    proc = subprocess.run([sys.executable, "-m", "fairlinkbench.cli", "generate",
                           "--config", str(cfg), "--out", str(tmp_path / "x")],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "unknown" in proc.stderr
