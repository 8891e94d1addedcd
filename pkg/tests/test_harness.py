import csv
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from adaptivecrowd._random import derive_seed
from adaptivecrowd.config import RunConfig
from adaptivecrowd.harness import (
    METRICS_COLUMNS, SUMMARY_COLUMNS, TRACE_COLUMNS, emit_summary, emit_trace, replicate, run,
    sweep,
)

GOLDEN = Path(__file__).parent / "fixtures" / "golden_2024"


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_solo_wdn_equals_wc():
    trace = run(RunConfig(condition="solo", seed=3))
    np.testing.assert_array_equal(trace.wdn_errors, trace.wc_errors)
    np.testing.assert_array_equal(trace.beliefs, trace.signals)
    assert trace.shares.sum() == 0


def test_static_graph_frozen():
    trace = run(RunConfig(condition="static", seed=4))
    assert np.all(trace.shares == trace.shares[0])
    assert np.all(trace.shares.sum(axis=2) == 3)


def test_dynamic_graph_moves_and_conserves():
    trace = run(RunConfig(seed=5, rounds=40))
    assert np.any(trace.shares != trace.shares[0])
    assert np.all(trace.shares.sum(axis=2) == 3)
    assert np.all(np.einsum("tii->ti", trace.shares) == 0)


def test_conditions_share_environment():
    # same seed: truths, signals and shocks do not depend on the condition
    a = run(RunConfig(condition="solo", seed=8))
    b = run(RunConfig(condition="dynamic", seed=8))
    np.testing.assert_array_equal(a.truths, b.truths)
    np.testing.assert_array_equal(a.signals, b.signals)
    np.testing.assert_array_equal(a.shocks, b.shocks)
    # and static starts from the dynamic run's initial network
    c = run(RunConfig(condition="static", seed=8))
    np.testing.assert_array_equal(c.shares[0], b.shares[0])


def test_default_shock_at_eleven():
    trace = run(RunConfig(seed=1))
    assert list(np.nonzero(trace.shocks)[0] + 1) == [11]
    assert sorted(trace.labels[10]) == sorted(trace.labels[9])


def test_run_determinism():
    a, b = run(RunConfig(seed=6)), run(RunConfig(seed=6))
    np.testing.assert_array_equal(a.beliefs, b.beliefs)
    np.testing.assert_array_equal(a.shares, b.shares)


def test_emit_row_counts(tmp_path):
    emit_trace(run(RunConfig(seed=2)), tmp_path)
    trace, metrics = _read(tmp_path / "trace.csv"), _read(tmp_path / "metrics.csv")
    assert trace[0] == TRACE_COLUMNS and len(trace) == 1 + 240
    assert metrics[0] == METRICS_COLUMNS and len(metrics) == 1 + 20
    edges = _read(tmp_path / "edges-2.csv")
    assert edges[0] == ["round", "src", "dst", "shares"]
    per_round = {}
    for r, _, _, k in edges[1:]:
        per_round[r] = per_round.get(r, 0) + int(k)
    assert len(per_round) == 20 and set(per_round.values()) == {36}


def test_emit_solo_has_no_edges(tmp_path):
    emit_trace(run(RunConfig(condition="solo", seed=2)), tmp_path)
    assert not list(tmp_path.glob("edges-*.csv"))


def test_replications_get_distinct_seeds(tmp_path):
    traces = replicate(RunConfig(seed=10, replications=3))
    assert [t.run_id for t in traces] == ["10-0", "10-1", "10-2"]
    assert len({t.truths[0] for t in traces}) == 3
    assert traces[1].config.seed == derive_seed(10, 0, 1)
    emit_trace(traces, tmp_path)
    assert len(_read(tmp_path / "metrics.csv")) == 1 + 60


def test_empty_summary_is_header_only(tmp_path):
    path = emit_summary([], tmp_path / "s.csv")
    assert path.read_text() == ",".join(SUMMARY_COLUMNS) + "\n"


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        emit_summary([], blocker / "s.csv")


def test_sweep_schema_and_normalisation(tmp_path):
    base = RunConfig(rounds=12, seed=1)
    table = sweep(base, [1, 4], [None, 5.0], [0.0], replications=3)
    assert len(table.rows) == 4
    for row in table.rows:
        assert row["replication_count"] == 3
        assert row["p05_wdn"] <= row["mean_wdn"] <= row["p95_wdn"]
    for rho in (None, 5.0):
        norm = [r["normalized_wdn"] for r in table.rows if r["rho"] == rho]
        assert min(norm) == 1.0
    rows = _read(emit_summary(table, tmp_path / "s.csv"))
    assert rows[0] == SUMMARY_COLUMNS and len(rows) == 5


def test_sweep_cells_independent_of_grid():
    # a cell's replications depend on (base seed, cell index, rep) only
    base = RunConfig(rounds=10, seed=2)
    small = sweep(base, [3], [None], [0.0], replications=2)
    big = sweep(base, [3, 6], [None], [0.0, 0.5], replications=2)
    np.testing.assert_array_equal(small.runs[(3, None, 0.0)][0], big.runs[(3, None, 0.0)][0])


def test_sweep_seed_matches_single_run():
    base = RunConfig(rounds=10, seed=2)
    table = sweep(base, [3], [None], [0.0], replications=2)
    cfg = replace(base, lambda_=3, shock_mode="none", shock_rounds=(),
                  seed=derive_seed(2, 0, 1))
    assert table.runs[(3, None, 0.0)][0][1] == run(cfg).wdn_errors.mean()


def test_sweep_rejects_empty():
    with pytest.raises(ValueError):
        sweep(RunConfig(), [], [None], [0.0], 1)


def test_golden_trace_files(tmp_path):
    for i in range(3):
        out = emit_trace(run(RunConfig(seed=2024)), tmp_path / str(i))
        for name in ("trace.csv", "metrics.csv", "edges-2024.csv"):
            assert (out / name).read_bytes() == (GOLDEN / name).read_bytes(), name
