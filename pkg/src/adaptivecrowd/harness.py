"""Seeded runs, parameter sweeps and CSV output.

Round order: draw truth, apply any shock, draw signals, form beliefs
(identity for solo, DeGroot on the current graph otherwise), record
metrics and performance, then (dynamic only) rewire from feedback that
already includes this round's outcome.
"""
import csv
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List

import numpy as np

from ._random import derive_seed, run_streams
from .config import RunConfig
from .environment import Environment
from .estimator import AdaptiveCrowd
from .exceptions import InvariantViolation
from .metrics import RoundMetrics, wc_error, wdn_error
from .network import AttentionGraph, centralization_from_degrees, write_edges

log = logging.getLogger(__name__)

TRACE_COLUMNS = ["run_id", "round", "agent_id", "quality_label", "signal", "belief",
                 "indiv_error", "in_degree", "out_edges"]
METRICS_COLUMNS = ["run_id", "round", "truth", "wc_error", "wdn_error", "centralization",
                   "shock_flag"]
SUMMARY_COLUMNS = ["lambda", "rho", "eta", "replication_count", "mean_wdn", "mean_wc",
                   "p05_wdn", "p95_wdn", "normalized_wdn"]


@dataclass
class RunTrace:
    """Round-by-round record of one run. Arrays are indexed by round - 1."""

    config: RunConfig
    run_id: str
    truths: np.ndarray
    signals: np.ndarray
    beliefs: np.ndarray
    labels: list
    shares: np.ndarray
    shocks: np.ndarray
    metrics: List[RoundMetrics] = field(default_factory=list)

    @property
    def rounds(self):
        return len(self.truths)

    @property
    def wdn_errors(self):
        return np.array([m.wdn_error for m in self.metrics])

    @property
    def wc_errors(self):
        return np.array([m.wc_error for m in self.metrics])

    @property
    def centralization(self):
        return np.array([m.centralization for m in self.metrics])

    def graph(self, round_):
        return AttentionGraph(self.shares[round_ - 1].copy(), self.config.kappa,
                              self.config.self_weight)


def run(config, run_id=None):
    """Execute one seeded run of ``config``."""
    streams = run_streams(config.seed)
    n, T = config.n, config.rounds
    env = Environment(n, config.quality_levels(), config.shock_schedule(), streams,
                      config.signal_channel, (config.truth_lo, config.truth_hi))
    crowd = None
    if config.condition != "solo":
        crowd = AdaptiveCrowd(
            kappa=config.kappa, self_weight=config.self_weight, window=config.lambda_,
            eta=config.eta, stages=config.stages,
            rewire=config.condition == "dynamic" and config.rewire,
            random_state={k: streams[k] for k in ("graph", "feedback", "rewire")},
        )._start(n)
    binary = config.centralization == "binary"

    truths = np.empty(T)
    signals = np.empty((T, n))
    beliefs = np.empty((T, n))
    shares = np.zeros((T, n, n), dtype=np.int64)
    shocks = np.zeros(T, dtype=bool)
    labels, metrics = [], []
    for t in range(T):
        state, s, shocked = env.step()
        truths[t], signals[t], shocks[t] = state.truth, s, shocked
        labels.append(state.labels)
        if crowd is None:
            beliefs[t] = s
        else:
            shares[t] = crowd.graph_.shares
            try:
                beliefs[t] = crowd._step(s, state.truth)
            except InvariantViolation as exc:
                exc.snapshot = {"round": t + 1, "shares": shares[t].copy(), "signals": s}
                raise
        degrees = (shares[t] > 0 if binary else shares[t]).sum(axis=0)
        metrics.append(RoundMetrics(
            round=t + 1,
            wc_error=wc_error(s, state.truth),
            wdn_error=wdn_error(beliefs[t], state.truth),
            individual_errors=np.abs(beliefs[t] - state.truth),
            centralization=centralization_from_degrees(degrees) if n >= 3 else 0.0,
        ))
    return RunTrace(config, str(config.seed) if run_id is None else run_id, truths,
                    signals, beliefs, labels, shares, shocks, metrics)


def replicate(config):
    """All replications of ``config``; seeds are derived unless there is one."""
    if config.replications == 1:
        return [run(config)]
    return [run(replace(config, seed=derive_seed(config.seed, 0, r), replications=1),
                run_id=f"{config.seed}-{r}") for r in range(config.replications)]


def _shock_config(base, rho):
    if rho is None:
        return replace(base, shock_mode="none", shock_rounds=(), rho=None)
    mode = "bernoulli" if base.shock_mode == "bernoulli" else "deterministic"
    return replace(base, shock_mode=mode, shock_rounds=(), rho=float(rho))


def _run_means(config):
    trace = run(config)
    return float(trace.wdn_errors.mean()), float(trace.wc_errors.mean())


@dataclass
class SweepResult:
    rows: list
    # (lambda, rho, eta) -> (per-replication mean wdn, per-replication mean wc)
    runs: dict


def sweep(base, lambda_grid, rho_grid, eta_grid, replications, workers=1):
    """Run the Cartesian grid of (lambda, rho, eta), each cell replicated.

    Replication r of cell c runs with seed ``derive_seed(base.seed, c, r)``.
    ``rho`` follows the base shock mode: a shock every rho rounds, or with
    probability 1/rho per round for bernoulli; ``None`` disables shocks.
    """
    cells = list(itertools.product(lambda_grid, rho_grid, eta_grid))
    if not cells or replications < 1:
        raise ValueError("grids must be non-empty and replications >= 1")
    jobs, seen = [], set()
    for c, (lam, rho, eta) in enumerate(cells):
        cfg = replace(_shock_config(base, rho), lambda_=int(lam), eta=float(eta),
                      replications=1)
        for r in range(replications):
            seed = derive_seed(base.seed, c, r)
            if seed in seen:
                raise InvariantViolation(f"derived seed collision at cell {c}, rep {r}")
            seen.add(seed)
            jobs.append(replace(cfg, seed=seed))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_means, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_run_means(job) for job in jobs]

    runs, rows = {}, []
    for c, cell in enumerate(cells):
        chunk = np.array(results[c * replications:(c + 1) * replications])
        runs[cell] = (chunk[:, 0], chunk[:, 1])
        wdn = chunk[:, 0]
        rows.append({
            "lambda": cell[0], "rho": cell[1], "eta": cell[2],
            "replication_count": replications,
            "mean_wdn": float(wdn.mean()), "mean_wc": float(chunk[:, 1].mean()),
            "p05_wdn": float(np.percentile(wdn, 5)), "p95_wdn": float(np.percentile(wdn, 95)),
        })
    # normalise within each information environment: divide by the best
    # (lowest) mean_wdn among cells sharing rho and eta
    for row in rows:
        peers = [r["mean_wdn"] for r in rows if r["rho"] == row["rho"] and r["eta"] == row["eta"]]
        row["normalized_wdn"] = row["mean_wdn"] / min(peers) if min(peers) > 0 else float("nan")
    log.info("sweep finished: %d cells x %d replications", len(cells), replications)
    return SweepResult(rows, runs)


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _open_csv(path):
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def trace_rows(trace):
    followers = trace.shares.sum(axis=1)
    for t in range(trace.rounds):
        for i in range(trace.config.n):
            out = ";".join(f"{j}:{k}" for j, k in enumerate(trace.shares[t, i]) if k)
            yield [trace.run_id, t + 1, i, trace.labels[t][i], trace.signals[t, i],
                   trace.beliefs[t, i], trace.metrics[t].individual_errors[i],
                   followers[t, i], out]


def metric_rows(trace):
    for t, m in enumerate(trace.metrics):
        yield [trace.run_id, m.round, trace.truths[t], m.wc_error, m.wdn_error,
               m.centralization, trace.shocks[t]]


def edge_rows(trace):
    for t in range(trace.rounds):
        for src, dst, k in trace.graph(t + 1).edges():
            yield [t + 1, src, dst, k]


def emit_trace(traces, out_dir):
    """Write trace.csv and metrics.csv for one or more runs, plus one
    edges-<run_id>.csv graph snapshot file per non-solo run."""
    if isinstance(traces, RunTrace):
        traces = [traces]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    targets = [
        ("trace.csv", TRACE_COLUMNS, trace_rows),
        ("metrics.csv", METRICS_COLUMNS, metric_rows),
    ]
    for name, header, rows in targets:
        with _open_csv(out / name) as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for trace in traces:
                writer.writerows([_fmt(v) for v in row] for row in rows(trace))
    for trace in traces:
        if trace.config.condition != "solo":
            write_edges(edge_rows(trace), out / f"edges-{trace.run_id}.csv")
    return out


def emit_summary(table, path):
    rows = table.rows if isinstance(table, SweepResult) else table
    with _open_csv(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        writer.writerows([_fmt(row[c]) for c in SUMMARY_COLUMNS] for row in rows)
    return Path(path)
