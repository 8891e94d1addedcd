"""Outcome measures for runs: collective errors, top-k curves, resistance."""
from dataclasses import dataclass

import numpy as np

from .exceptions import UndefinedMetricError


@dataclass(frozen=True)
class RoundMetrics:
    round: int
    wc_error: float
    wdn_error: float
    individual_errors: np.ndarray
    centralization: float


@dataclass(frozen=True)
class TopKPoint:
    k: int
    mean_abs_error: float
    sd_abs_error: float


def _collective_error(values, truth):
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise UndefinedMetricError("empty group")
    return float(abs(truth - v.mean()))


def wc_error(signals, truth):
    """Error of the plain average of private signals."""
    return _collective_error(signals, truth)


def wdn_error(beliefs, truth):
    """Error of the average of post-learning beliefs."""
    return _collective_error(beliefs, truth)


def normalized_error(errors, baseline_errors):
    """Errors divided by the mean of the matched baseline (e.g. solo) errors."""
    base = float(np.mean(baseline_errors))
    if not base > 0:
        raise UndefinedMetricError("baseline mean error must be positive")
    return np.asarray(errors, dtype=float) / base


def adapted_rounds(T):
    """1-indexed rounds of the two adapted periods.

    For 20 rounds these are 6-10 and 16-20; longer runs scale the same
    quarter boundaries.
    """
    q1, q2, q3 = round(T / 4), round(T / 2), round(3 * T / 4)
    return list(range(q1 + 1, q2 + 1)) + list(range(q3 + 1, T + 1))


def _round_index(rounds):
    idx = np.asarray(list(rounds), dtype=int) - 1
    if idx.size == 0:
        raise UndefinedMetricError("no evaluation rounds")
    return idx


def rank_members(beliefs, truths, evaluation_rounds):
    """Agents sorted by mean absolute belief error over the given rounds.

    ``beliefs`` is (T, n), ``truths`` is (T,), rounds are 1-indexed. Ties
    go to the lower agent index.
    """
    idx = _round_index(evaluation_rounds)
    b = np.asarray(beliefs, dtype=float)[idx]
    err = np.abs(b - np.asarray(truths, dtype=float)[idx, None]).mean(axis=0)
    return np.argsort(err, kind="stable")


def top_k_estimate(beliefs, ranking, k):
    b = np.asarray(beliefs, dtype=float)
    n = b.shape[-1]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    # natural index order so k == n reduces exactly like beliefs.mean()
    return b[..., np.sort(np.asarray(ranking[:k]))].mean(axis=-1)


def mean_variance_curve(beliefs, truths, evaluation_rounds):
    """Mean and population SD of |top-k estimate - truth| for every k.

    The ranking is fixed ex post from the same evaluation rounds.
    """
    idx = _round_index(evaluation_rounds)
    b = np.asarray(beliefs, dtype=float)
    truths = np.asarray(truths, dtype=float)
    ranking = rank_members(b, truths, evaluation_rounds)
    curve = []
    for k in range(1, b.shape[1] + 1):
        # row by row so the k == n point reproduces wdn_error bit for bit
        err = np.array([abs(top_k_estimate(b[r], ranking, k) - truths[r]) for r in idx])
        curve.append(TopKPoint(k, float(err.mean()), float(err.std())))
    return curve


def resistance_to_influence(u1, u2, m):
    """1 - weight of advice, clamped to [0, 1]; NaN when m == u1."""
    if m == u1:
        return float("nan")
    woa = abs(u2 - u1) / abs(m - u1)
    return float(min(1.0, max(0.0, 1.0 - woa)))


def round_resistance(shares, signals, beliefs):
    """Per-agent resistance with m = share-weighted mean of followed peers' signals."""
    shares = np.asarray(shares, dtype=float)
    s = np.asarray(signals, dtype=float)
    out = np.full(len(s), np.nan)
    totals = shares.sum(axis=1)
    for i in np.nonzero(totals)[0]:
        m = shares[i] @ s / totals[i]
        out[i] = resistance_to_influence(s[i], beliefs[i], m)
    return out


def bootstrap_interval(values, rng, n_boot=500, q=(5, 95), stat=np.mean):
    """Percentile bootstrap interval of ``stat`` over resampled values."""
    v = np.asarray(values, dtype=float)
    picks = rng.integers(0, len(v), size=(n_boot, len(v)))
    return tuple(np.percentile([stat(v[p]) for p in picks], q))
