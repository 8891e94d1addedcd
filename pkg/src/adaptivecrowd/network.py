"""Directed attention-share graph, influence matrix and structural metrics."""
import csv
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, InvariantViolation, UndefinedMetricError


@dataclass
class AttentionGraph:
    """Integer attention shares ``shares[i, j]`` that agent i places on j.

    The diagonal of ``shares`` is always zero; the self-weight lives in
    ``self_weight`` and is never rewired.
    """

    shares: np.ndarray
    kappa: int
    self_weight: int = 1

    @property
    def n(self):
        return self.shares.shape[0]

    def copy(self):
        return AttentionGraph(self.shares.copy(), self.kappa, self.self_weight)

    def check(self):
        """Raise InvariantViolation unless every row holds exactly kappa shares."""
        s = self.shares
        if s.shape != (self.n, self.n):
            raise InvariantViolation("share table is not square", self.copy())
        if np.any(np.diag(s) != 0):
            raise InvariantViolation("self shares must stay zero", self.copy())
        if np.any(s < 0) or np.any(s > self.kappa):
            raise InvariantViolation("shares outside [0, kappa]", self.copy())
        if self.n > 1 and np.any(s.sum(axis=1) != self.kappa):
            raise InvariantViolation("share conservation broken", self.copy())
        return self

    def edges(self):
        """(src, dst, shares) triples in row-major order."""
        src, dst = np.nonzero(self.shares)
        return [(int(i), int(j), int(self.shares[i, j])) for i, j in zip(src, dst)]


def init_random(n, kappa, rng, self_weight=1):
    """Each agent puts one share on each of kappa distinct random peers."""
    if n < 2:
        raise ConfigurationError("need at least 2 agents")
    if not 1 <= kappa <= n - 1:
        raise ConfigurationError(f"kappa must be in [1, {n - 1}], got {kappa}")
    shares = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        others = np.delete(np.arange(n), i)
        shares[i, rng.choice(others, size=kappa, replace=False)] = 1
    return AttentionGraph(shares, kappa, self_weight).check()


def build_matrix(graph):
    """Row-stochastic influence matrix with the self-weight on the diagonal."""
    w = graph.shares.astype(float)
    np.fill_diagonal(w, graph.self_weight)
    totals = w.sum(axis=1, keepdims=True)
    if np.any(totals <= 0):
        raise InvariantViolation("zero row in influence weights", graph.copy())
    return w / totals


def in_degree(graph, binary=False):
    """Follower counts per agent; share-weighted unless ``binary``."""
    s = graph.shares > 0 if binary else graph.shares
    return s.sum(axis=0).astype(np.int64)


def freeman_centralization(graph, binary=True):
    """Sum of (max in-degree - in-degree) over agents, divided by (n-1)(n-2).

    The (n-1)(n-2) denominator is applied as is; with share-weighted
    in-degrees (``binary=False``) the value can exceed 1.
    """
    return centralization_from_degrees(in_degree(graph, binary=binary))


def centralization_from_degrees(degrees):
    c = np.asarray(degrees, dtype=float)
    n = len(c)
    if n < 3:
        raise UndefinedMetricError("centralization needs at least 3 agents")
    return float((c.max() - c).sum() / ((n - 1) * (n - 2)))


def write_edges(rows, path):
    """Write (round, src, dst, shares) rows as an edge-list CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["round", "src", "dst", "shares"])
        writer.writerows(rows)
