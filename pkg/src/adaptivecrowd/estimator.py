"""scikit-learn style wrapper around social learning on an adaptive network.

Rows of ``X`` are rounds and columns are agents' private signals in [0, 1];
``y`` holds each round's true value. Fitting plays the rounds in order:
beliefs are formed on the current network, performance is recorded, and
(when ``rewire`` is on) the attention graph is rewired from feedback.
``transform`` returns beliefs on the learned network and ``predict`` the
collective estimate (mean belief).
"""
from collections.abc import Mapping

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, column_or_1d

from ._random import make_rng
from .exceptions import ConfigurationError
from .learning import degroot
from .network import build_matrix, init_random
from .rewiring import PerformanceLedger, feedback_views, rewire_step

_STREAMS = ("graph", "feedback", "rewire")


def _split_random_state(random_state):
    if isinstance(random_state, Mapping):
        missing = set(_STREAMS) - set(random_state)
        if missing:
            raise ConfigurationError(f"random_state mapping lacks {sorted(missing)}")
        return {k: make_rng(random_state[k]) for k in _STREAMS}
    if isinstance(random_state, np.random.Generator):
        return dict.fromkeys(_STREAMS, random_state)
    ss = random_state if isinstance(random_state, np.random.SeedSequence) \
        else np.random.SeedSequence(random_state)
    return {k: make_rng(child) for k, child in zip(_STREAMS, ss.spawn(len(_STREAMS)))}


def check_signals(X, n_agents=None):
    """Validate a (rounds, agents) signal array with entries in [0, 1]."""
    X = check_array(X, dtype=np.float64, ensure_min_features=2)
    if np.any(X < 0) or np.any(X > 1):
        raise ValueError("signals must lie in [0, 1]")
    if n_agents is not None and X.shape[1] != n_agents:
        raise ValueError(f"expected {n_agents} agents, got {X.shape[1]}")
    return X


class AdaptiveCrowd(RegressorMixin, BaseEstimator):
    """DeGroot social learning on a performance-rewired attention network.

    Parameters
    ----------
    kappa : int
        Attention shares each agent spreads over peers.
    self_weight : int
        Fixed weight on an agent's own signal.
    window : int
        Past rounds (besides the current one) averaged into performance.
    eta : float
        Standard deviation of noise added to relative-error feedback.
    stages : int
        Averaging passes per round.
    rewire : bool
        If False the initial random network stays frozen.
    random_state : None, int, SeedSequence, Generator or mapping
        A mapping must provide generators (or seeds) under ``"graph"``,
        ``"feedback"`` and ``"rewire"``.
    """

    def __init__(self, kappa=3, self_weight=3, window=5, eta=0.0, stages=2,
                 rewire=True, random_state=None):
        self.kappa = kappa
        self.self_weight = self_weight
        self.window = window
        self.eta = eta
        self.stages = stages
        self.rewire = rewire
        self.random_state = random_state

    def _start(self, n_agents):
        if self.eta < 0:
            raise ConfigurationError("eta must be >= 0")
        if self.window < 0:
            raise ConfigurationError("window must be >= 0")
        self._rngs = _split_random_state(self.random_state)
        self.n_agents_ = n_agents
        self.graph_ = init_random(n_agents, self.kappa, self._rngs["graph"], self.self_weight)
        self.ledger_ = PerformanceLedger(self.window)
        self.n_rounds_ = 0
        return self

    def fit(self, X, y):
        X = check_signals(X)
        self._start(X.shape[1])
        return self.partial_fit(X, y)

    def partial_fit(self, X, y):
        first = not hasattr(self, "graph_")
        X = check_signals(X, None if first else self.n_agents_)
        y = column_or_1d(y)
        if len(y) != len(X):
            raise ValueError("X and y have different numbers of rounds")
        if first:
            self._start(X.shape[1])
        self.beliefs_ = np.array([self._step(signals, truth) for signals, truth in zip(X, y)])
        return self

    def _step(self, signals, truth):
        """Play one validated round; returns the beliefs formed in it."""
        beliefs = self._beliefs(signals)
        self.ledger_.record(beliefs, signals, truth)
        if self.rewire:
            pi, pi_signal = self.ledger_.relative()
            views = feedback_views(pi, pi_signal, self.eta, self._rngs["feedback"])
            rewire_step(self.graph_, views, self._rngs["rewire"])
        self.n_rounds_ += 1
        return beliefs

    def _beliefs(self, signals):
        return degroot(build_matrix(self.graph_), signals, self.stages)

    def influence_matrix(self):
        check_is_fitted(self, "graph_")
        return build_matrix(self.graph_)

    def transform(self, X):
        check_is_fitted(self, "graph_")
        X = check_signals(X, self.n_agents_)
        return np.array([self._beliefs(row) for row in X])

    def predict(self, X):
        return self.transform(X).mean(axis=1)
