"""Performance tracking, feedback views and share rewiring.

Random draw order inside :func:`rewire_step` is fixed: agents are visited in
index order, and for each agent one uniform per held share (row-major by
peer index) is drawn for detachment, followed by one multinomial draw for
re-attachment if at least one share was detached.
"""
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvariantViolation, UndefinedMetricError


def cumulative_error(history, t=None, lambda_=0):
    """Mean of the last ``lambda_ + 1`` absolute errors up to round index t.

    Early in a run fewer than ``lambda_ + 1`` rounds exist and the mean is
    over those available.
    """
    h = np.asarray(history, dtype=float)
    if h.shape[0] == 0:
        raise UndefinedMetricError("no performance history yet")
    if t is None:
        t = h.shape[0] - 1
    lo = max(0, t - lambda_)
    return h[lo:t + 1].mean(axis=0)


def relative_errors(epsilons):
    eps = np.asarray(epsilons, dtype=float)
    return np.clip(eps - eps.min(), 0.0, 1.0)


@dataclass
class PerformanceLedger:
    """Append-only per-agent error histories (rows are rounds)."""

    lambda_: int = 0
    belief_errors: list = field(default_factory=list)
    signal_errors: list = field(default_factory=list)

    def __post_init__(self):
        if self.lambda_ < 0:
            raise ValueError("lambda must be >= 0")

    def record(self, beliefs, signals, truth):
        b = np.abs(np.asarray(beliefs, dtype=float) - truth)
        s = np.abs(np.asarray(signals, dtype=float) - truth)
        if self.belief_errors and b.shape != self.belief_errors[0].shape:
            raise InvariantViolation("agent count changed mid-run")
        self.belief_errors.append(b)
        self.signal_errors.append(s)

    def __len__(self):
        return len(self.belief_errors)

    def _window(self, history):
        if not history:
            raise UndefinedMetricError("no performance history yet")
        return np.mean(history[-(self.lambda_ + 1):], axis=0)

    def epsilons(self):
        """Current cumulative belief errors (same as cumulative_error on the history)."""
        return self._window(self.belief_errors)

    def signal_epsilons(self):
        return self._window(self.signal_errors)

    def relative(self):
        """(pi, pi_signal): belief-based and private-signal relative errors.

        Signal relative errors are measured against the best private signal,
        over the same window.
        """
        return relative_errors(self.epsilons()), relative_errors(self.signal_epsilons())


@dataclass
class FeedbackView:
    """What agent ``owner`` perceives before rewiring.

    ``pi[j]`` is peer j's relative error for j != owner and the relative
    error of the owner's private signal at ``pi[owner]``. ``pi_self`` is the
    owner's perceived relative error of its own revised belief, which sets
    how eager it is to detach.
    """

    owner: int
    pi: np.ndarray
    pi_self: float
    noise_sd: float = 0.0


def feedback_view(pi, pi_signal_own, owner, eta=0.0, rng=None):
    """Agent ``owner``'s (possibly noisy) view of everyone's relative error.

    With an rng, draws ``len(pi)`` normals for the vector and then one for
    ``pi_self``, whatever eta is; eta == 0 leaves values exact.
    """
    if eta < 0:
        raise ValueError("eta must be >= 0")
    pi = np.asarray(pi, dtype=float)
    view = pi.copy()
    view[owner] = pi_signal_own
    own = pi[owner]
    if rng is not None:
        view = view + rng.normal(0.0, eta, size=view.shape)
        own = own + rng.normal(0.0, eta)
    elif eta > 0:
        raise ValueError("noisy feedback needs an rng")
    return FeedbackView(owner, np.clip(view, 0.0, 1.0), min(1.0, max(0.0, float(own))), eta)


def feedback_views(pi, pi_signal, eta=0.0, rng=None):
    """One view per agent, in agent index order.

    Same values and draw order as calling :func:`feedback_view` for each
    agent in turn, done as a single (n, n + 1) normal draw.
    """
    if eta < 0:
        raise ValueError("eta must be >= 0")
    pi = np.asarray(pi, dtype=float)
    n = len(pi)
    table = np.empty((n, n + 1))
    table[:, :n] = pi
    table[:, n] = pi
    idx = np.arange(n)
    table[idx, idx] = pi_signal
    if rng is not None:
        table += rng.normal(0.0, eta, size=table.shape)
    elif eta > 0:
        raise ValueError("noisy feedback needs an rng")
    np.clip(table, 0.0, 1.0, out=table)
    return [FeedbackView(i, table[i, :n], float(table[i, n]), eta) for i in range(n)]


def detach_probability(pi_own, pi_peer_viewed):
    """Geometric mean of own and viewed peer relative error."""
    return np.sqrt(np.clip(np.multiply(pi_own, pi_peer_viewed), 0.0, 1.0))


def attach_probabilities(view, forbidden=None):
    """Normalised attachment probabilities over every agent except ``forbidden``.

    Weights are ``((1 - pi_j) / (n - sum(pi)))**2``; when every candidate
    weight is zero the result is uniform over candidates. The forbidden
    slot always gets probability 0.
    """
    pi = view.pi if isinstance(view, FeedbackView) else np.asarray(view, dtype=float)
    if forbidden is None and isinstance(view, FeedbackView):
        forbidden = view.owner
    n = len(pi)
    mask = np.ones(n, dtype=bool)
    if forbidden is not None:
        mask[forbidden] = False
    if not mask.any():
        raise UndefinedMetricError("no attachment candidates")
    denom = n - pi.sum()
    w = np.zeros(n)
    if denom > 0:
        w[mask] = ((1.0 - pi[mask]) / denom) ** 2
    total = w.sum()
    if total <= 0:
        w = mask / mask.sum()
    else:
        w = w / total
    return w


def rewire_step(graph, views, rng, check=True):
    """One round of detachment and preferential re-attachment, in place.

    Returns the graph for chaining.
    """
    shares = graph.shares
    n = graph.n
    if len(views) != n:
        raise InvariantViolation(f"expected {n} feedback views, got {len(views)}")
    agents = np.arange(n)
    for i in range(n):
        view = views[i]
        row = shares[i]
        held = np.repeat(agents, row)
        if held.size == 0:
            continue
        beta = np.sqrt(np.minimum(view.pi_self * view.pi[held], 1.0))
        detached = rng.random(held.size) < beta
        k = int(detached.sum())
        if k == 0:
            continue
        np.subtract.at(row, held[detached], 1)
        row += rng.multinomial(k, attach_probabilities(view, forbidden=i))
    if check:
        graph.check()
    return graph
