"""Ground truth, private signals, shocks and scatter-plot tasks."""
import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .exceptions import ConfigurationError, DegenerateTaskError

LABELS = ("High", "Medium", "Low")

# Number of uniform draws next_truth consumes per call.
TRUTH_DRAWS = 1


@dataclass(frozen=True)
class QualityLevel:
    """Signal quality class.

    ``noise_sd`` and ``bias`` drive the gaussian signal channel; ``n_points``,
    ``outlier_count`` and ``nonlinear`` drive the scatter channel.
    """

    label: str
    noise_sd: float
    bias: float = 0.0
    n_points: int = 50
    outlier_count: int = 0
    nonlinear: bool = False

    def __post_init__(self):
        if self.noise_sd < 0:
            raise ConfigurationError(f"{self.label}: noise_sd must be >= 0")
        if self.n_points < 3:
            raise ConfigurationError(f"{self.label}: n_points must be >= 3")
        if not 0 <= self.outlier_count < self.n_points:
            raise ConfigurationError(f"{self.label}: need 0 <= outlier_count < n_points")


def default_quality_levels():
    # Bias gaps large enough that two-stage averaging leaves the quality
    # levels distinguishable in performance feedback; noise large enough
    # that a longer memory pays off between rare shocks.
    return (
        QualityLevel("High", noise_sd=0.10, bias=0.0, n_points=100, outlier_count=0),
        QualityLevel("Medium", noise_sd=0.25, bias=0.20, n_points=30, outlier_count=2),
        QualityLevel("Low", noise_sd=0.40, bias=0.40, n_points=12, outlier_count=3, nonlinear=True),
    )


def check_quality_order(levels):
    """High, Medium and Low must be strictly ordered by noise_sd."""
    by_label = {q.label: q for q in levels}
    if set(by_label) != set(LABELS):
        raise ConfigurationError(f"quality levels must be exactly {LABELS}")
    sds = [by_label[lab].noise_sd for lab in LABELS]
    if not sds[0] < sds[1] < sds[2]:
        raise ConfigurationError("need High.noise_sd < Medium.noise_sd < Low.noise_sd")


def balanced_assignment(n, levels, rng):
    """Spread levels as evenly as possible over n agents, in random order."""
    base = [levels[i % len(levels)] for i in range(n)]
    return tuple(base[k] for k in rng.permutation(n))


@dataclass(frozen=True)
class WorldRound:
    round: int
    truth: float
    quality_of: Tuple[QualityLevel, ...]

    def __post_init__(self):
        if not 0.0 <= self.truth <= 1.0:
            raise ConfigurationError(f"truth {self.truth} outside [0, 1]")

    @property
    def labels(self):
        return tuple(q.label for q in self.quality_of)


@dataclass(frozen=True)
class ShockSchedule:
    """When quality assignments get reshuffled.

    ``mode`` is ``"none"``, ``"deterministic"`` or ``"bernoulli"``. A
    deterministic schedule uses ``rounds`` when given, otherwise a shock
    every ``rho`` rounds (at rounds rho+1, 2*rho+1, ...). A bernoulli
    schedule shocks each round after the first with probability 1/rho.
    Rounds are 1-indexed; a shock at round r means the new assignment is
    in force from round r on.
    """

    mode: str = "deterministic"
    rounds: Tuple[int, ...] = (11,)
    rho: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ("none", "deterministic", "bernoulli"):
            raise ConfigurationError(f"unknown shock mode {self.mode!r}")
        if self.rho is not None and self.rho < 1:
            raise ConfigurationError("rho must be >= 1")
        if any(b <= a for a, b in zip(self.rounds, self.rounds[1:])):
            raise ConfigurationError("shock rounds must be strictly increasing")
        if self.mode == "bernoulli" and self.rho is None:
            raise ConfigurationError("bernoulli shocks need rho")

    def is_shock(self, round_, rng):
        """Whether a shock hits at ``round_``.

        Always consumes exactly one uniform draw from ``rng`` so that the
        shock stream position depends only on the round count.
        """
        u = rng.random()
        if self.mode == "none" or round_ <= 1:
            return False
        if self.mode == "bernoulli":
            return bool(u < 1.0 / self.rho)
        if self.rounds:
            return round_ in self.rounds
        if self.rho is None:
            return False
        return (round_ - 1) % int(self.rho) == 0


@dataclass
class ScatterTask:
    points: np.ndarray
    target_correlation: float
    quality: QualityLevel

    def to_csv(self, path):
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y"])
            for x, y in self.points:
                writer.writerow([format(x, ".17g"), format(y, ".17g")])


def next_truth(rng, bounds=(0.1, 0.9)):
    """Uniform truth in ``bounds``; consumes TRUTH_DRAWS draws."""
    lo, hi = bounds
    if not 0.0 <= lo < hi <= 1.0:
        raise ConfigurationError(f"invalid truth bounds {bounds!r}")
    return float(lo + (hi - lo) * rng.random())


def draw_signal(truth, quality, rng):
    """Biased, noisy private signal clamped to [0, 1]."""
    # one normal draw per call, even when noise_sd is 0
    noise = rng.normal(0.0, quality.noise_sd)
    return float(np.clip(truth + quality.bias + noise, 0.0, 1.0))


def draw_signals(truth, qualities, rng):
    """One gaussian signal per agent, in agent index order."""
    return np.array([draw_signal(truth, q, rng) for q in qualities])


def apply_shock(state, rng):
    """Reshuffle quality assignments by a uniform random permutation."""
    n = len(state.quality_of)
    if n < 2:
        raise ConfigurationError("a shock needs at least 2 agents")
    perm = rng.permutation(n)
    return replace(state, quality_of=tuple(state.quality_of[k] for k in perm))


# Outliers sit this many standard units off the regression line.
OUTLIER_OFFSET = 3.0


def generate_scatter(target_correlation, quality, rng):
    """Sample a scatter-plot task with a given population correlation.

    Inliers come from a standard bivariate normal built as
    ``y = r*x + sqrt(1 - r^2)*z``. Each outlier has ``x ~ N(0, 1)`` and sits
    ``OUTLIER_OFFSET`` units above or below the line ``y = r*x`` (random
    side). With ``quality.nonlinear`` the y coordinates are warped by
    ``exp``, which is monotone but bends the cloud.
    """
    r = float(target_correlation)
    if not -1.0 <= r <= 1.0:
        raise ConfigurationError("target correlation must be in [-1, 1]")
    m = quality.n_points
    x = rng.standard_normal(m)
    z = rng.standard_normal(m)
    y = r * x + np.sqrt(1.0 - r * r) * z
    if quality.outlier_count:
        k = quality.outlier_count
        ox = rng.standard_normal(k)
        side = np.where(rng.random(k) < 0.5, -1.0, 1.0)
        x = np.concatenate([x, ox])
        y = np.concatenate([y, r * ox + side * OUTLIER_OFFSET])
    if quality.nonlinear:
        y = np.exp(y)
    return ScatterTask(np.column_stack([x, y]), r, quality)


def sample_correlation(task):
    pts = np.asarray(task.points if isinstance(task, ScatterTask) else task, dtype=float)
    if len(pts) < 2:
        raise DegenerateTaskError("need at least two points")
    dx = pts[:, 0] - pts[:, 0].mean()
    dy = pts[:, 1] - pts[:, 1].mean()
    sxx, syy = dx @ dx, dy @ dy
    if sxx == 0 or syy == 0:
        raise DegenerateTaskError("zero variance in scatter task")
    return float(np.clip((dx @ dy) / np.sqrt(sxx * syy), -1.0, 1.0))


def scatter_signal(truth, quality, rng):
    """Signal read off a scatter task whose correlation is the truth."""
    return float(np.clip(sample_correlation(generate_scatter(truth, quality, rng)), 0.0, 1.0))


SIGNAL_CHANNELS = {"gaussian": draw_signal, "scatter": scatter_signal}


class Environment:
    """Stateful round generator: truth, signals and shocks for one run."""

    def __init__(self, n, levels, shocks, rngs, channel="gaussian", truth_bounds=(0.1, 0.9)):
        if channel not in SIGNAL_CHANNELS:
            raise ConfigurationError(f"unknown signal channel {channel!r}")
        self.n = n
        self.shocks = shocks
        self.channel = channel
        self.truth_bounds = truth_bounds
        self._truth_rng = rngs["truth"]
        self._signal_rng = rngs["signals"]
        self._shock_rng = rngs["shocks"]
        self._assignment = balanced_assignment(n, levels, self._shock_rng)
        self.round = 0

    def step(self):
        """Advance one round; returns (WorldRound, signals, shocked)."""
        self.round += 1
        truth = next_truth(self._truth_rng, self.truth_bounds)
        state = WorldRound(self.round, truth, self._assignment)
        shocked = self.shocks.is_shock(self.round, self._shock_rng)
        if shocked:
            state = apply_shock(state, self._shock_rng)
            self._assignment = state.quality_of
        draw = SIGNAL_CHANNELS[self.channel]
        signals = np.array([draw(truth, q, self._signal_rng) for q in state.quality_of])
        return state, signals, shocked
