"""Run configuration and the flat ``key = value`` config file format.

Example file::

    # experiment-shaped defaults, 100 rounds
    condition = dynamic
    rounds = 100
    lambda = 5
    shock_mode = deterministic
    shock_rounds = [100, 200]
    low_bias = 0.12

Values are parsed as JSON when possible (numbers, ``true``/``false``,
``null``, lists, quoted strings) and as bare strings otherwise, then
coerced to the field's type. Quality levels are set through
``<level>_<attribute>`` keys such as ``high_noise_sd`` or
``medium_outlier_count``. Unknown keys are errors.
"""
import dataclasses
import json
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from .environment import (LABELS, QualityLevel, ShockSchedule, check_quality_order,
                          default_quality_levels)
from .exceptions import ConfigurationError

CONDITIONS = ("solo", "static", "dynamic")
_QUALITY_ATTRS = ("noise_sd", "bias", "n_points", "outlier_count", "nonlinear")
# config-file spelling -> dataclass field
_ALIASES = {"lambda": "lambda_", "agents": "n"}


@dataclass(frozen=True)
class RunConfig:
    condition: str = "dynamic"
    n: int = 12
    rounds: int = 20
    kappa: int = 3
    self_weight: int = 3
    lambda_: int = 5
    eta: float = 0.0
    stages: int = 2
    rewire: bool = True
    shock_mode: str = "deterministic"
    shock_rounds: Tuple[int, ...] = (11,)
    rho: Optional[float] = None
    signal_channel: str = "gaussian"
    centralization: str = "binary"
    truth_lo: float = 0.1
    truth_hi: float = 0.9
    quality: Tuple[QualityLevel, ...] = field(default_factory=default_quality_levels)
    seed: int = 0
    replications: int = 1

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise ConfigurationError(f"condition must be one of {CONDITIONS}")
        if self.n < 2:
            raise ConfigurationError("need at least 2 agents")
        if self.rounds < 1:
            raise ConfigurationError("rounds must be >= 1")
        if self.condition != "solo" and not 1 <= self.kappa <= self.n - 1:
            raise ConfigurationError(f"kappa must be in [1, {self.n - 1}]")
        if self.self_weight < 0 or self.lambda_ < 0 or self.eta < 0 or self.stages < 0:
            raise ConfigurationError("self_weight, lambda, eta and stages must be >= 0")
        if self.self_weight == 0 and self.condition != "solo" and self.kappa == 0:
            raise ConfigurationError("influence rows would be empty")
        if self.centralization not in ("binary", "shares"):
            raise ConfigurationError("centralization must be 'binary' or 'shares'")
        if self.seed < 0:
            raise ConfigurationError("seed must be non-negative")
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")
        if self.signal_channel not in ("gaussian", "scatter"):
            raise ConfigurationError("signal_channel must be 'gaussian' or 'scatter'")
        if not 0.0 <= self.truth_lo < self.truth_hi <= 1.0:
            raise ConfigurationError("need 0 <= truth_lo < truth_hi <= 1")
        check_quality_order(self.quality)
        self.shock_schedule()

    def shock_schedule(self):
        return ShockSchedule(self.shock_mode, tuple(self.shock_rounds), self.rho)

    def quality_levels(self):
        by_label = {q.label: q for q in self.quality}
        return tuple(by_label[lab] for lab in LABELS)


def _coerce(name, value, kind):
    try:
        if kind is bool:
            if isinstance(value, str):
                if value.lower() not in ("true", "false"):
                    raise ValueError(value)
                return value.lower() == "true"
            return bool(value)
        if kind is int:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if kind is float:
            return float(value)
        if kind == Optional[float]:
            return None if value in (None, "none", "None") else float(value)
        if kind == Tuple[int, ...]:
            if isinstance(value, (int, float)):
                value = [value]
            return tuple(int(v) for v in value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"bad value for {name}: {value!r}") from None


def updated(config, values):
    """Return a copy of ``config`` with flat key/value overrides applied."""
    types = {f.name: f.type for f in dataclasses.fields(RunConfig)}
    changes = {}
    quality = {q.label: dataclasses.asdict(q) for q in config.quality}
    for key, value in values.items():
        name = _ALIASES.get(key, key)
        level, _, attr = key.partition("_")
        if level.capitalize() in quality and attr in _QUALITY_ATTRS:
            kind = {"n_points": int, "outlier_count": int, "nonlinear": bool}.get(attr, float)
            quality[level.capitalize()][attr] = _coerce(key, value, kind)
        elif name in types and name != "quality":
            changes[name] = _coerce(key, value, types[name])
        else:
            raise ConfigurationError(f"unknown config key {key!r}")
    if any(dataclasses.asdict(q) != quality[q.label] for q in config.quality):
        changes["quality"] = tuple(QualityLevel(**quality[lab]) for lab in LABELS)
    return replace(config, **changes)


def parse_config_text(text):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, value = key.strip(), value.strip()
        try:
            values[key] = json.loads(value)
        except json.JSONDecodeError:
            values[key] = value
    return values


def load_config(path, base=None):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    return updated(base or RunConfig(), parse_config_text(text))
