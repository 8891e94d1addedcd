"""Adaptive wisdom-of-crowds simulation: DeGroot learning on a rewiring network."""
from .config import RunConfig, load_config
from .environment import (QualityLevel, ScatterTask, ShockSchedule, WorldRound, apply_shock,
                          draw_signal, generate_scatter, next_truth, sample_correlation)
from .estimator import AdaptiveCrowd
from .exceptions import (ConfigurationError, DegenerateTaskError, InvariantViolation,
                         UndefinedMetricError)
from .harness import RunTrace, emit_summary, emit_trace, run, sweep
from .learning import degroot_two_stage, solo_beliefs
from .metrics import (mean_variance_curve, normalized_error, rank_members,
                      resistance_to_influence, top_k_estimate, wc_error, wdn_error)
from .network import AttentionGraph, build_matrix, freeman_centralization, in_degree, init_random
from .rewiring import (PerformanceLedger, FeedbackView, attach_probabilities, cumulative_error,
                       detach_probability, feedback_view, relative_errors, rewire_step)

__version__ = "0.1.0"
