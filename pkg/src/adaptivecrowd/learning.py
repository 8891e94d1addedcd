"""Belief formation: solo identity and repeated DeGroot averaging."""
import numpy as np

from .exceptions import InvariantViolation


def degroot(M, signals, stages=2):
    """Apply ``stages`` neighbour-averaging passes of the same matrix M."""
    M = np.asarray(M, dtype=float)
    p = np.asarray(signals, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[1] != p.shape[0]:
        raise InvariantViolation(f"shape mismatch: M {M.shape}, signals {p.shape}")
    if p.size == 0:
        return p.copy()
    # averaging offsets from the minimum keeps equal inputs exactly fixed;
    # the clip only removes last-ulp drift past the convex hull
    lo, hi = p.min(), p.max()
    for _ in range(stages):
        p = np.clip(lo + M @ (p - lo), lo, hi)
    return p


def degroot_two_stage(M, signals):
    """Beliefs ``M @ (M @ signals)``."""
    return degroot(M, signals, stages=2)


def solo_beliefs(signals):
    return np.array(signals, dtype=float, copy=True)
