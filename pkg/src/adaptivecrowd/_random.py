"""Seeding utilities.

Every run owns a tree of counter-based (Philox) generators derived from a
single integer seed through ``numpy.random.SeedSequence``. Each purpose gets
its own child stream, so drawing more or fewer numbers for one purpose
(e.g. a shock) never moves the position of another stream (e.g. the truth).

Stream layout for a run seed ``s``::

    SeedSequence(s).spawn(len(STREAMS))  ->  one child per name in STREAMS

Sweep replications use ``SeedSequence([base_seed, cell_index, replication])``
and fold its first 64 bits of state into a plain integer run seed.
"""
import numpy as np

STREAMS = ("truth", "signals", "shocks", "graph", "feedback", "rewire")


def make_rng(seed):
    """Return a Philox-backed Generator from an int, SeedSequence or Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def run_streams(seed):
    """Named, independent generators for one run."""
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: make_rng(child) for name, child in zip(STREAMS, children)}


def derive_seed(base_seed, cell_index, replication):
    """Deterministic 64-bit run seed for one (cell, replication) of a sweep."""
    ss = np.random.SeedSequence([int(base_seed), int(cell_index), int(replication)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
