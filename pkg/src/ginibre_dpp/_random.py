"""Seeded random streams.

Every stream is a :class:`numpy.random.Generator` over PCG64 (128-bit state,
64-bit output).  Independent replications get child streams spawned from a
single :class:`numpy.random.SeedSequence`, so results do not depend on how
replications are scheduled across workers.
"""
import numpy as np


def as_generator(seed):
    """Return ``(generator, seed_or_None)`` for an int, a SeedSequence or a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed, None
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed)), _entropy_int(seed)
    if seed is None:
        ss = np.random.SeedSequence()
        return np.random.Generator(np.random.PCG64(ss)), _entropy_int(ss)
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed)), seed


def spawn_seeds(seed, count):
    """Child seed sequences for ``count`` independent replications."""
    return np.random.SeedSequence(int(seed)).spawn(int(count))


def fresh_seed():
    """A 64-bit seed drawn from OS entropy (echoed back to the user)."""
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])


def _entropy_int(ss):
    ent = ss.entropy
    if isinstance(ent, (int, np.integer)) and not ss.spawn_key:
        return int(ent) if int(ent) < 2**64 else None
    return None
