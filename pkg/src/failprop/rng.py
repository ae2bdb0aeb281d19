"""Seed derivation for reproducible replica streams.

All randomness in an experiment flows from one root 64-bit seed. Replica
streams (Monte Carlo runs, sweep grid points) get their own seeds through
`derive_seed`, which is a pure function of (root seed, index): the i-th
derived seed equals the (i+1)-th output of a splitmix64 generator whose
state starts at the root seed. Replicas are therefore decorrelated and the
whole derivation is stable across platforms and parallelism schedules.
"""

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """The splitmix64 output mix: maps a 64-bit value to a well-mixed one."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_seed(base_seed: int, index: int) -> int:
    """Seed for replica `index` (0-based) under root seed `base_seed`."""
    if index < 0:
        raise ValueError("replica index must be >= 0")
    return splitmix64((base_seed + (index + 1) * _GOLDEN) & _MASK64)
