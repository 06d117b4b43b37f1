"""Counter-based random draws.

Every stochastic decision in the engine is keyed by ``(seed, day, tag, a, b)``
and hashed with the splitmix64 finaliser, so the value of a draw does not
depend on the order in which agents are visited or on how the work is split
between workers. ``a`` and ``b`` are usually agent ids (``b = 0`` when a draw
concerns a single agent; for transmission ``a`` is the infector and ``b`` the
susceptible).
"""
import numpy as np

from ._backend import njit

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / (1 << 53)

TAG_MOVE = 1
TAG_TRANSMIT = 2
TAG_DURATION = 3
TAG_DEATH = 4


def _mix_int(z):
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def day_key(seed, day, tag):
    """Scalar 64-bit key shared by all draws of one (seed, day, tag)."""
    h = _mix_int((int(seed) + GOLDEN) & MASK64)
    h = _mix_int(h ^ ((int(tag) & 0xFF) << 56) ^ (int(day) & ((1 << 56) - 1)))
    return np.uint64(h)


def _mix_np(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def uniform_from_key(key, a, b):
    """Vectorised uniforms in [0, 1) for index arrays ``a`` and ``b``."""
    a = np.asarray(a, dtype=np.int64).astype(np.uint64)
    b = np.asarray(b, dtype=np.int64).astype(np.uint64)
    h = _mix_np(np.uint64(key) ^ a)
    h = _mix_np((h + np.uint64(GOLDEN)) ^ b)
    return (h >> np.uint64(11)).astype(np.float64) * _INV_2_53


def uniform_at(seed, day, tag, a, b=0):
    return uniform_from_key(day_key(seed, day, tag), a, b)


@njit(inline="always")
def _mix_nb(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


@njit(inline="always")
def uniform_nb(key, a, b):
    h = _mix_nb(key ^ np.uint64(a))
    h = _mix_nb((h + np.uint64(GOLDEN)) ^ np.uint64(b))
    return np.float64(h >> np.uint64(11)) * _INV_2_53


def truncated_normal_days(seed, day, ids, mean, sd, lower=10.0, max_tries=64):
    """Integer durations ~ normal(mean, sd) truncated below at ``lower``.

    Box-Muller on keyed uniforms; rejected samples are redrawn with the next
    counter pair. After ``max_tries`` the value is clamped to ``lower``.
    """
    ids = np.asarray(ids, dtype=np.int64)
    out = np.empty(ids.shape, dtype=np.int64)
    if ids.size == 0:
        return out
    key = day_key(seed, day, TAG_DURATION)
    pending = np.arange(ids.size)
    for attempt in range(max_tries):
        u1 = uniform_from_key(key, ids[pending], 2 * attempt)
        u2 = uniform_from_key(key, ids[pending], 2 * attempt + 1)
        z = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
        x = mean + sd * z
        ok = x >= lower
        out[pending[ok]] = np.floor(x[ok] + 0.5).astype(np.int64)
        pending = pending[~ok]
        if pending.size == 0:
            break
    else:
        out[pending] = int(np.ceil(lower))
    return out
