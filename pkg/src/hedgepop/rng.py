"""Counter-based uniform streams.

Every uniform is a pure function of ``(seed, generation, attempt, lane)``
pushed through the SplitMix64 finalizer, so draws for one generation do not
depend on how generations are split across blocks or workers.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_ATTEMPT_KEY = np.uint64(0xD1B54A32D192ED03)
_LANE_KEY = np.uint64(0x8CB92BA72F3D8DD7)

LANES = 4


def mix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on a ``uint64`` array (wrapping arithmetic)."""
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = (x ^ (x >> np.uint64(30))) * _M1
        x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def _seed_key(seed: int) -> np.uint64:
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return mix64(np.array([int(seed)], dtype=np.uint64) + _GOLDEN)[0]


def uniforms(seed: int, generations, attempt=0, lanes: int = 3) -> np.ndarray:
    """Uniforms on the open interval (0, 1), shape ``(lanes, len(generations))``.

    ``attempt`` may be a scalar or an array aligned with ``generations``;
    rejection samplers bump it per generation to get fresh draws.
    """
    if not 1 <= lanes <= LANES:
        raise ValueError(f"at most {LANES} lanes per draw")
    gens = np.asarray(generations, dtype=np.uint64).reshape(-1)
    att = np.broadcast_to(np.asarray(attempt, dtype=np.uint64), gens.shape)
    key = _seed_key(seed)
    with np.errstate(over="ignore"):
        base = mix64(key ^ (gens * _GOLDEN))
        base = mix64(base + att * _ATTEMPT_KEY)
        out = np.empty((lanes, gens.size))
        for lane in range(lanes):
            bits = mix64(base + np.uint64(lane + 1) * _LANE_KEY)
            # 52 bits + 1/2 keeps both endpoints out and is exact in a double
            out[lane] = ((bits >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52
    return out
