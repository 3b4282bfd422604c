"""Per-generation scenario samplers (binary risky lottery against ``mu = 1``).

Samplers:

* ``main`` -- ``p, q, r`` i.i.d. uniform; high outcome ``1/r`` with
  probability ``p``, low outcome ``q``.
* ``gm-ratio`` -- ``p``, ``GM[y]/mu`` and ``mu/E[y]`` i.i.d. uniform; the
  outcomes are recovered by one-dimensional root finding.
* ``cond`` -- rejection sampling of a base sampler on the event
  ``GM <= mu <= E`` or on a band of ``(mu - GM) / (E - GM)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import rng
from .errors import RejectionBudgetExceeded, SpecParseError
from .lottery import ChoiceProblem
from .preferences import BinaryBlock
from .solver import DEFAULT_ROOT_CONFIG, RootConfig, bisect_array, solve_bracketed

REJECTION_BUDGET = 1_000_000
GM_MU_E = "gm-mu-e"

Band = Union[tuple[int, int], str]


def main_from_uniforms(p, q, r):
    """Map uniforms to ``(p, low, high)`` with ``low = q`` and ``high = 1/r``."""
    p, q, r = (np.asarray(v, dtype=float) for v in (p, q, r))
    return p, q, 1.0 / r


def log_low_from_moments(p: float, gm: float, mean: float, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
    """``ln low`` of the two-point lottery with ``Pr[high] = p`` and the given GM and mean.

    Requires ``0 < gm < mean``. The value can be far below ``ln`` of the
    smallest double when ``p`` is close to one.
    """
    if not 0.0 < gm < mean:
        raise ValueError(f"need 0 < GM < E, got GM={gm!r}, E={mean!r}")
    log_gm = math.log(gm)
    q = 1.0 - p

    def residual(t: float) -> float:
        return p * math.log((mean - q * math.exp(t)) / p) + q * t - log_gm

    # where low is negligible the residual is zero up to rounding; one unit
    # lower it is about -q (the residual rises with slope q (1 - low/high))
    lo = (log_gm - p * math.log(mean / p)) / q - 1.0
    return solve_bracketed(residual, lo, math.log(mean), cfg)


def binary_from_moments(p: float, gm: float, mean: float, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> tuple[float, float]:
    """``(low, high)`` with ``Pr[high] = p`` and the given geometric and arithmetic means.

    ``low`` underflows to 0.0 when its log is below about -745; use
    :func:`log_low_from_moments` to keep it exactly.
    """
    low = math.exp(log_low_from_moments(p, gm, mean, cfg))
    return low, (mean - (1.0 - p) * low) / p


def _binary_from_moments_array(p, gm, mean):
    q = 1.0 - p
    log_gm = np.log(gm)

    def residual(t):
        with np.errstate(over="ignore", invalid="ignore"):
            return p * np.log((mean - q * np.exp(t)) / p) + q * t - log_gm

    lo = (log_gm - p * np.log(mean / p)) / q - 1.0
    t = bisect_array(residual, lo, np.log(mean), iters=256)
    low = np.exp(t)
    return low, (mean - q * low) / p, t


def accepts(band: Band, gm, mean):
    """Whether ``(GM, E)`` (with ``mu = 1``) lies in the conditioning event."""
    gm, mean = np.asarray(gm, dtype=float), np.asarray(mean, dtype=float)
    inside = (gm <= 1.0) & (1.0 <= mean)
    if band == GM_MU_E:
        return inside
    k, i = band
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (1.0 - gm) / (mean - gm)
    return (ratio >= (i - 1) / k) & (ratio <= i / k)


def _check_band(band: Band) -> None:
    if band == GM_MU_E:
        return
    if not (isinstance(band, tuple) and len(band) == 2):
        raise ValueError(f"bad band {band!r}")
    k, i = band
    if not (2 <= k <= 5 and 1 <= i <= k):
        raise ValueError(f"band needs 2 <= k <= 5 and 1 <= i <= k, got {band!r}")


@dataclass(frozen=True)
class ScenarioSampler:
    """Deterministic generator of one choice problem per generation index.

    Attributes:
        kind: ``"main"``, ``"gm-ratio"`` or ``"cond"``.
        seed: 64-bit unsigned seed.
        base: base sampler kind for ``"cond"``.
        band: ``(k, i)`` or ``"gm-mu-e"`` for ``"cond"``.
    """

    kind: str = "main"
    seed: int = 0
    base: str = "main"
    band: Optional[Band] = None

    def __post_init__(self):
        if self.kind not in ("main", "gm-ratio", "cond"):
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.kind == "cond":
            if self.base not in ("main", "gm-ratio"):
                raise ValueError(f"unknown base sampler {self.base!r}")
            _check_band(self.band)

    @property
    def label(self) -> str:
        if self.kind != "cond":
            return self.kind
        band = self.band if self.band == GM_MU_E else f"{self.band[0]},{self.band[1]}"
        return f"cond:{band}"

    def _draw(self, kind: str, gens: np.ndarray, attempt: np.ndarray, cfg: RootConfig):
        u = rng.uniforms(self.seed, gens, attempt, lanes=3)
        if kind == "main":
            p, low, high = main_from_uniforms(u[0], u[1], u[2])
            return p, low, high, np.log(low)
        p, gm, mean = u[0], u[1], 1.0 / u[2]
        return (p, *_binary_from_moments_array(p, gm, mean))

    def block(self, start: int, stop: int, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> BinaryBlock:
        """Problems for generations ``start .. stop - 1``."""
        gens = np.arange(start, stop, dtype=np.uint64)
        n = gens.size
        kind = self.base if self.kind == "cond" else self.kind
        p, low, high, log_low = (np.empty(n) for _ in range(4))
        pending = np.arange(n)
        attempt = 0
        while pending.size:
            if attempt >= REJECTION_BUDGET:
                raise RejectionBudgetExceeded(
                    f"{pending.size} generation(s) rejected {REJECTION_BUDGET} times in a row"
                )
            att = np.full(pending.size, attempt, dtype=np.uint64)
            dp, dlow, dhigh, dlog = self._draw(kind, gens[pending], att, cfg)
            ok = dlow < dhigh
            if self.kind == "cond":
                b = BinaryBlock(dp, dlow, dhigh, dlog)
                ok &= accepts(self.band, b.geometric, b.mean)
            idx = pending[ok]
            p[idx], low[idx], high[idx], log_low[idx] = dp[ok], dlow[ok], dhigh[ok], dlog[ok]
            pending = pending[~ok]
            attempt += 1
        return BinaryBlock(p, low, high, log_low)

    def problem(self, generation: int, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> ChoiceProblem:
        return self.block(generation, generation + 1, cfg).problem(0)


def sample_main(seed: int, generation: int) -> ChoiceProblem:
    return ScenarioSampler("main", seed).problem(generation)


def sample_gm_ratio(seed: int, generation: int, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> ChoiceProblem:
    return ScenarioSampler("gm-ratio", seed).problem(generation, cfg)


def sample_conditioned(
    seed: int, generation: int, base: str, band: Band, cfg: RootConfig = DEFAULT_ROOT_CONFIG
) -> ChoiceProblem:
    return ScenarioSampler("cond", seed, base=base, band=band).problem(generation, cfg)


def parse_sampler(text: str, seed: int = 0, base: str = "main") -> ScenarioSampler:
    """Parse ``main | gm-ratio | cond:<k>,<i> | cond:gm-mu-e``."""
    text = text.strip()
    if text in ("main", "gm-ratio"):
        return ScenarioSampler(text, seed)
    head, sep, tail = text.partition(":")
    if head != "cond" or not sep:
        raise SpecParseError(f"unknown sampler {text!r}")
    if tail == GM_MU_E:
        band: Band = GM_MU_E
    else:
        try:
            k, i = (int(v) for v in tail.split(","))
        except ValueError:
            raise SpecParseError(f"bad band in {text!r}; expected cond:<k>,<i>") from None
        band = (k, i)
    try:
        return ScenarioSampler("cond", seed, base=base, band=band)
    except ValueError as exc:
        raise SpecParseError(str(exc)) from None
