"""Bracketed root finding and the growth-optimal objects built on it.

The scalar solver is a Brent-style method (bisection safeguarded inverse
quadratic interpolation) that never leaves its bracket. All target
functions here are strictly monotone on their brackets, so the bracket
guarantees convergence.

Optimal objects:

* :func:`optimal_share` -- the share of the population that should pick the
  risky option (interior case solved from the first-order condition).
* :func:`optimal_cdf` -- distribution of certainty equivalents under the
  optimal population, ``1 - alpha*(y, x)``.
* :func:`lambda_median` / :func:`agent_ce` -- quantiles of that distribution.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import DegenerateLotteryError, MaxIterExceededError, NoSignChangeError
from .lottery import (
    ChoiceProblem,
    Lottery,
    arithmetic_mean,
    growth_rate,
    growth_rate_slope,
    harmonic_mean,
)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class RootConfig:
    abs_tol_x: float = 1e-12
    abs_tol_f: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not (self.abs_tol_x > 0 and self.abs_tol_f > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


DEFAULT_ROOT_CONFIG = RootConfig()


def solve_bracketed(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    cfg: RootConfig = DEFAULT_ROOT_CONFIG,
) -> float:
    """Find a root of ``f`` in ``[lo, hi]``.

    Stops when ``|f(x)| <= cfg.abs_tol_f`` or the bracket is narrower than
    ``cfg.abs_tol_x``. Infinite function values at the endpoints are allowed;
    the iteration falls back to bisection whenever interpolation is not
    trustworthy.

    Raises:
        NoSignChangeError: ``f(lo)`` and ``f(hi)`` have the same strict sign.
        MaxIterExceededError: no convergence within ``cfg.max_iter`` steps.
    """
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if math.isnan(fa) or math.isnan(fb):
        raise NoSignChangeError(f"f is NaN at a bracket endpoint ({fa!r}, {fb!r})")
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise NoSignChangeError(f"f({a!r})={fa!r} and f({b!r})={fb!r} share a sign")

    c, fc = a, fa
    d = e = b - a
    for _ in range(cfg.max_iter):
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * _EPS * abs(b) + 0.5 * cfg.abs_tol_x
        m = 0.5 * (c - b)
        if abs(m) <= tol or abs(fb) <= cfg.abs_tol_f:
            return b

        use_bisect = abs(e) < tol or abs(fa) <= abs(fb) or not (
            math.isfinite(fa) and math.isfinite(fb) and math.isfinite(fc)
        )
        if not use_bisect:
            s = fb / fa
            if a == c:
                P = 2.0 * m * s
                Q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                P = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                Q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if P > 0:
                Q = -Q
            else:
                P = -P
            if 2.0 * P < min(3.0 * m * Q - abs(tol * Q), abs(e * Q)) and math.isfinite(P / Q):
                e, d = d, P / Q
            else:
                use_bisect = True
        if use_bisect:
            d = e = m

        a, fa = b, fb
        b = b + (d if abs(d) > tol else math.copysign(tol, m))
        fb = f(b)
        if math.isnan(fb):
            raise NoSignChangeError(f"f returned NaN at {b!r}")
        if fb == 0.0:
            return b
    raise MaxIterExceededError(f"no convergence after {cfg.max_iter} iterations")


def bisect_array(
    f: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    iters: int = 64,
    rtol: float = 1e-15,
) -> np.ndarray:
    """Elementwise bisection for an increasing ``f`` with ``f(lo) <= 0 <= f(hi)``.

    The caller owns the sign convention; elements are never checked. An
    element freezes once its bracket is narrower than ``rtol * max(1, |mid|)``,
    so each result depends only on its own inputs, not on its neighbours.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        live = ~(hi - lo <= rtol * np.maximum(1.0, np.abs(mid)))
        if not live.any():
            break
        up = f(mid) > 0
        hi = np.where(live & up, mid, hi)
        lo = np.where(live & ~up, mid, lo)
    return 0.5 * (lo + hi)


class Boundary(enum.Enum):
    ALL_SAFE = "AllSafe"
    ALL_RISKY = "AllRisky"
    INTERIOR = "Interior"


@dataclass(frozen=True)
class OptimalShareResult:
    alpha_star: float
    boundary: Boundary
    growth_at_optimum: float


def optimal_share(problem: ChoiceProblem, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> OptimalShareResult:
    """Growth-maximizing risky share for ``problem``.

    All-safe iff ``E[y] <= mu``; all-risky iff ``HM[y] >= mu``; otherwise the
    unique interior zero of the log-growth slope. A risky lottery that is
    identically ``mu`` resolves to all-safe.
    """
    y, mu = problem.risky, problem.safe
    if arithmetic_mean(y) <= mu:
        return OptimalShareResult(0.0, Boundary.ALL_SAFE, mu)
    if harmonic_mean(y) >= mu:
        return OptimalShareResult(1.0, Boundary.ALL_RISKY, growth_rate(1.0, problem))
    # The slope falls at least this fast in alpha, so scaling the function
    # tolerance by it keeps the share error within abs_tol_f even for
    # lotteries with tiny spread.
    top = max(mu, y.values[-1])
    curvature = math.fsum(p * ((v - mu) / top) ** 2 for v, p in y.items())
    slope_cfg = replace(cfg, abs_tol_f=max(cfg.abs_tol_f * min(1.0, curvature), 1e-300))
    alpha = solve_bracketed(lambda x: growth_rate_slope(x, problem), 0.0, 1.0, slope_cfg)
    return OptimalShareResult(alpha, Boundary.INTERIOR, growth_rate(alpha, problem))


def share_equation_residual(x: float, problem: ChoiceProblem) -> float:
    """``HM[1 + x (y/mu - 1)] - 1``; zero at the interior optimal share (and at 0)."""
    mu = problem.safe
    acc = math.fsum(p / (1.0 + x * (v / mu - 1.0)) for v, p in problem.risky.items())
    return 1.0 / acc - 1.0


def _require_nondegenerate(y: Lottery) -> None:
    if y.is_degenerate:
        raise DegenerateLotteryError("operation requires a nondegenerate lottery")


def optimal_cdf(y: Lottery, x: float, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
    """CDF at ``x`` of certainty equivalents for ``y`` in the optimal population."""
    _require_nondegenerate(y)
    return 1.0 - optimal_share(ChoiceProblem(y, x), cfg).alpha_star


def _quantile_residual(x: float, a: float, y: Lottery) -> float:
    # E[(x - y) / (a x + (1 - a) y)]: increasing in x, vanishes where
    # HM[a + (1 - a) y / x] = 1. Written without the (1 - a) factor so it
    # stays well scaled as a -> 0 or 1.
    terms = []
    for v, p in y.items():
        den = a * x + (1.0 - a) * v
        terms.append(p / a if den == 0.0 else p * (x - v) / den)
    return math.fsum(terms)


def agent_ce(a: float, y: Lottery, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
    """Certainty equivalent of ``y`` for agent ``a`` of the optimal monotone population.

    Agent 0 values ``y`` at its harmonic mean, agent 1 at its arithmetic mean,
    and agent ``a`` in between at the ``a``-quantile of the optimal CE
    distribution. With a zero outcome of probability ``p0`` the lowest
    ``p0`` agents value ``y`` at zero.
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"agent index must be in [0, 1], got {a!r}")
    if y.is_degenerate:
        return y.values[0]
    if a == 0.0:
        return harmonic_mean(y)
    if a == 1.0:
        return arithmetic_mean(y)
    lo, hi = harmonic_mean(y), arithmetic_mean(y)
    # rounding can close the bracket for nearly degenerate lotteries
    if _quantile_residual(lo, a, y) >= 0.0:
        return lo
    if _quantile_residual(hi, a, y) <= 0.0:
        return hi
    # locate x relative to the width of the CE distribution's support
    width = hi - lo
    ce_cfg = replace(cfg, abs_tol_x=min(cfg.abs_tol_x, 1e-12 * width), abs_tol_f=1e-300)
    return solve_bracketed(lambda x: _quantile_residual(x, a, y), lo, hi, ce_cfg)


def lambda_median(y: Lottery, lam: float, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
    """The ``lam``-quantile of the optimal CE distribution for nondegenerate ``y``."""
    _require_nondegenerate(y)
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda must be in (0, 1), got {lam!r}")
    return agent_ce(lam, y, cfg)


def median_agent_ce(y: Lottery, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
    return agent_ce(0.5, y, cfg)


def binary_optimal_share(p: np.ndarray, low: np.ndarray, high: np.ndarray) -> np.ndarray:
    """Closed-form optimal share for binary lotteries against ``mu = 1``.

    ``p`` is the probability of ``high``. For ``low < 1 < high`` the slope
    condition is linear in the share, giving
    ``(E[y] - 1) / ((high - 1) (1 - low))`` clipped by the two boundary tests.
    """
    p, low, high = (np.asarray(v, dtype=float) for v in (p, low, high))
    mean = p * high + (1.0 - p) * low
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        inv_hm = p / high + (1.0 - p) / low
        interior = (mean - 1.0) / ((high - 1.0) * (1.0 - low))
    alpha = np.where(mean <= 1.0, 0.0, np.where(inv_hm <= 1.0, 1.0, interior))
    return np.clip(alpha, 0.0, 1.0)
