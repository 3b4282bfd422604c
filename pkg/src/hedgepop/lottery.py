"""Finite-support lotteries over offspring counts and the growth-rate functional.

A :class:`Lottery` is stored in canonical form: outcome values strictly
increasing, duplicates (within a relative tolerance) merged, probabilities
positive and summing to one. Safe alternatives are degenerate lotteries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .errors import InvalidLotteryError

MERGE_RTOL = 1e-12
NORMALIZE_TOL = 1e-9

OutcomeSpec = Union[Mapping[float, float], Iterable[tuple[float, float]]]


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= MERGE_RTOL * max(abs(a), abs(b))


def _canonicalize(pairs: list[tuple[float, float]]) -> tuple[tuple[float, ...], tuple[float, ...]]:
    if not pairs:
        raise InvalidLotteryError("a lottery needs at least one outcome")
    for v, p in pairs:
        if not (math.isfinite(v) and v >= 0):
            raise InvalidLotteryError(f"outcome {v!r} is not a finite nonnegative number")
        if not (math.isfinite(p) and p > 0):
            raise InvalidLotteryError(f"probability {p!r} is not positive")
    total = math.fsum(p for _, p in pairs)
    if abs(total - 1.0) > NORMALIZE_TOL:
        raise InvalidLotteryError(f"probabilities sum to {total!r}, not 1")

    pairs = sorted(pairs)
    values: list[float] = []
    probs: list[float] = []
    for v, p in pairs:
        if values and _close(values[-1], v):
            probs[-1] += p
        else:
            values.append(v)
            probs.append(p)
    return tuple(values), tuple(p / total for p in probs)


@dataclass(frozen=True, init=False)
class Lottery:
    """Distribution over nonnegative offspring counts with finite support.

    Accepts a mapping ``{value: prob}`` or an iterable of ``(value, prob)``
    pairs. Probabilities within 1e-9 of summing to one are renormalized.
    """

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __init__(self, outcomes: OutcomeSpec):
        items = outcomes.items() if isinstance(outcomes, Mapping) else outcomes
        pairs = [(float(v), float(p)) for v, p in items]
        values, probs = _canonicalize(pairs)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def degenerate(cls, value: float) -> "Lottery":
        return cls([(value, 1.0)])

    @classmethod
    def binary(cls, low: float, high: float, p_high: float) -> "Lottery":
        """Two-point lottery yielding ``high`` with probability ``p_high``."""
        return cls([(high, p_high), (low, 1.0 - p_high)])

    @property
    def is_degenerate(self) -> bool:
        return len(self.values) == 1

    def items(self) -> list[tuple[float, float]]:
        return list(zip(self.values, self.probs))

    def prob_above(self, x: float) -> float:
        return math.fsum(p for v, p in self.items() if v > x)

    def prob_below(self, x: float) -> float:
        return math.fsum(p for v, p in self.items() if v < x)

    def __str__(self) -> str:
        return format_lottery(self)


@dataclass(frozen=True)
class ChoiceProblem:
    """A risky lottery offered against a safe alternative yielding ``safe``."""

    risky: Lottery
    safe: float

    def __post_init__(self):
        if not (math.isfinite(self.safe) and self.safe > 0):
            raise InvalidLotteryError(f"safe value must be positive, got {self.safe!r}")


def arithmetic_mean(y: Lottery) -> float:
    return math.fsum(p * v for v, p in y.items())


def geometric_mean(y: Lottery) -> float:
    """Geometric mean, computed in log space; zero if any outcome is zero."""
    if y.values[0] == 0.0:
        return 0.0
    if y.is_degenerate:
        return y.values[0]
    return math.exp(math.fsum(p * math.log(v) for v, p in y.items()))


def harmonic_mean(y: Lottery) -> float:
    """Harmonic mean ``1 / E[1/y]``; zero if any outcome is zero."""
    if y.values[0] == 0.0:
        return 0.0
    if y.is_degenerate:
        return y.values[0]
    return 1.0 / math.fsum(p / v for v, p in y.items())


def mix(lam: float, a: Lottery, b: Lottery) -> Lottery:
    """Probability mixture ``lam * a + (1 - lam) * b``."""
    if not 0.0 <= lam <= 1.0:
        raise InvalidLotteryError(f"mixture weight must be in [0, 1], got {lam!r}")
    pairs = [(v, lam * p) for v, p in a.items()]
    pairs += [(v, (1.0 - lam) * p) for v, p in b.items()]
    return Lottery([(v, p) for v, p in pairs if p > 0])


def scale_shift(y: Lottery, alpha: float, mu: float) -> Lottery:
    """Outcome-wise ``alpha * y + (1 - alpha) * mu`` with unchanged probabilities."""
    return Lottery([(alpha * v + (1.0 - alpha) * mu, p) for v, p in y.items()])


def log_growth_rate(alpha: float, problem: ChoiceProblem) -> float:
    mu = problem.safe
    terms = []
    for v, p in problem.risky.items():
        z = alpha * v + (1.0 - alpha) * mu
        if z == 0.0:
            return -math.inf
        terms.append(p * math.log(z))
    return math.fsum(terms)


def growth_rate(alpha: float, problem: ChoiceProblem) -> float:
    """Long-run growth rate when a share ``alpha`` picks the risky option."""
    return geometric_mean(scale_shift(problem.risky, alpha, problem.safe))


def growth_rate_slope(alpha: float, problem: ChoiceProblem) -> float:
    """Derivative of ``ln GR`` in ``alpha``: ``E[(y - mu) / (alpha*y + (1-alpha)*mu)]``.

    Returns ``-inf`` when a zero-valued denominator carries a negative
    numerator (a zero outcome at ``alpha = 1``).
    """
    mu = problem.safe
    terms = []
    for v, p in problem.risky.items():
        num = v - mu
        den = mu + alpha * num
        if den == 0.0:
            return -math.inf
        terms.append(p * num / den)
    return math.fsum(terms)


def parse_lottery(text: str) -> Lottery:
    """Parse ``v1:p1,v2:p2,...`` (decimal, no whitespace)."""
    pairs = []
    if not text:
        raise InvalidLotteryError("empty lottery string")
    for chunk in text.split(","):
        parts = chunk.split(":")
        if len(parts) != 2:
            raise InvalidLotteryError(f"bad outcome {chunk!r}; expected value:prob")
        try:
            pairs.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise InvalidLotteryError(f"bad number in {chunk!r}") from None
    return Lottery(pairs)


def format_lottery(y: Lottery) -> str:
    return ",".join(f"{v!r}:{p!r}" for v, p in y.items())
