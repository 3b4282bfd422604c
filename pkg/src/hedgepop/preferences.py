"""Population preference distributions and the risky share each one induces.

Every distribution is a small frozen dataclass exposing

* ``share(problem, cfg)`` -- exact scalar share of agents choosing the risky
  option for an arbitrary :class:`~hedgepop.lottery.ChoiceProblem`;
* ``binary_shares(block)`` -- the same quantity vectorized over a
  :class:`BinaryBlock` of two-point lotteries against ``mu = 1``.

Heterogeneous populations are evaluated analytically: agents are ordered by
risk aversion, so the risky share is the Beta CDF at the indifferent agent.
Ties (CE equal to the safe value) count as choosing safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Union

import numpy as np

from .errors import SpecParseError
from .lottery import (
    ChoiceProblem,
    Lottery,
    arithmetic_mean,
    geometric_mean,
    harmonic_mean,
)
from .solver import (
    DEFAULT_ROOT_CONFIG,
    RootConfig,
    binary_optimal_share,
    bisect_array,
    optimal_share,
    solve_bracketed,
)
from .special import beta_cdf as _beta_cdf

LOG_UTILITY_TOL = 1e-12


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"Beta parameters must be positive, got ({self.a!r}, {self.b!r})")


def beta_cdf(x, params: BetaParams):
    return _beta_cdf(x, params.a, params.b)


def crra_ce(rho: float, y: Lottery) -> float:
    """Certainty equivalent of ``y`` under CRRA utility with coefficient ``rho``.

    ``(E[y^(1-rho)])^(1/(1-rho))``, or the geometric mean when ``rho`` is
    within 1e-12 of one. Zero outcomes give 0 for ``rho >= 1``.
    """
    if rho < 0:
        raise ValueError(f"rho must be nonnegative, got {rho!r}")
    if y.is_degenerate:
        return y.values[0]
    if abs(rho - 1.0) <= LOG_UTILITY_TOL:
        return geometric_mean(y)
    s = 1.0 - rho
    if y.values[0] == 0.0 and s < 0:
        return 0.0
    pos = [(v, p) for v, p in y.items() if v > 0]
    exps = [s * math.log(v) for v, _ in pos]
    if max(abs(t) for t in exps) < 700.0:
        # expm1 keeps ln E[y^s] accurate when s is close to zero
        acc = math.fsum(p * math.expm1(t) for (_, p), t in zip(pos, exps))
        zero_mass = 1.0 - math.fsum(p for _, p in pos)
        acc -= zero_mass
        if acc <= -1.0:
            return 0.0
        log_moment = math.log1p(acc)
    else:
        m = max(exps)
        log_moment = m + math.log(math.fsum(p * math.exp(t - m) for (_, p), t in zip(pos, exps)))
    return math.exp(log_moment / s)


def weighted_average_ce(beta: float, y: Lottery) -> float:
    """``beta * HM[y] + (1 - beta) * E[y]``."""
    return beta * harmonic_mean(y) + (1.0 - beta) * arithmetic_mean(y)


def crra_ce_monotone_check(y: Lottery, grid) -> bool:
    """True iff ``crra_ce`` strictly decreases along the ascending ``grid``.

    Degenerate lotteries pass vacuously.
    """
    if y.is_degenerate:
        return True
    ces = [crra_ce(r, y) for r in grid]
    return all(later < earlier for earlier, later in zip(ces, ces[1:]))


def crra_threshold(problem: ChoiceProblem, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
    """Risk coefficient in ``[0, 2]`` of the agent indifferent between the options.

    Agents with a smaller coefficient choose the risky option. Returns 0 when
    even risk neutrality rejects it and 2 when harmonic utility accepts it.
    """
    y, mu = problem.risky, problem.safe
    if arithmetic_mean(y) <= mu:
        return 0.0
    if harmonic_mean(y) >= mu:
        return 2.0
    log_mu = math.log(mu)

    def gap(r: float) -> float:
        ce = crra_ce(r, y)
        return math.inf if ce == 0.0 else log_mu - math.log(ce)

    return solve_bracketed(gap, 0.0, 2.0, cfg)


def weighted_average_threshold(problem: ChoiceProblem) -> float:
    """Weight ``beta`` of the indifferent weighted-average agent, clamped to ``[0, 1]``."""
    y, mu = problem.risky, problem.safe
    mean, hm = arithmetic_mean(y), harmonic_mean(y)
    if mean <= mu:
        return 0.0
    if hm >= mu:
        return 1.0
    return min(1.0, max(0.0, (mean - mu) / (mean - hm)))


class BinaryBlock:
    """Vectorized two-point lotteries ``{high: p, low: 1 - p}`` against ``mu = 1``.

    Derived arrays are computed lazily and cached, so several preference
    distributions evaluated on one block share thresholds and the optimum.
    """

    def __init__(self, p, low, high, log_low=None):
        self.p = np.asarray(p, dtype=float)
        self.low = np.asarray(low, dtype=float)
        self.high = np.asarray(high, dtype=float)
        if log_low is not None:
            # low may have underflowed to 0; its log is still exact
            self.__dict__["log_low"] = np.asarray(log_low, dtype=float)

    def __len__(self) -> int:
        return self.p.size

    def problem(self, i: int) -> ChoiceProblem:
        return ChoiceProblem(Lottery.binary(float(self.low[i]), float(self.high[i]), float(self.p[i])), 1.0)

    @cached_property
    def mean(self) -> np.ndarray:
        return self.p * self.high + (1.0 - self.p) * self.low

    @cached_property
    def inv_harmonic(self) -> np.ndarray:
        with np.errstate(divide="ignore", over="ignore"):
            return self.p / self.high + (1.0 - self.p) / self.low

    @cached_property
    def harmonic(self) -> np.ndarray:
        return 1.0 / self.inv_harmonic

    @cached_property
    def log_low(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.low)

    @cached_property
    def log_high(self) -> np.ndarray:
        return np.log(self.high)

    @cached_property
    def mean_log(self) -> np.ndarray:
        return self.p * self.log_high + (1.0 - self.p) * self.log_low

    @cached_property
    def geometric(self) -> np.ndarray:
        return np.exp(self.mean_log)

    def _moment_excess(self, s) -> np.ndarray:
        # E[y^s] - 1 without cancellation for small s
        with np.errstate(over="ignore", invalid="ignore"):
            return self.p * np.expm1(s * self.log_high) + (1.0 - self.p) * np.expm1(s * self.log_low)

    def crra_log_ce_sign(self, s) -> np.ndarray:
        """Array with the sign of ``ln CE`` under CRRA coefficient ``1 - s``."""
        s = np.broadcast_to(np.asarray(s, dtype=float), self.p.shape)
        safe_s = np.where(s == 0.0, 1.0, s)
        return np.where(s == 0.0, self.mean_log, self._moment_excess(s) / safe_s)

    def crra_ce_exceeds_one(self, rho: float) -> np.ndarray:
        s = 1.0 - rho
        if abs(s) <= LOG_UTILITY_TOL:
            return self.mean_log > 0
        return self.crra_log_ce_sign(s) > 0

    @cached_property
    def optimal_share(self) -> np.ndarray:
        return binary_optimal_share(self.p, self.low, self.high)

    @cached_property
    def crra_threshold(self) -> np.ndarray:
        """Indifferent CRRA coefficient per lottery, in ``[0, 2]``."""
        all_safe = self.mean <= 1.0
        all_risky = self.inv_harmonic <= 1.0
        n = self.p.size
        s = bisect_array(self.crra_log_ce_sign, -np.ones(n), np.ones(n), iters=64)
        rho = 1.0 - s
        return np.where(all_safe, 0.0, np.where(all_risky, 2.0, np.clip(rho, 0.0, 2.0)))

    @cached_property
    def weighted_threshold(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (self.mean - 1.0) / (self.mean - self.harmonic)
        t = np.where(self.mean <= 1.0, 0.0, np.where(self.inv_harmonic <= 1.0, 1.0, t))
        return np.clip(t, 0.0, 1.0)

    def log_growth(self, alpha) -> np.ndarray:
        """``ln GR(alpha)`` per lottery."""
        alpha = np.asarray(alpha, dtype=float)
        return self.p * _log_affine(alpha, self.high, self.log_high) + (1.0 - self.p) * _log_affine(
            alpha, self.low, self.log_low
        )


def _log_affine(alpha: np.ndarray, v: np.ndarray, log_v: np.ndarray) -> np.ndarray:
    """``ln(1 + alpha (v - 1))``, accurate for small alpha and for alpha near 1."""
    alpha, v, log_v = np.broadcast_arrays(alpha, v, log_v)
    out = np.empty(alpha.shape)
    small = alpha < 0.5
    out[small] = np.log1p(alpha[small] * (v[small] - 1.0))
    big = ~small
    a = alpha[big]
    with np.errstate(divide="ignore"):
        out[big] = np.logaddexp(np.log1p(-a), np.log(a) + log_v[big])
    return out


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


@dataclass(frozen=True)
class ExtremeRiskLoving:
    """Always risky, unless the risky option can never beat the safe one."""

    label = "extreme-loving"

    def share(self, problem: ChoiceProblem, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
        return 1.0 if problem.risky.prob_above(problem.safe) != 0 else 0.0

    def binary_shares(self, block: BinaryBlock) -> np.ndarray:
        return ((block.high > 1.0) | (block.low > 1.0)).astype(float)


@dataclass(frozen=True)
class ExtremeRiskAverse:
    """Always safe, unless the risky option can never fall below it."""

    label = "extreme-averse"

    def share(self, problem: ChoiceProblem, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
        return 0.0 if problem.risky.prob_below(problem.safe) != 0 else 1.0

    def binary_shares(self, block: BinaryBlock) -> np.ndarray:
        return ~((block.low < 1.0) | (block.high < 1.0)) * 1.0


@dataclass(frozen=True)
class HomogeneousCRRA:
    rho: float

    def __post_init__(self):
        if not self.rho >= 0:
            raise ValueError(f"rho must be nonnegative, got {self.rho!r}")

    @property
    def label(self) -> str:
        return f"crra:{_num(self.rho)}"

    def share(self, problem: ChoiceProblem, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
        return 1.0 if crra_ce(self.rho, problem.risky) > problem.safe else 0.0

    def binary_shares(self, block: BinaryBlock) -> np.ndarray:
        return block.crra_ce_exceeds_one(self.rho).astype(float)


@dataclass(frozen=True)
class HeterogeneousCRRA:
    """Agents with CRRA coefficient ``2 * beta``, ``beta ~ Beta(a, b)``."""

    beta: BetaParams

    @property
    def label(self) -> str:
        return f"het-crra:{_num(self.beta.a)},{_num(self.beta.b)}"

    def share(self, problem: ChoiceProblem, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
        return beta_cdf(crra_threshold(problem, cfg) / 2.0, self.beta)

    def binary_shares(self, block: BinaryBlock) -> np.ndarray:
        return beta_cdf(block.crra_threshold / 2.0, self.beta)


@dataclass(frozen=True)
class HeterogeneousWeightedAverage:
    """Agents valuing ``beta * HM + (1 - beta) * E``, ``beta ~ Beta(a, b)``."""

    beta: BetaParams

    @property
    def label(self) -> str:
        return f"het-wavg:{_num(self.beta.a)},{_num(self.beta.b)}"

    def share(self, problem: ChoiceProblem, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
        return beta_cdf(weighted_average_threshold(problem), self.beta)

    def binary_shares(self, block: BinaryBlock) -> np.ndarray:
        return beta_cdf(block.weighted_threshold, self.beta)


@dataclass(frozen=True)
class Optimal:
    """The growth-optimal population; its share is the optimal share itself."""

    label = "optimal"

    def share(self, problem: ChoiceProblem, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
        return optimal_share(problem, cfg).alpha_star

    def binary_shares(self, block: BinaryBlock) -> np.ndarray:
        return block.optimal_share


PreferenceSpec = Union[
    ExtremeRiskLoving,
    ExtremeRiskAverse,
    HomogeneousCRRA,
    HeterogeneousCRRA,
    HeterogeneousWeightedAverage,
    Optimal,
]


def risky_share(spec: PreferenceSpec, problem: ChoiceProblem, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
    return spec.share(problem, cfg)


BETA_LAWS = {
    "uniform": BetaParams(1, 1),
    "unimodal": BetaParams(2, 2),
    "bimodal": BetaParams(0.5, 0.5),
    "positively skewed": BetaParams(2, 4),
    "negatively skewed": BetaParams(4, 2),
}

DEFAULT15: tuple[PreferenceSpec, ...] = (
    Optimal(),
    ExtremeRiskLoving(),
    ExtremeRiskAverse(),
    HomogeneousCRRA(0.0),
    HomogeneousCRRA(1.0),
    HomogeneousCRRA(2.0),
    *(HeterogeneousCRRA(b) for b in BETA_LAWS.values()),
    *(HeterogeneousWeightedAverage(b) for b in BETA_LAWS.values()),
)

_HOMOGENEOUS_NAMES = {0.0: "risk neutrality", 1.0: "logarithmic utility", 2.0: "harmonic utility"}


def describe(spec: PreferenceSpec) -> str:
    """Human-readable name, e.g. ``"heterogeneous CRRA, uniform"``."""
    if isinstance(spec, Optimal):
        return "optimal"
    if isinstance(spec, ExtremeRiskLoving):
        return "extreme risk loving"
    if isinstance(spec, ExtremeRiskAverse):
        return "extreme risk aversion"
    if isinstance(spec, HomogeneousCRRA):
        return _HOMOGENEOUS_NAMES.get(spec.rho, f"CRRA rho={_num(spec.rho)}")
    law = next((k for k, v in BETA_LAWS.items() if v == spec.beta), f"Beta({_num(spec.beta.a)},{_num(spec.beta.b)})")
    cls = "heterogeneous CRRA" if isinstance(spec, HeterogeneousCRRA) else "heterogeneous weighted-average"
    return f"{cls}, {law}"


def _parse_float(text: str, whole: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise SpecParseError(f"bad number {text!r} in {whole!r}") from None


def parse_spec(text: str) -> PreferenceSpec:
    """Parse one preference encoding, e.g. ``crra:1`` or ``het-crra:0.5,0.5``."""
    text = text.strip()
    simple = {"extreme-loving": ExtremeRiskLoving, "extreme-averse": ExtremeRiskAverse, "optimal": Optimal}
    if text in simple:
        return simple[text]()
    head, sep, tail = text.partition(":")
    if not sep:
        raise SpecParseError(f"unknown preference spec {text!r}")
    try:
        if head == "crra":
            return HomogeneousCRRA(_parse_float(tail, text))
        if head in ("het-crra", "het-wavg"):
            parts = tail.split(",")
            if len(parts) != 2:
                raise SpecParseError(f"{head} needs two Beta parameters: {text!r}")
            params = BetaParams(_parse_float(parts[0], text), _parse_float(parts[1], text))
            return HeterogeneousCRRA(params) if head == "het-crra" else HeterogeneousWeightedAverage(params)
    except SpecParseError:
        raise
    except ValueError as exc:
        raise SpecParseError(str(exc)) from None
    raise SpecParseError(f"unknown preference spec {text!r}")


def parse_spec_list(text: str) -> list[PreferenceSpec]:
    """Parse ``default15`` or a ``;``-separated list of encodings."""
    if text.strip() == "default15":
        return list(DEFAULT15)
    items = [t for t in text.split(";") if t.strip()]
    if not items:
        raise SpecParseError("empty preference list")
    return [parse_spec(t) for t in items]


# --- sampled-agent reference --------------------------------------------------


@lru_cache(maxsize=32)
def beta_quantile_agents(params: BetaParams, k: int) -> tuple[float, ...]:
    """Agent types ``beta_j`` with ``I_{beta_j}(a, b) = (j - 1/2) / k``, ``j = 1..k``."""
    agents = []
    for j in range(1, k + 1):
        target = (j - 0.5) / k
        agents.append(solve_bracketed(lambda x: beta_cdf(x, params) - target, 0.0, 1.0))
    return tuple(agents)


def sampled_agent_share(
    spec: Union[HeterogeneousCRRA, HeterogeneousWeightedAverage],
    problem: ChoiceProblem,
    k: int = 10_000,
) -> float:
    """Risky share of a finite population of ``k`` Beta-quantile agents.

    Each agent compares its own certainty equivalent with the safe value.
    Used to cross-check the analytic threshold evaluation.
    """
    agents = beta_quantile_agents(spec.beta, k)
    y, mu = problem.risky, problem.safe
    if isinstance(spec, HeterogeneousCRRA):
        chosen = sum(crra_ce(2.0 * b, y) > mu for b in agents)
    else:
        chosen = sum(weighted_average_ce(b, y) > mu for b in agents)
    return chosen / k
