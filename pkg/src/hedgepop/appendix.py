"""Independence-axiom counterexamples for the non-expected-utility agents.

Two families: the median agent of the optimal population, and weighted
averages of the harmonic and arithmetic means.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lottery import Lottery, mix
from .preferences import weighted_average_ce
from .solver import median_agent_ce

SAFE_PROBE = 6.1

L_SAFE = Lottery.degenerate(3.0)
M_RISKY = Lottery({1.5: 0.75, 20.0: 0.25})
N_COMMON = Lottery({10.0: 0.5, 15.0: 0.5})


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    expected: float
    tol: float

    @property
    def passed(self) -> bool:
        return abs(self.value - self.expected) <= self.tol


@dataclass(frozen=True)
class MedianAgentReversal:
    ce_l: float
    ce_m: float
    ce_x: float
    ce_y: float

    @property
    def prefers_l_to_m(self) -> bool:
        return self.ce_l > self.ce_m

    @property
    def prefers_y_to_x(self) -> bool:
        return self.ce_x < SAFE_PROBE < self.ce_y

    @property
    def violates_independence(self) -> bool:
        return self.prefers_l_to_m and self.prefers_y_to_x


def median_agent_reversal() -> MedianAgentReversal:
    """CEs of the median agent for L, M and their 50/50 mixtures with N."""
    x = mix(0.5, L_SAFE, N_COMMON)
    y = mix(0.5, M_RISKY, N_COMMON)
    return MedianAgentReversal(
        ce_l=median_agent_ce(L_SAFE),
        ce_m=median_agent_ce(M_RISKY),
        ce_x=median_agent_ce(x),
        ce_y=median_agent_ce(y),
    )


def weighted_average_counterexample(beta: float) -> list[Check]:
    """Library CEs of the weighted-average agent against closed forms.

    ``L = {6: 1/2, 2: 1/2}``, ``M`` the constant ``4 - beta``, ``N`` the
    constant 4. L and M tie, while their mixtures with N do not.
    """
    big_l = Lottery({6.0: 0.5, 2.0: 0.5})
    big_m = Lottery.degenerate(4.0 - beta)
    big_n = Lottery.degenerate(4.0)
    b = beta
    return [
        Check("CE(L)", weighted_average_ce(b, big_l), 4.0 - b, 1e-12),
        Check("CE(M)", weighted_average_ce(b, big_m), 4.0 - b, 1e-12),
        Check("CE(L/2+N/2)", weighted_average_ce(b, mix(0.5, big_l, big_n)), 4.0 - 4.0 * b / 7.0, 1e-12),
        Check(
            "CE(M/2+N/2)",
            weighted_average_ce(b, mix(0.5, big_m, big_n)),
            (64.0 - 16.0 * b + b**2 - b**3) / (2.0 * (8.0 - b)),
            1e-12,
        ),
    ]
