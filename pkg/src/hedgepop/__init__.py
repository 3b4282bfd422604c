"""Growth-optimal bet hedging and heterogeneous risk preferences under aggregate risk."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateLotteryError,
    HedgeError,
    InvalidLotteryError,
    MaxIterExceededError,
    NoSignChangeError,
    RejectionBudgetExceeded,
    SolverError,
    SpecParseError,
)
from .lottery import (  # noqa: E402
    ChoiceProblem,
    Lottery,
    arithmetic_mean,
    geometric_mean,
    growth_rate,
    growth_rate_slope,
    harmonic_mean,
    mix,
    parse_lottery,
    scale_shift,
)
from .preferences import (  # noqa: E402
    DEFAULT15,
    BetaParams,
    ExtremeRiskAverse,
    ExtremeRiskLoving,
    HeterogeneousCRRA,
    HeterogeneousWeightedAverage,
    HomogeneousCRRA,
    Optimal,
    beta_cdf,
    crra_ce,
    parse_spec,
    risky_share,
    weighted_average_ce,
)
from .solver import (  # noqa: E402
    Boundary,
    OptimalShareResult,
    RootConfig,
    agent_ce,
    lambda_median,
    median_agent_ce,
    optimal_cdf,
    optimal_share,
    solve_bracketed,
)
from .sampling import ScenarioSampler  # noqa: E402
from .simulation import SimulationConfig, SimulationReport, run_simulation  # noqa: E402
