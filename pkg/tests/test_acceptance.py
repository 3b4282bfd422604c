"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Run alone with ``pytest tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from hedgepop import (
    DEFAULT15,
    BetaParams,
    Boundary,
    ChoiceProblem,
    HeterogeneousCRRA,
    HeterogeneousWeightedAverage,
    HomogeneousCRRA,
    Lottery,
    ScenarioSampler,
    SimulationConfig,
    agent_ce,
    arithmetic_mean,
    growth_rate,
    growth_rate_slope,
    harmonic_mean,
    lambda_median,
    optimal_cdf,
    optimal_share,
    run_simulation,
)
from hedgepop.appendix import median_agent_reversal
from hedgepop.preferences import BETA_LAWS

SEED = 0
N = 1_000_000


def grid_argmax(pr: ChoiceProblem, n: int) -> float:
    a = np.linspace(0.0, 1.0, n)
    v = np.array(pr.risky.values)[:, None]
    p = np.array(pr.risky.probs)[:, None]
    with np.errstate(divide="ignore"):
        lg = (p * np.log(a * v + (1 - a) * pr.safe)).sum(axis=0)
    return float(a[np.argmax(lg)])


def test_criterion_1_intro_example(criterion):
    got = optimal_share(ChoiceProblem(Lottery({1: 0.5, 5: 0.5}), 2.0)).alpha_star
    ok = abs(got - 2 / 3) <= 1e-9
    criterion("1 intro alpha*", ok, f"alpha*={got:.12f}, want 2/3 within 1e-9")
    assert ok


def test_criterion_2_half_share_example(criterion):
    pr = ChoiceProblem(Lottery({4: 0.5, 0.25: 0.5}), 1.0)
    gr = growth_rate(0.5, pr)
    alpha = optimal_share(pr).alpha_star
    oracle = grid_argmax(pr, 1_000_001)  # step 1e-6
    ok = abs(gr - 1.25) <= 1e-12 and abs(alpha - 0.5) <= 1e-9 and abs(oracle - alpha) <= 1e-6
    criterion("2 GR(0.5) and alpha*", ok, f"GR(0.5)={gr!r}, alpha*={alpha!r}, grid argmax={oracle}")
    assert ok


def test_criterion_3_appendix(criterion):
    rev = median_agent_reversal()
    checks = {
        "CE(M)": (rev.ce_m, 2.54),
        "CE(X)": (rev.ce_x, 6.04),
        "CE(Y)": (rev.ce_y, 6.19),
    }
    ok = all(abs(v - want) <= 0.01 for v, want in checks.values())
    ok = ok and rev.ce_l == 3.0 and rev.prefers_l_to_m and rev.prefers_y_to_x and rev.violates_independence
    detail = ", ".join(f"{k}={v:.4f}" for k, (v, _) in checks.items()) + f", reversal={rev.violates_independence}"
    criterion("3 median-agent reversal", ok, detail)
    assert ok


def test_criterion_4_alpha_star_oracle(criterion):
    sampler = ScenarioSampler("main", SEED)
    t0 = time.perf_counter()
    worst_gap = worst_foc = 0.0
    for g in range(1000):
        pr = sampler.problem(g)
        res = optimal_share(pr)
        worst_gap = max(worst_gap, abs(res.alpha_star - grid_argmax(pr, 10_001)))
        if res.boundary is Boundary.INTERIOR:
            worst_foc = max(worst_foc, abs(growth_rate_slope(res.alpha_star, pr)))
    elapsed = time.perf_counter() - t0
    ok = worst_gap <= 1e-3 and worst_foc <= 1e-9 and elapsed < 10
    criterion("4 alpha* oracle suite", ok, f"max |alpha*-grid|={worst_gap:.2e}, max FOC={worst_foc:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_5_cdf_suite(criterion):
    rng = np.random.default_rng(SEED)
    ok = True
    worst_rt = 0.0
    lams = [round(0.1 * k, 1) for k in range(1, 10)]
    for _ in range(100):
        low, high = sorted(np.exp(rng.uniform(-3, 3, 2)))
        y = Lottery.binary(low, high, rng.uniform(0.02, 0.98))
        hm, e = harmonic_mean(y), arithmetic_mean(y)
        ok &= optimal_cdf(y, hm) == 0.0 and optimal_cdf(y, e) == 1.0
        cdf = [optimal_cdf(y, x) for x in np.linspace(hm, e, 100)]
        ok &= all(b >= a for a, b in zip(cdf, cdf[1:]))
        for lam in lams:
            worst_rt = max(worst_rt, abs(optimal_cdf(y, lambda_median(y, lam)) - lam))
        ok &= abs(agent_ce(1e-8, y) - hm) <= 1e-6 * hm
        ok &= abs(agent_ce(1 - 1e-8, y) - e) <= 1e-4 * e
    ok &= worst_rt <= 1e-9
    criterion("5 optimal CDF suite", bool(ok), f"max round-trip error={worst_rt:.2e}")
    assert ok


@pytest.fixture(scope="module")
def table_run():
    cfg = SimulationConfig(N, ScenarioSampler("main", SEED), DEFAULT15)
    t0 = time.perf_counter()
    report = run_simulation(cfg)
    return report, time.perf_counter() - t0


def test_criterion_6_table_reproduction(criterion, table_run):
    report, elapsed = table_run
    loss = {r.spec: r.relative_loss for r in report.rows}
    row = report.row
    targets = [
        ("optimal gm_growth", row("optimal").gm_growth, 1.4251, 0.01),
        ("log utility loss", loss["crra:1"], 0.021, 0.005),
        ("risk-neutral loss", loss["crra:0"], 0.077, 0.01),
        ("harmonic loss", loss["crra:2"], 0.076, 0.01),
        ("het-CRRA uniform loss", loss["het-crra:1,1"], 0.0014, 0.001),
        ("het-CRRA unimodal loss", loss["het-crra:2,2"], 0.0015, 0.001),
        ("het-CRRA bimodal loss", loss["het-crra:0.5,0.5"], 0.0029, 0.0015),
        ("weighted-average uniform loss", loss["het-wavg:1,1"], 0.014, 0.005),
        ("extreme-loving gm_growth", row("extreme-loving").gm_growth, 0.9949, 0.01),
        ("optimal mean_alpha", row("optimal").mean_alpha, 0.500, 0.002),
    ]
    all_ok = True
    for name, got, want, tol in targets:
        ok = abs(got - want) <= tol
        all_ok &= ok
        criterion(f"6 {name}", ok, f"{got:.6g} vs {want} +- {tol}")
    averse = row("extreme-averse").gm_growth
    criterion("6 extreme-averse gm_growth", averse == 1.0, f"{averse!r} vs 1.0 exactly")
    criterion("6 runtime", elapsed < 60, f"{elapsed:.1f}s for {N} generations")
    assert all_ok and averse == 1.0 and elapsed < 60


def _ordering_failures(report):
    loss = {r.spec: r.relative_loss for r in report.rows}
    homogeneous = [loss[k] for k in ("extreme-loving", "extreme-averse", "crra:0", "crra:1", "crra:2")]
    bad = []
    for law, b in BETA_LAWS.items():
        het = loss[HeterogeneousCRRA(b).label]
        wavg = loss[HeterogeneousWeightedAverage(b).label]
        if not (het < wavg and het < min(homogeneous)):
            bad.append(f"{law}: het-crra {het:.4%} vs wavg {wavg:.4%}, best homogeneous {min(homogeneous):.4%}")
    return bad


@pytest.mark.parametrize("kind", ["main", "gm-ratio", "cond:gm-mu-e"])
def test_criterion_7_ordering(criterion, table_run, kind):
    if kind == "main":
        report = table_run[0]
    elif kind == "gm-ratio":
        report = run_simulation(SimulationConfig(N, ScenarioSampler("gm-ratio", SEED), DEFAULT15))
    else:
        report = run_simulation(SimulationConfig(N, ScenarioSampler("cond", SEED, band="gm-mu-e"), DEFAULT15))
    bad = _ordering_failures(report)
    best = min(report.row(HeterogeneousCRRA(b)).relative_loss for b in BETA_LAWS.values())
    criterion(f"7 ordering under {kind}", not bad, "; ".join(bad) or f"holds; best het-CRRA loss {best:.4%}")
    assert not bad


def test_criterion_8_property_suites_standalone(criterion):
    import subprocess
    import sys
    from pathlib import Path

    root = Path(__file__).resolve().parent.parent
    suites = [
        "tests/test_lottery.py::test_am_gm_hm_strict_for_nondegenerate",
        "tests/test_lottery.py::test_slope_matches_finite_difference",
        "tests/test_preferences.py::test_crra_endpoint_identities",
        "tests/test_preferences.py::test_crra_monotone_in_rho",
        "tests/test_preferences.py::test_heterogeneous_share_matches_quantile_agents",
        "tests/test_preferences.py::test_beta_cdf_closed_forms",
        "tests/test_preferences.py::test_beta_cdf_uniform",
        "tests/test_simulation.py::test_workers_do_not_change_results",
    ]
    res = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *suites],
        cwd=root,
        capture_output=True,
        text=True,
    )
    last = res.stdout.strip().splitlines()[-1] if res.stdout.strip() else res.stderr.strip()
    ok = res.returncode == 0
    criterion("8 property suites standalone", ok, last)
    assert ok, res.stdout[-2000:]


def test_criterion_8_worker_bit_equality(criterion):
    cfg = SimulationConfig(300_000, ScenarioSampler("main", SEED), DEFAULT15)
    one = run_simulation(cfg, workers=1)
    eight = run_simulation(cfg, workers=8)
    ok = one.rows == eight.rows and one.gm_growth_optimal == eight.gm_growth_optimal
    criterion("8 bit-equality 1 vs 8 workers", ok, "identical rows" if ok else "rows differ")
    assert ok


def test_criterion_8_quantile_agent_oracle(criterion):
    from scipy import stats

    rng = np.random.default_rng(SEED)
    k = 10_000
    worst = 0.0
    for _ in range(20):
        y = Lottery.binary(float(rng.uniform(0.05, 0.95)), float(1 / rng.uniform(0.05, 0.95)), float(rng.uniform(0.05, 0.95)))
        hm, e = harmonic_mean(y), arithmetic_mean(y)
        pr = ChoiceProblem(y, float(rng.uniform(hm, e)))
        v, p = np.array(y.values), np.array(y.probs)
        for law in BETA_LAWS.values():
            betas = stats.beta.ppf((np.arange(1, k + 1) - 0.5) / k, law.a, law.b)
            rho = 2 * betas
            s = np.where(np.abs(1 - rho) < 1e-12, 1.0, 1 - rho)
            ce = np.where(
                np.abs(1 - rho) < 1e-12,
                math.exp(float(np.sum(p * np.log(v)))),
                np.sum(p[:, None] * v[:, None] ** s, axis=0) ** (1 / s),
            )
            ref = float(np.mean(ce > pr.safe))
            worst = max(worst, abs(HeterogeneousCRRA(law).share(pr) - ref))
    ok = worst <= 1.5 / k
    criterion("8 het-CRRA quantile-agent oracle", ok, f"max gap {worst:.2e} vs {1.5 / k:.1e}")
    assert ok


def test_criterion_8_crra_endpoints(criterion):
    from hedgepop import crra_ce, geometric_mean

    rng = np.random.default_rng(SEED)
    worst = 0.0
    mono = True
    for _ in range(200):
        k = int(rng.integers(2, 6))
        y = Lottery(list(zip(np.exp(rng.uniform(-3, 3, k)), rng.dirichlet(np.ones(k)))))
        for rho, ref in ((0, arithmetic_mean(y)), (1, geometric_mean(y)), (2, harmonic_mean(y))):
            worst = max(worst, abs(crra_ce(rho, y) - ref) / ref)
        ces = [crra_ce(r, y) for r in np.linspace(0, 4, 41)]
        mono &= all(b < a for a, b in zip(ces, ces[1:]))
    ok = worst <= 1e-10 and mono
    criterion("8 CRRA CE endpoints and monotonicity", bool(ok), f"max relative endpoint error {worst:.1e}")
    assert ok
