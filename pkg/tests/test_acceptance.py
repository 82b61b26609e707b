"""Acceptance benchmarks: one test, and one printed verdict line, per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the measured margins.
The full file takes on the order of ten minutes on a single core; every
experiment is seeded, so reruns reproduce the same numbers byte for byte.
"""

import math
import time

import numpy as np

from ds_bandits.dirichlet import (
    DirichletParams,
    PointSet,
    bcp_exact,
    bcp_lower_bound,
    bcp_monte_carlo,
    bcp_upper_bound_kinf,
    draw_dirichlet_many,
)
from ds_bandits.distributions import model_from_dict
from ds_bandits.harness import (
    BanditInstance,
    ExperimentConfig,
    replay_pull_sequence,
    run_experiment,
    write_csv,
)
from ds_bandits.kinf import (
    EmpiricalDist,
    empirical_kinf_curve,
    kinf_dual,
    kl_bernoulli,
    loglog_slope,
    quantile_condition_check,
)
from ds_bandits.policies import (
    ELIMINATED,
    LOST,
    WON_BY_INDEX,
    WON_BY_MEAN,
    ArmHistory,
    PolicySpec,
    ds_round,
)
from ds_bandits.presets import run_preset
from ds_bandits.seeding import derive_seed, make_rng


def report(label: str, detail: str) -> None:
    print(f"\nPASS {label}: {detail}")


def final_means(config: ExperimentConfig):
    return {s.policy: s for s in run_experiment(config)}


def test_kinf_dual_matches_bernoulli_divergence():
    worst = 0.0
    pairs = 0
    for i in range(5, 100, 5):
        p = i / 100
        dist = EmpiricalDist(np.array([0.0, 1.0]), np.array([1.0 - p, p]))
        for j in range(i + 5, 100, 5):
            mu = j / 100
            got = kinf_dual(dist, mu, 1.0).value
            worst = max(worst, abs(got - kl_bernoulli(p, mu)))
            pairs += 1
    assert worst <= 1e-6
    assert abs(kl_bernoulli(0.2, 0.5) - 0.19274475702175753) < 1e-12
    report("kinf vs closed-form divergence", f"{pairs} grid pairs, worst gap {worst:.2e}")


def test_dirichlet_marginal_moments():
    w = draw_dirichlet_many(DirichletParams((1, 1)), 10**6, make_rng(31))[:, 0]
    mean_err = abs(w.mean() - 0.5)
    var_err = abs(w.var() - 1.0 / 12.0)
    assert mean_err <= 0.002
    assert var_err <= 0.001
    report(
        "flat Dirichlet moments",
        f"mean off by {mean_err:.2e} (tol 2e-3), variance off by {var_err:.2e} (tol 1e-3)",
    )


def test_quantile_checker_sweep():
    start = time.perf_counter()
    exp = model_from_dict({"kind": "exponential", "params": {"rate": 0.5}})
    checks = [
        quantile_condition_check(exp, 3.0, 0.05, rho)
        for rho in np.geomspace(0.5, 100.0, 30)
    ]
    truncs = [c.kinf_truncated for c in checks]
    for lo, hi in zip(truncs[1:], truncs[:-1]):
        assert lo <= hi + 1e-9
    family = checks[0].kinf_family
    assert abs(family - 0.07213) < 1e-4
    flags = [c.holds for c in checks]
    assert not flags[0]
    assert flags[-1]
    crossing = flags.index(True)
    assert all(flags[crossing:]), "condition must stay satisfied once reached"
    gauss = model_from_dict({"kind": "gaussian", "params": {"loc": 0.0, "sigma": 1.0}})
    assert quantile_condition_check(gauss, 1.0, 0.05, 1.0).holds
    elapsed = time.perf_counter() - start
    report(
        "quantile-condition checker",
        f"truncated kinf falls {truncs[0]:.4f} -> {truncs[-1]:.4f}, crosses below "
        f"{family:.5f} at point {crossing + 1}/30; gaussian rho=1 holds; {elapsed:.1f}s",
    )


def test_empirical_kinf_decay_slopes():
    start = time.perf_counter()
    sizes = (100, 1_000, 10_000)

    exp = model_from_dict({"kind": "exponential", "params": {"rate": 0.5}})
    exp_slope = loglog_slope(empirical_kinf_curve(exp, 3.0, sizes, 200, make_rng(2066)))
    assert -1.25 <= exp_slope <= -0.75

    gauss = model_from_dict({"kind": "gaussian", "params": {"loc": 2.0, "sigma": 1.0}})
    gauss_slope = loglog_slope(
        empirical_kinf_curve(gauss, 3.0, sizes, 200, make_rng(2067))
    )
    assert -0.75 <= gauss_slope <= -0.25

    ber = model_from_dict({"kind": "bernoulli", "params": {"p": 0.2}})
    curve = empirical_kinf_curve(ber, 0.5, sizes, 200, make_rng(2068))
    reference = kl_bernoulli(0.2, 0.5)
    ber_devs = [
        abs(math.exp(pt.mean_log_kinf) - reference) / reference for pt in curve
    ]
    assert max(ber_devs) < 0.15

    elapsed = time.perf_counter() - start
    report(
        "empirical kinf decay",
        f"exponential slope {exp_slope:.3f} in [-1.25,-0.75], gaussian slope "
        f"{gauss_slope:.3f} in [-0.75,-0.25], bernoulli off flat by at most "
        f"{max(ber_devs):.1%} (tol 15%); {elapsed:.1f}s",
    )


def test_bcp_exact_matches_monte_carlo():
    start = time.perf_counter()
    rng = make_rng(20250815)
    params_cache = {n: DirichletParams((1,) * n) for n in range(2, 9)}
    worst_ratio = 0.0
    cases = 0
    while cases < 200:
        n = int(rng.integers(2, 9))
        points = np.sort(rng.uniform(-2.0, 5.0, size=n))
        if np.diff(points).min() <= 1e-3:
            continue
        lo, hi = points[0], points[-1]
        mu = float(rng.uniform(lo + 0.05 * (hi - lo), lo + 0.95 * (hi - lo)))
        if np.abs(points - mu).min() <= 1e-3:
            continue
        ps = PointSet(points, mu)
        exact = bcp_exact(ps)
        estimate = bcp_monte_carlo(ps, params_cache[n], 10**6, rng)
        tol = 4.0 * math.sqrt(exact * (1.0 - exact) / 10**6) + 1e-3
        assert abs(exact - estimate) <= tol, (points, mu)
        worst_ratio = max(worst_ratio, abs(exact - estimate) / tol)

        lower = bcp_lower_bound(ps)
        kinf = kinf_dual(EmpiricalDist.from_samples(points), mu, float(hi)).value
        upper = bcp_upper_bound_kinf(ps, kinf)
        assert lower <= exact + 1e-9, (points, mu)
        assert exact <= upper + 1e-9, (points, mu)
        cases += 1
    elapsed = time.perf_counter() - start
    report(
        "boundary-crossing oracle",
        f"200 fuzzed point sets, worst exact-vs-mc gap at {worst_ratio:.0%} of "
        f"tolerance, lower/upper sandwich intact; {elapsed:.0f}s",
    )


def test_engine_round_invariants_and_determinism(tmp_path):
    start = time.perf_counter()
    rng = make_rng(909)
    rounds = 0
    while rounds < 100_000:
        hists = [ArmHistory() for _ in range(int(rng.integers(2, 6)))]
        for h in hists:
            for _ in range(int(rng.integers(1, 6))):
                h.append(float(rng.normal()))
        for _ in range(150):
            if rounds >= 100_000:
                break
            counts = [h.count for h in hists]
            means = [h.mean for h in hists]
            drawn: dict[int, float] = {}

            def index_fn(h, leader_mean, r, _hists=hists, _drawn=drawn):
                value = leader_mean + (0.25 if r.uniform() < 0.5 else -0.25)
                _drawn[_hists.index(h)] = value
                return value

            decision = ds_round(hists, index_fn, rng)
            lead = decision.leader
            top = max(counts)
            assert counts[lead] == top
            assert means[lead] == max(m for c, m in zip(counts, means) if c == top)
            assert set(decision.duel_outcomes) == set(range(len(hists))) - {lead}
            winners = []
            for c, outcome in decision.duel_outcomes.items():
                if counts[c] == counts[lead]:
                    assert outcome == ELIMINATED and c not in drawn
                elif means[c] >= means[lead]:
                    assert outcome == WON_BY_MEAN and c not in drawn
                elif drawn[c] >= means[lead]:
                    assert outcome == WON_BY_INDEX
                else:
                    assert outcome == LOST
                if outcome in (WON_BY_MEAN, WON_BY_INDEX):
                    winners.append(c)
            if winners:
                assert sorted(decision.pulled_arms) == sorted(winners)
            else:
                assert decision.pulled_arms == (lead,)
            for arm in decision.pulled_arms:
                hists[arm].append(float(rng.normal()))
            rounds += 1

    spec = PolicySpec("rds", {"leverage": "sqrt_log"})
    base = BanditInstance.from_dicts(
        [
            {"kind": "gaussian", "params": {"loc": 1.0, "sigma": 1.0}},
            {"kind": "gaussian", "params": {"loc": 2.0, "sigma": 3.0}},
        ]
    )
    shifted = BanditInstance.from_dicts(
        [
            {"kind": "gaussian", "params": {"loc": 5.0, "sigma": 2.0}},
            {"kind": "gaussian", "params": {"loc": 7.0, "sigma": 6.0}},
        ]
    )
    for rep in range(50):
        seed = derive_seed(4242, rep)
        assert np.array_equal(
            replay_pull_sequence(base, spec, 1_000, seed),
            replay_pull_sequence(shifted, spec, 1_000, seed),
        ), f"pull sequences diverged under x -> 2x + 3 at replication {rep}"

    cfg = {
        "instance": [
            {"kind": "bernoulli", "params": {"p": 0.7}},
            {"kind": "bernoulli", "params": {"p": 0.4}},
        ],
        "policies": [
            {"kind": "npts", "params": {"bound": 1.0}},
            {"kind": "rds", "params": {"leverage": "sqrt_log"}},
        ],
        "horizon": 500,
        "replications": 10,
        "seed": 7,
    }
    blobs = []
    for workers in (1, 2):
        config = ExperimentConfig.from_dict({**cfg, "workers": workers})
        path = tmp_path / f"workers{workers}.csv"
        write_csv(run_experiment(config), path)
        blobs.append(path.read_bytes())
    assert blobs[0] == blobs[1]

    elapsed = time.perf_counter() - start
    report(
        "engine invariants",
        "100000 fuzzed duel rounds clean, 50 affine-shift replications pull "
        f"identically, CSV identical for 1 vs 2 workers; {elapsed:.0f}s",
    )


def test_misspecified_ucb_falls_behind():
    start = time.perf_counter()
    cfg = run_preset("robust_gaussian")
    cfg["policies"] = [
        {"kind": "rds", "params": {"leverage": "sqrt_log"}},
        {"kind": "ucb1", "params": {"sigma": 1.0}},
    ]
    cfg.pop("out", None)
    by = final_means(ExperimentConfig.from_dict(cfg))
    rds = by["rds(leverage=sqrt_log)"].mean_regret[-1]
    ucb = by["ucb1(sigma=1)"].mean_regret[-1]
    assert rds < 0.5 * ucb
    elapsed = time.perf_counter() - start
    report(
        "heavier-spread robustness",
        f"rds {rds:.1f} vs ucb1 {ucb:.1f} (needs < {0.5 * ucb:.1f}); {elapsed:.0f}s",
    )


def test_bonus_leverage_sensitivity():
    start = time.perf_counter()
    cfg = run_preset("bds_sensitivity")
    cfg["policies"] = [p for p in cfg["policies"] if p["params"]["rho"] in (4.0, 50.0)]
    cfg.pop("out", None)
    config = ExperimentConfig.from_dict(cfg)
    by = final_means(config)
    tuned = by["bds(gamma=0.1,rho=4)"]
    extreme = by["bds(gamma=0.1,rho=50)"]
    assert extreme.mean_regret[-1] > tuned.mean_regret[-1]
    mid = int(np.nonzero(tuned.checkpoints == 1_000)[0][0])
    ratio = tuned.mean_regret[-1] / tuned.mean_regret[mid]
    assert ratio <= 2.5
    elapsed = time.perf_counter() - start
    report(
        "bonus leverage sensitivity",
        f"rho=50 regret {extreme.mean_regret[-1]:.1f} > rho=4 {tuned.mean_regret[-1]:.1f}; "
        f"rho=4 grows x{ratio:.2f} from t=1e3 to 1e4 (tol 2.5); {elapsed:.0f}s",
    )


def test_mixture_instance_beats_misspecified_thompson():
    start = time.perf_counter()
    cfg = run_preset("gaussian_mixture")
    cfg["policies"] = [
        {"kind": "rds", "params": {"leverage": "sqrt_log"}},
        {"kind": "qds", "params": {"rho": 4.0, "alpha": 0.05}},
        {"kind": "ts_gaussian", "params": {"sigma": 0.5}},
    ]
    cfg.pop("out", None)
    by = final_means(ExperimentConfig.from_dict(cfg))
    rds = by["rds(leverage=sqrt_log)"].mean_regret[-1]
    qds = by["qds(alpha=0.05,rho=4)"].mean_regret[-1]
    ts = by["ts_gaussian(sigma=0.5)"].mean_regret[-1]
    assert rds < ts
    assert qds < ts
    elapsed = time.perf_counter() - start
    report(
        "mixture benchmark",
        f"rds {rds:.1f} and qds {qds:.1f} both beat gaussian thompson {ts:.1f}; "
        f"{elapsed:.0f}s",
    )
