"""Ready-made experiment configurations for the CLI.

Each run preset is a full config dict (instance, policies, horizon,
replications, seed) so benchmark runs are one-liners; the kinf presets
feed the curve subcommand instead.
"""

from __future__ import annotations

RUN_PRESETS: dict[str, dict] = {
    "gaussian_mixture": {
        "description": (
            "two bimodal/trimodal Gaussian mixture arms (means 0.5 vs 0.58); "
            "rds and qds against baselines that wrongly assume Gaussian sigma=0.5"
        ),
        "instance": [
            {
                "kind": "gaussian_mixture",
                "params": {"components": [[0.5, -0.3, 0.5], [0.5, 1.3, 0.5]]},
            },
            {
                "kind": "gaussian_mixture",
                "params": {
                    "components": [[0.1, -1.5, 0.5], [0.8, 0.6, 0.5], [0.1, 2.5, 0.5]]
                },
            },
        ],
        "policies": [
            {"kind": "rds", "params": {"leverage": "sqrt_log"}},
            {"kind": "qds", "params": {"rho": 4.0, "alpha": 0.05}},
            {"kind": "ts_gaussian", "params": {"sigma": 0.5}},
            {"kind": "klucb", "params": {"family": "gaussian", "sigma": 0.5}},
            {"kind": "imed", "params": {"family": "gaussian", "sigma": 0.5}},
        ],
        "horizon": 10_000,
        "replications": 500,
        "seed": 2061,
        "out": "gaussian_mixture.csv",
    },
    "bds_sensitivity": {
        "description": (
            "U(0,1) vs U(0.2,0.9); bds leverage sweep rho in {0.1, 4, 9.5, 50} "
            "with gamma=0.1"
        ),
        "instance": [
            {"kind": "uniform", "params": {"low": 0.0, "high": 1.0}},
            {"kind": "uniform", "params": {"low": 0.2, "high": 0.9}},
        ],
        "policies": [
            {"kind": "bds", "params": {"rho": 0.1, "gamma": 0.1}},
            {"kind": "bds", "params": {"rho": 4.0, "gamma": 0.1}},
            {"kind": "bds", "params": {"rho": 9.5, "gamma": 0.1}},
            {"kind": "bds", "params": {"rho": 50.0, "gamma": 0.1}},
        ],
        "horizon": 10_000,
        "replications": 300,
        "seed": 2062,
        "out": "bds_sensitivity.csv",
    },
    "robust_gaussian": {
        "description": (
            "N(1,1) vs N(2,3) heavier-spread optimum; rds leverage forms against "
            "ucb1 that wrongly assumes sigma=1"
        ),
        "instance": [
            {"kind": "gaussian", "params": {"loc": 1.0, "sigma": 1.0}},
            {"kind": "gaussian", "params": {"loc": 2.0, "sigma": 3.0}},
        ],
        "policies": [
            {"kind": "rds", "params": {"leverage": "sqrt_log"}},
            {"kind": "rds", "params": {"leverage": "log"}},
            {"kind": "rds", "params": {"leverage": "log2"}},
            {"kind": "ucb1", "params": {"sigma": 1.0}},
        ],
        "horizon": 10_000,
        "replications": 200,
        "seed": 2063,
        "out": "robust_gaussian.csv",
    },
    "yield_like": {
        "description": (
            "four zero-inflated yield-like arms (point mass at 0 plus two positive "
            "modes, best arm third); support-bound policies vs data-bonus policies"
        ),
        "instance": [
            {
                "kind": "point_mass_mixture",
                "params": {
                    "atoms": [[0.0, 0.20]],
                    "parts": [
                        [0.50, {"kind": "gaussian", "params": {"loc": 2600.0, "sigma": 500.0}}],
                        [0.30, {"kind": "gaussian", "params": {"loc": 3600.0, "sigma": 600.0}}],
                    ],
                },
            },
            {
                "kind": "point_mass_mixture",
                "params": {
                    "atoms": [[0.0, 0.10]],
                    "parts": [
                        [0.60, {"kind": "gaussian", "params": {"loc": 2400.0, "sigma": 450.0}}],
                        [0.30, {"kind": "gaussian", "params": {"loc": 4200.0, "sigma": 700.0}}],
                    ],
                },
            },
            {
                "kind": "point_mass_mixture",
                "params": {
                    "atoms": [[0.0, 0.12]],
                    "parts": [
                        [0.48, {"kind": "gaussian", "params": {"loc": 3100.0, "sigma": 550.0}}],
                        [0.40, {"kind": "gaussian", "params": {"loc": 4300.0, "sigma": 800.0}}],
                    ],
                },
            },
            {
                "kind": "point_mass_mixture",
                "params": {
                    "atoms": [[0.0, 0.25]],
                    "parts": [
                        [0.45, {"kind": "gaussian", "params": {"loc": 3000.0, "sigma": 600.0}}],
                        [0.30, {"kind": "gaussian", "params": {"loc": 4500.0, "sigma": 900.0}}],
                    ],
                },
            },
        ],
        "policies": [
            {"kind": "npts", "params": {"bound": 8000.0}},
            {"kind": "bds", "params": {"rho": 4.0, "gamma": 350.0}},
            {"kind": "rds", "params": {"leverage": "sqrt_log"}},
            {"kind": "qds", "params": {"rho": 4.0, "alpha": 0.05}},
            {"kind": "imed_empirical", "params": {"bound": 8000.0}},
            {"kind": "ts_binarized", "params": {"low": 0.0, "high": 8000.0}},
        ],
        "horizon": 3_000,
        "replications": 100,
        "seed": 2064,
        "out": "yield_like.csv",
    },
}

KINF_PRESETS: dict[str, dict] = {
    "kinf_exponential": {
        "description": "empirical kinf decay for E(1/2) toward mu=3; slope near -1",
        "family": "exponential",
        "params": [0.5],
        "mu": 3.0,
        "sizes": [100, 1_000, 10_000],
        "reps": 1_000,
        "seed": 2066,
        "out": "kinf_exponential.csv",
    },
    "kinf_gaussian": {
        "description": "empirical kinf decay for N(2,1) toward mu=3; slope near -1/2",
        "family": "gaussian",
        "params": [2.0, 1.0],
        "mu": 3.0,
        "sizes": [100, 1_000, 10_000],
        "reps": 1_000,
        "seed": 2067,
        "out": "kinf_gaussian.csv",
    },
    "kinf_bernoulli": {
        "description": "empirical kinf for Ber(0.2) toward mu=0.5; flat near kl(0.2,0.5)",
        "family": "bernoulli",
        "params": [0.2],
        "mu": 0.5,
        "sizes": [100, 1_000, 10_000],
        "reps": 1_000,
        "seed": 2068,
        "out": "kinf_bernoulli.csv",
    },
}


def run_preset(name: str) -> dict:
    if name not in RUN_PRESETS:
        raise ValueError(
            f"unknown preset {name!r}; available: {', '.join(sorted(RUN_PRESETS))}"
        )
    preset = {k: v for k, v in RUN_PRESETS[name].items() if k != "description"}
    return preset


def kinf_preset(name: str) -> dict:
    if name not in KINF_PRESETS:
        raise ValueError(
            f"unknown kinf preset {name!r}; available: {', '.join(sorted(KINF_PRESETS))}"
        )
    return {k: v for k, v in KINF_PRESETS[name].items() if k != "description"}
