"""Command line front end.

Verbs: ``run`` (regret benchmark from a config file or preset), ``bcp``
(boundary-crossing probability of a point set), ``kinf`` (empirical
kinf decay curves), ``check-quantile`` (quantile-condition audit), and
``presets`` (list or export the bundled configurations).

Exit codes: 0 success, 1 IO failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import presets as preset_lib
from .dirichlet import (
    BoundUndefinedError,
    DistinctPointsRequired,
    PointSet,
    bcp_exact,
    bcp_lower_bound,
    bcp_monte_carlo,
    bcp_upper_bound_kinf,
    DirichletParams,
)
from .distributions import Bernoulli, Exponential, Gaussian
from .harness import ExperimentConfig, run_experiment, write_csv
from .kinf import (
    EmpiricalDist,
    empirical_kinf_curve,
    kinf_dual,
    kinf_parametric,
    kl_bernoulli,
    loglog_slope,
    quantile_condition_check,
)
from .seeding import make_rng


class ConfigError(ValueError):
    pass


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"{flag} expects a comma-separated list of numbers") from None


def _parse_ints(text: str, flag: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"{flag} expects a comma-separated list of integers") from None


def _family_model(family: str, params: list[float]):
    if family == "exponential":
        if len(params) != 1:
            raise ConfigError("--params for exponential: rate")
        return Exponential(rate=params[0])
    if family == "gaussian":
        if len(params) != 2:
            raise ConfigError("--params for gaussian: loc,sigma")
        return Gaussian(loc=params[0], sigma=params[1])
    if family == "bernoulli":
        if len(params) != 1:
            raise ConfigError("--params for bernoulli: p")
        return Bernoulli(p=params[0])
    raise ConfigError(f"unknown family {family!r}")


def _default_workers() -> int:
    raw = os.environ.get("DS_BANDITS_WORKERS", "")
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError("DS_BANDITS_WORKERS must be an integer") from None
    if value < 1:
        raise ConfigError("DS_BANDITS_WORKERS must be >= 1")
    return value


def _cmd_run(args) -> int:
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"--config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON at line {exc.lineno}: {exc.msg}")
    else:
        raw = preset_lib.run_preset(args.preset)
    if "workers" not in raw:
        raw["workers"] = _default_workers()
    for name in ("seed", "workers", "horizon", "replications", "out"):
        override = getattr(args, name)
        if override is not None:
            raw[name] = override
    try:
        config = ExperimentConfig.from_dict(raw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    summaries = run_experiment(config)
    width = max(len(s.policy) for s in summaries)
    print(
        f"horizon {config.horizon}, {config.replications} replications, "
        f"seed {config.seed}"
    )
    print(f"{'policy':<{width}}  {'5% quantile':>12}  {'mean (± std)':>22}  {'95% quantile':>12}")
    for s in summaries:
        mean_std = f"{s.mean_regret[-1]:.4g} ± {s.std[-1]:.4g}"
        print(f"{s.policy:<{width}}  {s.q05[-1]:>12.4g}  {mean_std:>22}  {s.q95[-1]:>12.4g}")
    if config.out:
        print(f"wrote {config.out}")
    return 0


def _cmd_bcp(args) -> int:
    points = _parse_floats(args.points, "--points")
    if not points:
        raise ConfigError("--points must list at least one value")
    ps = PointSet(np.array(points), args.mu)
    print(f"points {points}, mu {args.mu:g}")
    distinct = ps.is_distinct()
    if distinct:
        print(f"exact: {bcp_exact(ps):.6g}")
    elif args.draws is None:
        print("exact: unavailable (duplicate points); rerun with --draws N to estimate")
    else:
        print("exact: unavailable (duplicate points)")
    if args.draws is not None:
        rng = make_rng(args.seed)
        est = bcp_monte_carlo(ps, DirichletParams((1,) * ps.size), args.draws, rng)
        print(f"monte carlo ({args.draws} draws): {est:.6g}")
    try:
        print(f"lower bound: {bcp_lower_bound(ps):.6g}")
    except BoundUndefinedError:
        print("lower bound: undefined (max point does not exceed mu)")
    xbar = float(ps.points.max())
    if xbar > ps.mu:
        kinf = kinf_dual(EmpiricalDist.from_samples(ps.points), ps.mu, xbar).value
        print(f"kinf upper bound: {bcp_upper_bound_kinf(ps, kinf):.6g}")
    else:
        print("kinf upper bound: undefined (max point does not exceed mu)")
    return 0


def _cmd_kinf(args) -> int:
    if args.preset is not None:
        p = preset_lib.kinf_preset(args.preset)
        family, params = p["family"], list(p["params"])
        mu, sizes, reps = p["mu"], list(p["sizes"]), p["reps"]
        seed = p["seed"] if args.seed is None else args.seed
        out = p.get("out") if args.out is None else args.out
    else:
        for flag in ("family", "params", "mu"):
            if getattr(args, flag) is None:
                raise ConfigError(f"--{flag} is required without --preset")
        family = args.family
        params = _parse_floats(args.params, "--params")
        mu = args.mu
        sizes = _parse_ints(args.sizes, "--sizes")
        reps = args.reps
        seed = 0 if args.seed is None else args.seed
        out = args.out
    model = _family_model(family, params)
    try:
        points = empirical_kinf_curve(model, mu, sizes, reps, make_rng(seed))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if family == "bernoulli":
        reference = kl_bernoulli(model.p, mu)
    else:
        reference = kinf_parametric(model, mu)
    print(f"family {family}, mu {mu:g}, {reps} replications")
    print(f"{'n':>8}  {'mean log kinf':>14}  {'stderr':>10}  {'used':>6}")
    for pt in points:
        print(
            f"{pt.n:>8}  {pt.mean_log_kinf:>14.6f}  {pt.stderr:>10.4f}  "
            f"{pt.used_replications:>6}"
        )
    print(f"log kinf vs log log n slope: {loglog_slope(points):.4f}")
    print(f"in-family kinf: {reference:.6g} (log {math.log(reference):.6f})")
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write("n,mean_log_kinf,stderr\n")
            for pt in points:
                fh.write(f"{pt.n},{pt.mean_log_kinf:.12g},{pt.stderr:.12g}\n")
        print(f"wrote {out}")
    return 0


def _cmd_check_quantile(args) -> int:
    if args.family == "bernoulli":
        raise ConfigError("check-quantile supports exponential and gaussian families")
    model = _family_model(args.family, _parse_floats(args.params, "--params"))
    if args.rho is None and args.rho_sweep is None:
        raise ConfigError("provide --rho or --rho-sweep lo:hi:n")
    if args.rho is not None:
        rhos = [args.rho]
    else:
        try:
            lo, hi, n = args.rho_sweep.split(":")
            lo, hi, n = float(lo), float(hi), int(n)
        except ValueError:
            raise ConfigError("--rho-sweep expects lo:hi:n") from None
        if n < 2 or not 0.0 < lo < hi:
            raise ConfigError("--rho-sweep needs 0 < lo < hi and n >= 2")
        rhos = list(np.geomspace(lo, hi, n))
    try:
        checks = [
            quantile_condition_check(model, args.mu, args.alpha, rho) for rho in rhos
        ]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    print(f"{'rho':>10}  {'bonus level':>12}  {'kinf trunc':>12}  {'kinf family':>12}  holds")
    for c in checks:
        print(
            f"{c.rho:>10.4g}  {c.bonus_level:>12.6g}  {c.kinf_truncated:>12.6g}  "
            f"{c.kinf_family:>12.6g}  {str(c.holds).lower()}"
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("rho,bonus_level,kinf_truncated,kinf_family,holds\n")
            for c in checks:
                fh.write(
                    f"{c.rho:.12g},{c.bonus_level:.12g},{c.kinf_truncated:.12g},"
                    f"{c.kinf_family:.12g},{int(c.holds)}\n"
                )
        print(f"wrote {args.out}")
    return 0


def _cmd_presets(args) -> int:
    if args.show is not None:
        name = args.show
        if name in preset_lib.RUN_PRESETS:
            payload = preset_lib.run_preset(name)
        else:
            payload = preset_lib.kinf_preset(name)
        text = json.dumps(payload, indent=2)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
            print(f"wrote {args.out}")
        else:
            print(text)
        return 0
    print("run presets (ds-bandits run --preset NAME):")
    for name, preset in preset_lib.RUN_PRESETS.items():
        print(f"  {name:<18} {preset['description']}")
    print("kinf presets (ds-bandits kinf --preset NAME):")
    for name, preset in preset_lib.KINF_PRESETS.items():
        print(f"  {name:<18} {preset['description']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ds-bandits",
        description="Dirichlet sampling bandit simulator and kinf toolbox",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a regret benchmark")
    src = run_p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON experiment config")
    src.add_argument("--preset", help="bundled preset name (see 'presets')")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--workers", type=int, default=None)
    run_p.add_argument("--horizon", type=int, default=None)
    run_p.add_argument("--replications", type=int, default=None)
    run_p.add_argument("--out", default=None, help="results CSV path")
    run_p.set_defaults(func=_cmd_run)

    bcp_p = sub.add_parser("bcp", help="boundary-crossing probability of a point set")
    bcp_p.add_argument("--points", required=True, help="comma-separated support points")
    bcp_p.add_argument("--mu", type=float, required=True)
    bcp_p.add_argument("--draws", type=int, default=None, help="Monte Carlo draws")
    bcp_p.add_argument("--seed", type=int, default=0)
    bcp_p.set_defaults(func=_cmd_bcp)

    kinf_p = sub.add_parser("kinf", help="empirical kinf decay curve")
    kinf_p.add_argument("--preset", default=None)
    kinf_p.add_argument(
        "--family", choices=("exponential", "gaussian", "bernoulli"), default=None
    )
    kinf_p.add_argument("--params", default=None, help="family parameters, comma separated")
    kinf_p.add_argument("--mu", type=float, default=None, help="target mean")
    kinf_p.add_argument("--sizes", default="100,1000,10000")
    kinf_p.add_argument("--reps", type=int, default=200)
    kinf_p.add_argument("--seed", type=int, default=None)
    kinf_p.add_argument("--out", default=None, help="curve CSV path")
    kinf_p.set_defaults(func=_cmd_kinf)

    cq_p = sub.add_parser("check-quantile", help="quantile-condition audit")
    cq_p.add_argument("--family", choices=("exponential", "gaussian"), required=True)
    cq_p.add_argument("--params", required=True)
    cq_p.add_argument("--mu", type=float, required=True)
    cq_p.add_argument("--alpha", type=float, required=True)
    cq_p.add_argument("--rho", type=float, default=None)
    cq_p.add_argument("--rho-sweep", dest="rho_sweep", default=None, help="lo:hi:n")
    cq_p.add_argument("--out", default=None)
    cq_p.set_defaults(func=_cmd_check_quantile)

    presets_p = sub.add_parser("presets", help="list or export bundled presets")
    presets_p.add_argument("--show", default=None, help="print one preset as JSON")
    presets_p.add_argument("--out", default=None, help="write --show output to a file")
    presets_p.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
