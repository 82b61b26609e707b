"""Seeded Monte Carlo regret benchmark.

A replication plays one policy against one bandit instance for a fixed
number of pulls, accumulating pseudo-regret (the suboptimality gap of
each pulled arm).  Replication i of a run with master seed s always
uses the derived seed ``derive_seed(s, i)``, so results are bit
identical for any worker count; aggregation collects traces by
replication index, never by completion order.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .distributions import RewardModel, model_from_dict
from .policies import PolicySpec, make_policy, validate_policy_spec
from .seeding import derive_seed, make_rng

__all__ = [
    "BanditInstance",
    "RegretTrace",
    "PolicySummary",
    "ExperimentConfig",
    "SchemaError",
    "checkpoint_grid",
    "run_replication",
    "replay_pull_sequence",
    "run_experiment",
    "write_csv",
    "read_csv",
]

CSV_COLUMNS = ("policy", "checkpoint", "mean_regret", "q05", "q95", "std", "replications")


class SchemaError(ValueError):
    """Results file does not match the expected CSV schema."""


@dataclass(frozen=True)
class BanditInstance:
    """A tuple of reward models with cached gap information."""

    arms: tuple[RewardModel, ...]

    def __post_init__(self) -> None:
        if not self.arms:
            raise ValueError("instance needs at least one arm")
        means = np.array([a.mean() for a in self.arms])
        object.__setattr__(self, "_means", means)
        object.__setattr__(self, "_gaps", float(means.max()) - means)

    @classmethod
    def from_dicts(cls, arm_dicts) -> "BanditInstance":
        return cls(tuple(model_from_dict(d) for d in arm_dicts))

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    @property
    def means(self) -> np.ndarray:
        return self._means

    @property
    def gaps(self) -> np.ndarray:
        return self._gaps

    @property
    def best_arm(self) -> int:
        return int(np.argmax(self._means))


@dataclass(frozen=True)
class RegretTrace:
    checkpoints: np.ndarray
    regret: np.ndarray
    seed: int


@dataclass(frozen=True)
class PolicySummary:
    policy: str
    checkpoints: np.ndarray
    mean_regret: np.ndarray
    q05: np.ndarray
    q95: np.ndarray
    std: np.ndarray
    replications: int


@dataclass(frozen=True)
class ExperimentConfig:
    arms: tuple[dict, ...]
    policies: tuple[PolicySpec, ...]
    horizon: int
    replications: int
    seed: int = 0
    stride: int | None = None
    out: str | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.arms:
            raise ValueError("config field 'instance' must list at least one arm")
        if not self.policies:
            raise ValueError("config field 'policies' must list at least one policy")
        if self.horizon < 1:
            raise ValueError("config field 'horizon' must be >= 1")
        if self.replications < 1:
            raise ValueError("config field 'replications' must be >= 1")
        if self.stride is not None and self.stride < 1:
            raise ValueError("config field 'stride' must be >= 1 when given")
        if self.workers < 1:
            raise ValueError("config field 'workers' must be >= 1")
        object.__setattr__(self, "arms", tuple(dict(a) for a in self.arms))
        object.__setattr__(self, "policies", tuple(self.policies))
        for spec in self.policies:
            validate_policy_spec(spec)
        for arm in self.arms:
            model_from_dict(arm)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        for name in ("instance", "policies", "horizon", "replications"):
            if name not in raw:
                raise ValueError(f"config is missing required field {name!r}")
        policies = []
        for i, p in enumerate(raw["policies"]):
            if "kind" not in p:
                raise ValueError(f"policy #{i + 1} is missing its 'kind'")
            policies.append(
                PolicySpec(
                    kind=p["kind"],
                    params=dict(p.get("params", {})),
                    label=p.get("label", ""),
                    seed_offset=int(p.get("seed_offset", 0)),
                )
            )
        return cls(
            arms=tuple(raw["instance"]),
            policies=tuple(policies),
            horizon=int(raw["horizon"]),
            replications=int(raw["replications"]),
            seed=int(raw.get("seed", 0)),
            stride=raw.get("stride"),
            out=raw.get("out"),
            workers=int(raw.get("workers", 1)),
        )

    def to_dict(self) -> dict:
        out = {
            "instance": [dict(a) for a in self.arms],
            "policies": [
                {"kind": p.kind, "params": dict(p.params), "label": p.label}
                for p in self.policies
            ],
            "horizon": self.horizon,
            "replications": self.replications,
            "seed": self.seed,
        }
        if self.stride is not None:
            out["stride"] = self.stride
        if self.out is not None:
            out["out"] = self.out
        out["workers"] = self.workers
        return out


def checkpoint_grid(horizon: int, stride: int | None) -> np.ndarray:
    """Pull counts at which regret is recorded; always includes the horizon."""
    step = stride if stride is not None else max(1, horizon // 500)
    grid = list(range(step, horizon + 1, step))
    if not grid or grid[-1] != horizon:
        grid.append(horizon)
    return np.array(grid, dtype=int)


def _simulate(instance, spec, horizon, seed, stride, record_arms=False):
    rng = make_rng(seed)
    policy = make_policy(spec, instance.n_arms)
    grid = checkpoint_grid(horizon, stride)
    gaps = instance.gaps
    arms_models = instance.arms
    regret = 0.0
    out = np.empty(grid.size)
    pulled: list[int] | None = [] if record_arms else None
    cp = 0
    t = 0
    while t < horizon:
        for arm in policy.step(rng):
            if t >= horizon:
                break
            reward = arms_models[arm].sample(rng)
            policy.update(arm, reward, rng)
            if pulled is not None:
                pulled.append(arm)
            regret += gaps[arm]
            t += 1
            if t == grid[cp]:
                out[cp] = regret
                cp += 1
    return RegretTrace(grid, out, seed), pulled


def run_replication(
    instance: BanditInstance,
    spec: PolicySpec,
    horizon: int,
    seed: int,
    stride: int | None = None,
) -> RegretTrace:
    """One seeded run; bit-identical for identical arguments."""
    trace, _ = _simulate(instance, spec, horizon, seed, stride)
    return trace


def replay_pull_sequence(
    instance: BanditInstance,
    spec: PolicySpec,
    horizon: int,
    seed: int,
) -> np.ndarray:
    """The arm pulled at each step of a replication, for diagnostics."""
    _, pulled = _simulate(instance, spec, horizon, seed, None, record_arms=True)
    return np.array(pulled, dtype=int)


def _cell_seed(master: int, rep: int, spec: PolicySpec) -> int:
    seed = derive_seed(master, rep)
    if spec.seed_offset:
        seed = derive_seed(seed, spec.seed_offset)
    return seed


def _run_cell(args) -> np.ndarray:
    arm_dicts, spec, horizon, stride, seed = args
    instance = BanditInstance.from_dicts(arm_dicts)
    return run_replication(instance, spec, horizon, seed, stride).regret


def _nearest_rank(sorted_cols: np.ndarray, level: float) -> np.ndarray:
    n = sorted_cols.shape[0]
    idx = max(math.ceil(level * n), 1) - 1
    return sorted_cols[idx]


def run_experiment(config: ExperimentConfig) -> list[PolicySummary]:
    """All replications of every policy, aggregated per checkpoint."""
    grid = checkpoint_grid(config.horizon, config.stride)
    tasks = [
        (config.arms, spec, config.horizon, config.stride, _cell_seed(config.seed, r, spec))
        for spec in config.policies
        for r in range(config.replications)
    ]
    if config.workers == 1:
        results = [_run_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunk = max(1, len(tasks) // (4 * config.workers))
            results = list(pool.map(_run_cell, tasks, chunksize=chunk))
    summaries = []
    n = config.replications
    for i, spec in enumerate(config.policies):
        block = np.vstack(results[i * n : (i + 1) * n])
        ordered = np.sort(block, axis=0)
        std = block.std(axis=0, ddof=1) if n > 1 else np.zeros(grid.size)
        summaries.append(
            PolicySummary(
                policy=spec.display_label(),
                checkpoints=grid,
                mean_regret=block.mean(axis=0),
                q05=_nearest_rank(ordered, 0.05),
                q95=_nearest_rank(ordered, 0.95),
                std=std,
                replications=n,
            )
        )
    if config.out:
        write_csv(summaries, config.out)
    return summaries


def _fmt_float(x: float) -> str:
    return f"{x:.12g}"


def write_csv(summaries, path) -> None:
    """Stable schema, LF endings, floats at 12 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for s in summaries:
            for j, t in enumerate(s.checkpoints):
                writer.writerow(
                    [
                        s.policy,
                        int(t),
                        _fmt_float(s.mean_regret[j]),
                        _fmt_float(s.q05[j]),
                        _fmt_float(s.q95[j]),
                        _fmt_float(s.std[j]),
                        s.replications,
                    ]
                )


def read_csv(path) -> list[PolicySummary]:
    """Inverse of write_csv; raises SchemaError on malformed input."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns: {', '.join(missing)}")
        if list(header) != list(CSV_COLUMNS):
            raise SchemaError(f"{path}: unexpected column order {header}")
        groups: dict[str, list] = {}
        order: list[str] = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CSV_COLUMNS):
                raise SchemaError(f"{path}: line {lineno}: expected 7 fields")
            try:
                parsed = (
                    int(row[1]),
                    float(row[2]),
                    float(row[3]),
                    float(row[4]),
                    float(row[5]),
                    int(row[6]),
                )
            except ValueError:
                raise SchemaError(f"{path}: line {lineno}: non-numeric field") from None
            if row[0] not in groups:
                groups[row[0]] = []
                order.append(row[0])
            groups[row[0]].append(parsed)
    summaries = []
    for name in order:
        rows = groups[name]
        reps = {r[5] for r in rows}
        if len(reps) != 1:
            raise SchemaError(f"{path}: inconsistent replication counts for {name!r}")
        summaries.append(
            PolicySummary(
                policy=name,
                checkpoints=np.array([r[0] for r in rows], dtype=int),
                mean_regret=np.array([r[1] for r in rows]),
                q05=np.array([r[2] for r in rows]),
                q95=np.array([r[3] for r in rows]),
                std=np.array([r[4] for r in rows]),
                replications=reps.pop(),
            )
        )
    return summaries
