"""Dirichlet sampling bandits: duel engine, kinf toolbox, regret harness."""

from .dirichlet import (
    DirichletParams,
    PointSet,
    WeightVector,
    bcp_exact,
    bcp_lower_bound,
    bcp_monte_carlo,
    bcp_upper_bound_kinf,
    draw_dirichlet,
)
from .distributions import (
    Bernoulli,
    Empirical,
    Exponential,
    Gaussian,
    GaussianMixture,
    PointMassMixture,
    RewardModel,
    TruncatedModel,
    Uniform,
    load_empirical,
    truncate,
)
from .harness import (
    BanditInstance,
    ExperimentConfig,
    PolicySummary,
    RegretTrace,
    read_csv,
    run_experiment,
    run_replication,
    write_csv,
)
from .kinf import (
    EmpiricalDist,
    KinfResult,
    empirical_kinf,
    empirical_kinf_curve,
    kinf_dual,
    kinf_parametric,
    loglog_slope,
    necessary_bonus,
    quantile_condition_check,
)
from .policies import (
    ArmHistory,
    PolicySpec,
    RoundDecision,
    bds_index,
    bonus_gap,
    ds_round,
    make_policy,
    npts_index,
    qds_index,
    rds_index,
    select_leader,
)

__version__ = "0.1.0"
