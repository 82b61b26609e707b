"""Figure rendering for bandit benchmark CSV files."""

from .figures import (
    COLOR_CYCLE,
    KINF_COLUMNS,
    REGRET_COLUMNS,
    PlotSpec,
    RegretSeries,
    SchemaError,
    kinf_figure,
    load_kinf,
    load_regret,
    regret_figure,
    save_figure,
)

__all__ = [
    "COLOR_CYCLE",
    "KINF_COLUMNS",
    "REGRET_COLUMNS",
    "PlotSpec",
    "RegretSeries",
    "SchemaError",
    "kinf_figure",
    "load_kinf",
    "load_regret",
    "regret_figure",
    "save_figure",
]
