"""Physics-guided PV yield mapping.

Thin wrapper over the C++ core: climate synthesis, clear-sky-driven yield
simulation, climate zoning, a Bayesian-regularized neural surrogate, field-data
homogenization, and reproducible experiment pipelines.
"""

from ._pvyield import (  # noqa: F401
    ClimateGrid,
    ClimateRecord,
    PvYieldError,
    Summary,
    YieldRecord,
    beam_ratio,
    diffuse_fraction,
    extraterrestrial_insolation,
    fit_zones,
    homogenize,
    load_climate_csv,
    load_yield_csv,
    predict_annual,
    run_experiment,
    save_climate_csv,
    save_yield_csv,
    simulate_grid,
    summary_metrics,
    synth_climate,
    train_surrogate,
)

__version__ = "0.1.0"

__all__ = [
    "ClimateGrid",
    "ClimateRecord",
    "PvYieldError",
    "Summary",
    "YieldRecord",
    "beam_ratio",
    "diffuse_fraction",
    "extraterrestrial_insolation",
    "fit_zones",
    "homogenize",
    "load_climate_csv",
    "load_yield_csv",
    "predict_annual",
    "run_experiment",
    "save_climate_csv",
    "save_yield_csv",
    "simulate_grid",
    "summary_metrics",
    "synth_climate",
    "train_surrogate",
]
