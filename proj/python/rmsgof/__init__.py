"""Confidence levels for the root-mean-square goodness-of-fit test with a
maximum-likelihood-estimated model parameter."""

from ._core import (
    BinCounts,
    GofResult,
    Model,
    QuadratureReport,
    RmsgofError,
    SimulationReport,
    VarianceSpectrum,
    cdf_eval,
    chi2_statistic,
    confidence_level,
    load_tabulated_model,
    make_model,
    mle_estimate,
    model_spectrum,
    qq_export,
    rms_statistic,
    run_simulations,
)

__all__ = [
    "BinCounts",
    "GofResult",
    "Model",
    "QuadratureReport",
    "RmsgofError",
    "SimulationReport",
    "VarianceSpectrum",
    "cdf_eval",
    "chi2_statistic",
    "confidence_level",
    "load_tabulated_model",
    "make_model",
    "mle_estimate",
    "model_spectrum",
    "qq_export",
    "rms_statistic",
    "run_simulations",
]
