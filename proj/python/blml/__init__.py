"""Band-limited maximum-likelihood density estimation."""

from ._core import (
    BlmlError,
    ConfigError,
    ConvergenceError,
    Fit,
    RefusalError,
    cbar,
    detect_knee,
    fit,
    ise,
    kde,
    ks_uniform,
    mise,
    mnll_scan,
    pdf,
    sample,
    time_rescale_constant,
)

__all__ = [
    "BlmlError",
    "ConfigError",
    "ConvergenceError",
    "Fit",
    "RefusalError",
    "cbar",
    "detect_knee",
    "fit",
    "ise",
    "kde",
    "ks_uniform",
    "mise",
    "mnll_scan",
    "pdf",
    "sample",
    "time_rescale_constant",
]
