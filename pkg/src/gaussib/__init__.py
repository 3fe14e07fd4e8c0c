"""Information bottleneck rates of stationary Gaussian sources."""

from .errors import (
    ConfigError,
    ConvergenceFailure,
    GaussIBError,
    ModelError,
    NonPositiveSpectrum,
    SingularArgument,
    SingularNoise,
    SingularSystem,
    UnachievableRate,
    ZeroBand,
)
from .spectra import BivariateSpectra, CrossSpectrum, FrequencyGrid, LinearForm, Spectrum
from .waterfill import WaterFillSolution, ib_rate, scalar_ib, vector_ib

__version__ = "0.1.0"

__all__ = [
    "BivariateSpectra",
    "ConfigError",
    "ConvergenceFailure",
    "CrossSpectrum",
    "FrequencyGrid",
    "GaussIBError",
    "LinearForm",
    "ModelError",
    "NonPositiveSpectrum",
    "SingularArgument",
    "SingularNoise",
    "SingularSystem",
    "Spectrum",
    "UnachievableRate",
    "WaterFillSolution",
    "ZeroBand",
    "ib_rate",
    "scalar_ib",
    "vector_ib",
]
