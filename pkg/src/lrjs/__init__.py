"""Low-rank + joint-sparse recovery of sub-sampled ultrasound RF channel data."""

from .matio import read_matrix, write_matrix
from .model import (
    FourierSupport,
    Measurements,
    RfFrame,
    SamplingPattern,
    Scheme,
    SolverConfig,
    SolverTrace,
    SpectralCoefficients,
)
from .operators import PartialFourierOp, analyze, embed, measure, project, synthesize
from .solver import SolverDiverged, objective, reconstruct, solve

__version__ = "0.1.0"
