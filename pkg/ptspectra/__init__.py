"""
ptspectra: spectra of PT-symmetric Hamiltonians from truncated matrices.

Dense non-Hermitian eigenvalues by shifted QR, oscillator-basis matrices of
the coupled-oscillator family H2 and the one-dimensional family H3,
eigenvalue continuation in the coupling with reality certificates and
threshold bisection, and Rayleigh-Schrodinger series.
"""

__version__ = "0.1.0"

from ptspectra.errors import (
    BracketError,
    ConvergenceError,
    DegenerateLevelError,
    InvalidInputError,
    MatchingAmbiguityError,
    NumericalError,
    PTSpectraError,
    QuadratureError,
    SeriesError,
)
from ptspectra.logger import Logger
from ptspectra.decorators import log_call
from ptspectra.configure import configure
from ptspectra.sinks import JSONReportSink, MemorySink, RunLogSink, TrajectoryCSVSink
from ptspectra.terminal import TerminalSink
from ptspectra.linalg import conjugation_defect, eigen_residual, eigenvalues
from ptspectra.basis import BasisSpec
from ptspectra.hamiltonians import ModelH2, build_h2, build_h3
from ptspectra.families import DetunedFamily, GainCouplingFamily, H2Family, H3Family
from ptspectra.scan import (
    ScanConfig,
    certified_range,
    certify_levels,
    certify_reality,
    locate_threshold,
    scan,
    truncation_convergence,
)
from ptspectra.rspe import partial_sum, radius_estimate, rspe_matrix, series_lambda_pm

__all__ = [
    "__version__",
    "PTSpectraError",
    "InvalidInputError",
    "NumericalError",
    "ConvergenceError",
    "QuadratureError",
    "MatchingAmbiguityError",
    "BracketError",
    "DegenerateLevelError",
    "SeriesError",
    "Logger",
    "log_call",
    "configure",
    "MemorySink",
    "RunLogSink",
    "TerminalSink",
    "TrajectoryCSVSink",
    "JSONReportSink",
    "eigenvalues",
    "eigen_residual",
    "conjugation_defect",
    "BasisSpec",
    "ModelH2",
    "build_h2",
    "build_h3",
    "H3Family",
    "H2Family",
    "GainCouplingFamily",
    "DetunedFamily",
    "ScanConfig",
    "scan",
    "certify_levels",
    "certify_reality",
    "certified_range",
    "locate_threshold",
    "truncation_convergence",
    "rspe_matrix",
    "series_lambda_pm",
    "radius_estimate",
    "partial_sum",
]
