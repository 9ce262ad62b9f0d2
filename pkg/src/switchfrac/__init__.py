"""Spectral solvers for a fractional equation that switches from wave-type to
diffusion-type dynamics at a prescribed time.

The package evaluates two-parameter Mittag-Leffler functions, builds the
modal solution of the direct problem and recovers an unknown interface
function (a velocity mismatch or a position jump at the switch) from a
snapshot of the solution.
"""

from switchfrac.diagnostics import (
    TruncationReport,
    lemma1_tail,
    lemma2_tail,
    lemma3_peak,
    lemma4_tail,
    truncation_report,
)
from switchfrac.forward import (
    ConfigError,
    Forcing,
    ModeCoefficients,
    PiecewiseModeSolution,
    ProblemConfig,
    SeriesSolution,
    solve_direct,
    velocity_matched_B,
)
from switchfrac.inverse import (
    BoundaryConditionError,
    InverseInput,
    InverseResult,
    NearZeroDenominator,
    solve_problem1,
    solve_problem2,
)
from switchfrac.mittag_leffler import (
    MittagLefflerAccuracyError,
    MittagLefflerDomainError,
    MLQuery,
    MLResult,
    ml_decay_margin,
    ml_eval,
)
from switchfrac.quadrature import (
    ConvolutionSpec,
    QuadratureError,
    TimeSamples,
    conv_integral,
    ik_closed_form,
)
from switchfrac.sine_basis import GridFunction, SineSeries, analyze, eigenvalue, synthesize

__version__ = "0.1.0"

__all__ = [
    "BoundaryConditionError",
    "ConfigError",
    "ConvolutionSpec",
    "Forcing",
    "GridFunction",
    "InverseInput",
    "InverseResult",
    "MLQuery",
    "MLResult",
    "MittagLefflerAccuracyError",
    "MittagLefflerDomainError",
    "ModeCoefficients",
    "NearZeroDenominator",
    "PiecewiseModeSolution",
    "ProblemConfig",
    "QuadratureError",
    "SeriesSolution",
    "SineSeries",
    "TimeSamples",
    "TruncationReport",
    "analyze",
    "conv_integral",
    "eigenvalue",
    "ik_closed_form",
    "lemma1_tail",
    "lemma2_tail",
    "lemma3_peak",
    "lemma4_tail",
    "ml_decay_margin",
    "ml_eval",
    "solve_direct",
    "solve_problem1",
    "solve_problem2",
    "synthesize",
    "truncation_report",
    "velocity_matched_B",
]
