"""kposim: spectral simulator for the squeeze-driven Kerr parametric oscillator.

Fock-basis Hamiltonian construction, double- and arbitrary-precision
diagonalization with a dimension/precision escalation loop, quadrature
expectation values and level statistics, classical phase-space analysis,
and the exponential scaling of tunneling gaps with the classicality
parameter.
"""

__version__ = "0.1.0"

from .classical import (
    ClassicalExtremum,
    Contour,
    ContourSet,
    NoSaddleError,
    PhasePoint,
    contours,
    find_extrema,
    h_class,
    h_gradient,
    h_hessian,
    separatrix_energy,
)
from .eigen import (
    NonConvergenceError,
    PrecisionPlan,
    Spectrum,
    converge_gap,
    diagonalize,
    diagonalize_mp,
)
from .model import (
    FockMatrix,
    HermitianMatrix,
    ModelParams,
    ParityViolationError,
    QuadratureMatrices,
    build_hamiltonian,
    build_parity_blocks,
    build_perturbed,
    build_quadratures,
    default_dim,
    default_epsilon,
)
from .observables import (
    DensityResult,
    ExpectationRecord,
    GapRecord,
    SweepPoint,
    SweepResult,
    adjacent_gaps,
    expectations,
    gap_dip_energy,
    level_density,
    localize_doublet,
    pair_doublets,
    sweep,
)
from .scaling import (
    CoherentState,
    GapPoint,
    GapScalingFit,
    choose_gap_index,
    coherent_overlap,
    coherent_state,
    default_ne_grid,
    delta_app,
    fit_exponential,
    fit_report,
    gap_scaling_sweep,
)

__all__ = [
    "__version__",
    # model
    "ModelParams",
    "FockMatrix",
    "HermitianMatrix",
    "QuadratureMatrices",
    "ParityViolationError",
    "build_hamiltonian",
    "build_parity_blocks",
    "build_quadratures",
    "build_perturbed",
    "default_dim",
    "default_epsilon",
    # eigen
    "Spectrum",
    "PrecisionPlan",
    "NonConvergenceError",
    "diagonalize",
    "diagonalize_mp",
    "converge_gap",
    # observables
    "ExpectationRecord",
    "GapRecord",
    "DensityResult",
    "SweepPoint",
    "SweepResult",
    "expectations",
    "localize_doublet",
    "adjacent_gaps",
    "pair_doublets",
    "gap_dip_energy",
    "level_density",
    "sweep",
    # classical
    "PhasePoint",
    "ClassicalExtremum",
    "Contour",
    "ContourSet",
    "NoSaddleError",
    "h_class",
    "h_gradient",
    "h_hessian",
    "find_extrema",
    "separatrix_energy",
    "contours",
    # scaling
    "CoherentState",
    "GapPoint",
    "GapScalingFit",
    "coherent_state",
    "coherent_overlap",
    "delta_app",
    "choose_gap_index",
    "gap_scaling_sweep",
    "fit_exponential",
    "fit_report",
    "default_ne_grid",
]
