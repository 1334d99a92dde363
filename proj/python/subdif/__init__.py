"""Nonlocal-in-time degenerate diffusion solver.

PC kernel calculus, L1-type implicit time stepping, a 1-D finite-volume
quasilinear solver with truncation / perturbation / Picard continuation,
and executable checks for the quantitative estimates the scheme satisfies.
"""

from ._core import (
    CheckResult,
    ContinuationRecord,
    DiscreteKernel,
    FieldNorms,
    KernelPair,
    Mesh1D,
    Nonlinearity,
    NonlocalOperator,
    PcCheck,
    ProblemSpec,
    ResolventSet,
    Solution,
    SolverConfig,
    StepDiagnostics,
    TimeGrid,
    build_problem,
    check_exponents,
    convexity_margin,
    convexity_suite,
    convolve,
    energy_check,
    hminus1_norm,
    kernel_convolve,
    mittag_leffler,
    nonlocal_apply,
    regularize,
    regularized_kernel,
    resolvent_kernel,
    run_experiment,
    sample_cell_averages,
    solve,
    space_norms,
    translation_modulus_check,
    truncate,
    verify_pc_pair,
    yosida_convergence,
)

__version__ = "0.1.0"

__all__ = [
    "CheckResult",
    "ContinuationRecord",
    "DiscreteKernel",
    "FieldNorms",
    "KernelPair",
    "Mesh1D",
    "Nonlinearity",
    "NonlocalOperator",
    "PcCheck",
    "ProblemSpec",
    "ResolventSet",
    "Solution",
    "SolverConfig",
    "StepDiagnostics",
    "TimeGrid",
    "build_problem",
    "check_exponents",
    "convexity_margin",
    "convexity_suite",
    "convolve",
    "energy_check",
    "hminus1_norm",
    "kernel_convolve",
    "mittag_leffler",
    "nonlocal_apply",
    "regularize",
    "regularized_kernel",
    "resolvent_kernel",
    "run_experiment",
    "sample_cell_averages",
    "solve",
    "space_norms",
    "translation_modulus_check",
    "truncate",
    "verify_pc_pair",
    "yosida_convergence",
]
