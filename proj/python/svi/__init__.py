"""Stochastic variational inequality solvers (SFBF and SEG) with mini-batch oracles."""

from ._svi import (
    AffineSet,
    ConfigError,
    DegenerateSolution,
    Error,
    FeasibleSet,
    InvalidInput,
    NumericError,
    Problem,
    StepSizeRejected,
    Unsupported,
    affine_problem,
    batch_size,
    check,
    fractional_problem,
    game_problem,
    recover_equilibrium,
    residual,
    run_experiment,
    solve,
    spectral_norm,
    step_size_bound,
    verify_complementarity,
)

__all__ = [name for name in dir() if not name.startswith("_")]
