"""Disciplined convex programming with a built-in conic solver."""

from ._dcpx import (
    Constant,
    Constraint,
    Error,
    Expr,
    LoadedProblem,
    Parameter,
    Problem,
    Solution,
    Variable,
    abs,
    canonicalize,
    curvature,
    logspace,
    maximize,
    maximum,
    minimize,
    minimum,
    norm1,
    norm2,
    norm_inf,
    parse,
    pos,
    run_cli,
    sign,
    solve,
    square,
    sum,
    sum_squares,
    sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
