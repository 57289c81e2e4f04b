"""Encoding-family benchmarks: run a solver matrix, tally wins, plot them."""

from .runner import RunRecord, SolverLaunchFailure, run_matrix
from .stats import IncompleteMatrix, WinStats, compute_stats

__all__ = [
    "IncompleteMatrix",
    "RunRecord",
    "SolverLaunchFailure",
    "WinStats",
    "compute_stats",
    "run_matrix",
]
