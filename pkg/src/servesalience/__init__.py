"""Structural estimation of tennis players' taste for winning points in long rallies."""

from .estimation import ServeStats, mle_stats
from .ingest import ServeCounts
from .structural import StructuralFit, fit_player, solve_lambda

__all__ = ["ServeCounts", "ServeStats", "StructuralFit", "fit_player", "mle_stats", "solve_lambda"]
__version__ = "0.1.0"
