"""Biased (1, q) Maker-Breaker games on arithmetic-progression boards."""

from __future__ import annotations

from .board import (
    CYCLIC_THREE_AP,
    SCHUR,
    THREE_AP,
    Family,
    GameConfig,
    GameState,
    IntervalScheme,
    completions,
    enumerate_winning_sets,
    kap,
    maker_has_won,
    parse_family,
    threats,
)
from .lab import (
    BoundKind,
    CalibrationResult,
    ExperimentRecord,
    SweepPlan,
    calibrate,
    empirical_threshold,
    evaluate_bound,
    f_profile,
    sweep,
)
from .referee import Transcript, play_game, replay
from .solver import exact_threshold, naive_solve, solve

__version__ = "0.1.0"

__all__ = [
    "CYCLIC_THREE_AP",
    "SCHUR",
    "THREE_AP",
    "BoundKind",
    "CalibrationResult",
    "ExperimentRecord",
    "Family",
    "GameConfig",
    "GameState",
    "IntervalScheme",
    "SweepPlan",
    "Transcript",
    "calibrate",
    "completions",
    "empirical_threshold",
    "enumerate_winning_sets",
    "evaluate_bound",
    "exact_threshold",
    "f_profile",
    "kap",
    "maker_has_won",
    "naive_solve",
    "parse_family",
    "play_game",
    "replay",
    "solve",
    "sweep",
    "threats",
]
