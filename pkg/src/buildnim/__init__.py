"""Building Nim: exact solver, scripted strategies and claim checks.

Two players alternately place tokens on stacks; once every token is placed
the board is played as ordinary Nim. ``BN(n, l)`` is the game with ``n``
tokens and ``l`` stacks.
"""

from .exceptions import (
    BudgetExceeded,
    BuildingNimError,
    InvalidInput,
    MissingGrundy,
    ParamsMismatch,
    StrategyRefusal,
    TableFormatError,
)
from .game import (
    BuildingPosition,
    GameParams,
    Move,
    apply_move,
    canonicalize,
    layer_size,
    legal_moves,
    parse_building_position,
    parse_position,
    partition_rank,
    partition_unrank,
)
from .nim import Outcome, bouton_outcome, check_ns_fact, corollary1_safe, has_k_component, is_mersenne, nim_sum
from .solver import SolveTable, misere_terminal_outcome, solve
from .strategies import (
    STRATEGY_IDS,
    high_move,
    low_move,
    make_player,
    mirror_move,
    p1_composite_move,
    p2_endgame_move,
    strategy_I_move,
    strategy_II_move,
    table_player_move,
)
from .tablebase import load_table, save_table
from .verification import CLAIMS, Report, exhaustive_strategy_check, sweep, verify

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "BuildingNimError", "InvalidInput", "MissingGrundy", "ParamsMismatch",
    "StrategyRefusal", "TableFormatError",
    "BuildingPosition", "GameParams", "Move", "apply_move", "canonicalize", "layer_size", "legal_moves",
    "parse_building_position", "parse_position", "partition_rank", "partition_unrank",
    "Outcome", "bouton_outcome", "check_ns_fact", "corollary1_safe", "has_k_component", "is_mersenne", "nim_sum",
    "SolveTable", "misere_terminal_outcome", "solve",
    "STRATEGY_IDS", "high_move", "low_move", "make_player", "mirror_move", "p1_composite_move",
    "p2_endgame_move", "strategy_I_move", "strategy_II_move", "table_player_move",
    "load_table", "save_table",
    "CLAIMS", "Report", "exhaustive_strategy_check", "sweep", "verify",
    "BuildingNimSolver",
]


def __getattr__(name):
    # scikit-learn is only imported when the estimator is asked for
    if name == "BuildingNimSolver":
        from .estimator import BuildingNimSolver

        return BuildingNimSolver
    raise AttributeError(name)
