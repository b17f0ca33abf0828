from .types import (
    Action,
    CellKind,
    CellSpec,
    LevelSpec,
    LevelValidationError,
    StepOutcome,
    colour_goal,
    GOAL_PIECE_KIND,
)
from .board import BoardState, IllegalActionError, apply_action, episode_status, legal_actions
from .generator import GenerationError, GeneratorConfig, generate_level
from .oracle import intrinsic_pass_rate, playout_completion_moves
from .io import load_levels, save_levels

__all__ = [
    "Action",
    "BoardState",
    "CellKind",
    "CellSpec",
    "GenerationError",
    "GeneratorConfig",
    "GOAL_PIECE_KIND",
    "IllegalActionError",
    "LevelSpec",
    "LevelValidationError",
    "StepOutcome",
    "apply_action",
    "colour_goal",
    "episode_status",
    "generate_level",
    "intrinsic_pass_rate",
    "legal_actions",
    "load_levels",
    "playout_completion_moves",
    "save_levels",
]
