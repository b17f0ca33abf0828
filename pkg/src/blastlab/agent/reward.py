"""Step reward for the playtest agent."""

from __future__ import annotations

from ..puzzle.board import BoardState
from ..puzzle.types import LevelSpec, StepOutcome

GOAL_REWARD = 0.1
COMPLETION_REWARD = 0.8
MOVE_BONUS_RATE = 0.05
MOVE_BONUS_FLOOR = -0.8
POWER_COMBO_REWARD = 0.1


def compute_reward(outcome: StepOutcome, board: BoardState, level: LevelSpec) -> float:
    """0.1 per goal collected, 0.1 per power combination used, and on
    completion 0.8 plus max(-0.8, 0.05 * (move_limit - moves_used))."""
    reward = GOAL_REWARD * outcome.goals_collected_total()
    if outcome.power_combo_triggered:
        reward += POWER_COMBO_REWARD
    if outcome.completed:
        n = board.moves_used
        reward += COMPLETION_REWARD
        reward += max(MOVE_BONUS_FLOOR, MOVE_BONUS_RATE * (level.move_limit - n))
    return reward
