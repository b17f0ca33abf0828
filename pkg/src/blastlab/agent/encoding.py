"""Observation encoding: hit-point channels per mechanic plus episode scalars."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..puzzle.board import BoardState, legal_actions
from ..puzzle.types import CellKind, LevelSpec

_BASIC = int(CellKind.BASIC)
_BLOCKER = int(CellKind.BLOCKER)
_GOAL = int(CellKind.GOAL)
_POWER = int(CellKind.POWER)


def observation_channels(level: LevelSpec) -> int:
    """One channel per colour plus blocker, goal-piece and power-piece channels."""
    return level.num_colours + 3


@dataclass
class Observation:
    """Board tensor of shape (height, width, channels) where the matching
    channel holds the piece's hit points, plus episode scalars
    [moves_taken, moves_left, total_goals_remaining] and the legal-action mask."""

    tensor: np.ndarray
    scalars: np.ndarray
    action_mask: np.ndarray

    def flat(self) -> np.ndarray:
        return np.concatenate([self.tensor.reshape(-1), self.scalars])


def encode_observation(board: BoardState, level: LevelSpec) -> Observation:
    h, w = board.kind.shape
    c = level.num_colours
    tensor = np.zeros((h, w, c + 3), dtype=np.float32)
    kind = board.kind
    hp = board.hit_points

    ys, xs = np.nonzero(kind == _BASIC)
    if ys.size:
        tensor[ys, xs, board.colour[ys, xs]] = hp[ys, xs]
    for offset, k in ((c, _BLOCKER), (c + 1, _GOAL), (c + 2, _POWER)):
        ys, xs = np.nonzero(kind == k)
        if ys.size:
            tensor[ys, xs, offset] = hp[ys, xs]

    scalars = np.array(
        [
            board.moves_used,
            level.move_limit - board.moves_used,
            sum(board.goals_remaining.values()),
        ],
        dtype=np.float32,
    )
    return Observation(tensor=tensor, scalars=scalars, action_mask=legal_actions(board).copy())
