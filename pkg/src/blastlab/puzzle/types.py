"""Core puzzle data types: cells, level specifications, actions, step outcomes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

FORMAT_VERSION = 1

GOAL_PIECE_KIND = "goal_piece"

MAX_HIT_POINTS = 3  # blockers and goal pieces are capped for bounded episodes


def colour_goal(colour: int) -> str:
    """Goal-kind key for collecting cleared basic pieces of one colour."""
    return f"colour:{colour}"


def parse_colour_goal(kind: str) -> int | None:
    if kind.startswith("colour:"):
        return int(kind.split(":", 1)[1])
    return None


class CellKind(IntEnum):
    EMPTY = 0  # in a LevelSpec grid: a hole, i.e. a slot outside the playfield
    BASIC = 1
    BLOCKER = 2
    GOAL = 3
    POWER = 4


@dataclass(frozen=True)
class CellSpec:
    kind: CellKind
    colour: int | None = None
    hit_points: int = 1

    def __post_init__(self):
        if self.kind == CellKind.BASIC and self.colour is None:
            raise LevelValidationError("basic cells must have a colour")
        if self.kind in (CellKind.BLOCKER, CellKind.GOAL, CellKind.POWER, CellKind.EMPTY):
            if self.colour is not None:
                raise LevelValidationError(f"{self.kind.name} cells must not have a colour")


class LevelValidationError(ValueError):
    pass


@dataclass(frozen=True)
class Action:
    """A tap at board position (x, y); legal only on a cluster of >= 2
    same-colour basic pieces or on a power piece."""

    x: int
    y: int

    def flat_index(self, width: int) -> int:
        return self.y * width + self.x


@dataclass
class StepOutcome:
    """Per-step bookkeeping consumed by the reward function and episode loop.

    ``failed`` is set only for deadlock (no legal action remains); running
    out of moves is judged against the episode cap by ``episode_status``.
    """

    cleared_count: int = 0
    goals_collected: dict[str, int] = field(default_factory=dict)
    power_piece_created: bool = False
    power_combo_triggered: bool = False
    completed: bool = False
    failed: bool = False

    def goals_collected_total(self) -> int:
        return sum(self.goals_collected.values())


@dataclass(frozen=True)
class LevelSpec:
    """Immutable puzzle definition.

    ``cells`` is row-major (index y * width + x). EMPTY cells are holes:
    permanently unavailable slots that gravity and refill skip.
    """

    level_id: int
    width: int
    height: int
    cells: tuple[CellSpec, ...]
    colour_weights: tuple[float, ...]
    num_colours: int
    move_limit: int
    goals: dict[str, int]
    seed: int
    refill: bool = True
    power_threshold: int = 5

    def cell(self, x: int, y: int) -> CellSpec:
        return self.cells[y * self.width + x]

    def board_slots(self) -> int:
        """Number of available (non-hole) board slots."""
        return sum(1 for c in self.cells if c.kind != CellKind.EMPTY)

    def total_goal_count(self) -> int:
        return sum(self.goals.values())

    def validate(self) -> None:
        """Raise LevelValidationError if any level invariant is violated."""
        if self.width * self.height < 4:
            raise LevelValidationError("board must have at least 4 cells")
        if len(self.cells) != self.width * self.height:
            raise LevelValidationError("cell grid does not match width*height")
        if self.num_colours < 2:
            raise LevelValidationError("num_colours must be >= 2")
        if len(self.colour_weights) != self.num_colours:
            raise LevelValidationError("colour_weights length must equal num_colours")
        if any(w < 0 for w in self.colour_weights):
            raise LevelValidationError("colour weights must be non-negative")
        if abs(sum(self.colour_weights) - 1.0) > 1e-9:
            raise LevelValidationError("colour weights must sum to 1 within 1e-9")
        if self.move_limit < 1:
            raise LevelValidationError("move_limit must be >= 1")
        if self.power_threshold < 2:
            raise LevelValidationError("power_threshold must be >= 2")
        for c in self.cells:
            if c.kind == CellKind.BASIC and not (0 <= (c.colour or 0) < self.num_colours):
                raise LevelValidationError("basic cell colour out of range")
            if c.kind in (CellKind.BLOCKER, CellKind.GOAL) and not (
                1 <= c.hit_points <= MAX_HIT_POINTS
            ):
                raise LevelValidationError(
                    f"blocker/goal hit points must be in [1, {MAX_HIT_POINTS}]"
                )
        for kind, required in self.goals.items():
            if required < 1:
                raise LevelValidationError(f"goal {kind!r} requires a positive count")
            colour = parse_colour_goal(kind)
            if colour is not None:
                if not (0 <= colour < self.num_colours):
                    raise LevelValidationError(f"goal {kind!r} targets an unknown colour")
                on_board = sum(
                    1 for c in self.cells if c.kind == CellKind.BASIC and c.colour == colour
                )
                spawnable = self.refill and self.colour_weights[colour] > 0
                if not spawnable and on_board < required:
                    raise LevelValidationError(
                        f"goal {kind!r} requires {required} but only {on_board} are "
                        "collectible and the colour cannot spawn"
                    )
            elif kind == GOAL_PIECE_KIND:
                on_board = sum(1 for c in self.cells if c.kind == CellKind.GOAL)
                if on_board < required:
                    raise LevelValidationError(
                        f"goal {kind!r} requires {required} but only {on_board} goal "
                        "pieces are on the board"
                    )
            else:
                raise LevelValidationError(f"unknown goal kind {kind!r}")

    def colour_entropy(self) -> float:
        """Shannon entropy of the colour spawn weights in nats (0*log 0 = 0)."""
        return -sum(w * math.log(w) for w in self.colour_weights if w > 0)

    def to_record(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "level_id": self.level_id,
            "width": self.width,
            "height": self.height,
            "cells": [
                [int(c.kind), -1 if c.colour is None else c.colour, c.hit_points]
                for c in self.cells
            ],
            "colour_weights": list(self.colour_weights),
            "num_colours": self.num_colours,
            "move_limit": self.move_limit,
            "goals": dict(self.goals),
            "seed": self.seed,
            "refill": self.refill,
            "power_threshold": self.power_threshold,
        }

    @classmethod
    def from_record(cls, record: dict) -> "LevelSpec":
        version = record.get("format_version")
        if version != FORMAT_VERSION:
            raise LevelValidationError(f"unsupported level format version: {version!r}")
        cells = tuple(
            CellSpec(CellKind(k), None if col < 0 else col, hp)
            for k, col, hp in record["cells"]
        )
        return cls(
            level_id=record["level_id"],
            width=record["width"],
            height=record["height"],
            cells=cells,
            colour_weights=tuple(record["colour_weights"]),
            num_colours=record["num_colours"],
            move_limit=record["move_limit"],
            goals=dict(record["goals"]),
            seed=record["seed"],
            refill=record["refill"],
            power_threshold=record["power_threshold"],
        )
