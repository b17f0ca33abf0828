"""Seeded level generator with a difficulty ramp over level ids."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .board import BoardState, legal_actions
from .types import (
    CellKind,
    CellSpec,
    GOAL_PIECE_KIND,
    LevelSpec,
    LevelValidationError,
    colour_goal,
)


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    """Ranges and ramp constants for synthetic levels.

    Difficulty is steered by ``tightness``: the fraction of a playout's
    expected clearing capacity (move_limit * clears_per_move) that the
    colour-collect goals consume. The ramp keeps early levels forgiving and
    late levels tight.
    """

    width: int = 9
    height: int = 7
    num_colours_range: tuple[int, int] = (4, 5)
    weight_style: str = "random"  # "random" (Dirichlet draw) or "uniform"
    weight_alpha: float = 10.0
    min_colour_weight: float = 0.05
    n_levels: int = 500
    tutorial_levels: int = 100
    tutorial_tightness: tuple[float, float] = (0.55, 0.95)
    main_tightness: tuple[float, float] = (1.00, 1.45)
    tightness_noise: float = 0.06
    clears_per_move: float = 4.6  # empirical greedy estimate for a 9x7 board, scaled by 4/C
    move_limit_range: tuple[int, int] = (10, 24)
    holes_max: int = 4
    blocker_rate_max: float = 0.08
    goal_piece_prob: float = 0.35
    goal_piece_max: int = 2
    power_threshold: int = 5
    refill: bool = True

    def validate(self) -> None:
        slots = self.width * self.height - self.holes_max
        if slots < 4:
            raise GenerationError("board capacity: holes leave fewer than 4 playable slots")
        reserved = self.goal_piece_max + int(np.ceil(slots * self.blocker_rate_max))
        if reserved >= slots:
            raise GenerationError(
                "board capacity: goal pieces and blockers cannot exceed playable slots"
            )
        if self.num_colours_range[0] < 2:
            raise GenerationError("num_colours: at least 2 colours required")
        if self.move_limit_range[0] < 1:
            raise GenerationError("move_limit: must be at least 1")
        if self.weight_style not in ("random", "uniform"):
            raise GenerationError(f"weight_style: unknown style {self.weight_style!r}")


def _tightness(config: GeneratorConfig, level_id: int, rng: np.random.Generator) -> float:
    if level_id < config.tutorial_levels:
        lo, hi = config.tutorial_tightness
        frac = level_id / max(1, config.tutorial_levels - 1)
    else:
        lo, hi = config.main_tightness
        span = max(1, config.n_levels - config.tutorial_levels - 1)
        frac = (level_id - config.tutorial_levels) / span
    t = lo + (hi - lo) * min(1.0, frac)
    t += rng.normal(0.0, config.tightness_noise)
    return float(np.clip(t, 0.15, 2.5))


def _colour_weights(config: GeneratorConfig, c: int, rng: np.random.Generator) -> np.ndarray:
    if config.weight_style == "uniform":
        return np.full(c, 1.0 / c)
    w = rng.dirichlet(np.full(c, config.weight_alpha))
    w = np.maximum(w, config.min_colour_weight)
    return w / w.sum()


def generate_level(config: GeneratorConfig, level_id: int, seed: int) -> LevelSpec:
    """Generate a valid LevelSpec, deterministic in (config, level_id, seed)."""
    config.validate()
    rng = np.random.default_rng(np.random.SeedSequence([seed, level_id]))
    w, h = config.width, config.height
    t = _tightness(config, level_id, rng)

    c_lo, c_hi = config.num_colours_range
    num_colours = int(rng.integers(c_lo, c_hi + 1))
    weights = _colour_weights(config, num_colours, rng)

    n_holes = int(rng.integers(0, config.holes_max + 1))
    positions = rng.permutation(w * h)
    holes = set(positions[:n_holes].tolist())
    open_slots = [int(p) for p in positions[n_holes:]]

    slots = len(open_slots)
    n_blockers = int(round(slots * rng.uniform(0.0, config.blocker_rate_max) * (0.4 + t)))
    n_goal_pieces = 0
    if rng.random() < config.goal_piece_prob:
        gp_cap = 1 if level_id < config.tutorial_levels else config.goal_piece_max
        n_goal_pieces = int(rng.integers(1, gp_cap + 1))
    if n_blockers + n_goal_pieces >= slots:
        raise GenerationError(
            "board capacity: blockers and goal pieces would fill every playable slot"
        )

    blocker_cells = set(open_slots[:n_blockers])
    goal_cells = set(open_slots[n_blockers : n_blockers + n_goal_pieces])

    m_lo, m_hi = config.move_limit_range
    move_limit = int(rng.integers(m_lo, m_hi + 1))

    # colour-collect goals sized against the board's expected clearing capacity
    cpm = config.clears_per_move * (4.0 / num_colours)
    n_targets = 1 if num_colours < 4 or rng.random() < 0.5 else 2
    # collect goals target the most common colours: rare-colour clusters are
    # almost never the tap of choice, which would decouple goals from tightness
    target_colours = np.argsort(-weights, kind="stable")[:n_targets]
    goals: dict[str, int] = {}
    budget = move_limit * cpm * t - 2.5 * n_goal_pieces
    if n_targets == 2:
        budget *= 0.75  # both colour goals must be met; a split budget plays tighter
    for col in sorted(int(c) for c in target_colours):
        required = int(round(max(2.0, budget * weights[col])))
        goals[colour_goal(col)] = required
    if n_goal_pieces > 0:
        goals[GOAL_PIECE_KIND] = n_goal_pieces

    board_seed = int(rng.integers(0, 2**62))
    goal_hp = lambda: 1  # higher goal hit points make difficulty spike unpredictably
    blocker_hp = lambda: int(rng.integers(1, 4))

    for attempt in range(30):
        cells: list[CellSpec] = []
        basic_colours = rng.choice(num_colours, size=w * h, p=weights)
        for idx in range(w * h):
            if idx in holes:
                cells.append(CellSpec(CellKind.EMPTY))
            elif idx in blocker_cells:
                cells.append(CellSpec(CellKind.BLOCKER, hit_points=blocker_hp()))
            elif idx in goal_cells:
                cells.append(CellSpec(CellKind.GOAL, hit_points=goal_hp()))
            else:
                cells.append(CellSpec(CellKind.BASIC, colour=int(basic_colours[idx])))
        level = LevelSpec(
            level_id=level_id,
            width=w,
            height=h,
            cells=tuple(cells),
            colour_weights=tuple(float(v) for v in weights),
            num_colours=num_colours,
            move_limit=move_limit,
            goals=goals,
            seed=board_seed,
            refill=config.refill,
            power_threshold=config.power_threshold,
        )
        if legal_actions(BoardState.from_level(level)).any():
            try:
                level.validate()
            except LevelValidationError as exc:
                raise GenerationError(str(exc)) from exc
            return level
    raise GenerationError("initial board: no legal action after 30 fill attempts")


def generate_levels(config: GeneratorConfig, count: int, seed: int) -> list[LevelSpec]:
    cfg = replace(config, n_levels=count)
    return [generate_level(cfg, level_id, seed) for level_id in range(count)]
