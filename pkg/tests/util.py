"""Hand-construction helpers shared across test modules."""

from __future__ import annotations

from blastlab.puzzle.types import CellKind, CellSpec, LevelSpec


def parse_cell(token) -> CellSpec:
    """Tokens: int = basic of that colour; '.' = hole; 'P' = power piece;
    'Bn' = blocker with n hit points; 'Gn' = goal piece with n hit points."""
    if isinstance(token, int):
        return CellSpec(CellKind.BASIC, colour=token)
    if token == ".":
        return CellSpec(CellKind.EMPTY)
    if token == "P":
        return CellSpec(CellKind.POWER)
    if token.startswith("B"):
        return CellSpec(CellKind.BLOCKER, hit_points=int(token[1:] or 1))
    if token.startswith("G"):
        return CellSpec(CellKind.GOAL, hit_points=int(token[1:] or 1))
    raise ValueError(f"unknown cell token {token!r}")


def make_level(
    rows,
    goals=None,
    move_limit=10,
    num_colours=4,
    colour_weights=None,
    refill=True,
    power_threshold=5,
    seed=0,
    level_id=0,
) -> LevelSpec:
    height = len(rows)
    width = len(rows[0])
    cells = tuple(parse_cell(tok) for row in rows for tok in row)
    if colour_weights is None:
        colour_weights = tuple(1.0 / num_colours for _ in range(num_colours))
    return LevelSpec(
        level_id=level_id,
        width=width,
        height=height,
        cells=cells,
        colour_weights=tuple(colour_weights),
        num_colours=num_colours,
        move_limit=move_limit,
        goals=dict(goals or {}),
        seed=seed,
        refill=refill,
        power_threshold=power_threshold,
    )
