"""Board state and blast mechanics: clusters, damage, gravity, refill."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .types import (
    Action,
    CellKind,
    CellSpec,
    GOAL_PIECE_KIND,
    LevelSpec,
    StepOutcome,
    colour_goal,
)

NO_COLOUR = -1

_ORTHO = ((0, 1), (0, -1), (1, 0), (-1, 0))

_EMPTY = int(CellKind.EMPTY)
_BASIC = int(CellKind.BASIC)
_BLOCKER = int(CellKind.BLOCKER)
_GOAL = int(CellKind.GOAL)
_POWER = int(CellKind.POWER)


class IllegalActionError(ValueError):
    pass


def _level_template(level: LevelSpec):
    """Arrays derived from a LevelSpec, cached on the instance (immutable)."""
    cached = getattr(level, "_board_template", None)
    if cached is not None:
        return cached
    h, w = level.height, level.width
    kind = np.zeros((h, w), dtype=np.int8)
    colour = np.full((h, w), NO_COLOUR, dtype=np.int8)
    hp = np.zeros((h, w), dtype=np.int8)
    for y in range(h):
        for x in range(w):
            c = level.cell(x, y)
            kind[y, x] = int(c.kind)
            if c.colour is not None:
                colour[y, x] = c.colour
            if c.kind != CellKind.EMPTY:
                hp[y, x] = c.hit_points
    hole = kind == _EMPTY
    segments = _column_segments(hole)
    cum_weights = np.cumsum(np.asarray(level.colour_weights, dtype=np.float64))
    template = (kind, colour, hp, hole, segments, cum_weights)
    object.__setattr__(level, "_board_template", template)
    return template


@dataclass
class BoardState:
    """Mutable episode state for one level.

    Cell grids are (height, width) arrays indexed [y, x]. Holes (slots
    outside the playfield) stay EMPTY for the whole episode; every other
    cell is refilled at the end of each step when the level enables refill.
    """

    level: LevelSpec
    kind: np.ndarray
    colour: np.ndarray
    hit_points: np.ndarray
    hole: np.ndarray
    moves_used: int
    goals_remaining: dict[str, int]
    rng: np.random.Generator
    _col_segments: list[list[tuple[int, int]]] = field(default_factory=list, repr=False)
    _cum_weights: np.ndarray | None = field(default=None, repr=False)
    _mask_cache: tuple[int, np.ndarray] | None = field(default=None, repr=False)

    @classmethod
    def from_level(cls, level: LevelSpec, seed: int | None = None) -> "BoardState":
        kind, colour, hp, hole, segments, cum_weights = _level_template(level)
        board = cls(
            level=level,
            kind=kind.copy(),
            colour=colour.copy(),
            hit_points=hp.copy(),
            hole=hole,
            moves_used=0,
            goals_remaining=dict(level.goals),
            rng=np.random.default_rng(level.seed if seed is None else seed),
        )
        board._col_segments = segments
        board._cum_weights = cum_weights
        return board

    def copy(self) -> "BoardState":
        clone = BoardState(
            level=self.level,
            kind=self.kind.copy(),
            colour=self.colour.copy(),
            hit_points=self.hit_points.copy(),
            hole=self.hole,
            moves_used=self.moves_used,
            goals_remaining=dict(self.goals_remaining),
            rng=np.random.default_rng(),
        )
        clone.rng.bit_generator.state = self.rng.bit_generator.state
        clone._col_segments = self._col_segments
        clone._cum_weights = self._cum_weights
        return clone

    def cell(self, x: int, y: int) -> CellSpec:
        k = CellKind(int(self.kind[y, x]))
        col = int(self.colour[y, x])
        return CellSpec(k, None if col == NO_COLOUR else col, int(self.hit_points[y, x]))

    def goals_met(self) -> bool:
        return all(v == 0 for v in self.goals_remaining.values())

    def occupied_count(self) -> int:
        return int(np.count_nonzero(self.kind != _EMPTY))


def _column_segments(hole: np.ndarray) -> list[list[tuple[int, int]]]:
    """Per-column maximal runs of non-hole cells, as (y_start, y_end) with
    y_end exclusive, indexed by column. Pieces fall to the bottom of their
    segment; holes act as fixed shelves."""
    h, w = hole.shape
    segments: list[list[tuple[int, int]]] = []
    for x in range(w):
        runs = []
        y = 0
        while y < h:
            if hole[y, x]:
                y += 1
                continue
            start = y
            while y < h and not hole[y, x]:
                y += 1
            runs.append((start, y))
        segments.append(runs)
    return segments


def legal_actions(board: BoardState) -> np.ndarray:
    """Boolean mask over all width*height positions (row-major, y*width+x).

    True where the cell holds a power piece or a basic piece with at least
    one orthogonally adjacent basic piece of the same colour. The result is
    cached per move counter; callers must not mutate it.
    """
    if board._mask_cache is not None and board._mask_cache[0] == board.moves_used:
        return board._mask_cache[1]
    kind, colour = board.kind, board.colour
    basic = kind == _BASIC
    mask = kind == _POWER
    pair = basic[:, :-1] & basic[:, 1:] & (colour[:, :-1] == colour[:, 1:])
    mask[:, :-1] |= pair
    mask[:, 1:] |= pair
    pair = basic[:-1, :] & basic[1:, :] & (colour[:-1, :] == colour[1:, :])
    mask[:-1, :] |= pair
    mask[1:, :] |= pair
    flat = mask.reshape(-1)
    board._mask_cache = (board.moves_used, flat)
    return flat


def _is_legal(board: BoardState, x: int, y: int) -> bool:
    h, w = board.kind.shape
    if not (0 <= x < w and 0 <= y < h):
        return False
    k = board.kind[y, x]
    if k == _POWER:
        return True
    if k != _BASIC:
        return False
    c = board.colour[y, x]
    for dx, dy in _ORTHO:
        nx, ny = x + dx, y + dy
        if 0 <= nx < w and 0 <= ny < h:
            if board.kind[ny, nx] == _BASIC and board.colour[ny, nx] == c:
                return True
    return False


def flood_fill_cluster(board: BoardState, x: int, y: int) -> list[tuple[int, int]]:
    """All positions of the same-colour basic cluster containing (x, y)."""
    target = board.colour[y, x]
    h, w = board.kind.shape
    seen = {(x, y)}
    queue = deque([(x, y)])
    out = []
    while queue:
        cx, cy = queue.popleft()
        out.append((cx, cy))
        for dx, dy in _ORTHO:
            nx, ny = cx + dx, cy + dy
            if 0 <= nx < w and 0 <= ny < h and (nx, ny) not in seen:
                if board.kind[ny, nx] == _BASIC and board.colour[ny, nx] == target:
                    seen.add((nx, ny))
                    queue.append((nx, ny))
    return out


def _credit_goal(board: BoardState, outcome: StepOutcome, kind: str, count: int = 1) -> None:
    remaining = board.goals_remaining.get(kind)
    if remaining is None or remaining == 0 or count == 0:
        return
    credited = min(count, remaining)
    board.goals_remaining[kind] = remaining - credited
    outcome.goals_collected[kind] = outcome.goals_collected.get(kind, 0) + credited


def _remove_basic(board: BoardState, x: int, y: int, outcome: StepOutcome, touched) -> None:
    _credit_goal(board, outcome, colour_goal(int(board.colour[y, x])))
    board.kind[y, x] = _EMPTY
    board.colour[y, x] = NO_COLOUR
    board.hit_points[y, x] = 0
    outcome.cleared_count += 1
    touched.add(x)


def _damage(board: BoardState, x: int, y: int, outcome: StepOutcome, touched) -> None:
    """Apply one point of damage to a blocker or goal piece."""
    board.hit_points[y, x] -= 1
    if board.hit_points[y, x] <= 0:
        if board.kind[y, x] == _GOAL:
            _credit_goal(board, outcome, GOAL_PIECE_KIND)
        board.kind[y, x] = _EMPTY
        board.colour[y, x] = NO_COLOUR
        board.hit_points[y, x] = 0
        touched.add(x)


def _detonate(board: BoardState, x: int, y: int, outcome: StepOutcome, touched) -> None:
    """Detonate the power piece at (x, y), chaining into any power piece
    caught in a blast. Two or more detonations count as a power combination."""
    h, w = board.kind.shape
    to_fire = deque([(x, y)])
    fired: set[tuple[int, int]] = set()
    blast: set[tuple[int, int]] = set()
    while to_fire:
        px, py = to_fire.popleft()
        if (px, py) in fired:
            continue
        fired.add((px, py))
        for ny in range(max(0, py - 1), min(h, py + 2)):
            for nx in range(max(0, px - 1), min(w, px + 2)):
                blast.add((nx, ny))
                if board.kind[ny, nx] == _POWER and (nx, ny) not in fired:
                    to_fire.append((nx, ny))
    outcome.power_combo_triggered = len(fired) >= 2
    damaged: set[tuple[int, int]] = set()
    for cx, cy in sorted(blast):
        k = board.kind[cy, cx]
        if (cx, cy) in fired:
            board.kind[cy, cx] = _EMPTY
            board.hit_points[cy, cx] = 0
            outcome.cleared_count += 1
            touched.add(cx)
        elif k == _BASIC:
            _remove_basic(board, cx, cy, outcome, touched)
        elif k in (_BLOCKER, _GOAL) and (cx, cy) not in damaged:
            damaged.add((cx, cy))
            _damage(board, cx, cy, outcome, touched)


def _settle(board: BoardState, touched_cols) -> None:
    """Column gravity within hole-delimited segments, then refill.

    Only columns that lost a piece this step can change, so the pass is
    restricted to them.
    """
    refill_slots: list[tuple[int, int]] = []
    kind, colour, hp = board.kind, board.colour, board.hit_points
    for x in sorted(touched_cols):
        for y0, y1 in board._col_segments[x]:
            ks = kind[y0:y1, x].tolist()
            occ = [i for i, v in enumerate(ks) if v != _EMPTY]
            n_empty = (y1 - y0) - len(occ)
            if n_empty == 0:
                continue
            cs = colour[y0:y1, x].tolist()
            hs = hp[y0:y1, x].tolist()
            kind[y0:y1, x] = [_EMPTY] * n_empty + [ks[i] for i in occ]
            colour[y0:y1, x] = [NO_COLOUR] * n_empty + [cs[i] for i in occ]
            hp[y0:y1, x] = [0] * n_empty + [hs[i] for i in occ]
            refill_slots.extend((x, y0 + i) for i in range(n_empty))
    if board.level.refill and refill_slots:
        draws = board.rng.random(len(refill_slots))
        colours = np.searchsorted(board._cum_weights, draws, side="right")
        colours = np.minimum(colours, board.level.num_colours - 1)
        for (x, y), col in zip(refill_slots, colours):
            kind[y, x] = _BASIC
            colour[y, x] = int(col)
            hp[y, x] = 1


def apply_action(board: BoardState, action: Action) -> tuple[BoardState, StepOutcome]:
    """Resolve one tap. Mutates ``board`` in place and returns it with the
    step outcome. Raises IllegalActionError for masked-out actions."""
    if not _is_legal(board, action.x, action.y):
        raise IllegalActionError(
            f"action ({action.x}, {action.y}) targets no cluster or power piece"
        )

    outcome = StepOutcome()
    touched: set[int] = set()
    h, w = board.kind.shape
    if board.kind[action.y, action.x] == _POWER:
        _detonate(board, action.x, action.y, outcome, touched)
    else:
        cluster = flood_fill_cluster(board, action.x, action.y)
        for cx, cy in cluster:
            _remove_basic(board, cx, cy, outcome, touched)
        # each adjacent blocker/goal piece takes exactly one point of damage per tap
        damaged: set[tuple[int, int]] = set()
        for cx, cy in cluster:
            for dx, dy in _ORTHO:
                nx, ny = cx + dx, cy + dy
                if not (0 <= nx < w and 0 <= ny < h) or (nx, ny) in damaged:
                    continue
                if board.kind[ny, nx] in (_BLOCKER, _GOAL):
                    damaged.add((nx, ny))
                    _damage(board, nx, ny, outcome, touched)
        if len(cluster) >= board.level.power_threshold:
            board.kind[action.y, action.x] = _POWER
            board.colour[action.y, action.x] = NO_COLOUR
            board.hit_points[action.y, action.x] = 1
            outcome.power_piece_created = True

    _settle(board, touched)
    board.moves_used += 1
    outcome.completed = board.goals_met()
    if not outcome.completed and not legal_actions(board).any():
        outcome.failed = True  # deadlock: no cluster and no power piece left
    return board, outcome


def episode_status(board: BoardState, level: LevelSpec, episode_cap: int) -> str:
    """One of 'completed', 'failed', 'ongoing'. Exceeding the level's move
    limit is not failure while under the episode cap; it only costs reward."""
    if board.goals_met():
        return "completed"
    if board.moves_used >= episode_cap:
        return "failed"
    if not legal_actions(board).any():
        return "failed"
    return "ongoing"
