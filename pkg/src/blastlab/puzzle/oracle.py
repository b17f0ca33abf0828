"""Scripted-policy playouts and the intrinsic pass-rate oracle."""

from __future__ import annotations

import numpy as np

from .board import BoardState, apply_action, flood_fill_cluster, legal_actions
from .types import Action, CellKind, LevelSpec

POLICY_KINDS = ("uniform-random-legal", "greedy-largest-cluster")


def _action_from_flat(idx: int, width: int) -> Action:
    return Action(x=idx % width, y=idx // width)


def choose_uniform(board: BoardState, mask: np.ndarray, rng: np.random.Generator) -> Action:
    legal = np.flatnonzero(mask)
    return _action_from_flat(int(rng.choice(legal)), board.level.width)


def choose_greedy(board: BoardState, mask: np.ndarray, rng: np.random.Generator) -> Action:
    """Pick the legal action with the largest immediate clear: cluster size
    for basic taps, occupied 3x3 neighbourhood for power taps. Ties break on
    the lowest flat index, so the policy is fully deterministic."""
    width = board.level.width
    h, w = board.kind.shape
    best_idx, best_size = -1, -1
    visited = np.zeros_like(board.kind, dtype=bool)
    for idx in np.flatnonzero(mask):
        x, y = int(idx) % width, int(idx) // width
        if board.kind[y, x] == int(CellKind.POWER):
            y0, y1 = max(0, y - 1), min(h, y + 2)
            x0, x1 = max(0, x - 1), min(w, x + 2)
            size = int(np.count_nonzero(board.kind[y0:y1, x0:x1] != int(CellKind.EMPTY)))
        elif visited[y, x]:
            continue
        else:
            cluster = flood_fill_cluster(board, x, y)
            for cx, cy in cluster:
                visited[cy, cx] = True
            size = len(cluster)
        if size > best_size:
            best_idx, best_size = int(idx), size
    return _action_from_flat(best_idx, width)


_POLICIES = {
    "uniform-random-legal": choose_uniform,
    "greedy-largest-cluster": choose_greedy,
}


def run_playout(
    level: LevelSpec, policy_kind: str, board_seed: int, policy_seed: int, horizon: int
) -> int | None:
    """Play one episode for up to ``horizon`` moves; return the move count at
    completion, or None if the goals were not met (including deadlock)."""
    policy = _POLICIES[policy_kind]
    board = BoardState.from_level(level, seed=board_seed)
    rng = np.random.default_rng(policy_seed)
    if board.goals_met():
        return 0
    for _ in range(horizon):
        mask = legal_actions(board)
        if not mask.any():
            return None
        _, outcome = apply_action(board, policy(board, mask, rng))
        if outcome.completed:
            return board.moves_used
    return None


def playout_completion_moves(
    level: LevelSpec, policy_kind: str, n_playouts: int, seed: int, horizon: int | None = None
) -> np.ndarray:
    """Completion move per playout (inf where not completed within horizon).

    The pass rate under any move limit m <= horizon is the fraction of
    entries <= m, which makes limit-monotonicity directly checkable on a
    fixed set of playouts.
    """
    if policy_kind not in POLICY_KINDS:
        raise ValueError(f"unknown policy kind {policy_kind!r}")
    if n_playouts < 1:
        raise ValueError("n_playouts must be >= 1")
    horizon = level.move_limit if horizon is None else horizon
    root = np.random.SeedSequence(seed)
    out = np.full(n_playouts, np.inf)
    for i, child in enumerate(root.spawn(n_playouts)):
        board_seed, policy_seed = child.generate_state(2).tolist()
        moves = run_playout(level, policy_kind, board_seed, policy_seed, horizon)
        if moves is not None:
            out[i] = moves
    return out


def intrinsic_pass_rate(level: LevelSpec, policy_kind: str, n_playouts: int, seed: int) -> float:
    """Fraction of scripted playouts completing within the level's move limit."""
    moves = playout_completion_moves(level, policy_kind, n_playouts, seed)
    return float(np.mean(moves <= level.move_limit))
