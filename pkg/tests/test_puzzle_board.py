import numpy as np
import pytest

from blastlab.puzzle.board import (
    BoardState,
    IllegalActionError,
    apply_action,
    episode_status,
    legal_actions,
)
from blastlab.puzzle.generator import GeneratorConfig, generate_level
from blastlab.puzzle.types import Action, CellKind, colour_goal, GOAL_PIECE_KIND

from util import make_level


def board_of(rows, **kwargs):
    level = make_level(rows, **kwargs)
    return level, BoardState.from_level(level)


class TestLegalActions:
    def test_all_same_colour_2x2_all_legal(self):
        _, board = board_of([[0, 0], [0, 0]])
        assert legal_actions(board).sum() == 4

    def test_alternating_colours_no_legal_action(self):
        _, board = board_of([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
        assert not legal_actions(board).any()

    def test_full_size_board_mask_length(self):
        rows = [[(x + y) % 4 for x in range(13)] for y in range(9)]
        _, board = board_of(rows)
        assert legal_actions(board).shape == (117,)

    def test_power_piece_is_always_legal(self):
        _, board = board_of([[0, 1, "P"], [1, 0, 1], [0, 1, 0]])
        mask = legal_actions(board)
        assert mask.sum() == 1 and mask[2]

    def test_mask_is_row_major(self):
        _, board = board_of([[0, 1, 1], [2, 3, 2]])
        mask = legal_actions(board)
        assert mask.tolist() == [False, True, True, False, False, False]


class TestApplyAction:
    def test_single_colour_2x2_clears_everything_without_refill(self):
        _, board = board_of([[0, 0], [0, 0]], refill=False)
        _, outcome = apply_action(board, Action(0, 0))
        assert outcome.cleared_count == 4
        assert board.occupied_count() == 0

    def test_power_piece_created_at_threshold(self):
        rows = [[0, 0, 0], [0, 0, 1], [1, 1, 2]]
        _, board = board_of(rows, refill=False, power_threshold=5)
        _, outcome = apply_action(board, Action(0, 0))
        assert outcome.power_piece_created
        assert (board.kind == int(CellKind.POWER)).sum() == 1

    def test_below_threshold_creates_no_power_piece(self):
        rows = [[0, 0, 1], [0, 0, 1], [1, 2, 2]]
        _, board = board_of(rows, refill=False, power_threshold=5)
        _, outcome = apply_action(board, Action(0, 0))
        assert not outcome.power_piece_created

    def test_goal_piece_adjacent_to_cluster_is_collected(self):
        rows = [[0, 0, "G1"], [1, 2, 1], [2, 1, 2]]
        level, board = board_of(rows, goals={GOAL_PIECE_KIND: 1}, refill=False)
        _, outcome = apply_action(board, Action(0, 0))
        assert outcome.goals_collected == {GOAL_PIECE_KIND: 1}
        assert board.goals_remaining[GOAL_PIECE_KIND] == 0

    def test_blocker_hit_points_decrement_once_per_tap(self):
        rows = [[0, 0, "B2"], [0, 0, 1], [1, 2, 2]]
        _, board = board_of(rows, refill=False)
        apply_action(board, Action(0, 0))
        assert board.cell(2, 0).kind == CellKind.BLOCKER
        assert board.cell(2, 0).hit_points == 1

    def test_colour_goal_credited_for_cleared_cluster(self):
        rows = [[0, 0, 1], [1, 2, 2], [2, 1, 1]]
        _, board = board_of(rows, goals={colour_goal(0): 5}, refill=False)
        _, outcome = apply_action(board, Action(0, 0))
        assert outcome.goals_collected == {colour_goal(0): 2}
        assert board.goals_remaining[colour_goal(0)] == 3

    def test_illegal_action_rejected(self):
        _, board = board_of([[0, 1], [1, 0]])
        with pytest.raises(IllegalActionError):
            apply_action(board, Action(0, 0))

    def test_off_board_action_rejected(self):
        _, board = board_of([[0, 0], [0, 0]])
        with pytest.raises(IllegalActionError):
            apply_action(board, Action(5, 5))

    def test_power_tap_clears_three_by_three(self):
        rows = [
            [0, 1, 0, 1],
            [1, "P", 0, 1],
            [0, 1, 0, 1],
            [1, 0, 1, 0],
        ]
        _, board = board_of(rows, refill=False)
        _, outcome = apply_action(board, Action(1, 1))
        # the power piece plus its 8 occupied neighbours
        assert outcome.cleared_count == 9
        assert not outcome.power_combo_triggered

    def test_adjacent_power_pieces_chain_into_a_combo(self):
        rows = [
            [0, 1, 0, 1],
            [1, "P", "P", 1],
            [0, 1, 0, 1],
            [1, 0, 1, 0],
        ]
        _, board = board_of(rows, refill=False)
        _, outcome = apply_action(board, Action(1, 1))
        assert outcome.power_combo_triggered
        assert (board.kind == int(CellKind.POWER)).sum() == 0

    def test_gravity_drops_pieces_and_refill_fills_from_spawn_weights(self):
        rows = [[0, 0, 1], [0, 0, 2], [1, 2, 1]]
        level, board = board_of(rows, colour_weights=(1.0, 0.0, 0.0, 0.0))
        apply_action(board, Action(0, 0))
        assert board.occupied_count() == 9
        # column 2 untouched; columns 0-1 refilled with colour 0 only
        assert board.cell(2, 0).colour == 1
        for x in (0, 1):
            for y in range(3):
                cell = board.cell(x, y)
                assert cell.kind in (CellKind.BASIC,)
        refreshed = [board.cell(x, y).colour for x in (0, 1) for y in (0, 1)]
        assert all(c == 0 for c in refreshed)

    def test_holes_are_never_refilled_and_pieces_stack_on_them(self):
        rows = [[0, 0, 1], [0, 0, 2], [".", 2, 1]]
        _, board = board_of(rows)
        apply_action(board, Action(0, 0))
        assert board.cell(0, 2).kind == CellKind.EMPTY
        assert board.cell(0, 0).kind == CellKind.BASIC
        assert board.cell(0, 1).kind == CellKind.BASIC

    def test_moves_used_increments_by_one(self):
        _, board = board_of([[0, 0], [0, 0]])
        apply_action(board, Action(0, 0))
        assert board.moves_used == 1


class TestEpisodeStatus:
    def test_completed_when_goals_met(self):
        level, board = board_of([[0, 0], [1, 2]], goals={colour_goal(0): 2}, refill=False)
        apply_action(board, Action(0, 0))
        assert episode_status(board, level, episode_cap=100) == "completed"

    def test_failed_at_episode_cap(self):
        level, board = board_of([[0, 0], [0, 0]], goals={colour_goal(3): 50})
        board.moves_used = 100
        assert episode_status(board, level, episode_cap=100) == "failed"

    def test_over_move_limit_but_under_cap_is_ongoing(self):
        level, board = board_of(
            [[0, 0], [0, 0]], goals={colour_goal(3): 50}, move_limit=42
        )
        board.moves_used = 50
        assert episode_status(board, level, episode_cap=100) == "ongoing"

    def test_deadlock_is_failure(self):
        level, board = board_of(
            [[0, 1], [1, 0]], goals={colour_goal(0): 5}, refill=False
        )
        assert episode_status(board, level, episode_cap=100) == "failed"


class TestEpisodeProperties:
    @staticmethod
    def fuzz_episode(level, seed, max_steps=60):
        board = BoardState.from_level(level, seed=seed)
        rng = np.random.default_rng(seed + 1)
        hole_count = int(board.hole.sum())
        total = level.width * level.height
        prev_goals = dict(board.goals_remaining)
        for step in range(max_steps):
            mask = legal_actions(board)
            if not mask.any() or board.goals_met():
                break
            idx = int(rng.choice(np.flatnonzero(mask)))
            _, outcome = apply_action(board, Action(idx % level.width, idx // level.width))
            occupied = board.occupied_count()
            empty = total - occupied
            assert occupied + empty == total
            if level.refill:
                assert empty == hole_count, "every non-hole cell must be refilled"
            for kind, remaining in board.goals_remaining.items():
                assert remaining <= prev_goals[kind]
                assert remaining >= 0
            prev_goals = dict(board.goals_remaining)
            assert board.moves_used == step + 1
        return board

    def test_conservation_and_monotonic_goals_on_generated_levels(self):
        config = GeneratorConfig()
        for level_id in range(8):
            level = generate_level(config, level_id=level_id, seed=11)
            self.fuzz_episode(level, seed=101 + level_id)

    def test_masked_actions_are_rejected_and_legal_ones_accepted(self):
        config = GeneratorConfig()
        level = generate_level(config, level_id=3, seed=5)
        board = BoardState.from_level(level, seed=9)
        rng = np.random.default_rng(17)
        for _ in range(15):
            mask = legal_actions(board)
            if not mask.any():
                break
            illegal = np.flatnonzero(~mask)
            if illegal.size:
                idx = int(rng.choice(illegal))
                with pytest.raises(IllegalActionError):
                    apply_action(board.copy(), Action(idx % level.width, idx // level.width))
            idx = int(rng.choice(np.flatnonzero(mask)))
            apply_action(board, Action(idx % level.width, idx // level.width))

    def test_identical_seed_and_actions_give_identical_trajectories(self):
        config = GeneratorConfig()
        level = generate_level(config, level_id=7, seed=23)
        rng = np.random.default_rng(3)
        boards = [BoardState.from_level(level, seed=77) for _ in range(2)]
        for _ in range(25):
            mask = legal_actions(boards[0])
            if not mask.any():
                break
            idx = int(rng.choice(np.flatnonzero(mask)))
            action = Action(idx % level.width, idx // level.width)
            for b in boards:
                apply_action(b, action)
            assert np.array_equal(boards[0].kind, boards[1].kind)
            assert np.array_equal(boards[0].colour, boards[1].colour)
            assert np.array_equal(boards[0].hit_points, boards[1].hit_points)
            assert boards[0].goals_remaining == boards[1].goals_remaining
