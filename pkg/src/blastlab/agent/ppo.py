"""Per-level PPO training loop with periodic checkpoint statistics."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..puzzle.board import BoardState, apply_action, legal_actions
from ..puzzle.types import Action, LevelSpec, MAX_HIT_POINTS
from .encoding import encode_observation
from .policy import PolicyValueNet
from .reward import compute_reward


class TrainingDivergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class AgentConfig:
    """PPO hyperparameters and desk-scale training budget.

    The clipped-surrogate objective uses clip 0.2 and discount 0.99; the
    policy is a small dense network because boards are tiny. The std window
    sits at [0.1, 0.9] of the budget, mirroring a 1M-9M window on a
    full-scale run.
    """

    hidden: tuple[int, int] = (64, 64)
    learning_rate: float = 2.5e-3
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip: float = 0.2
    vf_coef: float = 0.5
    ent_coef: float = 0.01
    rollout_steps: int = 512
    minibatch_size: int = 128
    update_epochs: int = 4
    episode_cap_factor: float = 2.0
    budget_steps: int = 20000
    checkpoint_interval: int = 1000
    n_seeds: int = 2
    entropy_window: int = 512
    episode_window: int = 100  # statistics averaged over the last 100 episodes

    def std_window(self) -> tuple[int, int]:
        return (round(0.1 * self.budget_steps), round(0.9 * self.budget_steps))

    def episode_cap(self, move_limit: int) -> int:
        return max(move_limit + 1, int(round(self.episode_cap_factor * move_limit)))


@dataclass
class Checkpoint:
    training_step: int
    avg_episode_length: float
    completion_rate_within_m: float
    completion_rate_within_cap: float
    action_entropy: float
    policy_loss: float
    value_loss: float


@dataclass
class AgentTrainingLog:
    level_id: int
    move_limit: int
    seed: int
    episode_cap: int
    budget_steps: int
    checkpoint_interval: int
    checkpoints: list[Checkpoint] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "level_id": self.level_id,
            "move_limit": self.move_limit,
            "seed": self.seed,
            "episode_cap": self.episode_cap,
            "budget_steps": self.budget_steps,
            "checkpoint_interval": self.checkpoint_interval,
            "checkpoints": [vars(c) for c in self.checkpoints],
        }

    @classmethod
    def from_record(cls, record: dict) -> "AgentTrainingLog":
        log = cls(**{k: record[k] for k in (
            "level_id", "move_limit", "seed", "episode_cap",
            "budget_steps", "checkpoint_interval",
        )})
        log.checkpoints = [Checkpoint(**c) for c in record["checkpoints"]]
        return log


def _chunk_size(interval: int, rollout_steps: int) -> int:
    """Largest divisor of the checkpoint interval not above the rollout size,
    so checkpoints land exactly on interval multiples."""
    for d in range(min(interval, rollout_steps), 0, -1):
        if interval % d == 0:
            return d
    return interval


class _EpisodeRunner:
    """Steps one episode stream, normalising observations for the policy."""

    def __init__(self, level: LevelSpec, cap: int, rng: np.random.Generator):
        self.level = level
        self.cap = cap
        self.rng = rng
        self.total_goals = max(1, level.total_goal_count())
        self.board: BoardState | None = None
        self.reset()

    def reset(self) -> None:
        self.board = BoardState.from_level(self.level, seed=int(self.rng.integers(2**62)))

    def obs_vector(self) -> tuple[np.ndarray, np.ndarray]:
        obs = encode_observation(self.board, self.level)
        m = self.level.move_limit
        tensor = obs.tensor.reshape(-1) / MAX_HIT_POINTS
        scalars = obs.scalars / np.array([m, m, self.total_goals], dtype=np.float32)
        return np.concatenate([tensor, scalars]), obs.action_mask

    def step(self, flat_action: int) -> tuple[float, bool, bool, int]:
        """Returns (reward, terminal, completed, episode_moves)."""
        action = Action(flat_action % self.level.width, flat_action // self.level.width)
        _, outcome = apply_action(self.board, action)
        reward = compute_reward(outcome, self.board, self.level)
        moves = self.board.moves_used
        if outcome.completed:
            return reward, True, True, moves
        if outcome.failed or moves >= self.cap:
            return reward, True, False, moves
        return reward, False, False, moves


def train_agent(
    level: LevelSpec,
    seed: int,
    budget_steps: int | None = None,
    checkpoint_interval: int | None = None,
    config: AgentConfig = AgentConfig(),
) -> AgentTrainingLog:
    """Train one masked-PPO agent on one level; deterministic in (level, seed).

    The log carries floor(budget / interval) checkpoints of last-100-episode
    statistics plus the most recent update losses.
    """
    budget = config.budget_steps if budget_steps is None else budget_steps
    interval = config.checkpoint_interval if checkpoint_interval is None else checkpoint_interval
    if budget < 2 * interval:
        raise ValueError("budget_steps must be at least twice the checkpoint interval")
    if level.total_goal_count() < 1:
        raise ValueError("level has no goals; nothing to train for")

    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    cap = config.episode_cap(level.move_limit)
    runner = _EpisodeRunner(level, cap, rng)
    obs_dim = runner.obs_vector()[0].shape[0]
    n_actions = level.width * level.height
    net = PolicyValueNet(obs_dim, n_actions, config.hidden, rng)

    chunk = _chunk_size(interval, config.rollout_steps)
    n_checkpoints = budget // interval
    log = AgentTrainingLog(
        level_id=level.level_id,
        move_limit=level.move_limit,
        seed=seed,
        episode_cap=cap,
        budget_steps=budget,
        checkpoint_interval=interval,
    )

    episodes: deque = deque(maxlen=config.episode_window)
    entropies: deque = deque(maxlen=config.entropy_window)
    last_policy_loss = 0.0
    last_value_loss = 0.0
    steps_done = 0

    obs_buf = np.zeros((chunk, obs_dim))
    mask_buf = np.zeros((chunk, n_actions), dtype=bool)
    act_buf = np.zeros(chunk, dtype=np.int64)
    logp_buf = np.zeros(chunk)
    rew_buf = np.zeros(chunk)
    val_buf = np.zeros(chunk)
    done_buf = np.zeros(chunk, dtype=bool)

    while len(log.checkpoints) < n_checkpoints:
        for i in range(chunk):
            obs_vec, mask = runner.obs_vector()
            if not mask.any():  # dead spawn; never sample from a zero mask
                episodes.append((runner.board.moves_used, False, False))
                runner.reset()
                obs_vec, mask = runner.obs_vector()
            action, logp, value, entropy = net.act(obs_vec, mask, rng)
            reward, terminal, completed, moves = runner.step(action)
            obs_buf[i] = obs_vec
            mask_buf[i] = mask
            act_buf[i] = action
            logp_buf[i] = logp
            rew_buf[i] = reward
            val_buf[i] = value
            done_buf[i] = terminal
            entropies.append(entropy)
            if terminal:
                episodes.append((moves, completed, completed and moves <= level.move_limit))
                runner.reset()
        steps_done += chunk

        # bootstrap value for the state following the chunk
        if done_buf[-1]:
            next_value = 0.0
        else:
            obs_vec, mask = runner.obs_vector()
            _, v, _ = net.forward(obs_vec[None, :], mask[None, :])
            next_value = float(v[0])
        advantages = np.zeros(chunk)
        gae = 0.0
        for t in range(chunk - 1, -1, -1):
            nv = next_value if t == chunk - 1 else val_buf[t + 1]
            non_terminal = 0.0 if done_buf[t] else 1.0
            delta = rew_buf[t] + config.gamma * nv * non_terminal - val_buf[t]
            gae = delta + config.gamma * config.gae_lambda * non_terminal * gae
            advantages[t] = gae
        returns = advantages + val_buf
        adv_std = advantages.std()
        norm_adv = (advantages - advantages.mean()) / (adv_std + 1e-8)

        p_losses, v_losses = [], []
        order = np.arange(chunk)
        for _ in range(config.update_epochs):
            rng.shuffle(order)
            for start in range(0, chunk, config.minibatch_size):
                mb = order[start : start + config.minibatch_size]
                pl, vl = net.ppo_update(
                    obs_buf[mb], mask_buf[mb], act_buf[mb], logp_buf[mb],
                    norm_adv[mb], returns[mb],
                    config.clip, config.vf_coef, config.ent_coef, config.learning_rate,
                )
                p_losses.append(pl)
                v_losses.append(vl)
        last_policy_loss = float(np.mean(p_losses))
        last_value_loss = float(np.mean(v_losses))
        if not np.isfinite(last_policy_loss + last_value_loss):
            raise TrainingDivergedError(
                f"non-finite loss on level {level.level_id} seed {seed} at step "
                f"{steps_done}: policy={last_policy_loss} value={last_value_loss}"
            )

        if steps_done % interval == 0:
            if episodes:
                lengths = np.array([e[0] for e in episodes], dtype=float)
                completed_cap = np.array([e[1] for e in episodes], dtype=float)
                within_m = np.array([e[2] for e in episodes], dtype=float)
                avg_len = float(lengths.mean())
                rate_cap = float(completed_cap.mean())
                rate_m = float(within_m.mean())
            else:
                avg_len, rate_cap, rate_m = float(cap), 0.0, 0.0
            log.checkpoints.append(
                Checkpoint(
                    training_step=steps_done,
                    avg_episode_length=avg_len,
                    completion_rate_within_m=rate_m,
                    completion_rate_within_cap=rate_cap,
                    action_entropy=float(np.mean(entropies)) if entropies else 0.0,
                    policy_loss=last_policy_loss,
                    value_loss=last_value_loss,
                )
            )
    return log
