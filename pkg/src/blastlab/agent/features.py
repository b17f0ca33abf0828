"""Per-level agent features extracted from training logs."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .ppo import AgentTrainingLog

# names of the numeric feature columns, in serialisation order
AGENT_FEATURE_FIELDS = (
    "training_steps_to_min",
    "move_limit",
    "game_length_min",
    "game_length_std",
    "completion_rate_min",
    "completion_rate_std",
    "action_entropy_min",
    "action_entropy_std",
    "policy_loss_min",
    "policy_loss_std",
    "value_loss_min",
    "value_loss_std",
)


@dataclass
class AgentFeatureRecord:
    """Seed-averaged training statistics for one level.

    ``*_min`` fields are taken at the checkpoint with the smallest average
    episode length (earliest on ties); ``*_std`` fields are standard
    deviations across the checkpoints inside the configured step window.
    """

    level_id: int
    training_steps_to_min: float
    move_limit: float
    game_length_min: float
    game_length_std: float
    completion_rate_min: float
    completion_rate_std: float
    action_entropy_min: float
    action_entropy_std: float
    policy_loss_min: float
    policy_loss_std: float
    value_loss_min: float
    value_loss_std: float
    completion_rate_within_cap_min: float = 0.0

    def feature_vector(self) -> np.ndarray:
        return np.array([getattr(self, f) for f in AGENT_FEATURE_FIELDS], dtype=float)

    def to_record(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_record(cls, record: dict) -> "AgentFeatureRecord":
        return cls(**record)


def _per_seed_values(log: AgentTrainingLog, std_window: tuple[int, int]) -> dict[str, float]:
    steps = np.array([c.training_step for c in log.checkpoints])
    lengths = np.array([c.avg_episode_length for c in log.checkpoints])
    in_window = (steps >= std_window[0]) & (steps <= std_window[1])
    if in_window.sum() < 2:
        raise ValueError(
            f"std window {std_window} holds {int(in_window.sum())} checkpoints for "
            f"level {log.level_id} seed {log.seed}; at least 2 are required"
        )
    best = int(np.argmin(lengths))  # argmin takes the earliest on ties
    cp = log.checkpoints[best]

    def windowed_std(attr: str) -> float:
        vals = np.array([getattr(c, attr) for c in log.checkpoints])[in_window]
        return float(vals.std())

    return {
        "training_steps_to_min": float(cp.training_step),
        "game_length_min": cp.avg_episode_length,
        "game_length_std": windowed_std("avg_episode_length"),
        "completion_rate_min": cp.completion_rate_within_m,
        "completion_rate_std": windowed_std("completion_rate_within_m"),
        "completion_rate_within_cap_min": cp.completion_rate_within_cap,
        "action_entropy_min": cp.action_entropy,
        "action_entropy_std": windowed_std("action_entropy"),
        "policy_loss_min": cp.policy_loss,
        "policy_loss_std": windowed_std("policy_loss"),
        "value_loss_min": cp.value_loss,
        "value_loss_std": windowed_std("value_loss"),
    }


def extract_agent_features(
    logs: list[AgentTrainingLog], std_window: tuple[int, int]
) -> AgentFeatureRecord:
    """Aggregate per-seed min/std statistics by mean across seeds."""
    if not logs:
        raise ValueError("at least one training log is required")
    level_ids = {log.level_id for log in logs}
    if len(level_ids) != 1:
        raise ValueError(f"logs span multiple levels: {sorted(level_ids)}")
    # fixed aggregation order makes the mean exactly permutation-invariant
    logs = sorted(logs, key=lambda log: log.seed)
    per_seed = [_per_seed_values(log, std_window) for log in logs]
    averaged = {
        key: float(np.mean([values[key] for values in per_seed])) for key in per_seed[0]
    }
    return AgentFeatureRecord(
        level_id=logs[0].level_id,
        move_limit=float(logs[0].move_limit),
        **averaged,
    )


def save_agent_features(records: list[AgentFeatureRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        for record in records:
            fh.write(json.dumps(record.to_record(), sort_keys=True) + "\n")


def load_agent_features(path: str | Path) -> list[AgentFeatureRecord]:
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(AgentFeatureRecord.from_record(json.loads(line)))
    return records


def save_training_logs(logs: list[AgentTrainingLog], path: str | Path) -> None:
    with open(path, "w") as fh:
        for log in logs:
            fh.write(json.dumps(log.to_record(), sort_keys=True) + "\n")


def load_training_logs(path: str | Path) -> list[AgentTrainingLog]:
    logs = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                logs.append(AgentTrainingLog.from_record(json.loads(line)))
    return logs
