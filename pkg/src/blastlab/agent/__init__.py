from .encoding import Observation, encode_observation, observation_channels
from .reward import compute_reward
from .ppo import AgentConfig, AgentTrainingLog, Checkpoint, TrainingDivergedError, train_agent
from .features import (
    AgentFeatureRecord,
    extract_agent_features,
    load_agent_features,
    save_agent_features,
    load_training_logs,
    save_training_logs,
)

__all__ = [
    "AgentConfig",
    "AgentFeatureRecord",
    "AgentTrainingLog",
    "Checkpoint",
    "Observation",
    "TrainingDivergedError",
    "compute_reward",
    "encode_observation",
    "extract_agent_features",
    "load_agent_features",
    "load_training_logs",
    "observation_channels",
    "save_agent_features",
    "save_training_logs",
    "train_agent",
]
