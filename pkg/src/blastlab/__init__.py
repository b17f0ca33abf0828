"""Blast-puzzle difficulty modelling lab.

End-to-end pipeline: a deterministic blast-puzzle simulator, per-level
reinforcement-learning playtest agents, a synthetic player population,
feature/dataset assembly, three regression methods (factorization machine,
random forest, neural network) plus baselines, and an experiment harness
for personalised and cohort-level attempt-count prediction in historic-data
and cold-start scenarios.
"""

__version__ = "0.1.0"

FORMAT_VERSION = 1
