"""Line-delimited level storage (one JSON record per level)."""

from __future__ import annotations

import json
from pathlib import Path

from .types import LevelSpec


def save_levels(levels: list[LevelSpec], path: str | Path) -> None:
    with open(path, "w") as fh:
        for level in levels:
            fh.write(json.dumps(level.to_record(), sort_keys=True) + "\n")


def load_levels(path: str | Path) -> list[LevelSpec]:
    levels = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                levels.append(LevelSpec.from_record(json.loads(line)))
    return levels
