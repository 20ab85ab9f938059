"""
Pose sequence files.

.json   an array of frames, or {"joint_order": "model" | "mano", "frames": [...]}
.jsonl  one frame per line (model joint order), read lazily

A frame is 15 [x, y, z] axis-angle vectors.
"""

import json
import logging
from pathlib import Path
from typing import Iterator

import numpy as np

from handrig.config import read_json
from handrig.errors import InputError, SchemaError
from handrig.model.hand_model import PoseFrame, as_pose_frame, pose_from_mano

logger = logging.getLogger(__name__)


def _frame(raw, where: str, joint_order: str = "model") -> PoseFrame:
    try:
        values = np.asarray(raw, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise SchemaError(f"{where}: frame is not numeric") from e
    try:
        if joint_order == "mano":
            if values.size != 45:
                raise SchemaError(f"MANO frame has {values.size} values, expected 45")
            return pose_from_mano(values)
        return as_pose_frame(values)
    except SchemaError as e:
        raise SchemaError(f"{where}: {e}") from e


def iter_poses(path: str | Path) -> Iterator[PoseFrame]:
    """Yield frames one at a time; JSON Lines files are never fully loaded."""
    path = Path(path)
    if path.suffix == ".jsonl":
        yield from _iter_jsonl(path)
        return

    doc = read_json(path)
    joint_order = "model"
    frames = doc
    if isinstance(doc, dict):
        unknown = sorted(set(doc) - {"joint_order", "frames"})
        if unknown:
            raise SchemaError(f"{path}: unknown keys {unknown}")
        joint_order = doc.get("joint_order", "model")
        if joint_order not in ("model", "mano"):
            raise SchemaError(f"{path}: joint_order must be 'model' or 'mano'")
        frames = doc.get("frames")
    if not isinstance(frames, list):
        raise SchemaError(f"{path}: expected a list of frames")
    for k, raw in enumerate(frames):
        yield _frame(raw, f"{path}: frame {k}", joint_order)


def _iter_jsonl(path: Path) -> Iterator[PoseFrame]:
    if not path.is_file():
        raise InputError(f"file not found: {path}")
    with open(path, "r") as f:
        frame_index = 0
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(f"{path}: malformed JSON: {e.msg}", line_number, e.colno) from e
            yield _frame(raw, f"{path}: frame {frame_index}")
            frame_index += 1


def load_poses(path: str | Path) -> list[PoseFrame]:
    poses = list(iter_poses(path))
    if not poses:
        raise InputError(f"{path}: no pose frames")
    logger.info("Loaded %d pose frames from %s", len(poses), path)
    return poses


def save_poses(path: str | Path, poses: list[PoseFrame]) -> None:
    path = Path(path)
    if path.suffix == ".jsonl":
        with open(path, "w") as f:
            for pose in poses:
                f.write(json.dumps(np.asarray(pose).tolist()) + "\n")
        return
    with open(path, "w") as f:
        json.dump([np.asarray(pose).tolist() for pose in poses], f)
