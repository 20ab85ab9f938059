"""
Rest-pose hand skeleton: 21 named keypoints in the wrist frame.

Convention (right hand): origin at the wrist, fingers along +y, thumb on
the -x side, back of the hand facing +z (palm facing -z).
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from handrig.config import read_json, validate_document
from handrig.errors import SchemaError
from handrig.geometry.rotation import Vector3

logger = logging.getLogger(__name__)

FINGERS = ("thumb", "index", "middle", "ring", "pinky")
LONG_FINGERS = ("index", "middle", "ring", "pinky")
THUMB_CHAIN = ("cmc", "mcp", "ip", "tip")
FINGER_CHAIN = ("mcp", "pip", "dip", "tip")

MIN_SEPARATION = 1e-3


def chain_names(finger: str) -> tuple[str, ...]:
    """Keypoint names of one finger, root to tip."""
    parts = THUMB_CHAIN if finger == "thumb" else FINGER_CHAIN
    return tuple(f"{finger}_{part}" for part in parts)


KEYPOINT_NAMES: tuple[str, ...] = ("wrist",) + tuple(
    name for finger in FINGERS for name in chain_names(finger)
)


@dataclass(frozen=True, eq=False)
class HandSkeleton:
    """Named rest-pose keypoints (meters, wrist frame)."""

    keypoints: dict[str, Vector3]
    handedness: str = "right"

    def __post_init__(self):
        missing = [name for name in KEYPOINT_NAMES if name not in self.keypoints]
        if missing:
            raise SchemaError(f"skeleton is missing keypoints: {', '.join(missing)}")
        extra = sorted(set(self.keypoints) - set(KEYPOINT_NAMES))
        if extra:
            raise SchemaError(f"skeleton has unknown keypoints: {', '.join(extra)}")
        points = {}
        for name in KEYPOINT_NAMES:
            point = np.array(self.keypoints[name], dtype=np.float64)
            if point.shape != (3,) or not np.all(np.isfinite(point)):
                raise SchemaError(f"keypoint {name} must be 3 finite numbers")
            points[name] = point
        object.__setattr__(self, "keypoints", points)
        if self.handedness != "right":
            raise SchemaError(
                "only right hands are supported; mirror left-hand keypoints across x = 0"
            )
        for finger in FINGERS:
            chain = [self.keypoints[name] for name in chain_names(finger)]
            for i in range(len(chain)):
                for j in range(i + 1, len(chain)):
                    if np.linalg.norm(chain[i] - chain[j]) < MIN_SEPARATION:
                        raise SchemaError(
                            f"{finger} keypoints {chain_names(finger)[i]} and "
                            f"{chain_names(finger)[j]} are closer than 1 mm"
                        )

    def __getitem__(self, name: str) -> Vector3:
        return self.keypoints[name]

    def scaled(self, factor: float) -> "HandSkeleton":
        """Uniformly scaled copy about the wrist."""
        wrist = self.keypoints["wrist"]
        return HandSkeleton(
            {name: wrist + factor * (p - wrist) for name, p in self.keypoints.items()},
            self.handedness,
        )

    def to_dict(self) -> dict:
        return {
            "handedness": self.handedness,
            "frame": "wrist",
            "keypoints": {name: self.keypoints[name].tolist() for name in KEYPOINT_NAMES},
        }


class SkeletonFile(BaseModel):
    """On-disk skeleton document."""

    model_config = ConfigDict(extra="forbid")

    handedness: Literal["right", "left"] = "right"
    frame: Literal["wrist", "world"] = "wrist"
    keypoints: dict[str, tuple[float, float, float]]


def align_to_wrist_frame(skeleton: HandSkeleton) -> HandSkeleton:
    """Rigidly move arbitrary-frame keypoints into the wrist frame.

    Uses the wrist and the index/pinky MCPs: y points from the wrist to
    their midpoint, x runs index -> pinky (made orthogonal to y), z = x cross y.
    """
    wrist = skeleton["wrist"]
    index_mcp = skeleton["index_mcp"]
    pinky_mcp = skeleton["pinky_mcp"]
    y = 0.5 * (index_mcp + pinky_mcp) - wrist
    y = y / np.linalg.norm(y)
    x = pinky_mcp - index_mcp
    x = x - (x @ y) * y
    norm = np.linalg.norm(x)
    if norm < 1e-9:
        raise SchemaError("index and pinky MCPs do not span the palm; cannot align skeleton")
    x = x / norm
    z = np.cross(x, y)
    basis = np.stack([x, y, z], axis=1)
    return HandSkeleton(
        {name: basis.T @ (p - wrist) for name, p in skeleton.keypoints.items()},
        skeleton.handedness,
    )


def load_skeleton(path: str | Path) -> HandSkeleton:
    """Load and validate a skeleton JSON file."""
    doc = validate_document(SkeletonFile, read_json(path), str(path))

    skeleton = HandSkeleton(
        {name: np.array(p, dtype=np.float64) for name, p in doc.keypoints.items()},
        doc.handedness,
    )
    if doc.frame == "world":
        logger.info("Aligning world-frame skeleton %s to the wrist frame", path)
        skeleton = align_to_wrist_frame(skeleton)
    return skeleton
