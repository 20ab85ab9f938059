"""
Synthetic pose sets for the round-trip benchmark.

on_manifold   joint angles drawn inside the limits, turned into rotations
off_manifold  on_manifold plus a random rotation of bounded angle per joint
adversarial   large coupled two-DOF rotations; one-DOF joints stay on-manifold
"""

import logging
from typing import Literal

import numpy as np
from scipy.spatial.transform import Rotation as ScipyRotation

from handrig.errors import InputError
from handrig.geometry.rotation import exp_so3, log_so3
from handrig.model.hand_model import NUM_JOINTS, HandModel, PoseFrame, TwoDof, joint_rotations

logger = logging.getLogger(__name__)

SampleKind = Literal["on_manifold", "off_manifold", "adversarial"]

DEFAULT_MAX_ANGLE_DEG = {"on_manifold": 180.0, "off_manifold": 60.0, "adversarial": 170.0}
ADVERSARIAL_ABDUCTION = (0.3, 0.45)
ADVERSARIAL_FLEXION = (0.8, 1.0)


def _as_frame(rotations) -> PoseFrame:
    return np.stack([log_so3(r) for r in rotations])


def _sample_angles(model: HandModel, rng: np.random.Generator, max_angle: float) -> np.ndarray:
    lower = np.maximum(model.lower, -max_angle)
    upper = np.minimum(model.upper, max_angle)
    return rng.uniform(lower, upper)


def _signed(rng: np.random.Generator, magnitude_range: tuple[float, float], scale: float) -> float:
    magnitude = rng.uniform(*magnitude_range) * scale
    return float(magnitude if rng.random() < 0.5 else -magnitude)


def sample_poses(
    model: HandModel,
    kind: SampleKind,
    n: int,
    max_angle_deg: float | None = None,
    seed: int | None = 0,
) -> list[PoseFrame]:
    """`n` pose frames (model joint order); identical output for identical seeds."""
    if n <= 0:
        raise InputError(f"sample size must be positive, got {n}")
    if kind not in DEFAULT_MAX_ANGLE_DEG:
        raise InputError(f"unknown sample kind {kind!r}")
    max_angle = np.deg2rad(max_angle_deg if max_angle_deg is not None else DEFAULT_MAX_ANGLE_DEG[kind])
    rng = np.random.default_rng(seed)
    poses = []

    for _ in range(n):
        q = _sample_angles(model, rng, max_angle if kind == "on_manifold" else np.pi)
        rotations = joint_rotations(model, q)

        if kind == "off_manifold":
            directions = ScipyRotation.random(NUM_JOINTS, rng).as_rotvec()
            directions /= np.linalg.norm(directions, axis=1, keepdims=True)
            angles = rng.uniform(0.0, max_angle, size=NUM_JOINTS)
            rotations = [r @ exp_so3(a * d) for r, a, d in zip(rotations, angles, directions)]
        elif kind == "adversarial":
            for k, joint in enumerate(model.joints):
                if isinstance(joint.dof, TwoDof):
                    phi = _signed(rng, ADVERSARIAL_ABDUCTION, max_angle)
                    theta = _signed(rng, ADVERSARIAL_FLEXION, max_angle)
                    rotations[k] = joint.rotation((phi, theta))

        poses.append(_as_frame(rotations))

    logger.debug("Sampled %d %s poses (seed %s)", n, kind, seed)
    return poses
