"""
Pose projection: 15 joint rotations -> the model's 20 joint angles, and back.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike

from handrig.geometry.projection import (
    ProjectionConfig,
    project_1dof,
    project_1dof_naive,
    project_2dof_bch,
    project_2dof_lsq,
    project_2dof_naive,
)
from handrig.geometry.rotation import Rotation
from handrig.model.hand_model import (
    NUM_DOFS,
    HandModel,
    JointAngleVector,
    TwoDof,
    joint_rotations,
    pose_to_rotations,
)

logger = logging.getLogger(__name__)

MethodChoice = Literal["bch", "naive", "lsq"]


@dataclass(frozen=True, eq=False)
class ProjectedPose:
    angles: JointAngleVector  # after clamping (equal to raw_angles when clamping is off)
    raw_angles: JointAngleVector
    clamp_count: int


def _project_two(r, a1, a2, method: MethodChoice, cfg: ProjectionConfig) -> tuple[float, float]:
    if method == "bch":
        result = project_2dof_bch(r, a1, a2, cfg)
        return result.phi, result.theta
    if method == "naive":
        return project_2dof_naive(r, a1, a2)
    if method == "lsq":
        return project_2dof_lsq(r, a1, a2, cfg)
    raise ValueError(f"unknown projection method {method!r}")


def project_rotations(
    model: HandModel,
    rotations: Sequence[Rotation],
    method: MethodChoice = "bch",
    cfg: ProjectionConfig | None = None,
) -> ProjectedPose:
    """Project one rotation per joint (joint order) onto the model's DOFs."""
    cfg = cfg or ProjectionConfig()
    if len(rotations) != len(model.joints):
        raise ValueError(f"expected {len(model.joints)} rotations, got {len(rotations)}")
    raw = np.empty(NUM_DOFS)
    slices = model.dof_slices
    for joint, r in zip(model.joints, rotations):
        if isinstance(joint.dof, TwoDof):
            raw[slices[joint.name]] = _project_two(
                r, joint.dof.abduction_axis, joint.dof.flexion_axis, method, cfg
            )
        elif method == "naive":
            raw[slices[joint.name]] = project_1dof_naive(r, joint.dof.axis)
        else:
            raw[slices[joint.name]] = project_1dof(r, joint.dof.axis)

    if not cfg.clamp_to_limits:
        return ProjectedPose(raw, raw.copy(), 0)
    lower, upper = model.lower, model.upper
    clamped = np.clip(raw, lower, upper)
    count = int(np.count_nonzero((raw < lower) | (raw > upper)))
    return ProjectedPose(clamped, raw, count)


def project_pose(
    model: HandModel,
    pose: ArrayLike,
    method: MethodChoice = "bch",
    cfg: ProjectionConfig | None = None,
) -> ProjectedPose:
    """Project a (15, 3) axis-angle pose frame given in model joint order."""
    return project_rotations(model, pose_to_rotations(pose), method, cfg)


def reconstruct_pose(model: HandModel, q: ArrayLike) -> list[Rotation]:
    """Per-joint rotations realised by joint angles q."""
    return joint_rotations(model, q)
