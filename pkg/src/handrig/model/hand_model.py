"""
The 16-link, 20-DOF kinematic hand model.

Joint frames are wrist-aligned: every link frame has identity orientation
at rest, so joint axes are stored in the wrist frame and a joint's origin is
its rest-pose keypoint. Two-DOF joints rotate abduction first, then flexion.
"""

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from handrig.config import HandConfig
from handrig.errors import SchemaError
from handrig.geometry.projection import reconstruct_2dof
from handrig.geometry.rotation import Rotation, Vector3, exp_so3, rotation_about
from handrig.model.axes import finger_axes, thumb_cmc_axes, thumb_distal_axes
from handrig.model.skeleton import FINGERS, LONG_FINGERS, HandSkeleton

logger = logging.getLogger(__name__)

ROOT_LINK = "palm"
NUM_JOINTS = 15
NUM_DOFS = 20

JOINT_ORDER: tuple[str, ...] = ("thumb_cmc", "thumb_mcp", "thumb_ip") + tuple(
    f"{finger}_{part}" for finger in LONG_FINGERS for part in ("mcp", "pip", "dip")
)
# MANO's 15 pose joints: index, middle, pinky, ring, thumb (root to tip each).
MANO_JOINT_ORDER: tuple[str, ...] = tuple(
    f"{finger}_{part}"
    for finger in ("index", "middle", "pinky", "ring")
    for part in ("mcp", "pip", "dip")
) + ("thumb_cmc", "thumb_mcp", "thumb_ip")

_SEGMENT = {"cmc": "proximal", "mcp": "proximal", "pip": "middle", "dip": "distal", "ip": "distal"}

JointAngleVector = NDArray[np.float64]
PoseFrame = NDArray[np.float64]  # (15, 3) axis-angle vectors in JOINT_ORDER


def child_link(joint: str) -> str:
    finger, part = joint.split("_")
    if finger == "thumb" and part == "mcp":
        return "thumb_middle"
    return f"{finger}_{_SEGMENT[part]}"


LINK_ORDER: tuple[str, ...] = (ROOT_LINK,) + tuple(child_link(j) for j in JOINT_ORDER)


@dataclass(frozen=True, eq=False)
class OneDof:
    axis: Vector3


@dataclass(frozen=True, eq=False)
class TwoDof:
    abduction_axis: Vector3
    flexion_axis: Vector3


@dataclass(frozen=True, eq=False)
class JointSpec:
    name: str
    parent: str
    child: str
    origin: Vector3
    dof: OneDof | TwoDof
    limits: tuple[tuple[float, float], ...]

    @property
    def dof_count(self) -> int:
        return 2 if isinstance(self.dof, TwoDof) else 1

    @property
    def axes(self) -> tuple[Vector3, ...]:
        if isinstance(self.dof, TwoDof):
            return self.dof.abduction_axis, self.dof.flexion_axis
        return (self.dof.axis,)

    def dof_names(self) -> tuple[str, ...]:
        if isinstance(self.dof, TwoDof):
            return f"{self.name}_abduction", f"{self.name}_flexion"
        return (self.name,)

    def rotation(self, angles: Sequence[float]) -> Rotation:
        if isinstance(self.dof, TwoDof):
            return reconstruct_2dof(
                self.dof.abduction_axis, self.dof.flexion_axis, angles[0], angles[1]
            )
        return rotation_about(self.dof.axis, angles[0])


@dataclass(frozen=True, eq=False)
class LinkPose:
    rotation: Rotation
    position: Vector3


@dataclass(frozen=True, eq=False)
class HandModel:
    joints: tuple[JointSpec, ...]
    root_origin: Vector3
    tips: dict[str, Vector3]
    config: HandConfig = field(default_factory=HandConfig)

    @property
    def links(self) -> tuple[str, ...]:
        return (ROOT_LINK,) + tuple(j.child for j in self.joints)

    @property
    def dof_layout(self) -> tuple[tuple[str, int], ...]:
        """Slot -> (joint name, dof index), 20 entries."""
        return tuple((j.name, k) for j in self.joints for k in range(j.dof_count))

    @property
    def dof_names(self) -> tuple[str, ...]:
        return tuple(name for j in self.joints for name in j.dof_names())

    @property
    def dof_slices(self) -> dict[str, slice]:
        slices, start = {}, 0
        for j in self.joints:
            slices[j.name] = slice(start, start + j.dof_count)
            start += j.dof_count
        return slices

    @property
    def lower(self) -> JointAngleVector:
        return np.array([lim[0] for j in self.joints for lim in j.limits])

    @property
    def upper(self) -> JointAngleVector:
        return np.array([lim[1] for j in self.joints for lim in j.limits])

    def joint(self, name: str) -> JointSpec:
        for j in self.joints:
            if j.name == name:
                return j
        raise KeyError(name)

    def link_origin(self, link: str) -> Vector3:
        if link == ROOT_LINK:
            return self.root_origin
        for j in self.joints:
            if j.child == link:
                return j.origin
        raise KeyError(link)

    def audit(self) -> dict:
        """Structural counts plus a list of violated invariants (empty when sound)."""
        problems = []
        two = sum(1 for j in self.joints if isinstance(j.dof, TwoDof))
        one = sum(1 for j in self.joints if isinstance(j.dof, OneDof))
        links = self.links
        if (two, one) != (5, 10):
            problems.append(f"expected 5 two-DOF and 10 one-DOF joints, got {two} and {one}")
        if len(set(links)) != 16 or len(links) != 16:
            problems.append(f"expected 16 distinct links, got {len(set(links))}")
        seen = {ROOT_LINK}
        for j in self.joints:
            if j.parent not in seen:
                problems.append(f"joint {j.name}: parent {j.parent} not yet attached")
            if j.child in seen:
                problems.append(f"joint {j.name}: child {j.child} already attached (cycle)")
            seen.add(j.child)
            for axis in j.axes:
                if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
                    problems.append(f"joint {j.name}: axis not unit length")
            if isinstance(j.dof, TwoDof):
                if abs(float(j.dof.abduction_axis @ j.dof.flexion_axis)) >= 1.0 - 1e-6:
                    problems.append(f"joint {j.name}: parallel axes")
            for lower, upper in j.limits:
                if not lower < upper:
                    problems.append(f"joint {j.name}: limits ({lower}, {upper}) out of order")
        dofs = sum(j.dof_count for j in self.joints)
        if dofs != NUM_DOFS:
            problems.append(f"expected {NUM_DOFS} DOFs, got {dofs}")
        return {"two_dof": two, "one_dof": one, "links": len(links), "dofs": dofs, "problems": problems}

    def to_dict(self) -> dict:
        joints = []
        for j in self.joints:
            entry = {
                "name": j.name,
                "parent": j.parent,
                "child": j.child,
                "origin": j.origin.tolist(),
                "limits": [list(lim) for lim in j.limits],
            }
            if isinstance(j.dof, TwoDof):
                entry["type"] = "two"
                entry["abduction_axis"] = j.dof.abduction_axis.tolist()
                entry["flexion_axis"] = j.dof.flexion_axis.tolist()
            else:
                entry["type"] = "one"
                entry["axis"] = j.dof.axis.tolist()
            joints.append(entry)
        return {
            "root_link": ROOT_LINK,
            "root_origin": self.root_origin.tolist(),
            "tips": {finger: tip.tolist() for finger, tip in self.tips.items()},
            "joints": joints,
            "dof_layout": list(self.dof_names),
            "config": self.config.model_dump(mode="json"),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "HandModel":
        try:
            joints = []
            for entry in data["joints"]:
                if entry["type"] == "two":
                    dof = TwoDof(
                        np.array(entry["abduction_axis"], dtype=np.float64),
                        np.array(entry["flexion_axis"], dtype=np.float64),
                    )
                else:
                    dof = OneDof(np.array(entry["axis"], dtype=np.float64))
                joints.append(
                    JointSpec(
                        name=entry["name"],
                        parent=entry["parent"],
                        child=entry["child"],
                        origin=np.array(entry["origin"], dtype=np.float64),
                        dof=dof,
                        limits=tuple((float(lo), float(hi)) for lo, hi in entry["limits"]),
                    )
                )
            model = cls(
                joints=tuple(joints),
                root_origin=np.array(data["root_origin"], dtype=np.float64),
                tips={f: np.array(p, dtype=np.float64) for f, p in data["tips"].items()},
                config=HandConfig.model_validate(data.get("config", {})),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"model description is malformed: {e}") from e
        problems = model.audit()["problems"]
        if problems:
            raise SchemaError(f"model description fails audit: {problems[0]}")
        return model


def _pick(role: str, named: Mapping[str, Vector3]) -> Vector3:
    sign = -1.0 if role.startswith("-") else 1.0
    return sign * named[role.lstrip("-")]


def build_hand_model(skel: HandSkeleton, config: HandConfig | None = None) -> HandModel:
    """Derive joint specs, axes and limits from the rest-pose skeleton."""
    config = config or HandConfig()
    limits = config.limits
    flex = tuple(limits.flexion)
    joints = []

    y_cmc, z_cmc = thumb_cmc_axes(skel)
    abd_role, flex_role = config.axis_roles["thumb"]
    cmc_named = {"y": y_cmc, "z": z_cmc}
    joints.append(
        JointSpec(
            name="thumb_cmc",
            parent=ROOT_LINK,
            child=child_link("thumb_cmc"),
            origin=skel["thumb_cmc"].copy(),
            dof=TwoDof(_pick(abd_role, cmc_named), _pick(flex_role, cmc_named)),
            limits=(tuple(limits.thumb_cmc), tuple(limits.thumb_cmc)),
        )
    )
    distal = thumb_distal_axes(skel, config.thumb_tilt)
    for name in ("thumb_mcp", "thumb_ip"):
        joints.append(
            JointSpec(
                name=name,
                parent=joints[-1].child,
                child=child_link(name),
                origin=skel[name].copy(),
                dof=OneDof(distal[name]),
                limits=(flex,),
            )
        )

    for finger in LONG_FINGERS:
        x, y, _ = finger_axes(skel, finger)
        abd_role, flex_role = config.axis_roles[finger]
        named = {"x": x, "y": y}
        abduction, flexion = _pick(abd_role, named), _pick(flex_role, named)
        mcp = f"{finger}_mcp"
        joints.append(
            JointSpec(
                name=mcp,
                parent=ROOT_LINK,
                child=child_link(mcp),
                origin=skel[mcp].copy(),
                dof=TwoDof(abduction, flexion),
                limits=(tuple(limits.abduction), flex),
            )
        )
        for part in ("pip", "dip"):
            name = f"{finger}_{part}"
            joints.append(
                JointSpec(
                    name=name,
                    parent=joints[-1].child,
                    child=child_link(name),
                    origin=skel[name].copy(),
                    dof=OneDof(flexion),
                    limits=(flex,),
                )
            )

    model = HandModel(
        joints=tuple(joints),
        root_origin=skel["wrist"].copy(),
        tips={finger: skel[f"{finger}_tip"].copy() for finger in FINGERS},
        config=config,
    )
    logger.debug("Built hand model with %d joints, %d DOFs", len(joints), NUM_DOFS)
    return model


def _as_angles(model: HandModel, q: ArrayLike) -> JointAngleVector:
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (NUM_DOFS,):
        raise SchemaError(f"joint angle vector must have {NUM_DOFS} entries, got shape {q.shape}")
    return q


def joint_rotations(model: HandModel, q: ArrayLike) -> list[Rotation]:
    """Per-joint rotation for a joint angle vector, in joint order."""
    q = _as_angles(model, q)
    slices = model.dof_slices
    return [j.rotation(q[slices[j.name]]) for j in model.joints]


def chain_transforms(model: HandModel, rotations: Sequence[Rotation]) -> dict[str, LinkPose]:
    """World pose of every link given one rotation per joint.

    Each joint origin is carried rigidly by its parent link; the child link
    rotation is the parent rotation composed with the joint rotation.
    """
    poses = {ROOT_LINK: LinkPose(np.eye(3), model.root_origin.copy())}
    origins = {ROOT_LINK: model.root_origin}
    for joint, rot in zip(model.joints, rotations, strict=True):
        parent = poses[joint.parent]
        position = parent.position + parent.rotation @ (joint.origin - origins[joint.parent])
        poses[joint.child] = LinkPose(parent.rotation @ rot, position)
        origins[joint.child] = joint.origin
    return poses


def forward_kinematics(model: HandModel, q: ArrayLike) -> dict[str, LinkPose]:
    """World pose of every link for joint angles `q`; q = 0 is the rest pose."""
    return chain_transforms(model, joint_rotations(model, q))


def keypoint_positions(model: HandModel, link_poses: Mapping[str, LinkPose]) -> dict[str, Vector3]:
    """The 21 skeleton keypoints carried by their links."""
    points = {"wrist": link_poses[ROOT_LINK].position}
    for joint in model.joints:
        points[joint.name] = link_poses[joint.child].position
    for finger, tip in model.tips.items():
        distal = f"{finger}_distal"
        pose = link_poses[distal]
        points[f"{finger}_tip"] = pose.position + pose.rotation @ (tip - model.link_origin(distal))
    return points


def as_pose_frame(pose: ArrayLike) -> PoseFrame:
    pose = np.asarray(pose, dtype=np.float64)
    if pose.shape != (NUM_JOINTS, 3):
        raise SchemaError(f"pose frame must be {NUM_JOINTS} x 3 axis-angle values, got {pose.shape}")
    if not np.all(np.isfinite(pose)):
        raise SchemaError("pose frame contains non-finite values")
    if np.any(np.linalg.norm(pose, axis=1) > np.pi + 1e-9):
        raise SchemaError("pose frame has a joint rotation angle above pi")
    return pose


def pose_to_rotations(pose: ArrayLike) -> list[Rotation]:
    """exp of each of the 15 axis-angle vectors."""
    return [exp_so3(v) for v in as_pose_frame(pose)]


def pose_from_mano(theta: ArrayLike) -> PoseFrame:
    """Reorder a MANO pose (45 values or 15 x 3) into model joint order."""
    theta = np.asarray(theta, dtype=np.float64).reshape(NUM_JOINTS, 3)
    index = {name: k for k, name in enumerate(MANO_JOINT_ORDER)}
    return as_pose_frame(theta[[index[name] for name in JOINT_ORDER]])


def link_anchor_points(model: HandModel, link: str) -> NDArray[np.float64]:
    """Rest-pose points a link spans: its origin plus the next joint or tip.

    The palm spans the wrist and every finger root.
    """
    if link == ROOT_LINK:
        roots = [j.origin for j in model.joints if j.parent == ROOT_LINK]
        return np.stack([model.root_origin, *roots])
    start = model.link_origin(link)
    children = [j.origin for j in model.joints if j.parent == link]
    if children:
        return np.stack([start, *children])
    finger = link.split("_")[0]
    return np.stack([start, model.tips[finger]])
