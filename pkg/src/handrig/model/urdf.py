"""
URDF serialisation of a HandModel.

Two-DOF joints become two stacked revolute joints, abduction then flexion,
joined by a massless `<joint>_link`. Every link frame keeps the wrist
orientation, so joint origins are plain offsets between joint positions and
axes are written unchanged.
"""

import logging
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from handrig.config import InertialConfig
from handrig.errors import ModelMismatchError
from handrig.model.hand_model import ROOT_LINK, HandModel, JointSpec, TwoDof, link_anchor_points
from handrig.model.segmentation import RigidSegment

logger = logging.getLogger(__name__)

MESH_DIR = "meshes"
DEFAULT_PRECISION = 9


def mesh_filename(link: str) -> str:
    return f"{MESH_DIR}/{link}.obj"


class _Formatter:
    def __init__(self, precision: int):
        self.fmt = f"%.{precision}g"

    def num(self, value: float) -> str:
        text = self.fmt % float(value)
        return "0" if text == "-0" else text

    def vec(self, values) -> str:
        return " ".join(self.num(v) for v in values)


def _box(points: NDArray[np.float64], padding: float, min_extent: float) -> tuple[NDArray, NDArray]:
    """(center, size) of the padded axis-aligned bounding box of `points`."""
    lower = points.min(axis=0) - padding
    upper = points.max(axis=0) + padding
    size = np.maximum(upper - lower, min_extent)
    return 0.5 * (lower + upper), size


def link_box(
    model: HandModel, link: str, segment: RigidSegment | None, inertial: InertialConfig
) -> tuple[NDArray, NDArray]:
    """Bounding box of a link in its own frame: the segment mesh, or the padded bone."""
    if segment is not None and not segment.is_empty:
        return _box(segment.vertices, 0.0, inertial.min_extent)
    bone = link_anchor_points(model, link) - model.link_origin(link)
    return _box(bone, inertial.box_padding, inertial.min_extent)


def box_inertia(mass: float, size: NDArray[np.float64]) -> tuple[float, float, float]:
    x, y, z = size
    return (
        mass * (y * y + z * z) / 12.0,
        mass * (x * x + z * z) / 12.0,
        mass * (x * x + y * y) / 12.0,
    )


def _check_segments(model: HandModel, segments: Sequence[RigidSegment] | None) -> dict:
    if segments is None:
        return {}
    names = [s.link for s in segments]
    if names != list(model.links):
        missing = sorted(set(model.links) - set(names))
        unknown = sorted(set(names) - set(model.links))
        raise ModelMismatchError(
            f"segments do not match model links (missing {missing}, unknown {unknown}, "
            f"or out of order)"
        )
    return {s.link: s for s in segments}


def _add_link(robot, fmt, model, link, segment, inertial):
    elem = ET.SubElement(robot, "link", name=link)
    center, size = link_box(model, link, segment, inertial)
    mass = inertial.density * float(np.prod(size))
    ixx, iyy, izz = box_inertia(mass, size)

    node = ET.SubElement(elem, "inertial")
    ET.SubElement(node, "origin", xyz=fmt.vec(center), rpy="0 0 0")
    ET.SubElement(node, "mass", value=fmt.num(mass))
    ET.SubElement(
        node, "inertia",
        ixx=fmt.num(ixx), ixy="0", ixz="0", iyy=fmt.num(iyy), iyz="0", izz=fmt.num(izz),
    )

    for tag in ("visual", "collision"):
        node = ET.SubElement(elem, tag)
        if segment is not None and not segment.is_empty:
            ET.SubElement(node, "origin", xyz="0 0 0", rpy="0 0 0")
            geometry = ET.SubElement(node, "geometry")
            ET.SubElement(geometry, "mesh", filename=mesh_filename(link))
        else:
            ET.SubElement(node, "origin", xyz=fmt.vec(center), rpy="0 0 0")
            geometry = ET.SubElement(node, "geometry")
            ET.SubElement(geometry, "box", size=fmt.vec(size))


def _add_revolute(robot, fmt, model, name, parent, child, xyz, axis, limits):
    dyn = model.config.dynamics
    elem = ET.SubElement(robot, "joint", name=name, type="revolute")
    ET.SubElement(elem, "parent", link=parent)
    ET.SubElement(elem, "child", link=child)
    ET.SubElement(elem, "origin", xyz=fmt.vec(xyz), rpy="0 0 0")
    ET.SubElement(elem, "axis", xyz=fmt.vec(axis))
    ET.SubElement(
        elem, "limit",
        lower=fmt.num(limits[0]), upper=fmt.num(limits[1]),
        effort=fmt.num(dyn.effort), velocity=fmt.num(dyn.velocity),
    )
    ET.SubElement(elem, "dynamics", damping=fmt.num(dyn.damping), friction=fmt.num(dyn.friction))


def _add_joint(robot, fmt, model: HandModel, joint: JointSpec):
    offset = joint.origin - model.link_origin(joint.parent)
    if isinstance(joint.dof, TwoDof):
        abduction, flexion = joint.dof_names()
        middle = f"{joint.name}_link"
        ET.SubElement(robot, "link", name=middle)
        _add_revolute(
            robot, fmt, model, abduction, joint.parent, middle, offset,
            joint.dof.abduction_axis, joint.limits[0],
        )
        _add_revolute(
            robot, fmt, model, flexion, middle, joint.child, np.zeros(3),
            joint.dof.flexion_axis, joint.limits[1],
        )
    else:
        _add_revolute(
            robot, fmt, model, joint.name, joint.parent, joint.child, offset,
            joint.dof.axis, joint.limits[0],
        )


def build_urdf(
    model: HandModel,
    segments: Sequence[RigidSegment] | None = None,
    robot_name: str = "hand",
    precision: int = DEFAULT_PRECISION,
) -> ET.ElementTree:
    """URDF tree for `model`; links without a (non-empty) segment get box geometry."""
    by_link = _check_segments(model, segments)
    inertial = model.config.inertial
    fmt = _Formatter(precision)
    robot = ET.Element("robot", name=robot_name)

    _add_link(robot, fmt, model, ROOT_LINK, by_link.get(ROOT_LINK), inertial)
    for joint in model.joints:
        _add_joint(robot, fmt, model, joint)
        _add_link(robot, fmt, model, joint.child, by_link.get(joint.child), inertial)

    tree = ET.ElementTree(robot)
    ET.indent(tree, space="  ")
    return tree


def export_urdf(
    model: HandModel,
    segments: Sequence[RigidSegment] | None,
    out_path: str | Path,
    robot_name: str = "hand",
    precision: int = DEFAULT_PRECISION,
) -> ET.ElementTree:
    """Write the URDF to `out_path`. Mesh files are expected under a sibling meshes/ dir."""
    tree = build_urdf(model, segments, robot_name, precision)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    tree.write(out_path, encoding="utf-8", xml_declaration=True)
    revolute = sum(1 for _ in tree.getroot().iter("joint"))
    links = sum(1 for _ in tree.getroot().iter("link"))
    logger.info("Wrote %s (%d revolute joints, %d links)", out_path, revolute, links)
    return tree
