"""
Joint rotation axes from the rest-pose skeleton.

All axes are expressed in the wrist frame; joint frames share its
orientation, so nothing here builds per-joint rotations.
"""

import numpy as np

from handrig.errors import DegenerateGeometryError
from handrig.geometry.rotation import Vector3, normalize, rotation_about
from handrig.model.skeleton import LONG_FINGERS, HandSkeleton

CROSS_TOL = 1e-6
DEFAULT_THUMB_TILT = 0.96  # 55 degrees


def _cross_unit(u: Vector3, v: Vector3, what: str) -> Vector3:
    w = np.cross(u, v)
    norm = float(np.linalg.norm(w))
    if norm < CROSS_TOL:
        raise DegenerateGeometryError(f"{what}: vectors are (nearly) parallel, |u x v| = {norm:.2e}")
    return w / norm


def _direction(head: Vector3, tail: Vector3, what: str) -> Vector3:
    d = head - tail
    norm = float(np.linalg.norm(d))
    if norm < CROSS_TOL:
        raise DegenerateGeometryError(f"{what}: coincident keypoints")
    return d / norm


def finger_reference(skel: HandSkeleton, finger: str) -> Vector3:
    """Spread reference: world vertical for the index, neighbouring MCP vectors otherwise."""
    if finger == "index":
        return np.array([0.0, 0.0, 1.0])
    if finger == "middle":
        return skel["index_mcp"] - skel["ring_mcp"]
    if finger == "ring":
        return skel["middle_mcp"] - skel["ring_mcp"]
    if finger == "pinky":
        return skel["ring_mcp"] - skel["pinky_mcp"]
    raise ValueError(f"no spread reference for finger {finger!r}")


def finger_axes(skel: HandSkeleton, finger: str) -> tuple[Vector3, Vector3, Vector3]:
    """Right-handed orthonormal triad (x, y, z) of a long finger.

    z = normalize(PIP - DIP), y = normalize(z x ref), x = normalize(y x z).
    """
    if finger not in LONG_FINGERS:
        raise ValueError(f"finger_axes expects one of {LONG_FINGERS}, got {finger!r}")
    z = _direction(skel[f"{finger}_pip"], skel[f"{finger}_dip"], f"{finger} PIP/DIP")
    y = _cross_unit(z, finger_reference(skel, finger), f"{finger} direction x reference")
    x = normalize(np.cross(y, z))
    return x, y, z


def thumb_cmc_axes(skel: HandSkeleton) -> tuple[Vector3, Vector3]:
    """(y, z) axes of the thumb CMC saddle joint."""
    y = _direction(skel["thumb_mcp"], skel["index_mcp"], "thumb MCP/index MCP")
    z = _cross_unit(y, skel["thumb_mcp"] - skel["thumb_ip"], "thumb CMC")
    return y, z


def thumb_untilted_axes(skel: HandSkeleton) -> dict[str, tuple[Vector3, Vector3]]:
    """Per thumb joint: (segment direction, perpendicular axis before tilting)."""
    y_cmc, _ = thumb_cmc_axes(skel)
    segments = {
        "thumb_mcp": ("thumb_mcp", "thumb_cmc"),
        "thumb_ip": ("thumb_ip", "thumb_mcp"),
    }
    axes = {}
    for joint, (head, tail) in segments.items():
        d = _direction(skel[head], skel[tail], f"{joint} segment")
        axes[joint] = (d, _cross_unit(d, y_cmc, f"{joint} segment x y_CMC"))
    return axes


def thumb_distal_axes(skel: HandSkeleton, tilt: float = DEFAULT_THUMB_TILT) -> dict[str, Vector3]:
    """Flexion axes of the thumb MCP and IP joints, tilted about their segments."""
    return {
        joint: rotation_about(d, tilt) @ untilted
        for joint, (d, untilted) in thumb_untilted_axes(skel).items()
    }
