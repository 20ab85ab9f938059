"""
SO(3) / so(3) primitives: hat, vee, exponential and logarithm maps,
geodesic distance and axis-angle rotations.

Rotations are 3x3 float64 numpy arrays, vectors are length-3 float64 arrays.
All functions are pure and never modify their inputs.
"""

import numpy as np
from numpy.typing import ArrayLike, NDArray

from handrig.errors import NotSkewError, NotUnitError

Vector3 = NDArray[np.float64]
Rotation = NDArray[np.float64]
SkewMatrix = NDArray[np.float64]

SKEW_TOL = 1e-9
UNIT_TOL = 1e-9
# Below this angle exp/log use second-order Taylor coefficients.
SMALL_ANGLE = 1e-6
# Within this distance of pi, log recovers the axis from the symmetric part.
NEAR_PI = 1e-3
# Skew part below this at a half turn is rounding noise; the sign rule takes over.
HALF_TURN_SKEW = 1e-12


def hat(v: ArrayLike) -> SkewMatrix:
    """Skew-symmetric matrix with hat(v) @ u == cross(v, u)."""
    x, y, z = np.asarray(v, dtype=np.float64)
    return np.array(
        [
            [0.0, -z, y],
            [z, 0.0, -x],
            [-y, x, 0.0],
        ]
    )


def vee(m: ArrayLike, tol: float = SKEW_TOL) -> Vector3:
    """Axial vector of a skew-symmetric matrix; inverse of hat."""
    m = np.asarray(m, dtype=np.float64)
    asymmetry = float(np.max(np.abs(m + m.T)))
    if asymmetry > tol:
        raise NotSkewError(f"matrix is not skew-symmetric (max |M + M^T| = {asymmetry:.3e})")
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def _skew_axial(r: Rotation) -> Vector3:
    """vee((R - R^T) / 2) without the symmetry check; skew by construction."""
    return 0.5 * np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])


def exp_so3(v: ArrayLike) -> Rotation:
    """Rodrigues exponential of a rotation vector."""
    v = np.asarray(v, dtype=np.float64)
    theta_sq = float(v @ v)
    theta = np.sqrt(theta_sq)
    if theta < SMALL_ANGLE:
        a = 1.0 - theta_sq / 6.0
        b = 0.5 - theta_sq / 24.0
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta_sq
    k = hat(v)
    return np.eye(3) + a * k + b * (k @ k)


def rotation_angle(r: Rotation) -> float:
    """Rotation angle in [0, pi], computed with atan2 for uniform conditioning."""
    sin_part = float(np.linalg.norm(_skew_axial(r)))
    cos_part = 0.5 * (float(np.trace(r)) - 1.0)
    return float(np.arctan2(sin_part, cos_part))


def log_so3(r: ArrayLike) -> Vector3:
    """Rotation vector of R with angle in [0, pi].

    Near a half turn the skew part vanishes, so the axis comes from the
    symmetric part (R + R^T)/2 = cos(t) I + (1 - cos(t)) a a^T instead.
    At exactly pi the sign is chosen so the largest-magnitude component is
    positive.
    """
    r = np.asarray(r, dtype=np.float64)
    skew = _skew_axial(r)
    sin_theta = float(np.linalg.norm(skew))
    cos_theta = 0.5 * (float(np.trace(r)) - 1.0)
    theta = float(np.arctan2(sin_theta, cos_theta))

    if theta < SMALL_ANGLE:
        return skew * (1.0 + theta * theta / 6.0)

    if np.pi - theta < NEAR_PI:
        outer = (0.5 * (r + r.T) - cos_theta * np.eye(3)) / (1.0 - cos_theta)
        k = int(np.argmax(np.diag(outer)))
        axis = outer[:, k] / np.sqrt(outer[k, k])
        axis /= np.linalg.norm(axis)
        if sin_theta > HALF_TURN_SKEW and float(axis @ skew) < 0.0:
            axis = -axis
        elif sin_theta <= HALF_TURN_SKEW and axis[int(np.argmax(np.abs(axis)))] < 0.0:
            axis = -axis
        return theta * axis

    return skew * (theta / sin_theta)


def geodesic_distance(r1: ArrayLike, r2: ArrayLike) -> float:
    """Intrinsic distance ||log(R1^T R2)|| in radians."""
    r1 = np.asarray(r1, dtype=np.float64)
    r2 = np.asarray(r2, dtype=np.float64)
    return rotation_angle(r1.T @ r2)


def check_unit(a: ArrayLike, tol: float = UNIT_TOL) -> Vector3:
    """Return `a` as a float array, raising NotUnitError when ||a|| != 1."""
    a = np.asarray(a, dtype=np.float64)
    norm = float(np.linalg.norm(a))
    if abs(norm - 1.0) > tol:
        raise NotUnitError(f"axis {a.tolist()} has norm {norm:.12f}, expected 1")
    return a


def rotation_about(a: ArrayLike, theta: float) -> Rotation:
    """Rotation by `theta` radians about the unit axis `a`."""
    return exp_so3(float(theta) * check_unit(a))


def normalize(v: ArrayLike) -> Vector3:
    """Unit vector along `v`; callers check degeneracy beforehand."""
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v)
