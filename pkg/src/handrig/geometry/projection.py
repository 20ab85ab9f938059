"""
Projection of target rotations onto one- and two-DOF joint subspaces.

project_1dof is the closed-form Frobenius minimiser over rotations about a
single axis. project_2dof_bch refines the log-map initialisation with a
first-commutator (BCH) model of exp(phi a1^) exp(theta a2^). The naive and
least-squares variants are the baselines the benchmark compares against;
the least-squares one doubles as the optimality oracle.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field

from handrig.errors import ParallelAxesError
from handrig.geometry.rotation import (
    Rotation,
    Vector3,
    _skew_axial,
    check_unit,
    exp_so3,
    geodesic_distance,
    hat,
    log_so3,
)

# Both atan2 arguments below this magnitude: the 1-DOF objective is flat.
FLAT_TOL = 1e-12
PARALLEL_TOL = 1e-6
MAX_REFINE_SWEEPS = 200


class ProjectionConfig(BaseModel):
    """Tuning knobs for the two-DOF projections."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    bch_iterations: int = Field(3, gt=0)
    relaxation: float = Field(0.5, gt=0.0, le=1.0)
    lsq_grid_step: float = Field(1e-3, gt=0.0, lt=np.pi)
    lsq_refine_tol: float = Field(1e-6, gt=0.0)
    # "tangent" projects the residual on the BCH model's Jacobian columns,
    # "axis" on the bare joint axes.
    bch_residual_projection: Literal["tangent", "axis"] = "tangent"
    clamp_to_limits: bool = True


@dataclass(frozen=True)
class TwoDofResult:
    phi: float
    theta: float
    iterations_used: int
    final_residual_norm: float
    residual_history: tuple[float, ...] = ()


def _wrap(angle: float) -> float:
    """Map an angle into (-pi, pi]."""
    wrapped = float(np.arctan2(np.sin(angle), np.cos(angle)))
    return np.pi if wrapped == -np.pi else wrapped


def project_1dof(r: ArrayLike, a: ArrayLike) -> float:
    """Angle about `a` closest to R in Frobenius norm.

    theta = atan2(<vee((R - R^T)/2), a>, (tr(R) - a^T R a)/2), in (-pi, pi].

    The cosine argument is the trace of R restricted to the plane normal to
    `a`; for R = R_a(t) it equals (tr(R) - 1)/2.
    """
    a = check_unit(a)
    r = np.asarray(r, dtype=np.float64)
    sin_part = float(_skew_axial(r) @ a)
    cos_part = 0.5 * (float(np.trace(r)) - float(a @ r @ a))
    if abs(sin_part) < FLAT_TOL and abs(cos_part) < FLAT_TOL:
        return 0.0
    theta = float(np.arctan2(sin_part, cos_part))
    return np.pi if theta == -np.pi else theta


def project_1dof_naive(r: ArrayLike, a: ArrayLike) -> float:
    """Component of log(R) along `a`."""
    a = check_unit(a)
    return float(log_so3(r) @ a)


def _check_axes(a1: ArrayLike, a2: ArrayLike) -> tuple[Vector3, Vector3]:
    a1 = check_unit(a1)
    a2 = check_unit(a2)
    if abs(float(a1 @ a2)) >= 1.0 - PARALLEL_TOL:
        raise ParallelAxesError(
            f"two-DOF axes {a1.tolist()} and {a2.tolist()} are parallel"
        )
    return a1, a2


def reconstruct_2dof(a1: ArrayLike, a2: ArrayLike, phi: float, theta: float) -> Rotation:
    """exp(phi a1^) exp(theta a2^): abduction first, then flexion."""
    a1 = check_unit(a1)
    a2 = check_unit(a2)
    return exp_so3(phi * a1) @ exp_so3(theta * a2)


def reconstruction_error(
    r: ArrayLike, a1: ArrayLike, a2: ArrayLike, phi: float, theta: float
) -> float:
    """Geodesic distance between R and its two-DOF reconstruction, radians."""
    return geodesic_distance(r, reconstruct_2dof(a1, a2, phi, theta))


def project_2dof_naive(r: ArrayLike, a1: ArrayLike, a2: ArrayLike) -> tuple[float, float]:
    """Independent projections of log(R) onto each axis."""
    a1, a2 = _check_axes(a1, a2)
    omega = log_so3(r)
    return float(omega @ a1), float(omega @ a2)


def project_2dof_bch(
    r: ArrayLike,
    a1: ArrayLike,
    a2: ArrayLike,
    cfg: ProjectionConfig | None = None,
) -> TwoDofResult:
    """Iterative two-DOF projection with first-commutator BCH correction.

    Models log(exp(phi a1^) exp(theta a2^)) as
    phi a1 + theta a2 + 1/2 phi theta (a1 x a2) and runs exactly
    cfg.bch_iterations relaxed updates from the log-map initialisation.
    """
    cfg = cfg or ProjectionConfig()
    a1, a2 = _check_axes(a1, a2)
    omega = log_so3(r)
    c = np.cross(a1, a2)

    phi = float(omega @ a1)
    theta = float(omega @ a2)

    def residual(phi: float, theta: float) -> Vector3:
        return omega - (phi * a1 + theta * a2 + 0.5 * phi * theta * c)

    res = residual(phi, theta)
    history = [float(np.linalg.norm(res))]
    for _ in range(cfg.bch_iterations):
        if cfg.bch_residual_projection == "tangent":
            d_phi = a1 + 0.5 * theta * c
            d_theta = a2 + 0.5 * phi * c
        else:
            d_phi, d_theta = a1, a2
        # simultaneous update from the same residual
        phi, theta = (
            phi + cfg.relaxation * float(res @ d_phi),
            theta + cfg.relaxation * float(res @ d_theta),
        )
        res = residual(phi, theta)
        history.append(float(np.linalg.norm(res)))

    return TwoDofResult(
        phi=phi,
        theta=theta,
        iterations_used=cfg.bch_iterations,
        final_residual_norm=history[-1],
        residual_history=tuple(history),
    )


def _trace_table(r: Rotation, a1: Vector3, a2: Vector3) -> np.ndarray:
    """T with tr(R^T R_a1(phi) R_a2(theta)) = u(phi)^T T v(theta).

    u = (1, cos phi, sin phi), v = (1, cos theta, sin theta), from the
    Rodrigues split R_a(t) = a a^T + cos(t)(I - a a^T) + sin(t) a^.
    """
    p1 = np.outer(a1, a1)
    p2 = np.outer(a2, a2)
    eye = np.eye(3)
    left = (p1, eye - p1, hat(a1))
    right = (p2, eye - p2, hat(a2))
    rt = r.T
    table = np.empty((3, 3))
    for i, a_part in enumerate(left):
        m = rt @ a_part
        for j, b_part in enumerate(right):
            table[i, j] = float(np.sum(m.T * b_part))
    return table


def _grid(step: float) -> np.ndarray:
    """Angles pi, pi - step, ... covering (-pi, pi]."""
    n = int(np.floor(2.0 * np.pi / step))
    if np.pi - n * step <= -np.pi:
        n -= 1
    return np.pi - step * np.arange(n + 1)


def project_2dof_lsq(
    r: ArrayLike,
    a1: ArrayLike,
    a2: ArrayLike,
    cfg: ProjectionConfig | None = None,
) -> tuple[float, float]:
    """Geodesic least-squares two-DOF projection (grid + coordinate descent).

    The geodesic distance is monotone in tr(R^T R_a1(phi) R_a2(theta)), so the
    search maximises the trace. For a fixed phi the trace is
    c0 + c1 cos(theta) + c2 sin(theta), unimodal on the circle, hence the best
    grid theta is one of the two grid neighbours of atan2(c2, c1) and the full
    2-D grid argmin is found row by row.
    """
    cfg = cfg or ProjectionConfig()
    a1, a2 = _check_axes(a1, a2)
    r = np.asarray(r, dtype=np.float64)
    table = _trace_table(r, a1, a2)
    step = cfg.lsq_grid_step
    grid = _grid(step)
    n = grid.size

    u = np.stack([np.ones(n), np.cos(grid), np.sin(grid)], axis=1)
    rows = u @ table
    best_theta = np.arctan2(rows[:, 2], rows[:, 1])
    position = (np.pi - best_theta) / step
    lo = np.minimum(np.floor(position).astype(np.int64), n - 1)
    lo = np.maximum(lo, 0)
    hi = (lo + 1) % n

    def row_trace(idx: np.ndarray) -> np.ndarray:
        t = grid[idx]
        return rows[:, 0] + rows[:, 1] * np.cos(t) + rows[:, 2] * np.sin(t)

    trace_lo = row_trace(lo)
    trace_hi = row_trace(hi)
    take_hi = trace_hi > trace_lo
    theta_idx = np.where(take_hi, hi, lo)
    row_best = np.where(take_hi, trace_hi, trace_lo)
    phi_idx = int(np.argmax(row_best))

    phi = float(grid[phi_idx])
    theta = float(grid[theta_idx[phi_idx]])

    # Exact coordinate descent: each update is the closed-form maximiser.
    for _ in range(MAX_REFINE_SWEEPS):
        cu = np.array([1.0, np.cos(phi), np.sin(phi)]) @ table
        new_theta = float(np.arctan2(cu[2], cu[1]))
        cv = table @ np.array([1.0, np.cos(new_theta), np.sin(new_theta)])
        new_phi = float(np.arctan2(cv[2], cv[1]))
        moved = max(abs(_wrap(new_phi - phi)), abs(_wrap(new_theta - theta)))
        phi, theta = new_phi, new_theta
        if moved < cfg.lsq_refine_tol:
            break

    return _wrap(phi), _wrap(theta)
