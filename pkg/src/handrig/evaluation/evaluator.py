"""
Round-trip benchmark: project every pose, reconstruct it, measure the error.

Errors are per (pose, joint) geodesic distances in degrees between the input
rotation and its reconstruction; mean, max and RMSE aggregate that whole
population. Timing is the median over repeated single-threaded passes.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from tqdm import tqdm

from handrig.config import METHODS
from handrig.errors import InputError
from handrig.evaluation.retarget import MethodChoice, project_rotations, reconstruct_pose
from handrig.geometry.projection import ProjectionConfig
from handrig.geometry.rotation import geodesic_distance
from handrig.model.hand_model import (
    HandModel,
    PoseFrame,
    chain_transforms,
    keypoint_positions,
    pose_to_rotations,
)
from handrig.model.skeleton import FINGERS

logger = logging.getLogger(__name__)

TIMING_REPEATS = 5


@dataclass(frozen=True)
class ErrorStats:
    mean: float
    max: float
    rmse: float

    @classmethod
    def of(cls, values: np.ndarray) -> "ErrorStats":
        values = np.asarray(values, dtype=np.float64)
        return cls(
            mean=float(values.mean()),
            max=float(values.max()),
            rmse=float(np.sqrt(np.mean(values**2))),
        )


@dataclass(frozen=True)
class MethodMetrics:
    method: str
    error_deg: ErrorStats
    time_ms: float  # median per-pose projection time
    per_joint: dict[str, ErrorStats]
    fingertip_mm: ErrorStats
    clamp_count: int
    sample_count: int


@dataclass
class MetricsReport:
    pose_count: int
    seed: int | None
    methods: dict[str, MethodMetrics] = field(default_factory=dict)

    def ordered(self) -> list[MethodMetrics]:
        return [self.methods[m] for m in METHODS if m in self.methods]


@dataclass(frozen=True)
class _PoseResult:
    joint_errors_deg: np.ndarray  # (15,)
    fingertip_errors_mm: np.ndarray  # (5,)
    clamp_count: int


def _fingertips(model: HandModel, rotations) -> np.ndarray:
    points = keypoint_positions(model, chain_transforms(model, rotations))
    return np.stack([points[f"{finger}_tip"] for finger in FINGERS])


def _roundtrip(model: HandModel, rotations, method: MethodChoice, cfg: ProjectionConfig) -> _PoseResult:
    projected = project_rotations(model, rotations, method, cfg)
    rebuilt = reconstruct_pose(model, projected.angles)
    errors = np.array([geodesic_distance(r, s) for r, s in zip(rotations, rebuilt)])
    tips = np.linalg.norm(_fingertips(model, rotations) - _fingertips(model, rebuilt), axis=1)
    return _PoseResult(np.rad2deg(errors), 1000.0 * tips, projected.clamp_count)


def _time_methods(
    model: HandModel,
    targets: list,
    methods: Sequence[MethodChoice],
    cfg: ProjectionConfig,
    rng: np.random.Generator,
    repeats: int,
) -> dict[str, float]:
    """Median per-pose projection time in ms; method order shuffled per repeat."""
    samples: dict[str, list[float]] = {m: [] for m in methods}
    for _ in range(repeats):
        for idx in rng.permutation(len(methods)):
            method = methods[idx]
            start = time.perf_counter()
            for rotations in targets:
                project_rotations(model, rotations, method, cfg)
            elapsed = time.perf_counter() - start
            samples[method].append(1000.0 * elapsed / len(targets))
    return {m: float(np.median(v)) for m, v in samples.items()}


def evaluate_roundtrip(
    model: HandModel,
    poses: Sequence[PoseFrame],
    methods: Sequence[MethodChoice] = METHODS,
    cfg: ProjectionConfig | None = None,
    seed: int | None = 0,
    threads: int = 1,
    progress: bool = False,
    timing_repeats: int = TIMING_REPEATS,
) -> MetricsReport:
    """Project, reconstruct and score every pose with every method."""
    if len(poses) == 0:
        raise InputError("evaluation needs at least one pose")
    cfg = cfg or ProjectionConfig()
    methods = list(dict.fromkeys(methods))
    targets = [pose_to_rotations(pose) for pose in poses]
    joint_names = [j.name for j in model.joints]
    report = MetricsReport(pose_count=len(poses), seed=seed)

    for method in methods:
        def run(rotations, method=method):
            return _roundtrip(model, rotations, method, cfg)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(
                    tqdm(pool.map(run, targets), total=len(targets), desc=method, disable=not progress)
                )
        else:
            results = [run(r) for r in tqdm(targets, desc=method, disable=not progress)]

        errors = np.stack([r.joint_errors_deg for r in results])  # (poses, joints)
        tips = np.concatenate([r.fingertip_errors_mm for r in results])
        clamps = sum(r.clamp_count for r in results)
        report.methods[method] = MethodMetrics(
            method=method,
            error_deg=ErrorStats.of(errors.ravel()),
            time_ms=0.0,
            per_joint={name: ErrorStats.of(errors[:, k]) for k, name in enumerate(joint_names)},
            fingertip_mm=ErrorStats.of(tips),
            clamp_count=clamps,
            sample_count=errors.size,
        )
        if clamps:
            logger.warning("%s: %d joint angles clamped to limits", method, clamps)

    timing = _time_methods(model, targets, methods, cfg, np.random.default_rng(seed), timing_repeats)
    for method, ms in timing.items():
        report.methods[method] = replace(report.methods[method], time_ms=ms)
    return report
