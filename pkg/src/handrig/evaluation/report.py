"""CSV outputs and the printed benchmark summary."""

import csv
from pathlib import Path
from typing import Sequence

from handrig.evaluation.evaluator import MetricsReport

NUMBER_FORMAT = "%.9g"

METRICS_COLUMNS = (
    "method",
    "mean_error_deg",
    "max_error_deg",
    "rmse_deg",
    "time_ms",
    "fingertip_mean_mm",
    "fingertip_max_mm",
    "clamp_count",
    "samples",
)
PER_JOINT_COLUMNS = ("method", "joint", "mean_error_deg", "max_error_deg", "rmse_deg")

LABELS = {
    "bch": "BCH-corrected",
    "naive": "Naive projection",
    "lsq": "Least-squares projection",
}


def fmt(value: float) -> str:
    text = NUMBER_FORMAT % float(value)
    return "0" if text == "-0" else text


class AngleCsvWriter:
    """Streams one row per projected frame: frame, 20 angles, clamp count.

    Rows go to a sibling `.part` file that replaces `path` only when the
    block exits cleanly; on error it is removed and `path` is left untouched.
    """

    def __init__(self, path: str | Path, dof_names: Sequence[str]):
        self.path = Path(path)
        self.partial = self.path.with_name(self.path.name + ".part")
        self.dof_names = tuple(dof_names)
        self._file = None
        self._writer = None
        self.rows = 0

    def __enter__(self) -> "AngleCsvWriter":
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._file = open(self.partial, "w", newline="")
        self._writer = csv.writer(self._file, lineterminator="\n")
        self._writer.writerow(("frame", *self.dof_names, "clamp_count"))
        return self

    def write(self, angles: Sequence[float], clamp_count: int) -> None:
        self._writer.writerow((self.rows, *(fmt(a) for a in angles), clamp_count))
        self.rows += 1

    def __exit__(self, exc_type, exc, tb):
        self._file.close()
        if exc_type is None:
            self.partial.replace(self.path)
        else:
            self.partial.unlink(missing_ok=True)
        return False


def write_metrics_csv(report: MetricsReport, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(METRICS_COLUMNS)
        for m in report.ordered():
            writer.writerow(
                (
                    m.method,
                    fmt(m.error_deg.mean),
                    fmt(m.error_deg.max),
                    fmt(m.error_deg.rmse),
                    fmt(m.time_ms),
                    fmt(m.fingertip_mm.mean),
                    fmt(m.fingertip_mm.max),
                    m.clamp_count,
                    m.sample_count,
                )
            )


def write_per_joint_csv(report: MetricsReport, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(PER_JOINT_COLUMNS)
        for m in report.ordered():
            for joint, stats in m.per_joint.items():
                writer.writerow((m.method, joint, fmt(stats.mean), fmt(stats.max), fmt(stats.rmse)))


def print_summary(report: MetricsReport) -> None:
    print("\n" + "=" * 60)
    print("SUMMARY")
    print("=" * 60)
    print(f"Poses: {report.pose_count}  (seed {report.seed})")
    print(f"\n{'Method':<26}{'Mean (°)':>9}{'Max (°)':>9}{'RMSE (°)':>10}{'Time (ms)':>11}")
    for m in report.ordered():
        print(
            f"{LABELS.get(m.method, m.method):<26}"
            f"{m.error_deg.mean:>9.2f}{m.error_deg.max:>9.2f}{m.error_deg.rmse:>10.2f}{m.time_ms:>11.3f}"
        )
    print("\nFingertip error:")
    for m in report.ordered():
        print(f"  {m.method}: mean {m.fingertip_mm.mean:.2f} mm, max {m.fingertip_mm.max:.2f} mm")
    clamped = [m for m in report.ordered() if m.clamp_count]
    if clamped:
        print("\nClamped joint angles:")
        for m in clamped:
            print(f"  {m.method}: {m.clamp_count}")
