import csv
import warnings
from pathlib import Path

import numpy as np
import pytest

from handrig.model.hand_model import build_hand_model
from handrig.model.skeleton import load_skeleton

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
SKELETON_PATH = FIXTURES / "synthetic_right_hand.json"
POSES_PATH = FIXTURES / "poses_100.json"
GOLDEN = Path(__file__).resolve().parent / "golden"


def pytest_addoption(parser):
    parser.addoption(
        "--regen-golden", action="store_true", help="rewrite the recorded CSVs under tests/golden"
    )


def random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def frobenius_error(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b), ord="fro"))


def is_rotation(r, tol: float = 1e-9) -> bool:
    """R^T R = I per entry and det(R) = +1, both within `tol`."""
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (3, 3) or not np.all(np.isfinite(r)):
        return False
    orthogonal = np.max(np.abs(r.T @ r - np.eye(3))) <= tol
    return bool(orthogonal and abs(np.linalg.det(r) - 1.0) <= tol)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def skeleton_path() -> Path:
    return SKELETON_PATH


@pytest.fixture(scope="session")
def poses_path() -> Path:
    return POSES_PATH


@pytest.fixture(scope="session")
def skeleton():
    return load_skeleton(SKELETON_PATH)


@pytest.fixture(scope="session")
def model(skeleton):
    return build_hand_model(skeleton)


@pytest.fixture
def golden(request):
    """recorded(name, rows) -> the rows stored under tests/golden/<name>.

    A missing file (or --regen-golden) records `rows` first, with a warning.
    """

    def recorded(name: str, rows: list[list[str]]) -> list[list[str]]:
        path = GOLDEN / name
        if request.config.getoption("--regen-golden") or not path.is_file():
            GOLDEN.mkdir(exist_ok=True)
            with open(path, "w", newline="") as f:
                csv.writer(f, lineterminator="\n").writerows(rows)
            warnings.warn(f"recorded golden file {path}", stacklevel=2)
        with open(path, newline="") as f:
            return list(csv.reader(f))

    return recorded
