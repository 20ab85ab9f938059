"""OBJ meshes and skinning-weight files."""

import logging
from pathlib import Path
from typing import Literal

import numpy as np
import trimesh
from numpy.typing import NDArray

from handrig.errors import InputError, InvalidWeightsError, SchemaError
from handrig.model.hand_model import JOINT_ORDER, MANO_JOINT_ORDER
from handrig.model.segmentation import NUM_INFLUENCES, SkinnedMesh

logger = logging.getLogger(__name__)

WeightsOrder = Literal["model", "mano"]


def mano_weight_permutation() -> list[int]:
    """Column k of model-ordered weights is column perm[k] of a MANO weights file.

    MANO columns: wrist, then index, middle, pinky, ring, thumb (3 each).
    """
    mano_column = {name: 1 + k for k, name in enumerate(MANO_JOINT_ORDER)}
    return [0] + [mano_column[joint] for joint in JOINT_ORDER]


def load_obj(path: str | Path) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
    """Vertices and triangle faces of an OBJ file, vertex order preserved."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"mesh file not found: {path}")
    try:
        mesh = trimesh.load(path, force="mesh", process=False, maintain_order=True)
    except Exception as e:
        raise SchemaError(f"{path}: unreadable mesh: {e}") from e
    vertices = np.asarray(mesh.vertices, dtype=np.float64)
    faces = np.asarray(mesh.faces, dtype=np.int64).reshape(-1, 3)
    logger.debug("Loaded %s: %d vertices, %d faces", path, len(vertices), len(faces))
    return vertices, faces


def write_obj(path: str | Path, vertices: NDArray[np.float64], faces: NDArray[np.int64]) -> None:
    mesh = trimesh.Trimesh(vertices=vertices, faces=faces, process=False)
    text = trimesh.exchange.obj.export_obj(
        mesh, include_normals=False, include_color=False, include_texture=False
    )
    Path(path).write_text(text)


def load_weights(path: str | Path, order: WeightsOrder = "model") -> NDArray[np.float64]:
    """Whitespace-separated N x 16 weight matrix, returned in model link order."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"weights file not found: {path}")
    try:
        weights = np.loadtxt(path, dtype=np.float64, ndmin=2)
    except ValueError as e:
        raise InvalidWeightsError(f"{path}: unreadable weights: {e}") from e
    if weights.shape[1] != NUM_INFLUENCES:
        raise InvalidWeightsError(
            f"{path}: expected {NUM_INFLUENCES} weight columns, got {weights.shape[1]}"
        )
    if order == "mano":
        weights = weights[:, mano_weight_permutation()]
    return weights


def load_skinned_mesh(
    mesh_path: str | Path, weights_path: str | Path, order: WeightsOrder = "model"
) -> SkinnedMesh:
    vertices, faces = load_obj(mesh_path)
    weights = load_weights(weights_path, order)
    if len(weights) != len(vertices):
        raise InvalidWeightsError(
            f"{weights_path} has {len(weights)} rows but {mesh_path} has {len(vertices)} vertices"
        )
    return SkinnedMesh(vertices, faces, weights)
