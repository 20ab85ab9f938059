"""
Rigid segmentation of a skinned rest-pose mesh.

Each vertex goes to the link with its largest skinning weight (ties to the
lowest link index). Faces follow the majority label of their corners; a
face's odd corner is duplicated into the majority segment. Segment vertices
are re-expressed relative to the owning link's origin; orientation is
unchanged since link frames are wrist-aligned.
"""

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from handrig.errors import EmptySegmentWarning, InvalidWeightsError, SchemaError
from handrig.model.hand_model import HandModel

logger = logging.getLogger(__name__)

NUM_INFLUENCES = 16
WEIGHT_SUM_TOL = 1e-6
NEGATIVE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SkinnedMesh:
    vertices: NDArray[np.float64]  # (N, 3) meters, wrist frame
    faces: NDArray[np.int64]  # (M, 3)
    weights: NDArray[np.float64]  # (N, 16) columns in link order

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=np.float64)
        faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        weights = np.asarray(self.weights, dtype=np.float64)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise SchemaError(f"mesh vertices must be N x 3, got {vertices.shape}")
        if faces.size and (faces.min() < 0 or faces.max() >= len(vertices)):
            raise SchemaError("mesh face index out of range")
        if weights.ndim != 2 or weights.shape[1] != NUM_INFLUENCES:
            raise InvalidWeightsError(
                f"weights must have {NUM_INFLUENCES} columns, got shape {weights.shape}"
            )
        if len(weights) != len(vertices):
            raise InvalidWeightsError(
                f"{len(weights)} weight rows for {len(vertices)} vertices"
            )
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "faces", faces)
        object.__setattr__(self, "weights", weights)


@dataclass(frozen=True, eq=False)
class RigidSegment:
    link: str
    vertices: NDArray[np.float64]  # local frame: own vertices, then borrowed ones
    faces: NDArray[np.int64]  # indices into `vertices`
    source_indices: NDArray[np.int64]  # mesh vertices labelled with this link
    borrowed_indices: NDArray[np.int64]  # mesh vertices duplicated in for mixed faces

    @property
    def is_empty(self) -> bool:
        return self.source_indices.size == 0


def assign_vertices(mesh: SkinnedMesh) -> NDArray[np.int64]:
    """Per-vertex link index = argmax of the weight row."""
    w = mesh.weights
    bad_sign = np.flatnonzero(np.any(w < -NEGATIVE_TOL, axis=1))
    if bad_sign.size:
        raise InvalidWeightsError(f"negative skinning weight in row {int(bad_sign[0])}")
    sums = w.sum(axis=1)
    bad_sum = np.flatnonzero(np.abs(sums - 1.0) > WEIGHT_SUM_TOL)
    if bad_sum.size:
        row = int(bad_sum[0])
        raise InvalidWeightsError(f"weight row {row} sums to {sums[row]:.9f}, expected 1")
    # argmax returns the first maximum: ties go to the lowest link index
    return np.argmax(w, axis=1).astype(np.int64)


def face_labels(faces: NDArray[np.int64], labels: NDArray[np.int64]) -> NDArray[np.int64]:
    """Majority (2-of-3) label per face; three distinct labels -> the lowest."""
    if faces.size == 0:
        return np.empty(0, dtype=np.int64)
    l0, l1, l2 = labels[faces].T
    return np.where(
        (l0 == l1) | (l0 == l2),
        l0,
        np.where(l1 == l2, l1, np.minimum(np.minimum(l0, l1), l2)),
    )


def split_mesh(
    mesh: SkinnedMesh, labels: NDArray[np.int64], model: HandModel
) -> list[RigidSegment]:
    """One RigidSegment per model link, in link order."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (len(mesh.vertices),):
        raise SchemaError("labels must have one entry per mesh vertex")
    by_face = face_labels(mesh.faces, labels)
    segments = []
    local_index = np.full(len(mesh.vertices), -1, dtype=np.int64)

    for k, link in enumerate(model.links):
        own = np.flatnonzero(labels == k)
        faces = mesh.faces[by_face == k]
        borrowed = np.setdiff1d(np.unique(faces), own)
        order = np.concatenate([own, borrowed]).astype(np.int64)
        local_index[order] = np.arange(order.size)
        local_faces = local_index[faces] if faces.size else np.empty((0, 3), dtype=np.int64)
        local_index[order] = -1

        if own.size == 0:
            logger.warning("Link %s received no vertices", link)
            warnings.warn(f"link {link} received no vertices", EmptySegmentWarning, stacklevel=2)

        segments.append(
            RigidSegment(
                link=link,
                vertices=mesh.vertices[order] - model.link_origin(link),
                faces=local_faces,
                source_indices=own,
                borrowed_indices=borrowed.astype(np.int64),
            )
        )
    return segments


def segment_mesh(mesh: SkinnedMesh, model: HandModel) -> list[RigidSegment]:
    return split_mesh(mesh, assign_vertices(mesh), model)
