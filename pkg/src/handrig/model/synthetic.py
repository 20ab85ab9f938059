"""
Synthetic skinned hand mesh: one cylinder per finger link and a box palm.

Every vertex belongs to exactly one piece, so segmentation labels are known
in advance. Finger vertices put 0.8 of their weight on their own link and
0.2 on the parent link; palm vertices are fully rigid.
"""

import numpy as np
import trimesh
from numpy.typing import NDArray

from handrig.model.hand_model import ROOT_LINK, HandModel, link_anchor_points
from handrig.model.segmentation import NUM_INFLUENCES, SkinnedMesh

OWN_WEIGHT = 0.8
PALM_THICKNESS = 0.02


def _palm_box(anchors: NDArray[np.float64]) -> trimesh.Trimesh:
    lower = anchors.min(axis=0)
    upper = anchors.max(axis=0)
    center = 0.5 * (lower + upper)
    extents = np.maximum(upper - lower, PALM_THICKNESS)
    return trimesh.creation.box(extents=extents, transform=trimesh.transformations.translation_matrix(center))


def build_synthetic_hand_mesh(
    model: HandModel, radius: float = 0.007, sections: int = 8
) -> tuple[SkinnedMesh, NDArray[np.int64]]:
    """Rest-pose mesh for `model` and the expected per-vertex link labels."""
    link_index = {link: k for k, link in enumerate(model.links)}
    parent_of = {j.child: j.parent for j in model.joints}
    vertices, faces, labels, weights = [], [], [], []
    offset = 0

    for link in model.links:
        anchors = link_anchor_points(model, link)
        if link == ROOT_LINK:
            piece = _palm_box(anchors)
        else:
            piece = trimesh.creation.cylinder(
                radius=radius, segment=anchors[[0, -1]], sections=sections
            )
        n = len(piece.vertices)
        k = link_index[link]
        row = np.zeros(NUM_INFLUENCES)
        if link == ROOT_LINK:
            row[k] = 1.0
        else:
            row[k] = OWN_WEIGHT
            row[link_index[parent_of[link]]] = 1.0 - OWN_WEIGHT
        vertices.append(np.asarray(piece.vertices, dtype=np.float64))
        faces.append(np.asarray(piece.faces, dtype=np.int64) + offset)
        labels.append(np.full(n, k, dtype=np.int64))
        weights.append(np.tile(row, (n, 1)))
        offset += n

    mesh = SkinnedMesh(np.vstack(vertices), np.vstack(faces), np.vstack(weights))
    return mesh, np.concatenate(labels)
