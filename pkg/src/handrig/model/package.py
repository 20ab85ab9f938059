"""
On-disk model directory: model.json, hand.urdf and meshes/<link>.obj.
"""

import json
import logging
from pathlib import Path
from typing import Sequence

from handrig.config import read_json
from handrig.errors import InputError
from handrig.model.hand_model import HandModel
from handrig.model.mesh_io import write_obj
from handrig.model.segmentation import RigidSegment
from handrig.model.urdf import MESH_DIR, export_urdf

logger = logging.getLogger(__name__)

MODEL_FILE = "model.json"
URDF_FILE = "hand.urdf"


def write_model_dir(
    model: HandModel, segments: Sequence[RigidSegment] | None, out_dir: str | Path
) -> dict[str, Path]:
    """Write everything build-model produces; returns the written paths by kind."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    model_path = out_dir / MODEL_FILE
    with open(model_path, "w") as f:
        json.dump(model.to_dict(), f, indent=2)

    written = {"model": model_path}
    if segments is not None:
        mesh_dir = out_dir / MESH_DIR
        mesh_dir.mkdir(exist_ok=True)
        for segment in segments:
            if segment.is_empty:
                continue
            path = mesh_dir / f"{segment.link}.obj"
            write_obj(path, segment.vertices, segment.faces)
            written[f"mesh:{segment.link}"] = path

    urdf_path = out_dir / URDF_FILE
    export_urdf(model, segments, urdf_path)
    written["urdf"] = urdf_path
    return written


def load_model_dir(model_dir: str | Path) -> HandModel:
    model_dir = Path(model_dir)
    path = model_dir / MODEL_FILE
    if not path.is_file():
        raise InputError(f"no {MODEL_FILE} in {model_dir}; run build-model first")
    model = HandModel.from_dict(read_json(path))
    logger.debug("Loaded model from %s", path)
    return model
