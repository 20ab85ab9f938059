#!/usr/bin/env python3
"""
handrig command line: build-model, project, evaluate.

Exit codes: 0 success, 1 computation failure, 2 input or usage error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from handrig import __version__
from handrig.config import (
    METHODS,
    RunConfig,
    SampleSpec,
    environment_defaults,
    load_hand_config,
    load_run_config,
    validate_document,
)
from handrig.errors import ComputationError, InputError
from handrig.evaluation.evaluator import evaluate_roundtrip
from handrig.evaluation.pose_io import iter_poses, load_poses
from handrig.evaluation.report import (
    AngleCsvWriter,
    print_summary,
    write_metrics_csv,
    write_per_joint_csv,
)
from handrig.evaluation.retarget import project_pose
from handrig.evaluation.sampling import sample_poses
from handrig.model.hand_model import build_hand_model
from handrig.model.mesh_io import load_skinned_mesh
from handrig.model.package import load_model_dir, write_model_dir
from handrig.model.segmentation import segment_mesh
from handrig.model.skeleton import load_skeleton
from handrig.model.synthetic import build_synthetic_hand_mesh

logger = logging.getLogger("handrig")

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def _first(*values):
    """First value that is not None."""
    for value in values:
        if value is not None:
            return value
    return None


def _require_files(**paths) -> None:
    for what, path in paths.items():
        if path is not None and not Path(path).is_file():
            raise InputError(f"{what} file not found: {path}")


def _projection_config(args, run: RunConfig):
    cfg = run.projection
    if getattr(args, "no_clamp", False):
        cfg = cfg.model_copy(update={"clamp_to_limits": False})
    return cfg


def cmd_build_model(args, run: RunConfig) -> int:
    skeleton_path = _first(args.skeleton, run.skeleton)
    out_dir = _first(args.out_dir, run.out_dir)
    mesh_path = _first(args.mesh, run.mesh)
    weights_path = _first(args.weights, run.weights)
    hand_config_path = _first(args.hand_config, run.hand_config)
    if skeleton_path is None or out_dir is None:
        raise InputError("build-model needs --skeleton and --out-dir")
    _require_files(
        skeleton=skeleton_path, mesh=mesh_path, weights=weights_path, hand_config=hand_config_path
    )

    hand_config = load_hand_config(hand_config_path)
    if run.limits is not None:
        hand_config = hand_config.model_copy(update={"limits": run.limits})
    skeleton = load_skeleton(skeleton_path)
    model = build_hand_model(skeleton, hand_config)

    segments = None
    if args.synthetic_mesh:
        mesh, _ = build_synthetic_hand_mesh(model)
        segments = segment_mesh(mesh, model)
    elif mesh_path is not None and weights_path is not None:
        order = _first(args.weights_order, run.weights_order)
        segments = segment_mesh(load_skinned_mesh(mesh_path, weights_path, order), model)
    else:
        logger.warning("No mesh with skinning weights given; links get box geometry")

    written = write_model_dir(model, segments, out_dir)
    audit = model.audit()

    print("\n" + "=" * 60)
    print("SUMMARY")
    print("=" * 60)
    print(f"  Two-DOF joints: {audit['two_dof']}")
    print(f"  One-DOF joints: {audit['one_dof']}")
    print(f"  Links: {audit['links']}")
    print(f"  DOFs: {audit['dofs']}")
    if segments is not None:
        empty = [s.link for s in segments if s.is_empty]
        print(f"  Segment meshes: {len(segments) - len(empty)}/{len(segments)}")
    for problem in audit["problems"]:
        print(f"  Problem: {problem}")
    print(f"\nModel written to: {written['model'].parent}")
    return 0


def cmd_project(args, run: RunConfig) -> int:
    model_dir = _first(args.model_dir, run.model_dir)
    poses_path = _first(args.poses, run.poses)
    out = _first(args.out, run.out)
    if model_dir is None or poses_path is None or out is None:
        raise InputError("project needs --model-dir, --poses and --out")
    _require_files(poses=poses_path)
    method = _first(args.method, run.method)
    cfg = _projection_config(args, run)
    model = load_model_dir(model_dir)

    clamps = 0
    with AngleCsvWriter(out, model.dof_names) as writer:
        for pose in iter_poses(poses_path):
            projected = project_pose(model, pose, method, cfg)
            writer.write(projected.angles, projected.clamp_count)
            clamps += projected.clamp_count
    if clamps:
        logger.warning("%d joint angles clamped to limits", clamps)
    print(f"Projected {writer.rows} frames with {method}: {out}")
    return 0


def cmd_evaluate(args, run: RunConfig, env: dict) -> int:
    model_dir = _first(args.model_dir, run.model_dir)
    poses_path = _first(args.poses, run.poses)
    if model_dir is None:
        raise InputError("evaluate needs --model-dir")
    sample = run.sample
    if args.sample is not None:
        kind, n = args.sample
        try:
            n = int(n)
        except ValueError as e:
            raise InputError(f"--sample size must be an integer, got {n!r}") from e
        sample = validate_document(
            SampleSpec, {"kind": kind, "n": n, "max_angle_deg": args.max_angle}, "--sample"
        )
    elif sample is not None and args.max_angle is not None:
        sample = validate_document(
            SampleSpec, {**sample.model_dump(), "max_angle_deg": args.max_angle}, "--max-angle"
        )
    if (poses_path is None) == (sample is None):
        raise InputError("evaluate needs exactly one of --poses or --sample")
    _require_files(poses=poses_path)

    seed = _first(args.seed, run.seed, env.get("seed"), 0)
    threads = _first(args.threads, run.threads, env.get("threads"), 1)
    if threads < 1:
        raise InputError(f"--threads must be positive, got {threads}")
    methods = _first(args.methods, run.methods)
    cfg = _projection_config(args, run)
    model = load_model_dir(model_dir)

    if sample is not None:
        poses = sample_poses(model, sample.kind, sample.n, sample.max_angle_deg, seed)
    else:
        poses = load_poses(poses_path)

    report = evaluate_roundtrip(
        model, poses, methods, cfg, seed=seed, threads=threads, progress=not args.no_progress
    )
    print_summary(report)

    out = _first(args.out, run.out)
    if out is not None:
        write_metrics_csv(report, out)
        print(f"\nMetrics saved to: {out}")
    per_joint_out = _first(args.per_joint_out, run.per_joint_out)
    if per_joint_out is not None:
        write_per_joint_csv(report, per_joint_out)
        print(f"Per-joint metrics saved to: {per_joint_out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="handrig",
        description="Build URDF hand models from skeletons and project poses onto them.",
    )
    parser.add_argument("--version", action="version", version=f"handrig {__version__}")
    parser.add_argument(
        "--help-json", action="store_true", help="print a machine-readable description and exit"
    )
    parser.add_argument(
        "--log-level",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        type=str.upper,
        help="logging level (default: $HANDRIG_LOG_LEVEL or WARNING)",
    )
    parser.add_argument("--config", type=Path, help="RunConfig JSON with defaults for any flag")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    build = sub.add_parser("build-model", help="derive joints, segment the mesh, write URDF")
    build.add_argument("--skeleton", type=Path, help="skeleton JSON (21 keypoints)")
    build.add_argument("--mesh", type=Path, help="rest-pose OBJ mesh")
    build.add_argument("--weights", type=Path, help="N x 16 skinning weights (text)")
    build.add_argument("--weights-order", choices=("model", "mano"), help="weight column order")
    build.add_argument(
        "--synthetic-mesh", action="store_true", help="segment a generated cylinder mesh instead"
    )
    build.add_argument("--hand-config", type=Path, help="HandConfig JSON (limits, axes, inertials)")
    build.add_argument("--out-dir", type=Path, help="output directory")

    project = sub.add_parser("project", help="project pose frames to 20 joint angles (CSV)")
    project.add_argument("--model-dir", type=Path, help="directory written by build-model")
    project.add_argument(
        "--poses", type=Path, help="pose file: .jsonl is streamed per frame, .json is read whole"
    )
    project.add_argument("--method", choices=METHODS, help="projection method (default bch)")
    project.add_argument("--out", type=Path, help="output CSV")
    project.add_argument("--no-clamp", action="store_true", help="do not clamp to joint limits")

    evaluate = sub.add_parser("evaluate", help="round-trip benchmark of the projection methods")
    evaluate.add_argument("--model-dir", type=Path, help="directory written by build-model")
    evaluate.add_argument("--poses", type=Path, help="pose file (.json or .jsonl)")
    evaluate.add_argument(
        "--sample",
        nargs=2,
        metavar=("KIND", "N"),
        help="sample N poses: on_manifold, off_manifold or adversarial",
    )
    evaluate.add_argument("--seed", type=int, help="sampling/timing seed (default 0)")
    evaluate.add_argument("--max-angle", type=float, help="sampler angle bound, degrees")
    evaluate.add_argument("--methods", nargs="+", choices=METHODS, help="methods to compare")
    evaluate.add_argument("--out", type=Path, help="metrics CSV")
    evaluate.add_argument("--per-joint-out", type=Path, help="per-joint metrics CSV")
    evaluate.add_argument("--threads", type=int, help="worker threads for error evaluation")
    evaluate.add_argument("--no-clamp", action="store_true", help="do not clamp to joint limits")
    evaluate.add_argument("--no-progress", action="store_true", help="hide progress bars")
    return parser


def describe_parser(parser: argparse.ArgumentParser) -> dict:
    """Subcommands and options as plain data, for --help-json."""
    options, commands = [], {}
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for name, child in action.choices.items():
                commands[name] = describe_parser(child)
            continue
        if isinstance(action, argparse._HelpAction):
            continue
        options.append(
            {
                "flags": list(action.option_strings),
                "dest": action.dest,
                "help": action.help,
                "choices": list(action.choices) if action.choices else None,
                "nargs": action.nargs,
                "default": action.default if action.default is not argparse.SUPPRESS else None,
            }
        )
    description = {"prog": parser.prog, "description": parser.description, "options": options}
    if commands:
        description["commands"] = commands
    return description


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.help_json:
        print(json.dumps(describe_parser(parser), indent=2, default=str))
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2

    try:
        env = environment_defaults()
    except InputError as e:
        print(f"Error: bad environment setting: {e}", file=sys.stderr)
        return 2
    level = _first(args.log_level, env.get("log_level"), "WARNING")
    logging.basicConfig(level=logging.getLevelNamesMapping()[level], format=LOG_FORMAT)

    try:
        run = load_run_config(args.config)
        if args.command == "build-model":
            return cmd_build_model(args, run)
        if args.command == "project":
            return cmd_project(args, run)
        return cmd_evaluate(args, run, env)
    except InputError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except ComputationError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
