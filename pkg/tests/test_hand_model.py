import numpy as np
import pytest
from scipy.spatial.transform import Rotation as ScipyRotation

from handrig.config import HandConfig
from handrig.errors import SchemaError
from handrig.geometry.projection import reconstruct_2dof
from handrig.geometry.rotation import exp_so3, log_so3, rotation_about
from handrig.model.hand_model import (
    JOINT_ORDER,
    LINK_ORDER,
    MANO_JOINT_ORDER,
    NUM_DOFS,
    HandModel,
    TwoDof,
    as_pose_frame,
    build_hand_model,
    forward_kinematics,
    keypoint_positions,
    link_anchor_points,
    pose_from_mano,
    pose_to_rotations,
)
from handrig.model.skeleton import KEYPOINT_NAMES, LONG_FINGERS, HandSkeleton


def _q(model, **values):
    q = np.zeros(NUM_DOFS)
    names = list(model.dof_names)
    for name, value in values.items():
        q[names.index(name)] = value
    return q


def test_audit_counts(model):
    audit = model.audit()
    assert audit["two_dof"] == 5
    assert audit["one_dof"] == 10
    assert audit["links"] == 16
    assert audit["dofs"] == 20
    assert audit["problems"] == []


def test_joint_and_link_order(model):
    assert tuple(j.name for j in model.joints) == JOINT_ORDER
    assert model.links == LINK_ORDER
    two_dof = [j.name for j in model.joints if isinstance(j.dof, TwoDof)]
    assert two_dof == ["thumb_cmc", "index_mcp", "middle_mcp", "ring_mcp", "pinky_mcp"]


def test_dof_layout(model):
    names = model.dof_names
    assert len(names) == NUM_DOFS
    assert names[:4] == ("thumb_cmc_abduction", "thumb_cmc_flexion", "thumb_mcp", "thumb_ip")
    assert names[4:8] == ("index_mcp_abduction", "index_mcp_flexion", "index_pip", "index_dip")
    assert names[-4:] == ("pinky_mcp_abduction", "pinky_mcp_flexion", "pinky_pip", "pinky_dip")
    assert model.dof_layout[1] == ("thumb_cmc", 1)


def test_default_limits(model):
    joint = model.joint("index_mcp")
    assert joint.limits == ((-0.52, 0.52), (-0.35, 1.92))
    assert model.joint("thumb_cmc").limits == ((-1.05, 1.05), (-1.05, 1.05))
    assert model.joint("thumb_ip").limits == ((-0.35, 1.92),)
    assert np.all(model.lower < model.upper)


def test_interphalangeal_joints_share_finger_flexion(model):
    for finger in LONG_FINGERS:
        flexion = model.joint(f"{finger}_mcp").dof.flexion_axis
        assert np.array_equal(model.joint(f"{finger}_pip").dof.axis, flexion)
        assert np.array_equal(model.joint(f"{finger}_dip").dof.axis, flexion)


@pytest.mark.parametrize("finger", LONG_FINGERS)
def test_abduction_axes_point_out_of_the_back_of_the_hand(model, finger):
    assert model.joint(f"{finger}_mcp").dof.abduction_axis[2] > 0.9


@pytest.mark.parametrize("finger", LONG_FINGERS)
@pytest.mark.parametrize("joint", ["mcp_flexion", "pip"])
def test_positive_flexion_curls_toward_palm(model, finger, joint):
    rest = keypoint_positions(model, forward_kinematics(model, np.zeros(NUM_DOFS)))
    bent = keypoint_positions(model, forward_kinematics(model, _q(model, **{f"{finger}_{joint}": 0.5})))
    assert bent[f"{finger}_tip"][2] < rest[f"{finger}_tip"][2]


def test_rest_pose_reproduces_skeleton(model, skeleton):
    poses = forward_kinematics(model, np.zeros(NUM_DOFS))
    for link, pose in poses.items():
        assert np.array_equal(pose.rotation, np.eye(3))
        assert np.allclose(pose.position, model.link_origin(link), atol=1e-12)
    points = keypoint_positions(model, poses)
    assert set(points) == set(KEYPOINT_NAMES)
    for name in KEYPOINT_NAMES:
        assert np.allclose(points[name], skeleton[name], atol=1e-12)


def test_dip_flexion_moves_tip_on_circle(model, skeleton):
    theta = 0.7
    points = keypoint_positions(model, forward_kinematics(model, _q(model, ring_dip=theta)))
    axis = model.joint("ring_dip").dof.axis
    lever = skeleton["ring_tip"] - skeleton["ring_dip"]
    expected = skeleton["ring_dip"] + rotation_about(axis, theta) @ lever
    assert np.allclose(points["ring_tip"], expected, atol=1e-12)
    assert np.linalg.norm(points["ring_tip"] - skeleton["ring_dip"]) == pytest.approx(
        np.linalg.norm(lever), abs=1e-12
    )


def test_mcp_link_rotation_is_two_dof_composition(model):
    phi, theta = np.deg2rad(10.0), np.deg2rad(20.0)
    q = _q(model, middle_mcp_abduction=phi, middle_mcp_flexion=theta)
    pose = forward_kinematics(model, q)["middle_proximal"]
    joint = model.joint("middle_mcp")
    expected = reconstruct_2dof(joint.dof.abduction_axis, joint.dof.flexion_axis, phi, theta)
    assert np.allclose(pose.rotation, expected, atol=1e-12)


def test_chain_composes_parent_rotations(model, skeleton):
    q = _q(model, index_mcp_flexion=0.4, index_pip=0.3)
    poses = forward_kinematics(model, q)
    axis = model.joint("index_pip").dof.axis
    assert np.allclose(poses["index_middle"].rotation, rotation_about(axis, 0.7), atol=1e-12)
    expected_pip = skeleton["index_mcp"] + rotation_about(axis, 0.4) @ (
        skeleton["index_pip"] - skeleton["index_mcp"]
    )
    assert np.allclose(poses["index_middle"].position, expected_pip, atol=1e-12)


def test_keypoint_order_does_not_matter(skeleton):
    shuffled = HandSkeleton(dict(reversed(list(skeleton.keypoints.items()))))
    a, b = build_hand_model(skeleton), build_hand_model(shuffled)
    for ja, jb in zip(a.joints, b.joints):
        for u, v in zip(ja.axes, jb.axes):
            assert np.array_equal(u, v)


def test_scaled_skeleton_keeps_axes(skeleton, model):
    scaled = build_hand_model(skeleton.scaled(1.3))
    for ja, jb in zip(model.joints, scaled.joints):
        for u, v in zip(ja.axes, jb.axes):
            assert np.allclose(u, v, atol=1e-12)


def test_axis_roles_can_be_swapped(skeleton, model):
    roles = dict(HandConfig().axis_roles)
    roles["index"] = ("y", "x")
    swapped = build_hand_model(skeleton, HandConfig(axis_roles=roles))
    original = model.joint("index_mcp").dof
    changed = swapped.joint("index_mcp").dof
    assert np.array_equal(changed.abduction_axis, original.flexion_axis)
    assert np.array_equal(swapped.joint("index_dip").dof.axis, original.abduction_axis)


def test_invalid_axis_roles_rejected():
    roles = dict(HandConfig().axis_roles)
    roles["ring"] = ("x", "-x")
    with pytest.raises(ValueError):
        HandConfig(axis_roles=roles)


def test_model_dict_round_trip(model):
    restored = HandModel.from_dict(model.to_dict())
    assert restored.dof_names == model.dof_names
    assert np.array_equal(restored.lower, model.lower)
    for ja, jb in zip(model.joints, restored.joints):
        assert ja.name == jb.name and ja.parent == jb.parent and ja.child == jb.child
        assert np.array_equal(ja.origin, jb.origin)
        for u, v in zip(ja.axes, jb.axes):
            assert np.array_equal(u, v)


def test_model_dict_rejects_broken_input(model):
    data = model.to_dict()
    del data["joints"][3]["origin"]
    with pytest.raises(SchemaError):
        HandModel.from_dict(data)
    data = model.to_dict()
    data["joints"] = data["joints"][:-1]
    with pytest.raises(SchemaError, match="audit"):
        HandModel.from_dict(data)


def test_link_anchor_points(model, skeleton):
    palm = link_anchor_points(model, "palm")
    assert palm.shape == (6, 3)
    distal = link_anchor_points(model, "pinky_distal")
    assert np.array_equal(distal[0], skeleton["pinky_dip"])
    assert np.array_equal(distal[1], skeleton["pinky_tip"])
    proximal = link_anchor_points(model, "thumb_proximal")
    assert np.array_equal(proximal[1], skeleton["thumb_mcp"])


def test_pose_to_rotations(rng):
    assert all(np.array_equal(r, np.eye(3)) for r in pose_to_rotations(np.zeros((15, 3))))
    pose = np.zeros((15, 3))
    pose[4] = [0.0, 0.0, 0.6]
    assert np.allclose(pose_to_rotations(pose)[4], rotation_about([0.0, 0.0, 1.0], 0.6), atol=1e-15)
    pose = ScipyRotation.random(15, rng).as_rotvec()
    for v, r in zip(pose, pose_to_rotations(pose)):
        assert np.allclose(exp_so3(log_so3(r)), r, atol=1e-9)
        assert np.allclose(r, exp_so3(v), atol=0)


def test_pose_frame_validation():
    with pytest.raises(SchemaError):
        as_pose_frame(np.zeros((16, 3)))
    bad = np.zeros((15, 3))
    bad[0, 0] = np.inf
    with pytest.raises(SchemaError):
        as_pose_frame(bad)
    bad = np.zeros((15, 3))
    bad[2] = [4.0, 0.0, 0.0]
    with pytest.raises(SchemaError, match="pi"):
        as_pose_frame(bad)


def test_pose_from_mano_reorders_joints():
    theta = np.zeros((15, 3))
    theta[:, 0] = np.arange(15) * 0.01
    pose = pose_from_mano(theta.ravel())
    for k, name in enumerate(JOINT_ORDER):
        assert pose[k, 0] == pytest.approx(MANO_JOINT_ORDER.index(name) * 0.01)
    assert pose[0, 0] == pytest.approx(0.12)  # MANO thumb1 is the 13th joint
