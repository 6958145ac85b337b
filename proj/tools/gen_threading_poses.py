#!/usr/bin/env python3
"""Generate the synthetic threading-desk pose log and robot endpoints.

The human stands across the desk from the robot and threads a string between
two anchor posts with both hands. Hand targets follow small loops; joint
angles come from damped least-squares IK on the human link table, so the log
is a joint-space CSV for human24.yaml.

Usage: gen_threading_poses.py [--frames N] [--out poses.csv]
"""

import argparse
import math
from pathlib import Path

import numpy as np
import yaml
from scipy.optimize import least_squares
from scipy.spatial.transform import Rotation

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "data" / "models"


def axis_angle(axis, angle):
    axis = np.asarray(axis, dtype=float)
    if angle == 0.0:
        return np.eye(3)
    return Rotation.from_rotvec(axis / np.linalg.norm(axis) * angle).as_matrix()


def load_links(path):
    doc = yaml.safe_load(Path(path).read_text())
    names = {}
    links = []
    for i, l in enumerate(doc["links"]):
        rot = l.get("rotation", [0, 0, 1, 0])
        fixed = np.eye(4)
        fixed[:3, :3] = axis_angle(rot[:3], rot[3])
        fixed[:3, 3] = l.get("translation", [0, 0, 0])
        joint = l.get("joint")
        links.append({
            "name": l["name"],
            "length": l["length"],
            "parent": names[l["parent"]] if "parent" in l else -1,
            "fixed": fixed,
            "joint": joint["index"] if joint else -1,
            "axis": np.asarray(joint.get("axis", [0, 0, 1]), float) if joint else None,
        })
        names[l["name"]] = i
    return links, names


def fk(links, q, base=np.eye(4)):
    out = []
    for l in links:
        parent = base if l["parent"] < 0 else out[l["parent"]]
        t = parent @ l["fixed"]
        if l["joint"] >= 0:
            r = np.eye(4)
            r[:3, :3] = axis_angle(l["axis"], q[l["joint"]])
            t = t @ r
        out.append(t)
    return out


def tip(links, frames, i):
    return (frames[i] @ np.array([0, 0, links[i]["length"], 1.0]))[:3]


def placement(translation, yaw):
    g = np.eye(4)
    g[:3, :3] = axis_angle([0, 0, 1], yaw)
    g[:3, 3] = translation
    return g


# Scene layout (world frame: robot base at the origin, desk top at z = 0).
HUMAN_BASE = placement([0.78, 0.0, 0.15], math.pi)

# Human posture prior (radians): slight trunk bend, head down, arms forward.
HUMAN_NOMINAL = np.array([0.25, 0.0, 0.3, 0.0,
                          0.2, 0.9, 0.9, 0.2,
                          -0.2, 0.9, 0.9, 0.2,
                          0.0, 0.0, 0.0, 0.0, 0.3])


def human_targets(k, frames):
    """World targets for the right and left fingertips at frame k."""
    s = 2 * math.pi * k / frames
    # The right hand travels between the anchors while looping; the left hand
    # holds the string near the middle and follows more slowly.
    sweep = 0.17 * math.sin(s)
    right = np.array([0.48 + 0.06 * math.cos(5 * s), sweep - 0.02, 0.10 + 0.05 * math.sin(5 * s)])
    left = np.array([0.45 + 0.03 * math.sin(2 * s), 0.08 + 0.06 * math.sin(s + 0.8), 0.12 + 0.03 * math.cos(3 * s)])
    return right, left


def solve_human(links, names, frames):
    r_tip, l_tip, head = names["r_fingers"], names["l_fingers"], names["head"]
    q = HUMAN_NOMINAL.copy()
    rows = []
    for k in range(frames):
        right, left = human_targets(k, frames)

        def residual(x):
            f = fk(links, x, HUMAN_BASE)
            return np.concatenate([
                tip(links, f, r_tip) - right,
                tip(links, f, l_tip) - left,
                0.05 * (x - HUMAN_NOMINAL),
                [0.02 * (tip(links, f, head)[2] - 0.9)],
            ])

        q = least_squares(residual, q, method="lm").x
        f = fk(links, q, HUMAN_BASE)
        err = max(np.linalg.norm(tip(links, f, r_tip) - right), np.linalg.norm(tip(links, f, l_tip) - left))
        if err > 0.03:
            raise SystemExit(f"frame {k}: IK residual {err:.3f} m")
        rows.append((0.1 * k, q.copy()))
    return rows


def solve_robot(links, target, q0):
    """Tool tip at `target`, tool pointing down."""
    ee = len(links) - 1

    def residual(x):
        f = fk(links, x)
        down = f[ee][:3, 2] @ np.array([0, 0, -1.0])
        return np.concatenate([tip(links, f, ee) - target, [0.2 * (1 - down)], 0.01 * (x - q0)])

    q = least_squares(residual, q0, method="lm").x
    f = fk(links, q)
    assert np.linalg.norm(tip(links, f, ee) - target) < 2e-3, "robot IK failed"
    return q


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=240)
    ap.add_argument("--out", default=str(ROOT / "data" / "scenarios" / "threading_desk" / "poses.csv"))
    args = ap.parse_args()

    links, names = load_links(MODELS / "human24.yaml")
    rows = solve_human(links, names, args.frames)
    with open(args.out, "w") as fh:
        fh.write("# synthetic threading motion for human24; generated by tools/gen_threading_poses.py\n")
        fh.write("t," + ",".join(f"q{j}" for j in range(17)) + "\n")
        for t, q in rows:
            fh.write(f"{t:.1f}," + ",".join(f"{v:.6f}" for v in q) + "\n")
    print(f"wrote {len(rows)} frames to {args.out}")

    robot, _ = load_links(MODELS / "ur5_like.yaml")
    for label, yaw in (("start", 0.5), ("goal", -0.5)):
        target = np.array([0.48 * math.cos(yaw), 0.48 * math.sin(yaw), 0.08])
        q0 = np.array([yaw, 0.9, 1.2, 1.0, 0.0, 0.0])
        q = solve_robot(robot, target, q0)
        print(f"{label}: [" + ", ".join(f"{v:.6f}" for v in q) + "]")


if __name__ == "__main__":
    main()
