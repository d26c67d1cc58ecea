"""Independent FK oracle: plain 4x4 homogeneous products from config/arm.cfg.

    python3 tests/golden/make_fk_golden.py config/arm.cfg > tests/golden/fk_golden.txt
"""
import sys

import numpy as np


def load(path):
    vals = {}
    for raw in open(path):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        k, v = line.split("=", 1)
        vals[k.strip()] = v.strip()
    return vals


def vec(s):
    return np.array([float(x) for x in s.split()])


def rot_axis(axis, angle):
    a = axis / np.linalg.norm(axis)
    k = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


def rpy(r, p, y):
    return rot_axis(np.array([0, 0, 1.0]), y) @ rot_axis(np.array([0, 1.0, 0]), p) @ rot_axis(np.array([1.0, 0, 0]), r)


def homog(rot, trans):
    m = np.eye(4)
    m[:3, :3] = rot
    m[:3, 3] = trans
    return m


def fk(cfg, q):
    m = np.eye(4)
    for i in range(7):
        key = f"arm.joint{i + 1}"
        origin = homog(rpy(*vec(cfg.get(key + ".origin_rpy", "0 0 0"))), vec(cfg[key + ".origin_xyz"]))
        m = m @ origin @ homog(rot_axis(vec(cfg[key + ".axis"]), q[i]), np.zeros(3))
    tool = homog(rpy(*vec(cfg.get("arm.tool.origin_rpy", "0 0 0"))), vec(cfg["arm.tool.origin_xyz"]))
    return m @ tool


def main():
    cfg = load(sys.argv[1])
    lo = np.array([vec(cfg[f"arm.joint{i + 1}.limits"])[0] for i in range(7)])
    hi = np.array([vec(cfg[f"arm.joint{i + 1}.limits"])[1] for i in range(7)])
    rng = np.random.default_rng(20240)
    qs = [np.zeros(7), vec(cfg["arm.ready"])] + [rng.uniform(lo, hi) for _ in range(8)]
    print("# q[7] | RobotBase<-Gripper rows 0-2 of the 4x4 matrix (12 values)")
    for q in qs:
        m = fk(cfg, q)
        print(" ".join(repr(float(x)) for x in q), "|", " ".join(repr(float(x)) for x in m[:3, :].ravel()))


if __name__ == "__main__":
    main()
