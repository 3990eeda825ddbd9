"""Cross-check of the blockwise axis-angle rotation against an
independent implementation (scipy's Rotation), plus a hand-checkable
worked example frozen into the unit tests.

Run: python3 oracles/rotation_check.py
"""

import numpy as np
from scipy.spatial.transform import Rotation


def reference_rotate(vec, axis, theta, dim):
    freqs = [10.0 ** (-(i + 1) / dim) for i in range(dim // 3)]
    out = np.empty(dim)
    for i, w in enumerate(freqs):
        rot = Rotation.from_rotvec(np.asarray(axis) * (w * theta))
        out[3 * i: 3 * i + 3] = rot.apply(vec[3 * i: 3 * i + 3])
    return out


if __name__ == "__main__":
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(300):
        dim = int(rng.choice([3, 30, 120]))
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        theta = rng.uniform(-np.pi, np.pi)
        vec = rng.choice([-1.0, 1.0], size=dim)
        got = reference_rotate(vec, axis, theta, dim)
        worst = max(worst, abs(np.linalg.norm(got) - np.linalg.norm(vec)))
    print(f"norm drift across 300 reference rotations: {worst:.3e}")

    # worked example: dim 3, axis z, theta pi/2, frequency 10^(-1/3)
    vec = np.array([1.0, 1.0, 1.0])
    angle = 10.0 ** (-1.0 / 3.0) * np.pi / 2.0
    out = reference_rotate(vec, [0.0, 0.0, 1.0], np.pi / 2.0, 3)
    print(f"effective angle: {angle!r}")
    print(f"rotated [1,1,1] about z: {out!r}")
    print(f"cos/sin: {np.cos(angle)!r} {np.sin(angle)!r}")
