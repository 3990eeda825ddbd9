"""Blockwise 3-d rotations and multiplicative binding.

An observation embedding is a base vector rotated, three components at
a time, around the patch axis by the density angle, with each block
turning at its own frequency. Two properties make this usable as a
memory key ingredient: rotation never changes vector length, and the
score between two embeddings depends only on the angle difference. The
binding step multiplies the state code in elementwise, and because the
code is +-1 it cancels exactly in inner products.
"""

import numpy as np

from touchmem.memory import bind
from touchmem.rope3d import Rope3D, block_frequencies, rodrigues


def main():
    rng = np.random.default_rng(9)
    rope = Rope3D(120)
    axis = np.array([0.0, 0.0, 1.0])

    print("= a single 3-d block =")
    r = rodrigues(axis, 0.7)
    v = rng.normal(size=3)
    print(f"|v| = {np.linalg.norm(v):.12f}")
    print(f"|Rv| = {np.linalg.norm(r @ v):.12f}")
    print(f"R @ R.T - I max |entry| = {np.abs(r @ r.T - np.eye(3)).max():.2e}\n")

    print("= 40 blocks, geometric frequency ladder =")
    freqs = block_frequencies(120)
    print(f"first five block frequencies: {np.round(freqs[:5], 4)}")
    print(f"last block frequency: {freqs[-1]:.6f}")
    print("fast blocks separate close angles, slow blocks keep far")
    print("angles from aliasing.\n")

    print("= norm preservation over the full vector =")
    vec = rng.normal(size=120)
    worst = max(
        abs(np.linalg.norm(rope.rotate(vec, axis, t)) - np.linalg.norm(vec))
        for t in np.linspace(0.0, 2 * np.pi, 17)
    )
    print(f"worst norm drift over 17 angles: {worst:.2e}\n")

    print("= scores depend only on the angle difference =")
    q = rng.normal(size=120)
    for t1, t2 in [(0.2, 0.5), (1.2, 1.5), (4.0, 4.3)]:
        s = rope.rotate(q, axis, t1) @ rope.rotate(q, axis, t2)
        print(f"  <R({t1})q, R({t2})q> = {s:+.9f}   (gap {t2 - t1:.1f})")
    print("same gap, same score: a memory trained at one density range")
    print("generalizes its similarity structure to another.\n")

    print("= binding cancels in inner products =")
    a = rng.choice([-1.0, 1.0], size=120)
    b = rng.choice([-1.0, 1.0], size=120)
    c = rng.choice([-1.0, 1.0], size=120)
    lhs = bind(a, c) @ bind(b, c)
    rhs = a @ b
    print(f"<a*c, b*c> = {lhs:+.1f},  <a, b> = {rhs:+.1f}, equal: {lhs == rhs}")
    print("so binding a shared observation onto two state codes changes")
    print("nothing about how similar the states look to recall.")


if __name__ == "__main__":
    main()
