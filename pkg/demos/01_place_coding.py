"""From joint angles to bipolar place codes.

Each joint drives a bank of Gaussian tuning curves whose centers tile
the joint range. The analog activations are quantized to a few bits
per neuron and unrolled MSB-first into a +-1 vector, so nearby poses
share most of their bits and the Hamming distance grows with angular
distance until the tuning curves stop overlapping.
"""

import numpy as np

from touchmem.config import default_config
from touchmem.placecode import make_tuning, tuning_response


def bar(x, width=40):
    return "#" * int(round(x * width))


def main():
    cfg = default_config()
    codec = cfg.build_codec()

    print("= tuning curves =")
    tuning = make_tuning((-1.2, 1.2), n_neurons=10)
    print(f"flex joint, 10 neurons, preferred angles {np.round(tuning.preferred_angles, 2)}")
    print(f"sigma = {tuning.sigma:.3f} (1.5x the preferred-angle spacing)\n")

    for angle in (-0.9, 0.0, 0.9):
        rates = tuning_response(angle, tuning)
        print(f"angle {angle:+.1f} rad")
        for c, r in zip(tuning.preferred_angles, rates):
            print(f"  center {c:+.2f}  {r:5.3f} {bar(r)}")
        print()

    print("= full code =")
    pose = np.array([0.3, -0.5, 1.0])
    code = codec.encode(pose)
    print(f"pose {pose} -> {code.size} bipolar components")
    print("layout: per neuron, 4 bits MSB first")
    for n in range(3):
        word = code[4 * n:4 * (n + 1)].astype(int)
        print(f"  lift neuron {n}: {word}")
    print(f"values are all +-1: {sorted(set(code.tolist()))}\n")

    print("= codes of nearby poses overlap =")
    base = codec.encode([0.0, 0.0, 0.0])
    print("step size  hamming distance (of 120)")
    for step in (0.0, 0.01, 0.05, 0.1, 0.3, 0.6, 1.0):
        other = codec.encode([step, step, step])
        hamming = int(np.sum(base != other))
        print(f"  {step:4.2f} rad   {hamming:3d} {bar(hamming / 120, 30)}")

    res = codec.quantization_resolution()
    print(f"\nquantization resolution per joint: {res}")
    print("poses closer than this land on the same code word, which is")
    print("exactly the replay error budget of the sequence memory.")


if __name__ == "__main__":
    main()
