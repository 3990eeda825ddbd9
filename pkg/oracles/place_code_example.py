"""Hand-computed reference values for the population place code:
Gaussian tuning responses, 4-bit quantization and the bipolar bit
expansion, written without package imports so the unit tests assert
against an independent derivation.

Run: python3 oracles/place_code_example.py
"""

import math


def tuning_centers(lo, hi, n):
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def response(angle, center, sigma):
    return math.exp(-((angle - center) ** 2) / (2.0 * sigma * sigma))


def quantize(rate, n_bits):
    level = math.floor(rate * (2 ** n_bits - 1))
    bits = [(level >> shift) & 1 for shift in range(n_bits - 1, -1, -1)]
    return level, [1.0 if b else -1.0 for b in bits]


if __name__ == "__main__":
    # one joint, limits (-1, 1), 10 neurons, sigma = 1.5 * spacing
    lo, hi, n = -1.0, 1.0, 10
    centers = tuning_centers(lo, hi, n)
    spacing = centers[1] - centers[0]
    sigma = 1.5 * spacing
    print(f"centers: {centers}")
    print(f"sigma: {sigma!r}")

    angle = 0.35
    rates = [response(angle, c, sigma) for c in centers]
    print(f"rates at {angle}: {[repr(r) for r in rates]}")
    levels = [quantize(r, 4)[0] for r in rates]
    print(f"levels: {levels}")

    # the classic quantization example: rate exp(-1/2)
    rate = math.exp(-0.5)
    level, code = quantize(rate, 4)
    print(f"rate {rate!r} -> level {level} -> code {code}")
    full = []
    for r in rates:
        full.extend(quantize(r, 4)[1])
    print(f"code for the joint (40 entries): {full}")
