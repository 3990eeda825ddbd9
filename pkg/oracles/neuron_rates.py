"""Reference spiking rates for the two-variable neuron, computed from
scratch (no package imports) so test constants have an independent
source. Forward Euler at dt = 0.1 ms from the resting state, constant
input current, one second of model time.

Run: python3 oracles/neuron_rates.py
"""

import math


def rest(a, b):
    # stable root of 0.04 v^2 + (5 - b) v + 140 = 0
    p = 5.0 - b
    v = (-p - math.sqrt(p * p - 4 * 0.04 * 140.0)) / (2 * 0.04)
    return v, b * v


def count_spikes(current, duration_ms=1000.0, dt=0.1,
                 a=0.02, b=0.20, c=-50.0, d=0.50, v_th=30.0):
    v, u = rest(a, b)
    n = int(round(duration_ms / dt))
    spikes = 0
    for _ in range(n):
        dv = (0.04 * v * v + 5.0 * v + 140.0 - u + current) * dt
        u += a * (b * v - u) * dt
        v += dv
        if v >= v_th:
            v = c
            u += d
            spikes += 1
    return spikes


if __name__ == "__main__":
    v0, u0 = rest(0.02, 0.20)
    print(f"rest state: v = {v0}, u = {u0}")
    for current in [0, 1, 2, 3, 4, 5, 6, 8, 10, 12]:
        print(f"I = {current:5.1f}  spikes/s = {count_spikes(current)}")
