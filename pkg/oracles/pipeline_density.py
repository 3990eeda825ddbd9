"""Reference steady-state spike-rate densities for the full tactile
pipeline, recomputed from scratch (no package imports).

Constants mirror the shipped defaults: three cells per patch, noise
threshold tau = 0.3, accumulation window 0.05 s, gain 1.4, neuron Euler
step 0.1 ms, 50 Hz control ticks, trailing rate window 0.25 s, density
ceiling 1000 spikes/s.

Run: python3 oracles/pipeline_density.py
"""

import math

TAU = 0.3
ACCUM = 0.05
RATE_WINDOW = 0.25
MAX_RATE = 1000.0
GAIN = 1.4
TICK = 0.02
DT_MS = 0.1
CELLS = 3


def rest(a=0.02, b=0.20):
    p = 5.0 - b
    v = (-p - math.sqrt(p * p - 4 * 0.04 * 140.0)) / (2 * 0.04)
    return v, b * v


def steady_density(magnitude, n_ticks=100):
    a, b, c, d, v_th = 0.02, 0.20, -50.0, 0.50, 30.0
    v, u = rest()
    force_samples = []  # (t, per-tick thresholded contribution)
    spike_times = []
    rho = 0.0
    per_tick = CELLS * max(0.0, magnitude / CELLS - TAU)
    for k in range(n_ticks):
        t = k * TICK
        force_samples.append((t, per_tick))
        force_samples = [(ts, m) for ts, m in force_samples if ts >= t - ACCUM]
        f_total = sum(m for ts, m in force_samples)
        current = GAIN * f_total
        n_sub = int(round(TICK * 1000.0 / DT_MS))
        for i in range(n_sub):
            dv = (0.04 * v * v + 5.0 * v + 140.0 - u + current) * DT_MS
            u += a * (b * v - u) * DT_MS
            v += dv
            if v >= v_th:
                v = c
                u += d
                spike_times.append(t - TICK + (i + 1) * DT_MS / 1000.0)
        spike_times = [s for s in spike_times if s >= t - RATE_WINDOW]
        rate = sum(1 for s in spike_times if s <= t) / RATE_WINDOW
        rho = min(max(rate / MAX_RATE, 0.0), 1.0)
    return rho


if __name__ == "__main__":
    for m in [2, 4, 5, 6, 8, 10, 12, 14, 15, 16]:
        f_total_steady = 3 * CELLS * max(0.0, m / CELLS - TAU)
        print(
            f"magnitude = {m:4.1f} N  steady I = {GAIN * f_total_steady:6.2f}"
            f"  rho = {steady_density(m):.4f}"
        )
