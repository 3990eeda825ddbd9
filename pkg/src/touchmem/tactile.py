"""Tactile force processing: from raw skin-cell forces to observation embeddings.

Pipeline per skin patch and per control tick:

1. per-cell L1 force magnitude, soft-thresholded against a noise floor
2. accumulation of thresholded contributions over a trailing time window
3. an Izhikevich neuron driven by a current proportional to the
   accumulated force, integrated with forward Euler sub-steps
4. spike-rate density rho = clamp(rate / max_rate, 0, 1)
5. a bipolar flip vector sized by rho, expanded to the place-code
   dimension and rotated by the blockwise 3D rotary embedding with an
   angle scaled by rho and signed per patch

Steps 1-4 are stateful per patch (``TactileChannel``); step 5 is the
pure function ``build_embedding``.
"""

import math
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .rope3d import Rope3D

__all__ = [
    "IzhikevichParams",
    "IzhikevichNeuron",
    "izhikevich_step",
    "PatchFrame",
    "TactileFeature",
    "l1_magnitude",
    "soft_threshold",
    "accumulate_window",
    "drive_current",
    "spike_rate",
    "density",
    "build_embedding",
    "TactileChannel",
]


@dataclass(frozen=True)
class IzhikevichParams:
    """Two-variable spiking neuron parameters.

    Defaults give a force-amplitude-sensitive regular spiker: recovery
    time scale a, recovery sensitivity b, post-spike reset c for the
    membrane potential, post-spike recovery increment d_reset, and the
    spike threshold v_th.
    """

    a: float = 0.02
    b: float = 0.20
    c: float = -50.0
    d_reset: float = 0.50
    v_th: float = 30.0

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("parameter a must be positive")
        if self.v_th <= self.c:
            raise ValueError("spike threshold must exceed the reset value")

    def resting_state(self) -> tuple[float, float]:
        """Stable fixed point (v*, u*) with zero input current.

        Solves 0.04 v^2 + 5 v + 140 - u = 0 with u = b v and picks the
        lower (stable) root.
        """
        # 0.04 v^2 + (5 - b) v + 140 = 0
        p = 5.0 - self.b
        disc = p * p - 4.0 * 0.04 * 140.0
        if disc < 0:
            # no rest point: neuron is self-oscillating; fall back to reset
            return self.c, self.b * self.c
        v = (-p - math.sqrt(disc)) / (2.0 * 0.04)
        return v, self.b * v


@dataclass
class IzhikevichState:
    """Mutable membrane state (potential v, recovery u)."""

    v: float
    u: float


def izhikevich_step(
    state: IzhikevichState, current: float, params: IzhikevichParams, dt: float
) -> tuple[IzhikevichState, bool]:
    """One forward-Euler step of the neuron; mutates and returns the state.

    dt is in model-time milliseconds and must be in (0, 1]. After a
    threshold crossing the membrane is reset, so v < v_th always holds
    at the end of a completed step. A non-finite state (oversized dt or
    current) is reset to rest with a warning rather than propagated.
    """
    if not 0.0 < dt <= 1.0:
        raise ValueError(f"dt must be in (0, 1] ms, got {dt}")
    v, u = state.v, state.u
    v += (0.04 * v * v + 5.0 * v + 140.0 - u + current) * dt
    u += params.a * (params.b * state.v - u) * dt
    spiked = False
    if v >= params.v_th:
        v = params.c
        u += params.d_reset
        spiked = True
    if not (math.isfinite(v) and math.isfinite(u)):
        warnings.warn(
            "neuron state diverged (dt or current too large); resetting to rest",
            RuntimeWarning,
            stacklevel=2,
        )
        v = params.c
        u = params.b * params.c
        spiked = False
    state.v = v
    state.u = u
    return state, spiked


class IzhikevichNeuron:
    """Izhikevich neuron with a tight Euler integration loop.

    ``advance`` integrates a constant input current over a tick and
    returns spike offsets (in seconds) relative to the tick start, so a
    caller can keep an absolute spike-time record.
    """

    def __init__(self, params: IzhikevichParams | None = None, dt_ms: float = 0.1):
        self.params = params or IzhikevichParams()
        if not 0.0 < dt_ms <= 1.0:
            raise ValueError(f"dt_ms must be in (0, 1], got {dt_ms}")
        self.dt_ms = float(dt_ms)
        self.v, self.u = self.params.resting_state()

    def reset(self):
        self.v, self.u = self.params.resting_state()

    def step(self, current: float) -> bool:
        state = IzhikevichState(self.v, self.u)
        state, spiked = izhikevich_step(state, current, self.params, self.dt_ms)
        self.v, self.u = state.v, state.u
        return spiked

    def advance(self, current: float, duration_s: float) -> list[float]:
        """Integrate over a tick; returns spike offsets in seconds."""
        p = self.params
        a, b, c, d_reset, v_th = p.a, p.b, p.c, p.d_reset, p.v_th
        dt = self.dt_ms
        v, u = self.v, self.u
        n = int(round(duration_s * 1000.0 / dt))
        spikes = []
        for i in range(n):
            dv = (0.04 * v * v + 5.0 * v + 140.0 - u + current) * dt
            u += a * (b * v - u) * dt
            v += dv
            if v >= v_th:
                v = c
                u += d_reset
                spikes.append((i + 1) * dt / 1000.0)
        if not (math.isfinite(v) and math.isfinite(u)):
            warnings.warn(
                "neuron state diverged (dt or current too large); resetting to rest",
                RuntimeWarning,
                stacklevel=2,
            )
            v, u = self.params.resting_state()
        self.v, self.u = v, u
        return spikes


@dataclass
class PatchFrame:
    """One tick of raw skin readings for a patch.

    ``cells`` is an (n_cells, 3) array of per-sensor forces in newtons;
    ``axis`` is the patch rotation axis (unit 3-vector) and
    ``theta_sign`` the directional sense (+1 or -1) of the patch.
    """

    timestamp: float
    patch_id: str
    cells: np.ndarray
    axis: np.ndarray
    theta_sign: int

    def __post_init__(self):
        self.cells = np.atleast_2d(np.asarray(self.cells, dtype=float))
        self.axis = np.asarray(self.axis, dtype=float)
        if self.cells.shape[0] < 1 or self.cells.shape[1] != 3:
            raise ValueError(f"cells must be (n, 3), got {self.cells.shape}")
        if abs(np.linalg.norm(self.axis) - 1.0) > 1e-9:
            raise ValueError("patch axis must be unit length")
        if self.theta_sign not in (1, -1):
            raise ValueError("theta_sign must be +1 or -1")


@dataclass(frozen=True)
class TactileFeature:
    """Per-tick tactile summary used for pairing, training and recall."""

    timestamp: float
    patch_id: str
    f_total: float
    rho: float
    axis: np.ndarray
    theta_sign: int


def l1_magnitude(cell_forces) -> float:
    """Total force magnitude of one cell: |f1| + |f2| + |f3|."""
    f = np.asarray(cell_forces, dtype=float)
    return float(np.sum(np.abs(f)))


def soft_threshold(magnitude: float, tau: float) -> float:
    """max(0, magnitude - tau); attenuates small-magnitude noise."""
    return max(0.0, float(magnitude) - float(tau))


def accumulate_window(samples, t0: float, delta_t: float) -> float:
    """Sum thresholded magnitudes with timestamps in [t0 - delta_t, t0].

    ``samples`` is a time-ordered iterable of (timestamp, magnitude);
    both window ends are inclusive. An empty window sums to zero.
    """
    if delta_t <= 0:
        raise ValueError("delta_t must be positive")
    lo = t0 - delta_t
    return float(sum(m for t, m in samples if lo <= t <= t0))


def drive_current(f_total: float, gain: float) -> float:
    """Synaptic input current proportional to the accumulated force."""
    if gain <= 0:
        raise ValueError("gain must be positive")
    return gain * float(f_total)


def spike_rate(spike_times, window: float, now: float) -> float:
    """Spikes per second over the trailing window [now - window, now]."""
    if window <= 0:
        raise ValueError("window must be positive")
    lo = now - window
    count = sum(1 for t in spike_times if lo <= t <= now)
    return count / window


def density(rate: float, max_rate: float) -> float:
    """Spike-rate density rho = clamp(rate / max_rate, 0, 1)."""
    if max_rate <= 0:
        raise ValueError("max_rate must be positive")
    return min(max(float(rate) / float(max_rate), 0.0), 1.0)


def build_embedding(
    rho: float,
    salience: np.ndarray,
    axis: np.ndarray,
    theta_sign: int,
    n_bits: int,
    rope: Rope3D,
) -> np.ndarray:
    """Observation embedding from a spike-rate density.

    A bipolar flip vector (one entry per place-coding neuron) starts at
    all -1; the round(rho * len) entries with the largest salience are
    flipped to +1 (ties to the lowest index). The vector is expanded by
    repeating each entry n_bits times to the place-code dimension and
    rotated blockwise around the patch axis by theta_sign * rho * pi/2.
    The result has the same Euclidean norm as the bipolar vector,
    sqrt(dimension).
    """
    salience = np.asarray(salience, dtype=float)
    n_units = salience.size
    if n_bits * n_units != rope.dim:
        raise ValueError(
            f"salience length {n_units} x {n_bits} bits != rotation dimension {rope.dim}"
        )
    rho = min(max(float(rho), 0.0), 1.0)
    n_flips = int(round(rho * n_units))
    flips = np.full(n_units, -1.0)
    if n_flips > 0:
        order = np.argsort(-salience, kind="stable")
        flips[order[:n_flips]] = 1.0
    expanded = np.repeat(flips, n_bits)
    theta = float(theta_sign) * rho * (np.pi / 2.0)
    return rope.rotate(expanded, axis, theta)


@dataclass
class ChannelConfig:
    """Tunable constants of the per-patch tactile pipeline."""

    tau: float = 0.3
    accum_window: float = 0.05
    rate_window: float = 0.25
    max_rate: float = 1000.0
    gain: float = 1.4
    neuron: IzhikevichParams = field(default_factory=IzhikevichParams)
    neuron_dt_ms: float = 0.1


class TactileChannel:
    """Stateful force-to-density pipeline for one skin patch.

    A channel owns the Izhikevich neuron, the trailing force-sample
    window and the spike record for its patch. One channel has a single
    writer (the tick loop); distinct patches may run concurrently.
    """

    def __init__(self, patch_id: str, config: ChannelConfig | None = None):
        self.patch_id = patch_id
        self.config = config or ChannelConfig()
        self.neuron = IzhikevichNeuron(self.config.neuron, self.config.neuron_dt_ms)
        self._forces: deque[tuple[float, float]] = deque()
        self._spikes: deque[float] = deque()

    def reset(self):
        self.neuron.reset()
        self._forces.clear()
        self._spikes.clear()

    def observe(self, frame: PatchFrame, tick_dt: float) -> TactileFeature:
        """Consume one tick of cell forces; return the tactile feature.

        The frame timestamp is the end of the tick; the neuron is
        integrated across the tick with the current derived from the
        accumulated force window ending at the frame timestamp.
        """
        cfg = self.config
        t = frame.timestamp
        contribution = sum(
            soft_threshold(l1_magnitude(cell), cfg.tau) for cell in frame.cells
        )
        self._forces.append((t, contribution))
        horizon = t - cfg.accum_window
        while self._forces and self._forces[0][0] < horizon:
            self._forces.popleft()
        f_total = accumulate_window(self._forces, t, cfg.accum_window)

        current = drive_current(f_total, cfg.gain) if f_total > 0 else 0.0
        for offset in self.neuron.advance(current, tick_dt):
            self._spikes.append(t - tick_dt + offset)
        spike_horizon = t - cfg.rate_window
        while self._spikes and self._spikes[0] < spike_horizon:
            self._spikes.popleft()

        rate = spike_rate(self._spikes, cfg.rate_window, t)
        rho = density(rate, cfg.max_rate)
        return TactileFeature(
            timestamp=t,
            patch_id=self.patch_id,
            f_total=f_total,
            rho=rho,
            axis=frame.axis,
            theta_sign=frame.theta_sign,
        )
