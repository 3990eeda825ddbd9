"""Canned touch-and-motion scenarios plus evaluation metrics.

Scenario scripts drive ``run_scripted`` to produce training recordings;
the metric helpers condense closed-loop trajectory logs into the
numbers the evaluation cares about (steady-state joint speed, replay
error, force-speed monotonicity).
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .config import SystemConfig
from .errors import ConfigError
from .memory import MemoryBank
from .recording import Recording
from .sim import TrajectoryLog, derive_features, run_closed_loop, run_scripted

__all__ = [
    "SweepScript",
    "SequenceScript",
    "make_sweep",
    "make_sequence",
    "build_compliance_banks",
    "build_sequence_bank",
    "constant_touch",
    "steady_state_speed",
    "replay_max_error",
    "force_speed_curve",
]


@dataclass
class SweepScript:
    """Constant-speed sweep of one joint under a constant-magnitude touch."""

    start_angles: np.ndarray
    joint_index: int
    per_tick: float  # signed angle change per tick
    patch: str
    magnitude: float
    n_ticks: int

    def touches(self, k: int) -> dict:
        return {self.patch: self.magnitude}

    def target(self, k: int, angles: np.ndarray) -> np.ndarray:
        out = self.start_angles.copy()
        out[self.joint_index] += self.per_tick * (k + 1)
        return out


@dataclass
class SequenceScript:
    """Piecewise-linear waypoint path under a constant-magnitude touch.

    The path is pre-sampled on the tick grid; the command for tick k is
    sample k+1, so as long as waypoint spacing respects the velocity
    bound the arm lands exactly on the samples.
    """

    path: np.ndarray  # (n_ticks + 1, n_joints)
    patch: str
    magnitude: float

    @property
    def start_angles(self) -> np.ndarray:
        return self.path[0].copy()

    @property
    def n_ticks(self) -> int:
        return self.path.shape[0] - 1

    def touches(self, k: int) -> dict:
        return {self.patch: self.magnitude}

    def target(self, k: int, angles: np.ndarray) -> np.ndarray:
        idx = min(k + 1, self.path.shape[0] - 1)
        return self.path[idx].copy()


def make_sweep(
    config: SystemConfig,
    patch: str,
    magnitude: float,
    speed: float,
    span: tuple[float, float] | None = None,
) -> SweepScript:
    """Sweep the patch's joint in its directional sense at a fixed speed.

    The sweep runs across ``span`` (defaults to 90% of the joint range,
    keeping clear of the flat outer tuning-curve tails); a positive
    theta_sign moves from the low end upward, a negative one downward.
    """
    p = config.patch(patch)
    j = config.joint_index(p.joint)
    lo, hi = config.joints[j].limits
    if span is None:
        margin = 0.05 * (hi - lo)
        span = (lo + margin, hi - margin)
    if speed <= 0:
        raise ConfigError("sweep speed must be positive")
    if speed > config.joints[j].max_velocity:
        raise ConfigError(
            f"sweep speed {speed} exceeds joint max velocity "
            f"{config.joints[j].max_velocity}"
        )
    dt = config.sim.tick_dt
    per_tick = speed * dt * p.theta_sign
    start = np.zeros(len(config.joints))
    start[j] = span[0] if p.theta_sign > 0 else span[1]
    n_ticks = int(np.floor((span[1] - span[0]) / (speed * dt)))
    return SweepScript(
        start_angles=start,
        joint_index=j,
        per_tick=per_tick,
        patch=patch,
        magnitude=magnitude,
        n_ticks=n_ticks,
    )


def make_sequence(
    config: SystemConfig,
    patch: str,
    waypoints,
    ticks_per_segment: int,
    magnitude: float,
) -> SequenceScript:
    """Linear interpolation through waypoints, ticks_per_segment apart."""
    pts = np.atleast_2d(np.asarray(waypoints, dtype=float))
    if pts.shape[0] < 2:
        raise ConfigError("need at least two waypoints")
    if pts.shape[1] != len(config.joints):
        raise ConfigError(
            f"waypoints have {pts.shape[1]} joints, config has {len(config.joints)}"
        )
    lo = np.array([j.limits[0] for j in config.joints])
    hi = np.array([j.limits[1] for j in config.joints])
    if np.any(pts < lo) or np.any(pts > hi):
        raise ConfigError("waypoints must lie inside the joint limits")
    step_cap = config.max_step()
    segs = []
    for a, b in zip(pts[:-1], pts[1:]):
        if np.any(np.abs(b - a) / ticks_per_segment > step_cap + 1e-12):
            raise ConfigError("waypoint spacing exceeds the per-tick velocity bound")
        frac = np.arange(1, ticks_per_segment + 1)[:, None] / ticks_per_segment
        segs.append(a + frac * (b - a))
    path = np.vstack([pts[:1], *segs])
    return SequenceScript(path=path, patch=patch, magnitude=magnitude)


def build_compliance_banks(
    config: SystemConfig,
    patches,
    magnitudes,
    speed_per_newton: float,
    seed: int = 0,
) -> dict[str, MemoryBank]:
    """One bank per patch from constant-speed sweeps, one per magnitude.

    Sweep speed scales linearly with touch magnitude, so recall under a
    given force reproduces the speed that force was trained with.
    """
    encoder = config.build_association_encoder()
    banks = {}
    for patch in patches:
        per_magnitude = []
        for m in magnitudes:
            script = make_sweep(config, patch, m, speed_per_newton * m)
            rec = run_scripted(config, script, script.n_ticks, seed=seed)
            per_magnitude.append(
                MemoryBank.train(
                    encoder,
                    rec.states,
                    derive_features(config, rec)[patch],
                    patch_id=patch,
                    beta=config.memory.beta_compliance,
                )
            )
        banks[patch] = MemoryBank.merge(per_magnitude)
    return banks


def build_sequence_bank(
    config: SystemConfig,
    patch: str,
    waypoints,
    ticks_per_segment: int,
    magnitude: float,
    seed: int = 0,
) -> tuple[MemoryBank, Recording]:
    """Record one guided waypoint run and store it as a memory bank."""
    script = make_sequence(config, patch, waypoints, ticks_per_segment, magnitude)
    rec = run_scripted(config, script, script.n_ticks, seed=seed)
    encoder = config.build_association_encoder()
    bank = MemoryBank.train(
        encoder,
        rec.states,
        derive_features(config, rec)[patch],
        patch_id=patch,
        beta=config.memory.beta_replay,
    )
    return bank, rec


def constant_touch(patch: str, magnitude: float, n_ticks: int):
    """Touch profile: one patch held at a fixed magnitude for n_ticks."""

    def touches(k: int) -> dict:
        return {patch: magnitude} if k < n_ticks else {}

    return touches


def steady_state_speed(
    log: TrajectoryLog, joint: str, t_lo: float, t_hi: float
) -> float:
    """Signed joint velocity over [t_lo, t_hi], by least-squares slope."""
    t = log.times()
    mask = (t >= t_lo) & (t <= t_hi)
    if np.count_nonzero(mask) < 3:
        raise ValueError("measurement window holds fewer than 3 samples")
    return float(np.polyfit(t[mask], log.joint(joint)[mask], 1)[0])


def replay_max_error(recording: Recording, log: TrajectoryLog) -> np.ndarray:
    """Per-joint max |trained - executed| over the overlapping ticks."""
    trained = np.array([angles for _, angles in recording.states])
    executed = log.angles()
    n = min(trained.shape[0], executed.shape[0])
    return np.max(np.abs(trained[:n] - executed[:n]), axis=0)


def force_speed_curve(
    config: SystemConfig,
    banks: dict[str, MemoryBank],
    patch: str,
    magnitudes,
    beta: float,
    n_ticks: int = 60,
    measure: tuple[float, float] = (0.5, 1.2),
    seed: int = 0,
) -> dict:
    """Closed-loop steady speeds per touch magnitude, plus rank agreement.

    Returns {"speeds": {m: v}, "spearman": rho} where rho compares the
    magnitude order with the |speed| order.
    """
    p = config.patch(patch)
    joint = p.joint
    start = make_sweep(config, patch, magnitudes[0], 0.1).start_angles
    speeds = {}
    for m in magnitudes:
        log = run_closed_loop(
            config,
            banks,
            constant_touch(patch, m, n_ticks),
            n_ticks,
            beta,
            start=start,
            seed=seed,
        )
        speeds[m] = steady_state_speed(log, joint, *measure)
    mags = list(speeds)
    rho = stats.spearmanr(mags, [abs(speeds[m]) for m in mags]).statistic
    return {"speeds": speeds, "spearman": float(rho)}
