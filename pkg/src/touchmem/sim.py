"""Kinematic wrist simulator and the shared control tick loop.

The world is purely kinematic: joints move toward commanded angles at
bounded velocity, skin patches report per-cell force vectors for
whatever touch magnitudes are currently applied. Time is a tick
counter; t = k * tick_dt is always computed by multiplication so long
runs stay on an exact grid.

``ControlLoop`` owns the per-tick order of operations (sample skin,
update tactile channels, pick a command, move) and is the single
sequencer used by scripted recording, closed-loop evaluation and the
live session service, so all three behave identically.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig
from .memory import MemoryBank, decision_to_command
from .recording import Recording, RecordingMeta, TickSample
from .tactile import PatchFrame, TactileChannel, TactileFeature, l1_magnitude, soft_threshold

__all__ = [
    "ArmWorld",
    "TickResult",
    "TrajectoryLog",
    "ControlLoop",
    "recall_commander",
    "derive_features",
    "run_scripted",
    "run_closed_loop",
]


class ArmWorld:
    """Joint state, active touches and simulated skin readings."""

    def __init__(self, config: SystemConfig, seed: int | None = None, start=None):
        self.config = config
        self.tick_dt = config.sim.tick_dt
        self.noise_sigma = config.sim.noise_sigma
        self.rng = np.random.default_rng(config.sim.seed if seed is None else seed)
        self._lo = np.array([j.limits[0] for j in config.joints])
        self._hi = np.array([j.limits[1] for j in config.joints])
        self._vmax = np.array([j.max_velocity for j in config.joints])
        if start is None:
            start = np.zeros(len(config.joints))
        self._angles = np.clip(np.asarray(start, dtype=float), self._lo, self._hi)
        self._k = 0
        self._touches: dict[str, float] = {}

    @property
    def tick_index(self) -> int:
        return self._k

    @property
    def t(self) -> float:
        return self._k * self.tick_dt

    @property
    def angles(self) -> np.ndarray:
        return self._angles.copy()

    @property
    def patch_ids(self) -> list[str]:
        return [p.name for p in self.config.patches]

    def set_touch(self, patch_id: str, magnitude: float):
        self.config.patch(patch_id)  # raises on unknown names
        if magnitude > 0:
            self._touches[patch_id] = float(magnitude)
        else:
            self._touches.pop(patch_id, None)

    def clear_touches(self):
        self._touches.clear()

    def active_touches(self) -> dict[str, float]:
        return dict(self._touches)

    def sample_frames(self) -> list[PatchFrame]:
        """Per-patch cell forces at the current time.

        A touched patch splits its magnitude evenly across cells along
        the cell normal, with zero-mean noise per cell when configured;
        untouched patches report exact zeros (no noise floor).
        """
        t = self.t
        frames = []
        for p in self.config.patches:
            cells = np.zeros((p.n_cells, 3))
            mag = self._touches.get(p.name, 0.0)
            if mag > 0:
                per_cell = np.full(p.n_cells, mag / p.n_cells)
                if self.noise_sigma > 0:
                    per_cell = per_cell + self.rng.normal(0.0, self.noise_sigma, p.n_cells)
                cells[:, 2] = np.maximum(per_cell, 0.0)
            frames.append(
                PatchFrame(
                    timestamp=t,
                    patch_id=p.name,
                    cells=cells,
                    axis=p.axis_array(),
                    theta_sign=p.theta_sign,
                )
            )
        return frames

    def step(self, command: np.ndarray):
        """Move toward the command, clamped by velocity and joint limits."""
        command = np.asarray(command, dtype=float)
        step_cap = self._vmax * self.tick_dt
        delta = np.clip(command - self._angles, -step_cap, step_cap)
        self._angles = np.clip(self._angles + delta, self._lo, self._hi)
        self._k += 1


@dataclass(frozen=True)
class TickResult:
    """Everything observable about one control tick (pre-move state)."""

    t: float
    angles: np.ndarray
    frames: dict[str, PatchFrame]
    features: dict[str, TactileFeature]
    active: dict[str, bool]
    command: np.ndarray
    info: dict


@dataclass
class TrajectoryLog:
    """Tick-by-tick record of a run, exportable as CSV."""

    joint_names: list[str]
    rows: list[dict] = field(default_factory=list)

    def append(self, result: TickResult):
        row = {"t": result.t}
        for name, angle in zip(self.joint_names, result.angles):
            row[name] = float(angle)
        patch = result.info.get("patch", "")
        row["force"] = result.features[patch].f_total if patch else 0.0
        row["patch"] = patch
        row["rho"] = result.info.get("rho", 0.0)
        row["entropy"] = result.info.get("entropy", "")
        self.rows.append(row)

    def times(self) -> np.ndarray:
        return np.array([r["t"] for r in self.rows])

    def angles(self) -> np.ndarray:
        return np.array([[r[name] for name in self.joint_names] for r in self.rows])

    def joint(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows])

    def to_csv(self, path):
        """Tabular export: pose, touch force, and joint velocities per tick.

        Velocities are forward differences, so the last row (which has
        no successor sample) leaves them blank.
        """
        v_names = [f"v_{name}" for name in self.joint_names]
        fields = ["t", *self.joint_names, "force", *v_names, "patch", "rho", "entropy"]
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            for i, row in enumerate(self.rows):
                out = dict(row)
                if i + 1 < len(self.rows):
                    nxt = self.rows[i + 1]
                    dt = nxt["t"] - row["t"]
                    for name, v_name in zip(self.joint_names, v_names):
                        out[v_name] = (nxt[name] - row[name]) / dt
                else:
                    for v_name in v_names:
                        out[v_name] = ""
                writer.writerow(out)


class ControlLoop:
    """Per-tick sequencer: sense, encode, decide, move.

    Each tick observes the pre-move joint state with the touch
    magnitudes currently applied, so the sample at index k always
    explains the motion from state k to state k+1. A patch counts as
    active only while this tick's thresholded cell forces are nonzero;
    released patches therefore stop driving motion on the next tick
    even though their spike-rate window takes longer to drain.
    """

    def __init__(self, world: ArmWorld):
        self.world = world
        cfg = world.config.tactile.channel_config()
        self.channels = {
            pid: TactileChannel(pid, cfg) for pid in world.patch_ids
        }
        self._tau = world.config.tactile.tau

    def reset_channels(self):
        for ch in self.channels.values():
            ch.reset()

    def tick(self, command_fn) -> TickResult:
        world = self.world
        t = world.t
        angles = world.angles
        frames = {}
        features = {}
        active = {}
        for frame in world.sample_frames():
            contribution = sum(
                soft_threshold(l1_magnitude(cell), self._tau) for cell in frame.cells
            )
            frames[frame.patch_id] = frame
            features[frame.patch_id] = self.channels[frame.patch_id].observe(
                frame, world.tick_dt
            )
            active[frame.patch_id] = contribution > 0.0
        command, info = command_fn(t, angles, features, active)
        world.step(command)
        return TickResult(
            t=t,
            angles=angles,
            frames=frames,
            features=features,
            active=active,
            command=command,
            info=info,
        )


def run_scripted(
    config: SystemConfig,
    script,
    n_ticks: int,
    seed: int | None = None,
) -> Recording:
    """Drive the arm with a script and record the raw sensor stream.

    ``script`` provides ``start_angles``, ``touches(k)`` (patch name to
    magnitude for tick k) and ``target(k, angles)``. The recording gets
    one sample per tick (pre-move angles plus every patch's cell
    forces) and a closing sample with the final post-move pose.
    """
    world = ArmWorld(config, seed=seed, start=script.start_angles)
    loop = ControlLoop(world)
    meta = RecordingMeta(
        joints=tuple(config.joint_names),
        limits=tuple(config.limits),
        patches={
            p.name: {"axis": list(p.axis), "theta_sign": p.theta_sign}
            for p in config.patches
        },
        tick_dt=config.sim.tick_dt,
    )
    recording = Recording(meta=meta)

    def command_fn(t, angles, features, active):
        return script.target(world.tick_index, angles), {}

    for k in range(n_ticks):
        world.clear_touches()
        for pid, mag in script.touches(k).items():
            world.set_touch(pid, mag)
        result = loop.tick(command_fn)
        recording.samples.append(
            TickSample(
                t=result.t,
                joints=result.angles,
                patches={pid: f.cells for pid, f in result.frames.items()},
            )
        )
    recording.samples.append(TickSample(t=world.t, joints=world.angles, patches={}))
    return recording


def derive_features(
    config: SystemConfig, recording: Recording
) -> dict[str, list[TactileFeature]]:
    """Run the tactile pipeline over a recording's raw cell forces.

    Fresh channels replay the recorded frames in order, so the derived
    features match what a live loop computed while the recording was
    made, bit for bit.
    """
    channel_cfg = config.tactile.channel_config()
    channels = {
        pid: TactileChannel(pid, channel_cfg) for pid in recording.meta.patches
    }
    out: dict[str, list[TactileFeature]] = {pid: [] for pid in channels}
    for sample in recording.samples:
        for frame in recording.frames(sample):
            out[frame.patch_id].append(
                channels[frame.patch_id].observe(frame, recording.meta.tick_dt)
            )
    return out


def recall_commander(config: SystemConfig, banks: dict[str, MemoryBank], get_beta):
    """Command function: dispatch the active patch to its memory bank.

    Each tick the active patch with the highest spike-rate density
    picks its bank; with no active patch the arm holds position.
    ``get_beta`` is read every tick so the temperature can be changed
    while a session runs.
    """
    max_step = config.max_step()
    limits = config.limits

    def command_fn(t, angles, features, active):
        candidates = [pid for pid, flag in active.items() if flag and pid in banks]
        if not candidates:
            return angles, {"patch": "", "rho": 0.0}
        pid = max(candidates, key=lambda p: features[p].rho)
        decision = banks[pid].recall(angles, features[pid], get_beta())
        command = decision_to_command(decision, angles, max_step, limits)
        return command, {
            "patch": pid,
            "rho": features[pid].rho,
            "entropy": decision.entropy,
            "best_index": decision.best_index,
        }

    return command_fn


def run_closed_loop(
    config: SystemConfig,
    banks: dict[str, MemoryBank],
    touches,
    n_ticks: int,
    beta: float,
    start=None,
    seed: int | None = None,
) -> TrajectoryLog:
    """Let recall drive the arm while touches follow a script.

    ``touches`` maps a tick index to {patch: magnitude} (a callable or
    a dict of dicts).
    """
    world = ArmWorld(config, seed=seed, start=start)
    loop = ControlLoop(world)
    log = TrajectoryLog(joint_names=config.joint_names)
    touch_fn = touches if callable(touches) else lambda k: touches.get(k, {})
    command_fn = recall_commander(config, banks, lambda: beta)

    for k in range(n_ticks):
        world.clear_touches()
        for pid, mag in touch_fn(k).items():
            world.set_touch(pid, mag)
        result = loop.tick(command_fn)
        log.append(result)
    # closing sample so the log's last row reflects the final pose
    log.rows.append(
        {
            "t": world.t,
            **{name: float(a) for name, a in zip(config.joint_names, world.angles)},
            "force": 0.0,
            "patch": "",
            "rho": 0.0,
            "entropy": "",
        }
    )
    return log
