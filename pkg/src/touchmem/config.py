"""Typed configuration for the arm, skin patches, encoders and memory.

A ``SystemConfig`` fully determines a run: joint geometry, patch
placement, place-coding resolution, tactile pipeline constants, recall
temperatures and simulation timing. Configs load from YAML; every
integrity problem raises ``ConfigError`` (CLI exit code 2) rather than
surfacing later as a numerics bug.
"""

from dataclasses import asdict, dataclass, field

import numpy as np
import yaml

from .errors import ConfigError
from .memory import AssociationEncoder
from .placecode import PlaceCodec, make_tuning
from .tactile import ChannelConfig, IzhikevichParams

__all__ = [
    "JointConfig",
    "PatchConfig",
    "EncoderConfig",
    "TactileConfig",
    "MemoryConfig",
    "SimConfig",
    "SystemConfig",
    "default_config",
    "load_config",
]


@dataclass(frozen=True)
class JointConfig:
    name: str
    limits: tuple[float, float]
    max_velocity: float = 2.0

    def __post_init__(self):
        lo, hi = self.limits
        if not lo < hi:
            raise ConfigError(f"joint {self.name}: limits must satisfy lo < hi")
        if self.max_velocity <= 0:
            raise ConfigError(f"joint {self.name}: max_velocity must be positive")


@dataclass(frozen=True)
class PatchConfig:
    """A skin patch: its rotation axis, directional sense and host joint.

    ``joint`` names the joint the patch habitually drives; it routes
    scenario construction and the per-patch memory banks, not the
    encoding itself (the axis and sign do that).
    """

    name: str
    axis: tuple[float, float, float]
    theta_sign: int
    joint: str
    n_cells: int = 3

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > 1e-9:
            raise ConfigError(f"patch {self.name}: axis must be a unit 3-vector")
        if self.theta_sign not in (1, -1):
            raise ConfigError(f"patch {self.name}: theta_sign must be +1 or -1")
        if self.n_cells < 1:
            raise ConfigError(f"patch {self.name}: need at least one cell")

    def axis_array(self) -> np.ndarray:
        return np.asarray(self.axis, dtype=float)


@dataclass(frozen=True)
class EncoderConfig:
    n_neurons: int = 10
    n_bits: int = 4
    sigma_scale: float = 1.5

    def __post_init__(self):
        if self.n_neurons < 2:
            raise ConfigError("need at least two tuning curves per joint")
        if self.n_bits < 1:
            raise ConfigError("need at least one bit per neuron")
        if self.sigma_scale <= 0:
            raise ConfigError("sigma_scale must be positive")


@dataclass(frozen=True)
class TactileConfig:
    tau: float = 0.3
    accum_window: float = 0.05
    rate_window: float = 0.25
    max_rate: float = 1000.0
    gain: float = 1.4
    neuron_a: float = 0.02
    neuron_b: float = 0.20
    neuron_c: float = -50.0
    neuron_d: float = 0.50
    neuron_v_th: float = 30.0
    neuron_dt_ms: float = 0.1

    def __post_init__(self):
        if self.tau < 0:
            raise ConfigError("tau must be non-negative")
        for name in ("accum_window", "rate_window", "max_rate", "gain", "neuron_dt_ms"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")

    def channel_config(self) -> ChannelConfig:
        return ChannelConfig(
            tau=self.tau,
            accum_window=self.accum_window,
            rate_window=self.rate_window,
            max_rate=self.max_rate,
            gain=self.gain,
            neuron=IzhikevichParams(
                a=self.neuron_a,
                b=self.neuron_b,
                c=self.neuron_c,
                d_reset=self.neuron_d,
                v_th=self.neuron_v_th,
            ),
            neuron_dt_ms=self.neuron_dt_ms,
        )


@dataclass(frozen=True)
class MemoryConfig:
    beta: float = 8.0
    beta_replay: float = 32.0
    beta_compliance: float = 2.0

    def __post_init__(self):
        for name in ("beta", "beta_replay", "beta_compliance"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")


@dataclass(frozen=True)
class SimConfig:
    tick_rate: float = 50.0
    noise_sigma: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.tick_rate <= 0:
            raise ConfigError("tick_rate must be positive")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be non-negative")

    @property
    def tick_dt(self) -> float:
        return 1.0 / self.tick_rate


@dataclass(frozen=True)
class SystemConfig:
    joints: tuple[JointConfig, ...]
    patches: tuple[PatchConfig, ...]
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    tactile: TactileConfig = field(default_factory=TactileConfig)
    memory: MemoryConfig = field(default_factory=MemoryConfig)
    sim: SimConfig = field(default_factory=SimConfig)

    def __post_init__(self):
        if not self.joints:
            raise ConfigError("need at least one joint")
        if not self.patches:
            raise ConfigError("need at least one patch")
        joint_names = [j.name for j in self.joints]
        if len(set(joint_names)) != len(joint_names):
            raise ConfigError("duplicate joint names")
        patch_names = [p.name for p in self.patches]
        if len(set(patch_names)) != len(patch_names):
            raise ConfigError("duplicate patch names")
        for p in self.patches:
            if p.joint not in joint_names:
                raise ConfigError(f"patch {p.name}: unknown joint {p.joint!r}")

    @property
    def joint_names(self) -> list[str]:
        return [j.name for j in self.joints]

    @property
    def limits(self) -> list[tuple[float, float]]:
        return [j.limits for j in self.joints]

    def joint_index(self, name: str) -> int:
        return self.joint_names.index(name)

    def patch(self, name: str) -> PatchConfig:
        for p in self.patches:
            if p.name == name:
                return p
        raise ConfigError(f"unknown patch {name!r}")

    def max_step(self) -> np.ndarray:
        """Per-joint largest commanded change per tick."""
        dt = self.sim.tick_dt
        return np.array([j.max_velocity * dt for j in self.joints])

    def build_codec(self) -> PlaceCodec:
        n = self.encoder.n_neurons
        tunings = tuple(
            make_tuning(
                j.limits,
                n,
                sigma=self.encoder.sigma_scale * (j.limits[1] - j.limits[0]) / (n - 1),
            )
            for j in self.joints
        )
        return PlaceCodec(tunings, self.encoder.n_bits)

    def build_association_encoder(self) -> AssociationEncoder:
        return AssociationEncoder(self.build_codec())

    def to_dict(self) -> dict:
        return {
            "joints": [asdict(j) for j in self.joints],
            "patches": [asdict(p) for p in self.patches],
            "encoder": asdict(self.encoder),
            "tactile": asdict(self.tactile),
            "memory": asdict(self.memory),
            "sim": asdict(self.sim),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SystemConfig":
        try:
            joints = tuple(
                JointConfig(
                    name=j["name"],
                    limits=tuple(j["limits"]),
                    max_velocity=float(j.get("max_velocity", 2.0)),
                )
                for j in data["joints"]
            )
            patches = tuple(
                PatchConfig(
                    name=p["name"],
                    axis=tuple(p["axis"]),
                    theta_sign=int(p["theta_sign"]),
                    joint=p["joint"],
                    n_cells=int(p.get("n_cells", 3)),
                )
                for p in data["patches"]
            )
            return cls(
                joints=joints,
                patches=patches,
                encoder=EncoderConfig(**data.get("encoder", {})),
                tactile=TactileConfig(**data.get("tactile", {})),
                memory=MemoryConfig(**data.get("memory", {})),
                sim=SimConfig(**data.get("sim", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed configuration: {exc}") from exc


def default_config() -> SystemConfig:
    """Three wrist joints and four directional patches around the wrist."""
    return SystemConfig(
        joints=(
            JointConfig("lift", (-1.0, 1.0)),
            JointConfig("flex", (-1.2, 1.2)),
            JointConfig("roll", (-1.6, 1.6)),
        ),
        patches=(
            PatchConfig("wrist_upper", (1.0, 0.0, 0.0), +1, "flex"),
            PatchConfig("wrist_under", (1.0, 0.0, 0.0), -1, "flex"),
            PatchConfig("wrist_left", (0.0, 1.0, 0.0), +1, "roll"),
            PatchConfig("wrist_right", (0.0, 1.0, 0.0), -1, "roll"),
        ),
    )


def load_config(path) -> SystemConfig:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return SystemConfig.from_dict(data)


def save_config(config: SystemConfig, path):
    with open(path, "w") as fh:
        yaml.safe_dump(config.to_dict(), fh, sort_keys=False)
