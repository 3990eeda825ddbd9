"""Population place coding of joint angles into bipolar vectors.

Each joint is represented by a bank of neurons with evenly spaced
preferred angles and Gaussian tuning curves. The graded response of
each neuron is quantized to an n-bit fixed-point level and emitted
MSB-first as {-1, +1} entries, so one joint contributes
``n_bits * n_neurons`` elements and the full state code has length
``n_bits * n_neurons * n_joints``.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

__all__ = [
    "JointTuning",
    "make_tuning",
    "tuning_response",
    "quantize_rate",
    "joint_rates",
    "encode_joints",
    "PlaceCodec",
]


@dataclass(frozen=True, eq=False)
class JointTuning:
    """Gaussian tuning bank for a single joint.

    Attributes:
        preferred_angles: strictly increasing preferred angles (rad),
            first and last coincide with the joint limits.
        sigma: tuning width (rad), > 0.
        limits: (min, max) joint limits in radians.
    """

    preferred_angles: np.ndarray
    sigma: float
    limits: tuple[float, float]

    def __post_init__(self):
        prefs = np.asarray(self.preferred_angles, dtype=float)
        object.__setattr__(self, "preferred_angles", prefs)
        lo, hi = self.limits
        if prefs.size < 2:
            raise ConfigError("a tuning bank needs at least 2 neurons")
        if self.sigma <= 0:
            raise ConfigError("tuning sigma must be positive")
        if np.any(np.diff(prefs) <= 0):
            raise ConfigError("preferred angles must be strictly increasing")
        if not (np.isclose(prefs[0], lo) and np.isclose(prefs[-1], hi)):
            raise ConfigError("preferred angles must span the joint limits")

    @property
    def n_neurons(self) -> int:
        return self.preferred_angles.size


def make_tuning(limits, n_neurons=10, sigma=None) -> JointTuning:
    """Build an evenly spaced tuning bank over the given joint limits.

    ``sigma`` defaults to 1.5x the preferred-angle spacing, giving
    overlapping curves and smooth code transitions.
    """
    lo, hi = float(limits[0]), float(limits[1])
    if not hi > lo:
        raise ConfigError(f"joint limits must satisfy min < max, got ({lo}, {hi})")
    if int(n_neurons) < 2:
        raise ConfigError("a tuning bank needs at least 2 neurons")
    prefs = np.linspace(lo, hi, int(n_neurons))
    if sigma is None:
        sigma = 1.5 * (prefs[1] - prefs[0])
    return JointTuning(preferred_angles=prefs, sigma=float(sigma), limits=(lo, hi))


def _clamped(angle: float, limits: tuple[float, float], what: str) -> float:
    lo, hi = limits
    if angle < lo or angle > hi:
        warnings.warn(
            f"{what} {angle:.4f} outside limits [{lo:.4f}, {hi:.4f}], clamping",
            RuntimeWarning,
            stacklevel=3,
        )
        return min(max(angle, lo), hi)
    return angle


def tuning_response(angle: float, tuning: JointTuning) -> np.ndarray:
    """Gaussian population response of one joint's neuron bank.

    Element i is exp(-(angle - preferred_i)^2 / (2 sigma^2)), in (0, 1].
    Out-of-range angles are clamped to the limits with a warning so a
    noisy sensor reading cannot abort a control loop.
    """
    angle = _clamped(float(angle), tuning.limits, "angle")
    d = angle - tuning.preferred_angles
    return np.exp(-(d * d) / (2.0 * tuning.sigma**2))


def quantize_rate(rate: float, n_bits: int) -> np.ndarray:
    """Quantize a rate in [0, 1] to a bipolar n-bit fixed-point code.

    The rate is mapped to the integer level floor(rate * (2^n - 1)) and
    emitted as its n-bit unsigned binary expansion, most significant bit
    first, with bit 0 -> -1 and bit 1 -> +1.
    """
    if n_bits < 1:
        raise ConfigError("n_bits must be >= 1")
    rate = float(rate)
    if rate < 0.0 or rate > 1.0:
        warnings.warn(f"rate {rate:.4f} outside [0, 1], clamping", RuntimeWarning, stacklevel=2)
        rate = min(max(rate, 0.0), 1.0)
    level = int(np.floor(rate * (2**n_bits - 1)))
    shifts = np.arange(n_bits - 1, -1, -1)
    bits = (level >> shifts) & 1
    return np.where(bits == 1, 1.0, -1.0)


def joint_rates(angles, tunings) -> np.ndarray:
    """Concatenated per-neuron Gaussian responses over all joints.

    This is the real-valued pre-quantization profile (length
    n_neurons * n_joints); it doubles as the salience ranking used to
    place touch-driven flips in the observation embedding.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (len(tunings),):
        raise ConfigError(
            f"expected {len(tunings)} joint angles, got shape {angles.shape}"
        )
    return np.concatenate(
        [tuning_response(a, tun) for a, tun in zip(angles, tunings)]
    )


def encode_joints(angles, tunings, n_bits: int) -> np.ndarray:
    """Encode all joint angles into one bipolar place-code vector.

    Concatenates, joint by joint and neuron by neuron, the quantized
    tuning responses. Output length is n_bits * n_neurons * n_joints and
    every element is exactly -1.0 or +1.0.
    """
    rates = joint_rates(angles, tunings)
    levels = np.floor(rates * (2**n_bits - 1)).astype(np.int64)
    shifts = np.arange(n_bits - 1, -1, -1)
    bits = (levels[:, None] >> shifts[None, :]) & 1
    return np.where(bits == 1, 1.0, -1.0).ravel()


class PlaceCodec:
    """Configured encoder from joint-angle vectors to place codes.

    Bundles the per-joint tuning banks with the bit depth so encoding,
    salience extraction and quantization resolution all come from one
    object that can be serialized alongside a trained memory.
    """

    def __init__(self, tunings: list[JointTuning], n_bits: int = 4):
        if not tunings:
            raise ConfigError("at least one joint tuning required")
        if n_bits < 1:
            raise ConfigError("n_bits must be >= 1")
        self.tunings = list(tunings)
        self.n_bits = int(n_bits)

    @property
    def n_joints(self) -> int:
        return len(self.tunings)

    @property
    def n_neurons(self) -> int:
        return self.tunings[0].n_neurons

    @property
    def dimension(self) -> int:
        """Length of the emitted place code."""
        return self.n_bits * sum(t.n_neurons for t in self.tunings)

    @property
    def salience_dimension(self) -> int:
        return sum(t.n_neurons for t in self.tunings)

    @property
    def limits(self) -> np.ndarray:
        return np.array([t.limits for t in self.tunings])

    def encode(self, angles) -> np.ndarray:
        return encode_joints(angles, self.tunings, self.n_bits)

    def rates(self, angles) -> np.ndarray:
        return joint_rates(angles, self.tunings)

    def quantization_resolution(self) -> np.ndarray:
        """Per-joint angle step resolved by the code: range / 2^n_bits."""
        lims = self.limits
        return (lims[:, 1] - lims[:, 0]) / float(2**self.n_bits)

    def to_dict(self) -> dict:
        return {
            "n_bits": self.n_bits,
            "joints": [
                {
                    "limits": [t.limits[0], t.limits[1]],
                    "n_neurons": t.n_neurons,
                    "sigma": t.sigma,
                }
                for t in self.tunings
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlaceCodec":
        tunings = [
            make_tuning(j["limits"], n_neurons=j["n_neurons"], sigma=j["sigma"])
            for j in d["joints"]
        ]
        return cls(tunings, n_bits=d["n_bits"])
