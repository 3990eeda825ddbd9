"""Hetero-associative sequential memory over bipolar place codes.

Each stored association is a column pair: a bound key (elementwise
product of the joint-state place code and the tactile observation
embedding) in the key matrix M, and the raw next-sample joint angles in
the value matrix S. Recall projects a query key onto the stored keys,
turns similarities into softmax weights sharpened by beta, and blends
the stored next states:

    w = softmax(beta * M^T q)        d = S w

With beta large this reduces to nearest-key lookup; with beta small it
interpolates across the bank. The weight entropy is reported as a
confidence diagnostic (0 for a one-hot match).
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .placecode import PlaceCodec, make_tuning
from .rope3d import Rope3D
from .tactile import TactileFeature, build_embedding

__all__ = [
    "bind",
    "softmax",
    "weight_entropy",
    "Decision",
    "AssociationEncoder",
    "MemoryBank",
    "pair_samples",
    "decision_to_command",
]

FORMAT_VERSION = 1


def bind(state_code: np.ndarray, observation: np.ndarray) -> np.ndarray:
    """Elementwise binding of a state code with an observation embedding.

    For bipolar inputs the product is its own inverse: binding the
    result with either factor recovers the other exactly.
    """
    a = np.asarray(state_code, dtype=float)
    b = np.asarray(observation, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a * b


def softmax(scores: np.ndarray, beta: float) -> np.ndarray:
    """Numerically stable softmax of beta * scores (max subtracted)."""
    z = beta * np.asarray(scores, dtype=float)
    z = z - np.max(z)
    e = np.exp(z)
    return e / np.sum(e)


def weight_entropy(weights: np.ndarray) -> float:
    """Shannon entropy (nats) of a weight distribution; 0 log 0 := 0."""
    w = np.asarray(weights, dtype=float)
    nz = w[w > 0]
    # + 0.0 keeps a one-hot distribution from reporting -0.0
    return float(-np.sum(nz * np.log(nz)) + 0.0)


@dataclass(frozen=True)
class Decision:
    """One recall outcome: blended target angles plus diagnostics.

    ``target_angles`` is the weighted blend of stored next states;
    ``displacement`` is that blend minus the blend of the poses the
    matched columns were recorded at. Commands apply the displacement
    to the live pose: at an exact one-hot match the two formulations
    coincide, and when the place code aliases nearby poses onto one
    key (its cells are coarser than a slow sweep's per-tick motion)
    the displacement still carries the right velocity while the
    absolute blend would park the arm at the cell's mean.
    """

    target_angles: np.ndarray
    displacement: np.ndarray
    weights: np.ndarray
    entropy: float
    best_index: int


class AssociationEncoder:
    """Joint state and tactile observation to bound key vectors.

    Owns the place codec and the rotary embedding; everything needed to
    rebuild it travels with a saved memory bank so recall after a
    round-trip uses byte-identical encodings.
    """

    def __init__(self, codec: PlaceCodec, rope: Rope3D | None = None):
        self.codec = codec
        self.rope = rope or Rope3D(codec.dimension)
        if self.rope.dim != codec.dimension:
            raise ValueError(
                f"rotation dimension {self.rope.dim} != code dimension {codec.dimension}"
            )

    @property
    def dimension(self) -> int:
        return self.codec.dimension

    def state_code(self, angles: np.ndarray) -> np.ndarray:
        return self.codec.encode(angles)

    def observation(self, feature: TactileFeature, angles: np.ndarray) -> np.ndarray:
        """Tactile embedding; salience comes from the current pose rates."""
        salience = self.codec.rates(angles)
        return build_embedding(
            feature.rho,
            salience,
            feature.axis,
            feature.theta_sign,
            self.codec.n_bits,
            self.rope,
        )

    def key(self, angles: np.ndarray, feature: TactileFeature) -> np.ndarray:
        return bind(self.state_code(angles), self.observation(feature, angles))

    def to_dict(self) -> dict:
        return self.codec.to_dict()

    @classmethod
    def from_dict(cls, data: dict) -> "AssociationEncoder":
        return cls(PlaceCodec.from_dict(data))

    @classmethod
    def default(cls, limits, n_neurons: int = 10, n_bits: int = 4) -> "AssociationEncoder":
        tunings = tuple(make_tuning(lim, n_neurons) for lim in limits)
        return cls(PlaceCodec(tunings, n_bits))


class MemoryBank:
    """Column store of bound keys, recorded poses and next joint states.

    ``patch_id`` and ``beta`` are advisory metadata: the patch the bank
    was trained for and the recall temperature it was tuned at. Neither
    constrains queries.
    """

    def __init__(
        self,
        encoder: AssociationEncoder,
        keys: np.ndarray,
        values: np.ndarray,
        anchors: np.ndarray,
        patch_id: str | None = None,
        beta: float | None = None,
    ):
        keys = np.asarray(keys, dtype=float)
        values = np.asarray(values, dtype=float)
        anchors = np.asarray(anchors, dtype=float)
        if keys.ndim != 2 or values.ndim != 2:
            raise DataError("keys and values must be 2-d column stores")
        if keys.shape[1] != values.shape[1]:
            raise DataError(
                f"column count mismatch: {keys.shape[1]} keys vs {values.shape[1]} values"
            )
        if anchors.shape != values.shape:
            raise DataError(
                f"anchor shape {anchors.shape} != value shape {values.shape}"
            )
        if keys.shape[0] != encoder.dimension:
            raise DataError(
                f"key dimension {keys.shape[0]} != encoder dimension {encoder.dimension}"
            )
        if values.shape[0] != encoder.codec.n_joints:
            raise DataError(
                f"value rows {values.shape[0]} != joint count {encoder.codec.n_joints}"
            )
        self.encoder = encoder
        self.keys = keys
        self.values = values
        self.anchors = anchors
        self.patch_id = patch_id
        self.beta = None if beta is None else float(beta)

    @property
    def size(self) -> int:
        return self.keys.shape[1]

    def require_encoder(self, encoder: AssociationEncoder):
        """Hard check that this bank answers queries from ``encoder``."""
        if self.encoder.to_dict() != encoder.to_dict():
            raise DataError(
                "bank was trained with a different encoder configuration"
            )

    @classmethod
    def train(
        cls,
        encoder: AssociationEncoder,
        states: list[tuple[float, np.ndarray]],
        features: list[TactileFeature],
        max_gap: float | None = None,
        patch_id: str | None = None,
        beta: float | None = None,
    ) -> "MemoryBank":
        """Build a bank from a recorded state stream and tactile stream.

        Consecutive state samples (s_k, s_{k+1}) define the columns:
        the key binds s_k's place code with the tactile observation
        paired to s_k's timestamp, the value is s_{k+1} verbatim. The
        last state sample has no successor and terminates the bank.
        """
        if len(states) < 2:
            raise DataError("need at least two state samples to form a transition")
        if not features:
            raise DataError("empty tactile stream")
        paired = pair_samples(states, features, max_gap)
        n_cols = len(states) - 1
        keys = np.empty((encoder.dimension, n_cols))
        values = np.empty((encoder.codec.n_joints, n_cols))
        anchors = np.empty((encoder.codec.n_joints, n_cols))
        for k in range(n_cols):
            _, angles = states[k]
            feature = paired[k]
            if feature is None:
                raise DataError(
                    f"no tactile sample within the pairing gap of state {k}"
                )
            keys[:, k] = encoder.key(angles, feature)
            anchors[:, k] = angles
            values[:, k] = states[k + 1][1]
        return cls(encoder, keys, values, anchors, patch_id=patch_id, beta=beta)

    @classmethod
    def merge(cls, banks: list["MemoryBank"]) -> "MemoryBank":
        """Concatenate column stores trained with the same encoder setup.

        Metadata survives only when it agrees across all parts.
        """
        if not banks:
            raise DataError("nothing to merge")
        first = banks[0]
        ref = first.encoder.to_dict()
        for b in banks[1:]:
            if b.encoder.to_dict() != ref:
                raise DataError("cannot merge banks with different encoders")
        patch_ids = {b.patch_id for b in banks}
        betas = {b.beta for b in banks}
        return cls(
            first.encoder,
            np.hstack([b.keys for b in banks]),
            np.hstack([b.values for b in banks]),
            np.hstack([b.anchors for b in banks]),
            patch_id=patch_ids.pop() if len(patch_ids) == 1 else None,
            beta=betas.pop() if len(betas) == 1 else None,
        )

    def recall(self, angles: np.ndarray, feature: TactileFeature, beta: float) -> Decision:
        if beta <= 0:
            raise ValueError("beta must be positive")
        q = self.encoder.key(angles, feature)
        scores = self.keys.T @ q
        w = softmax(scores, beta)
        target = self.values @ w
        return Decision(
            target_angles=target,
            displacement=target - self.anchors @ w,
            weights=w,
            entropy=weight_entropy(w),
            best_index=int(np.argmax(w)),
        )

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "kind": "memory_bank",
            "dims": {
                "d": self.keys.shape[0],
                "k": self.size,
                "n_joints": self.values.shape[0],
            },
            "patch_id": self.patch_id,
            "beta": self.beta,
            "encoder": self.encoder.to_dict(),
            "keys": self.keys.tolist(),
            "values": self.values.tolist(),
            "anchors": self.anchors.tolist(),
        }

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(canonical_dumps(self.to_dict()))
            fh.write("\n")

    @classmethod
    def from_dict(cls, data: dict) -> "MemoryBank":
        try:
            version = data["version"]
            if version != FORMAT_VERSION:
                raise DataError(f"unsupported bank version {version}")
            if data.get("kind") != "memory_bank":
                raise DataError("not a memory bank payload")
            encoder = AssociationEncoder.from_dict(data["encoder"])
            bank = cls(
                encoder,
                np.array(data["keys"]),
                np.array(data["values"]),
                np.array(data["anchors"]),
                patch_id=data["patch_id"],
                beta=data["beta"],
            )
            dims = data["dims"]
            stated = (int(dims["d"]), int(dims["k"]), int(dims["n_joints"]))
            actual = (bank.keys.shape[0], bank.size, bank.values.shape[0])
            if stated != actual:
                raise DataError(
                    f"stated dimensions {stated} do not match stored matrices {actual}"
                )
            return bank
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed memory bank payload: {exc}") from exc

    @classmethod
    def load(cls, path) -> "MemoryBank":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read memory bank {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise DataError("memory bank payload must be a JSON object")
        return cls.from_dict(data)


def canonical_dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, no whitespace.

    Floats go through repr (shortest round-trip form), so equal arrays
    always serialize to identical bytes.
    """
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def pair_samples(
    states: list[tuple[float, np.ndarray]],
    features: list[TactileFeature],
    max_gap: float | None = None,
) -> list[TactileFeature | None]:
    """Nearest-timestamp tactile feature for each state sample.

    Ties split toward the earlier feature. With max_gap set, a state
    whose nearest feature is farther than max_gap pairs to None.
    """
    times = np.array([f.timestamp for f in features])
    if np.any(np.diff(times) < 0):
        raise DataError("tactile stream timestamps must be non-decreasing")
    out: list[TactileFeature | None] = []
    for t, _ in states:
        idx = int(np.searchsorted(times, t))
        best = None
        if idx > 0:
            best = idx - 1
        if idx < len(times):
            if best is None or abs(times[idx] - t) < abs(times[best] - t):
                best = idx
        gap = abs(times[best] - t)
        if max_gap is not None and gap > max_gap:
            out.append(None)
        else:
            out.append(features[best])
    return out


def decision_to_command(
    decision: Decision,
    current_angles: np.ndarray,
    max_step,
    limits: list[tuple[float, float]],
) -> np.ndarray:
    """Rate-limited, limit-clamped joint command from a recall outcome.

    The recalled displacement is applied to the live pose, then clipped
    to the per-tick step bound and the joint limits.
    """
    current = np.asarray(current_angles, dtype=float)
    delta = np.clip(decision.displacement, -max_step, max_step)
    command = current + delta
    lo = np.array([l for l, _ in limits])
    hi = np.array([h for _, h in limits])
    return np.clip(command, lo, hi)
