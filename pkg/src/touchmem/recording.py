"""Line-delimited JSON session recordings of raw sensor data.

A recording file is UTF-8 JSONL: the first line is a header object
(format version, joint names and limits, patch geometry, tick period),
every following line is one tick sample carrying the joint angles and
the raw per-cell skin forces of every patch. Storing unprocessed cell
forces keeps the file the ground truth: density and drive are always
re-derived by running the tactile pipeline over the stream, so a
recording made today can be retrained under different pipeline
settings later. Lines are serialized canonically (sorted keys, no
whitespace, repr floats), so loading a file and saving it again
reproduces the input byte for byte.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .memory import canonical_dumps
from .tactile import PatchFrame

__all__ = ["RecordingMeta", "TickSample", "Recording", "RecordingWriter"]

FORMAT_VERSION = 1


@dataclass(frozen=True)
class RecordingMeta:
    """Session header: everything needed to interpret the sample lines."""

    joints: tuple[str, ...]
    limits: tuple[tuple[float, float], ...]
    patches: dict  # patch_id -> {"axis": [x, y, z], "theta_sign": +-1}
    tick_dt: float

    def __post_init__(self):
        if len(self.joints) != len(self.limits):
            raise DataError("joint names and limits must align")
        if self.tick_dt <= 0:
            raise DataError("tick_dt must be positive")
        for pid, info in self.patches.items():
            axis = np.asarray(info["axis"], dtype=float)
            if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > 1e-9:
                raise DataError(f"patch {pid}: axis must be a unit 3-vector")
            if info["theta_sign"] not in (1, -1):
                raise DataError(f"patch {pid}: theta_sign must be +1 or -1")

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "kind": "recording",
            "joints": list(self.joints),
            "limits": [list(lim) for lim in self.limits],
            "patches": {
                pid: {"axis": list(info["axis"]), "theta_sign": info["theta_sign"]}
                for pid, info in self.patches.items()
            },
            "tick_dt": self.tick_dt,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RecordingMeta":
        try:
            if data["version"] != FORMAT_VERSION:
                raise DataError(f"unsupported recording version {data['version']}")
            if data.get("kind") != "recording":
                raise DataError("not a recording header")
            return cls(
                joints=tuple(data["joints"]),
                limits=tuple((float(lo), float(hi)) for lo, hi in data["limits"]),
                patches={
                    pid: {
                        "axis": [float(x) for x in info["axis"]],
                        "theta_sign": int(info["theta_sign"]),
                    }
                    for pid, info in data["patches"].items()
                },
                tick_dt=float(data["tick_dt"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DataError):
                raise
            raise DataError(f"malformed recording header: {exc}") from exc


@dataclass
class TickSample:
    """One recorded tick: pre-move joint angles plus raw cell forces."""

    t: float
    joints: np.ndarray
    patches: dict[str, np.ndarray]  # patch_id -> (n_cells, 3) forces


def _sample_record(sample: TickSample) -> dict:
    return {
        "t": float(sample.t),
        "joints": [float(a) for a in sample.joints],
        "patches": [
            {
                "id": pid,
                "cells": [
                    {"f1": float(c[0]), "f2": float(c[1]), "f3": float(c[2])}
                    for c in cells
                ],
            }
            for pid, cells in sample.patches.items()
        ],
    }


def _parse_sample(record: dict, meta: RecordingMeta, where: str) -> TickSample:
    try:
        t = float(record["t"])
        joints = np.asarray(record["joints"], dtype=float)
        raw_patches = record["patches"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{where}: malformed sample: {exc}") from exc
    if joints.shape != (len(meta.joints),):
        raise DataError(f"{where}: expected {len(meta.joints)} joint angles")
    patches: dict[str, np.ndarray] = {}
    for entry in raw_patches:
        try:
            pid = entry["id"]
            cells = np.array(
                [[float(c["f1"]), float(c["f2"]), float(c["f3"])] for c in entry["cells"]]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{where}: malformed patch entry: {exc}") from exc
        if pid not in meta.patches:
            raise DataError(f"{where}: unknown patch {pid!r}")
        if pid in patches:
            raise DataError(f"{where}: duplicate patch {pid!r}")
        if cells.size == 0 or not np.all(np.isfinite(cells)):
            raise DataError(f"{where}: patch {pid!r} needs finite cell forces")
        patches[pid] = cells
    if not math.isfinite(t) or not np.all(np.isfinite(joints)):
        raise DataError(f"{where}: non-finite sample values")
    return TickSample(t=t, joints=joints, patches=patches)


@dataclass
class Recording:
    """In-memory session: the raw tick samples plus their header."""

    meta: RecordingMeta
    samples: list[TickSample] = field(default_factory=list)

    @property
    def states(self) -> list[tuple[float, np.ndarray]]:
        """The joint-state stream, as consumed by bank training."""
        return [(s.t, s.joints) for s in self.samples]

    def frames(self, sample: TickSample) -> list[PatchFrame]:
        """Reconstruct the sensor frames of one sample."""
        out = []
        for pid, cells in sample.patches.items():
            info = self.meta.patches[pid]
            out.append(
                PatchFrame(
                    timestamp=sample.t,
                    patch_id=pid,
                    cells=cells,
                    axis=np.asarray(info["axis"], dtype=float),
                    theta_sign=info["theta_sign"],
                )
            )
        return out

    def to_lines(self) -> list[str]:
        lines = [canonical_dumps(self.meta.to_dict())]
        lines += [canonical_dumps(_sample_record(s)) for s in self.samples]
        return lines

    def save(self, path):
        with open(path, "w") as fh:
            for line in self.to_lines():
                fh.write(line)
                fh.write("\n")

    @classmethod
    def load(cls, path) -> "Recording":
        try:
            with open(path) as fh:
                lines = [ln for ln in (raw.strip() for raw in fh) if ln]
        except OSError as exc:
            raise DataError(f"cannot read recording {path}: {exc}") from exc
        if not lines:
            raise DataError(f"empty recording {path}")
        try:
            header = json.loads(lines[0])
            records = [json.loads(ln) for ln in lines[1:]]
        except json.JSONDecodeError as exc:
            raise DataError(f"malformed JSON in {path}: {exc}") from exc
        if not isinstance(header, dict):
            raise DataError(f"{path}: recording header must be a JSON object")
        meta = RecordingMeta.from_dict(header)
        rec = cls(meta=meta)
        prev_t = -np.inf
        for i, record in enumerate(records, start=2):
            sample = _parse_sample(record, meta, f"{path}:{i}")
            if sample.t <= prev_t:
                raise DataError(f"{path}:{i}: timestamps must be strictly increasing")
            prev_t = sample.t
            rec.samples.append(sample)
        if not rec.samples:
            raise DataError(f"{path}: recording holds no samples")
        return rec


class RecordingWriter:
    """Streaming writer: header on open, one canonical line per tick."""

    def __init__(self, path, meta: RecordingMeta):
        self.meta = meta
        self._fh = open(path, "w")
        self._fh.write(canonical_dumps(meta.to_dict()))
        self._fh.write("\n")
        self._last_t = -np.inf

    def write_sample(self, sample: TickSample):
        if sample.t <= self._last_t:
            raise DataError("sample timestamps must be strictly increasing")
        for pid in sample.patches:
            if pid not in self.meta.patches:
                raise DataError(f"unknown patch {pid!r}")
        self._last_t = sample.t
        self._fh.write(canonical_dumps(_sample_record(sample)))
        self._fh.write("\n")

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False
