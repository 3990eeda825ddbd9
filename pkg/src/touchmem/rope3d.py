"""Blockwise 3D rotary embedding.

A d-dimensional vector (d divisible by 3) is split into d/3 consecutive
triples and each triple is rotated around a shared axis by the Rodrigues
formula. Block i uses the scaled angle ``omega_i * theta`` with a
log-spaced frequency ladder omega_i = 10^(-i/d), i = 1..d/3, so low
blocks turn almost the full angle and high blocks barely move. Every
block rotation is orthogonal, so the transform preserves Euclidean norm
and inner products shift consistently with angle differences.
"""

import numpy as np

from .errors import ConfigError

__all__ = ["skew", "rodrigues", "block_frequencies", "rotate_blocks", "Rope3D"]

_AXIS_TOL = 1e-9


def skew(axis) -> np.ndarray:
    """Skew-symmetric cross-product matrix [n]x of a 3-vector."""
    x, y, z = np.asarray(axis, dtype=float)
    return np.array(
        [
            [0.0, -z, y],
            [z, 0.0, -x],
            [-y, x, 0.0],
        ]
    )


def _check_axis(axis) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,):
        raise ConfigError(f"rotation axis must be a 3-vector, got shape {axis.shape}")
    if abs(np.linalg.norm(axis) - 1.0) > _AXIS_TOL:
        raise ConfigError(f"rotation axis must be unit length, |axis| = {np.linalg.norm(axis)}")
    return axis


def rodrigues(axis, angle: float) -> np.ndarray:
    """Rotation matrix about a unit axis: I + sin(a) K + (1 - cos(a)) K^2."""
    axis = _check_axis(axis)
    k = skew(axis)
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def block_frequencies(dim: int) -> np.ndarray:
    """Frequency ladder 10^(-i/dim) for block indices i = 1..dim/3.

    Strictly decreasing and positive; ``dim`` is the full vector length.
    """
    if dim % 3 != 0 or dim < 3:
        raise ConfigError(f"dimension must be a positive multiple of 3, got {dim}")
    i = np.arange(1, dim // 3 + 1, dtype=float)
    return 10.0 ** (-i / dim)


def _block_matrices(axis: np.ndarray, theta: float, dim: int) -> np.ndarray:
    """Stacked (dim/3, 3, 3) rotation matrices for all blocks."""
    angles = block_frequencies(dim) * theta
    k = skew(axis)
    k2 = k @ k
    s = np.sin(angles)[:, None, None]
    c = (1.0 - np.cos(angles))[:, None, None]
    return np.eye(3)[None, :, :] + s * k + c * k2


def rotate_blocks(vec, axis, theta: float) -> np.ndarray:
    """Apply the blockwise rotation to a vector (stateless variant)."""
    vec = np.asarray(vec, dtype=float)
    axis = _check_axis(axis)
    if vec.ndim != 1 or vec.size % 3 != 0 or vec.size < 3:
        raise ConfigError(f"vector length must be a positive multiple of 3, got {vec.shape}")
    mats = _block_matrices(axis, float(theta), vec.size)
    return np.einsum("bij,bj->bi", mats, vec.reshape(-1, 3)).ravel()


class Rope3D:
    """Blockwise rotary embedding of a fixed dimension, with caching.

    Recall loops apply the same (axis, theta) many times per tick; the
    stacked block matrices are cached per exact (axis, theta) pair.
    Reads are safe from any thread; entries are only ever added.
    """

    _CACHE_LIMIT = 256

    def __init__(self, dim: int):
        if dim % 3 != 0 or dim < 3:
            raise ConfigError(f"dimension must be a positive multiple of 3, got {dim}")
        self.dim = int(dim)
        self._cache: dict[tuple, np.ndarray] = {}

    def frequencies(self) -> np.ndarray:
        return block_frequencies(self.dim)

    def _matrices(self, axis: np.ndarray, theta: float) -> np.ndarray:
        key = (axis.tobytes(), theta)
        mats = self._cache.get(key)
        if mats is None:
            if len(self._cache) >= self._CACHE_LIMIT:
                self._cache.clear()
            mats = _block_matrices(axis, theta, self.dim)
            self._cache[key] = mats
        return mats

    def rotate(self, vec, axis, theta: float) -> np.ndarray:
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (self.dim,):
            raise ConfigError(f"expected vector of length {self.dim}, got shape {vec.shape}")
        axis = _check_axis(axis)
        mats = self._matrices(axis, float(theta))
        return np.einsum("bij,bj->bi", mats, vec.reshape(-1, 3)).ravel()
