"""Grayscale image domain: raster container, connectivity, neighbor enumeration."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class DomainError(ValueError):
    """Input violates a domain precondition (bad index, bad value range, ...)."""


class ConfigurationError(ValueError):
    """Incompatible configuration (connectivity vs dims, bit-depth mismatch, ...)."""


class Connectivity(Enum):
    """Pixel adjacency. 4/8 are 2D-only, 6/26 are 3D-only."""

    C4 = 4
    C8 = 8
    C6 = 6
    C26 = 26

    @property
    def is_3d(self) -> bool:
        return self in (Connectivity.C6, Connectivity.C26)

    def offsets(self) -> np.ndarray:
        """(k, 3) array of (dx, dy, dz) deltas, sorted by linear offset."""
        cached = _OFFSET_CACHE.get(self)
        if cached is not None:
            return cached
        if self is Connectivity.C4:
            deltas = [(0, -1, 0), (-1, 0, 0), (1, 0, 0), (0, 1, 0)]
        elif self is Connectivity.C8:
            deltas = [(dx, dy, 0)
                      for dy in (-1, 0, 1) for dx in (-1, 0, 1)
                      if (dx, dy) != (0, 0)]
        elif self is Connectivity.C6:
            deltas = [(0, 0, -1), (0, -1, 0), (-1, 0, 0),
                      (1, 0, 0), (0, 1, 0), (0, 0, 1)]
        else:
            deltas = [(dx, dy, dz)
                      for dz in (-1, 0, 1) for dy in (-1, 0, 1) for dx in (-1, 0, 1)
                      if (dx, dy, dz) != (0, 0, 0)]
        arr = np.array(deltas, dtype=np.int64)
        arr.flags.writeable = False
        _OFFSET_CACHE[self] = arr
        return arr


_OFFSET_CACHE: dict[Connectivity, np.ndarray] = {}


def _dtype_for(bit_depth: int):
    return np.uint8 if bit_depth == 8 else np.uint16


@dataclass(frozen=True)
class GrayImage:
    """Integer 2D/3D grayscale raster.

    ``dims`` is (width, height, depth), depth = 1 for 2D. ``values`` is a flat
    array in x-fastest order: linear index = x + width * (y + height * z).
    """

    dims: tuple[int, int, int]
    values: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        w, h, d = self.dims
        if w < 1 or h < 1 or d < 1:
            raise DomainError(f"dims must all be >= 1, got {self.dims}")
        if self.bit_depth not in (8, 16):
            raise DomainError(f"bit_depth must be 8 or 16, got {self.bit_depth}")
        vals = np.asarray(self.values)
        if vals.size != w * h * d:
            raise DomainError(
                f"values length {vals.size} != product of dims {w * h * d}")
        if vals.size and (vals.min() < 0 or vals.max() > self.max_level):
            raise DomainError(
                f"values outside [0, {self.max_level}] for bit_depth {self.bit_depth}")
        vals = np.ascontiguousarray(vals.reshape(-1), dtype=_dtype_for(self.bit_depth))
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "dims", (int(w), int(h), int(d)))

    @property
    def max_level(self) -> int:
        return (1 << self.bit_depth) - 1

    @property
    def num_pixels(self) -> int:
        w, h, d = self.dims
        return w * h * d

    @property
    def is_3d(self) -> bool:
        return self.dims[2] > 1

    @classmethod
    def from_array(cls, arr: np.ndarray, bit_depth: int = 8) -> "GrayImage":
        """Build from a 2D (rows, cols) or 3D (planes, rows, cols) array."""
        arr = np.asarray(arr)
        if arr.ndim == 2:
            h, w = arr.shape
            dims = (w, h, 1)
        elif arr.ndim == 3:
            d, h, w = arr.shape
            dims = (w, h, d)
        else:
            raise DomainError(f"expected 2D or 3D array, got ndim={arr.ndim}")
        return cls(dims, arr.reshape(-1), bit_depth)

    def to_array(self) -> np.ndarray:
        """Numpy view shaped (depth, height, width) for 3D, (height, width) for 2D."""
        w, h, d = self.dims
        a = self.values.reshape(d, h, w)
        return a[0] if d == 1 else a


def default_connectivity(image: GrayImage) -> Connectivity:
    return Connectivity.C6 if image.is_3d else Connectivity.C4


def check_connectivity(image: GrayImage, conn: Connectivity) -> None:
    if conn.is_3d != image.is_3d:
        raise ConfigurationError(
            f"{conn.value}-connectivity incompatible with dims {image.dims}")


def neighbors(image: GrayImage, index: int, conn: Connectivity) -> list[int]:
    """In-bounds neighbors of a linear pixel index, ascending, no duplicates."""
    check_connectivity(image, conn)
    w, h, d = image.dims
    if not 0 <= index < image.num_pixels:
        raise DomainError(f"pixel index {index} out of range [0, {image.num_pixels})")
    x = index % w
    y = (index // w) % h
    z = index // (w * h)
    out = []
    for dx, dy, dz in conn.offsets():
        nx, ny, nz = x + dx, y + dy, z + dz
        if 0 <= nx < w and 0 <= ny < h and 0 <= nz < d:
            out.append(int(nx + w * (ny + h * nz)))
    return out


def negate(image: GrayImage) -> GrayImage:
    """Graylevel complement: v -> (2^bit_depth - 1) - v. Involution."""
    vals = image.max_level - image.values.astype(np.int64)
    return GrayImage(image.dims, vals, image.bit_depth)
