"""Monotone graylevel transforms: gamma correction and a cubic Bezier family,
realized as nondecreasing lookup tables, plus random sampling policies."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .image import ConfigurationError, DomainError, GrayImage

BEZIER_Z_CHOICES = (0.0, 0.5, 0.75)
GAMMA_RANGE = (0.5, 1.5)


@dataclass(frozen=True)
class MonotoneTransform:
    """Nondecreasing graylevel lookup table covering a full bit-depth range."""

    lut: np.ndarray
    bit_depth: int
    descriptor: str

    def __post_init__(self):
        L = (1 << self.bit_depth) - 1
        lut = np.asarray(self.lut, dtype=np.int64)
        if lut.size != L + 1:
            raise DomainError(f"lut must have {L + 1} entries, got {lut.size}")
        if lut.min() < 0 or lut.max() > L:
            raise DomainError(f"lut entries outside [0, {L}]")
        if np.any(np.diff(lut) < 0):
            raise DomainError("lut must be nondecreasing")
        lut = lut.copy()
        lut.flags.writeable = False
        object.__setattr__(self, "lut", lut)


def _round_half_up(v: np.ndarray) -> np.ndarray:
    return np.floor(v + 0.5).astype(np.int64)


def identity_lut(bit_depth: int = 8) -> MonotoneTransform:
    L = (1 << bit_depth) - 1
    return MonotoneTransform(np.arange(L + 1), bit_depth, "identity")


def gamma_lut(gamma: float, bit_depth: int = 8) -> MonotoneTransform:
    """lut[i] = round((i / L)^gamma * L)."""
    if gamma <= 0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    L = (1 << bit_depth) - 1
    i = np.arange(L + 1, dtype=np.float64)
    lut = _round_half_up((i / L) ** gamma * L)
    return MonotoneTransform(np.clip(lut, 0, L), bit_depth, f"gamma:{gamma:g}")


def bezier_lut(z: float, bit_depth: int = 8) -> MonotoneTransform:
    """Cubic Bezier through (-1,-1), (-z, z), (z, -z), (1,1), sampled densely
    in t, interpolated in x, quantized, and made monotone by running maximum."""
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"bezier z must be in [0, 1], got {z}")
    L = (1 << bit_depth) - 1
    t = np.linspace(0.0, 1.0, 4 * (L + 1))
    b0 = (1 - t) ** 3
    b1 = 3 * (1 - t) ** 2 * t
    b2 = 3 * (1 - t) * t ** 2
    b3 = t ** 3
    xs = b0 * -1.0 + b1 * -z + b2 * z + b3 * 1.0
    ys = b0 * -1.0 + b1 * z + b2 * -z + b3 * 1.0
    x_in = 2.0 * np.arange(L + 1) / L - 1.0
    y = np.interp(x_in, xs, ys)
    lut = np.clip(_round_half_up((y + 1.0) / 2.0 * L), 0, L)
    lut = np.maximum.accumulate(lut)
    lut[0], lut[L] = 0, L
    return MonotoneTransform(lut, bit_depth, f"bezier:{z:g}")


def apply_transform(image: GrayImage, transform: MonotoneTransform) -> GrayImage:
    if transform.bit_depth != image.bit_depth:
        raise ConfigurationError(
            f"transform bit_depth {transform.bit_depth} != image {image.bit_depth}")
    return GrayImage(image.dims, transform.lut[image.values], image.bit_depth)


def sample_transform(rng_seed: int, policy: str,
                     bit_depth: int = 8) -> MonotoneTransform:
    """Seeded random draw: "gamma-range" draws gamma uniformly from [0.5, 1.5];
    "bezier-set" draws z from {0, 0.5, 0.75}."""
    rng = random.Random(rng_seed)
    if policy == "gamma-range":
        return gamma_lut(rng.uniform(*GAMMA_RANGE), bit_depth)
    if policy == "bezier-set":
        return bezier_lut(rng.choice(BEZIER_Z_CHOICES), bit_depth)
    raise DomainError(f"unknown sampling policy {policy!r}")


def parse_descriptor(text: str, bit_depth: int = 8) -> MonotoneTransform:
    """Parse the CLI text form: "identity", "gamma:<float>" or "bezier:<float>"."""
    text = text.strip()
    if text == "identity":
        return identity_lut(bit_depth)
    kind, sep, arg = text.partition(":")
    if sep and kind == "gamma":
        return gamma_lut(float(arg), bit_depth)
    if sep and kind == "bezier":
        return bezier_lut(float(arg), bit_depth)
    raise ConfigurationError(f"unrecognized transform descriptor {text!r}")
