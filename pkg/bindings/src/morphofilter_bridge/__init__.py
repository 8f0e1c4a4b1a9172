"""In-process bridge onto the morphofilter toolkit.

Exposes the filtering and metric entry points directly on numpy arrays so
training pipelines can skip file I/O. Semantics are copy-in/copy-out: caller
buffers are never aliased or mutated, and results are freshly owned arrays
bit-identical to what the morphofilter CLI produces for the same inputs.
"""

from __future__ import annotations

import numpy as np

from morphofilter import (
    GrayImage,
    LabelMap,
    TreeKind,
    dsaif_pair,
    error_diversity,
    parse_descriptor,
    structure_aware_filter,
)

__all__ = [
    "BridgeInputError",
    "bridge_dsaif_pair",
    "bridge_structure_filter",
    "bridge_error_diversity",
]

__version__ = "0.1.0"

_DEPTH_BY_DTYPE = {np.dtype(np.uint8): 8, np.dtype(np.uint16): 16}


class BridgeInputError(TypeError):
    """Caller array violates a bridge constraint (dtype, layout, rank)."""


def _check_array(arr, name: str) -> np.ndarray:
    if not isinstance(arr, np.ndarray):
        raise BridgeInputError(f"{name} must be a numpy ndarray, got {type(arr).__name__}")
    if arr.dtype not in _DEPTH_BY_DTYPE:
        raise BridgeInputError(
            f"{name} must have dtype uint8 or uint16, got {arr.dtype}")
    if arr.ndim not in (2, 3):
        raise BridgeInputError(f"{name} must be 2D or 3D, got ndim={arr.ndim}")
    if not arr.flags.c_contiguous:
        raise BridgeInputError(f"{name} must be C-contiguous")
    return arr


def _to_image(arr: np.ndarray, name: str) -> GrayImage:
    arr = _check_array(arr, name)
    # copy-in: GrayImage freezes its own buffer, caller's stays untouched
    return GrayImage.from_array(arr.copy(), _DEPTH_BY_DTYPE[arr.dtype])


def _to_array(image: GrayImage) -> np.ndarray:
    return np.array(image.to_array())  # copy-out, writeable


def bridge_dsaif_pair(array: np.ndarray, tau: int,
                      transform_a: str = "identity",
                      transform_b: str = "identity",
                      seed: int | None = None,
                      assign_mode: str = "fixed"):
    """Dual filtered views of one array.

    Transforms are textual descriptors ("identity", "gamma:G", "bezier:Z").
    Returns (view_a, view_b, assignment) where assignment is "a=usaif" or
    "b=usaif".
    """
    image = _to_image(array, "array")
    ta = parse_descriptor(transform_a, image.bit_depth)
    tb = parse_descriptor(transform_b, image.bit_depth)
    pair = dsaif_pair(image, tau, ta, tb, seed=seed, assignment_mode=assign_mode)
    return _to_array(pair.view_a), _to_array(pair.view_b), pair.assignment


def bridge_structure_filter(array: np.ndarray, tau: int, kind: str) -> np.ndarray:
    """Single filtered view: kind is "usaif" (Max-tree) or "lsaif" (Min-tree)."""
    if kind not in ("usaif", "lsaif"):
        raise ValueError(f"kind must be usaif or lsaif, got {kind!r}")
    image = _to_image(array, "array")
    tree_kind = TreeKind.MAX if kind == "usaif" else TreeKind.MIN
    return _to_array(structure_aware_filter(image, tau, tree_kind))


def bridge_error_diversity(pred1: np.ndarray, pred2: np.ndarray,
                           gt: np.ndarray) -> float:
    """Dice overlap of the two predictions' error sets against gt."""
    maps = []
    for arr, name in ((pred1, "pred1"), (pred2, "pred2"), (gt, "gt")):
        img = _to_image(arr, name)
        maps.append(LabelMap(img.dims, img.values))
    return error_diversity(*maps)
