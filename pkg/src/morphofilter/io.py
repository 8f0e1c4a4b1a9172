"""Persistence: PGM (P2/P5) images, raw volumes with a JSON sidecar, DOT export."""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .image import GrayImage
from .tree import ComponentTree


class ParseError(ValueError):
    """Malformed input file; carries the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


_WHITESPACE = b" \t\r\n\v\f"


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next PNM header token, skipping whitespace and # comments."""
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c in b"#":
            while pos < n and data[pos:pos + 1] != b"\n":
                pos += 1
        elif c in _WHITESPACE:
            pos += 1
        else:
            break
    if pos >= n:
        raise ParseError("unexpected end of header", pos)
    start = pos
    while pos < n and data[pos:pos + 1] not in _WHITESPACE and data[pos:pos + 1] != b"#":
        pos += 1
    return data[start:pos], pos


def _int_token(data: bytes, pos: int, what: str) -> tuple[int, int]:
    tok, end = _next_token(data, pos)
    try:
        return int(tok), end
    except ValueError:
        raise ParseError(f"expected integer {what}, got {tok!r}", pos) from None


def read_pgm(path: str | os.PathLike) -> GrayImage:
    """Read a P2 (ASCII) or P5 (binary) PGM with maxval 255 or 65535."""
    data = Path(path).read_bytes()
    magic, pos = _next_token(data, 0)
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"not a P2/P5 PGM file (magic {magic!r})", 0)
    width, pos = _int_token(data, pos, "width")
    height, pos = _int_token(data, pos, "height")
    maxval, pos = _int_token(data, pos, "maxval")
    if maxval not in (255, 65535):
        raise ParseError(f"unsupported maxval {maxval}, need 255 or 65535", pos)
    if width < 1 or height < 1:
        raise ParseError(f"bad dimensions {width}x{height}", pos)
    bit_depth = 8 if maxval == 255 else 16
    count = width * height

    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        itemsize = 1 if bit_depth == 8 else 2
        need = count * itemsize
        payload = data[pos:pos + need]
        if len(payload) < need:
            raise ParseError(
                f"truncated payload: need {need} bytes, have {len(payload)}", pos)
        # PNM stores 16-bit samples big-endian
        dtype = np.uint8 if bit_depth == 8 else np.dtype(">u2")
        values = np.frombuffer(payload, dtype=dtype).astype(np.int64)
    else:
        try:
            text = data[pos:].decode("ascii")
        except UnicodeDecodeError as exc:
            raise ParseError("non-ASCII data in P2 payload", pos + exc.start) from None
        tokens = text.split()
        if len(tokens) < count:
            raise ParseError(
                f"truncated payload: need {count} samples, have {len(tokens)}", pos)
        try:
            values = np.array([int(t) for t in tokens[:count]], dtype=np.int64)
        except ValueError:
            raise ParseError("non-integer sample in P2 payload", pos) from None
    if values.size and (values.min() < 0 or values.max() > maxval):
        raise ParseError(f"sample outside [0, {maxval}]", pos)
    return GrayImage((width, height, 1), values, bit_depth)


def write_pgm(image: GrayImage, path: str | os.PathLike, ascii_format: bool = False) -> None:
    """Write a 2D image as P5 (default) or P2. Round-trips bit-exactly."""
    if image.is_3d:
        raise ValueError("PGM holds 2D images only; use write_volume for 3D")
    w, h, _ = image.dims
    maxval = image.max_level
    header = f"{'P2' if ascii_format else 'P5'}\n{w} {h}\n{maxval}\n".encode()
    with open(path, "wb") as f:
        f.write(header)
        if ascii_format:
            rows = image.values.reshape(h, w)
            for row in rows:
                f.write((" ".join(str(int(v)) for v in row) + "\n").encode())
        else:
            dtype = np.uint8 if image.bit_depth == 8 else np.dtype(">u2")
            f.write(image.values.astype(dtype).tobytes())


def read_volume(data_path: str | os.PathLike,
                header_path: str | os.PathLike) -> GrayImage:
    """Read a raw little-endian voxel file described by a JSON sidecar."""
    try:
        header = json.loads(Path(header_path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON sidecar: {exc.msg}", exc.pos) from None
    for key in ("dims", "bit_depth"):
        if key not in header:
            raise ParseError(f"sidecar missing required field \"{key}\"")
    dims = header["dims"]
    bit_depth = header["bit_depth"]
    if not (isinstance(dims, list) and len(dims) == 3):
        raise ParseError("sidecar field \"dims\" must be a 3-element list")
    if bit_depth not in (8, 16):
        raise ParseError(f"sidecar field \"bit_depth\" must be 8 or 16, got {bit_depth}")
    payload = Path(data_path).read_bytes()
    expected = dims[0] * dims[1] * dims[2] * (bit_depth // 8)
    if len(payload) != expected:
        raise ParseError(
            f"payload length {len(payload)} != expected {expected} for dims {dims}",
            min(len(payload), expected))
    dtype = np.uint8 if bit_depth == 8 else np.dtype("<u2")
    values = np.frombuffer(payload, dtype=dtype).astype(np.int64)
    return GrayImage(tuple(dims), values, bit_depth)


def write_volume(image: GrayImage, data_path: str | os.PathLike,
                 header_path: str | os.PathLike,
                 spacing: tuple[float, float, float] | None = None) -> None:
    dtype = np.uint8 if image.bit_depth == 8 else np.dtype("<u2")
    Path(data_path).write_bytes(image.values.astype(dtype).tobytes())
    header = {"dims": list(image.dims), "bit_depth": image.bit_depth}
    if spacing is not None:
        header["spacing"] = list(spacing)
    Path(header_path).write_text(json.dumps(header, indent=2) + "\n")


def export_dot(tree: ComponentTree) -> str:
    """DOT digraph: one node per tree node ("id@level area=a"), one edge
    child -> parent per non-root node, ordered by node id."""
    lines = ["digraph component_tree {"]
    for i in range(tree.num_nodes):
        lines.append(
            f'  n{i} [label="{i}@{int(tree.node_level[i])} area={int(tree.node_area[i])}"];')
    for i in range(tree.num_nodes):
        if i != tree.root:
            lines.append(f"  n{i} -> n{int(tree.node_parent[i])};")
    lines.append("}")
    return "\n".join(lines) + "\n"
