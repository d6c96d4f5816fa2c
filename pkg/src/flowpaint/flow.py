"""Motion sources: Middlebury .flo files, classical block matching, and a
remote estimation service.

Every source answers the same question: given the input sequence and a pair
of indices ``(a, b)``, return the field on ``b``'s grid pointing into ``a``
(so that backward-warping frame ``a`` with it reconstructs ``b``'s content).
File stores key flows by the directed pair (``flow_0003_0007.flo`` relates
source frame 3 to target frame 7) because the pipeline needs both directions
of most pairs and a naming mix-up silently flips motion.
"""

from __future__ import annotations

import base64
import struct
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import requests

from .core import BackendError, DimensionMismatchError, FlowField, FlowFileError, Frame
from .frameio import FrameSequence, encode_frame_png

FLO_MAGIC = 202021.25  # little-endian float32 spelling the bytes "PIEH"
DEFAULT_FLO_PATTERN = "flow_%04d_%04d.flo"


@dataclass(frozen=True)
class FileStore:
    """Pre-computed flows on disk, one .flo per directed (source, target) pair."""

    directory: Path | str
    pattern: str = DEFAULT_FLO_PATTERN

    def path_for(self, a: int, b: int) -> Path:
        return Path(self.directory) / (self.pattern % (a, b))


@dataclass(frozen=True)
class BlockMatcher:
    """Exhaustive integer-displacement SAD matcher (desk-scale flow stand-in)."""

    block_size: int = 8
    search_radius: int = 4

    def __post_init__(self):
        if self.block_size < 1:
            raise ValueError(f"block_size must be >= 1, got {self.block_size}")
        if self.search_radius < 0:
            raise ValueError(f"search_radius must be >= 0, got {self.search_radius}")


@dataclass(frozen=True)
class RemoteEstimator:
    """HTTP flow service speaking the same JSON/base64 envelope as the
    generator backend: two PNG frames in, raw little-endian (u, v) pairs out.

    At most ``max_in_flight`` requests run concurrently per instance.
    """

    endpoint: str
    timeout: float = 30.0
    max_in_flight: int = 4
    _gate: threading.Semaphore = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.max_in_flight < 1:
            raise ValueError(f"max_in_flight must be >= 1, got {self.max_in_flight}")
        object.__setattr__(self, "_gate", threading.Semaphore(self.max_in_flight))


FlowSource = FileStore | BlockMatcher | RemoteEstimator


def read_flo(path: str | Path) -> FlowField:
    """Parse a Middlebury .flo file, bit-exactly."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < 12:
        raise FlowFileError(f"{path.name}: truncated header ({len(blob)} bytes)")
    magic, width, height = struct.unpack("<fii", blob[:12])
    if magic != FLO_MAGIC:
        raise FlowFileError(f"{path.name}: bad magic {magic!r}, expected {FLO_MAGIC}")
    if width <= 0 or height <= 0:
        raise FlowFileError(f"{path.name}: bad dimensions {width}x{height}")
    expected = 12 + width * height * 2 * 4
    if len(blob) < expected:
        raise FlowFileError(
            f"{path.name}: truncated data, {len(blob)} bytes for {width}x{height}")
    data = np.frombuffer(blob, dtype="<f4", count=width * height * 2, offset=12)
    return FlowField(data.reshape(height, width, 2))


def write_flo(field: FlowField, path: str | Path) -> None:
    """Write a field so that read_flo returns it bit-identically."""
    data = np.ascontiguousarray(field.data, dtype="<f4")
    if not np.all(np.isfinite(data)):
        raise FlowFileError("refusing to write non-finite flow values")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<fii", FLO_MAGIC, field.width, field.height))
        fh.write(data.tobytes())


def _block_sums(per_pixel: np.ndarray, block: int) -> np.ndarray:
    """Sum an H x W cost map over a block grid (partial border tiles allowed)."""
    h, w = per_pixel.shape
    ys = np.arange(0, h, block)
    xs = np.arange(0, w, block)
    return np.add.reduceat(np.add.reduceat(per_pixel, ys, axis=0), xs, axis=1)


def block_match(a: Frame, b: Frame, block: int = 8, radius: int = 4) -> FlowField:
    """Estimate the field on ``b``'s grid pointing into ``a``.

    For each block tile of ``b`` the integer displacement (u, v) with
    |u|,|v| <= radius minimizing the sum of absolute differences against
    ``a`` (border-clamped sampling) wins; ties break toward the smallest
    displacement magnitude, then lexicographic (u, v), which pins flat or
    identical inputs to the zero field.
    """
    if (a.height, a.width) != (b.height, b.width):
        raise DimensionMismatchError(
            f"frames differ: {a.width}x{a.height} vs {b.width}x{b.height}")
    h, w = b.height, b.width
    candidates = [(u, v) for u in range(-radius, radius + 1)
                  for v in range(-radius, radius + 1)]
    candidates.sort(key=lambda uv: (uv[0] * uv[0] + uv[1] * uv[1], uv[0], uv[1]))

    ys = np.arange(h)
    xs = np.arange(w)
    sads = np.empty((len(candidates), len(range(0, h, block)), len(range(0, w, block))))
    for ci, (u, v) in enumerate(candidates):
        src_y = np.clip(ys + v, 0, h - 1)
        src_x = np.clip(xs + u, 0, w - 1)
        shifted = a.data[src_y[:, None], src_x[None, :]]
        cost = np.abs(b.data - shifted).sum(axis=2)
        sads[ci] = _block_sums(cost, block)

    # first minimal index in tie-break order = tie-broken winner
    best = np.argmin(sads, axis=0)
    uv_table = np.array(candidates, dtype=np.float32)
    tiles = uv_table[best]  # (tiles_y, tiles_x, 2)
    full = np.repeat(np.repeat(tiles, block, axis=0), block, axis=1)
    return FlowField(full[:h, :w])


def flow_between(src: FlowSource, frame_a: Frame, frame_b: Frame,
                 a: int, b: int) -> FlowField:
    """Field on ``frame_b``'s grid pointing into ``frame_a``."""
    if isinstance(src, FileStore):
        path = src.path_for(a, b)
        if not path.exists():
            raise FlowFileError(f"missing flow file {path.name} in {path.parent}")
        field = read_flo(path)
    elif isinstance(src, BlockMatcher):
        field = block_match(frame_a, frame_b, src.block_size, src.search_radius)
    elif isinstance(src, RemoteEstimator):
        field = _remote_flow(src, frame_a, frame_b)
    else:
        raise TypeError(f"unknown flow source {src!r}")
    if (field.height, field.width) != (frame_b.height, frame_b.width):
        raise DimensionMismatchError(
            f"flow for pair ({a}, {b}) is {field.width}x{field.height}, "
            f"frames are {frame_b.width}x{frame_b.height}")
    return field


def get_flow(src: FlowSource, frames: FrameSequence, a: int, b: int) -> FlowField:
    """Flow for the directed pair (a, b) of ``frames``; see flow_between."""
    if a == b:
        raise ValueError(f"flow pair needs two distinct frames, got ({a}, {b})")
    n = len(frames)
    if not (0 <= a < n and 0 <= b < n):
        raise IndexError(f"pair ({a}, {b}) out of range for {n} frames")
    return flow_between(src, frames[a], frames[b], a, b)


def _remote_flow(src: RemoteEstimator, frame_a: Frame, frame_b: Frame) -> FlowField:
    body = {
        "width": frame_b.width,
        "height": frame_b.height,
        "frame_a_png_b64": base64.b64encode(encode_frame_png(frame_a)).decode("ascii"),
        "frame_b_png_b64": base64.b64encode(encode_frame_png(frame_b)).decode("ascii"),
    }
    url = src.endpoint.rstrip("/") + "/v1/flow"
    try:
        with src._gate:
            resp = requests.post(url, json=body, timeout=src.timeout)
    except requests.Timeout as exc:
        raise BackendError(f"flow service timed out: {url}") from exc
    except requests.RequestException as exc:
        raise BackendError(f"flow service unreachable: {url}: {exc}") from exc
    if resp.status_code != 200:
        raise BackendError(f"flow service returned {resp.status_code}: {resp.text[:200]}")
    try:
        payload = resp.json()
        raw = base64.b64decode(payload["flow_b64"])
    except (ValueError, KeyError) as exc:
        raise BackendError(f"malformed flow response: {exc}") from exc
    expected = frame_b.width * frame_b.height * 2 * 4
    if len(raw) != expected:
        raise BackendError(
            f"flow payload is {len(raw)} bytes, expected {expected}")
    data = np.frombuffer(raw, dtype="<f4").reshape(frame_b.height, frame_b.width, 2)
    return FlowField(data)
