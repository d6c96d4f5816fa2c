"""Reading and writing frame sequences and grayscale debug maps.

Frames live on disk as 8-bit RGB PNGs named by a zero-padded index pattern
(default ``frame_%04d.png``). Samples are mapped to [0, 1] on read by
dividing by 255 and quantized on write with round-half-up, so a write/read
round trip moves every sample by at most 1/255.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from io import BytesIO
from pathlib import Path

import numpy as np
from PIL import Image

from .core import (
    DecodeError,
    DimensionMismatchError,
    Frame,
    MissingFramesError,
    ScalarField,
)

DEFAULT_PATTERN = "frame_%04d.png"

_FIELD_RE = re.compile(r"%0?(\d*)d")


@dataclass(frozen=True)
class FrameSequence:
    """A non-empty list of frames sharing one width/height."""

    frames: tuple[Frame, ...]

    def __post_init__(self):
        if len(self.frames) == 0:
            raise MissingFramesError("a frame sequence must contain at least one frame")
        w, h = self.frames[0].width, self.frames[0].height
        for i, f in enumerate(self.frames):
            if f.width != w or f.height != h:
                raise DimensionMismatchError(
                    f"frame {i} is {f.width}x{f.height}, expected {w}x{h}")
        object.__setattr__(self, "frames", tuple(self.frames))

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, i: int) -> Frame:
        return self.frames[i]

    def __iter__(self):
        return iter(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height


def quantize_u8(values: np.ndarray) -> np.ndarray:
    """Map [0, 1] floats to 8-bit with round-half-up (0.5 -> 128)."""
    scaled = np.asarray(values, dtype=np.float64) * 255.0
    return np.floor(scaled + 0.5).clip(0, 255).astype(np.uint8)


def _pattern_regex(pattern: str) -> re.Pattern:
    m = _FIELD_RE.search(pattern)
    if m is None:
        raise ValueError(f"pattern {pattern!r} has no %d-style index field")
    prefix, suffix = pattern[: m.start()], pattern[m.end():]
    return re.compile(re.escape(prefix) + r"(\d+)" + re.escape(suffix) + r"$")


def read_frame(path: str | Path) -> Frame:
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc
    return Frame(arr.astype(np.float64) / 255.0)


def write_frame(frame: Frame, path: str | Path) -> None:
    Image.fromarray(quantize_u8(frame.data), mode="RGB").save(path)


def read_sequence(directory: str | Path, pattern: str = DEFAULT_PATTERN) -> FrameSequence:
    """Load all frames in ``directory`` matching ``pattern``, sorted by index.

    Raises MissingFramesError when the directory is absent or nothing matches,
    DimensionMismatchError (naming the file) when sizes disagree, and
    DecodeError for unreadable files.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingFramesError(f"no such directory: {directory}")
    rx = _pattern_regex(pattern)
    indexed = []
    for entry in directory.iterdir():
        m = rx.match(entry.name)
        if m:
            indexed.append((int(m.group(1)), entry))
    if not indexed:
        raise MissingFramesError(f"no frames matching {pattern!r} in {directory}")
    indexed.sort()
    frames = []
    for _, path in indexed:
        frame = read_frame(path)
        if frames and (frame.width != frames[0].width or frame.height != frames[0].height):
            raise DimensionMismatchError(
                f"{path.name} is {frame.width}x{frame.height}, expected "
                f"{frames[0].width}x{frames[0].height}")
        frames.append(frame)
    return FrameSequence(tuple(frames))


def write_sequence(seq: FrameSequence, directory: str | Path,
                   pattern: str = DEFAULT_PATTERN) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(seq):
        write_frame(frame, directory / (pattern % i))


def write_scalar_field_png(field: ScalarField, path: str | Path,
                           vmin: float = 0.0, vmax: float = 1.0) -> None:
    """Dump a scalar map as a grayscale PNG, linearly mapping [vmin, vmax]."""
    if not vmin < vmax:
        raise ValueError(f"need vmin < vmax, got [{vmin}, {vmax}]")
    norm = np.clip((field.data - vmin) / (vmax - vmin), 0.0, 1.0)
    Image.fromarray(quantize_u8(norm), mode="L").save(path)


def encode_frame_png(frame: Frame) -> bytes:
    """PNG-encode a frame in memory (8-bit RGB), for wire transport."""
    buf = BytesIO()
    Image.fromarray(quantize_u8(frame.data), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def decode_frame_png(blob: bytes) -> Frame:
    try:
        with Image.open(BytesIO(blob)) as img:
            arr = np.asarray(img.convert("RGB"), dtype=np.uint8)
    except Exception as exc:
        raise DecodeError(f"cannot decode PNG payload: {exc}") from exc
    return Frame(arr.astype(np.float64) / 255.0)
