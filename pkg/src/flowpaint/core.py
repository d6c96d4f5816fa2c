"""Core domain types shared by every stage of the pipeline.

All pixel math happens on frames normalized to [0, 1]. Flow fields follow a
single convention everywhere (SAMPLE-AT-TARGET): a field relating frame ``a``
to frame ``b`` lives on ``b``'s pixel grid, and the vector ``(u, v)`` stored
at pixel ``p`` means "the content at ``p`` comes from ``p + (u, v)`` in
``a``". Backward-warping ``a`` with such a field therefore lands on ``b``'s
grid.

All types are immutable after construction (their arrays are marked
read-only), so they can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np


class PipelineError(Exception):
    """Base class for everything this package raises on purpose."""


class InvalidConfigError(PipelineError):
    pass


class DimensionMismatchError(PipelineError):
    pass


class MissingFramesError(PipelineError):
    pass


class DecodeError(PipelineError):
    pass


class FlowFileError(PipelineError):
    """Bad magic, truncation, or a missing flow file."""


class InvalidFieldError(PipelineError):
    """Non-finite data where a finite field is required."""


class BackendError(PipelineError):
    """Remote generation/flow service unreachable, timed out, or malformed."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Frame:
    """An H x W x 3 image with float64 samples in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise DimensionMismatchError(
                f"frame data must be (H, W, 3), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidFieldError("frame contains non-finite samples")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise InvalidFieldError(
                f"frame samples outside [0, 1]: min={arr.min()}, max={arr.max()}")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class FlowField:
    """An H x W x 2 displacement field in pixels, float32.

    ``data[y, x, 0]`` is the horizontal displacement u, ``data[y, x, 1]`` the
    vertical displacement v. The grid the field lives on and the direction it
    points are the caller's contract; see the module docstring.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise DimensionMismatchError(
                f"flow data must be (H, W, 2), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidFieldError("flow contains non-finite displacements")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def u(self) -> np.ndarray:
        return self.data[:, :, 0]

    @property
    def v(self) -> np.ndarray:
        return self.data[:, :, 1]


@dataclass(frozen=True)
class ScalarField:
    """An H x W map of finite float64 values (residuals, occlusion, scores)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise DimensionMismatchError(
                f"scalar field must be (H, W), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidFieldError("scalar field contains non-finite values")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class BinaryMask:
    """An H x W map of {0, 1}; 0 marks pixels to regenerate, 1 pixels to keep."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"mask must be (H, W), got {arr.shape}")
        if arr.dtype != np.uint8:
            if not np.all(np.isin(arr, (0, 1))):
                raise InvalidFieldError("mask values must be exactly 0 or 1")
            arr = arr.astype(np.uint8)
        elif not np.all(arr <= 1):
            raise InvalidFieldError("mask values must be exactly 0 or 1")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class PipelineConfig:
    """Tuning knobs for the whole pipeline.

    ``gop_size`` frames per group of pictures; ``alpha`` weights the residual
    against the occlusion map in the key-frame inpaint mask; ``beta`` plays the
    same role for interpolated frames; ``temperature`` softens the blend
    weights. The blur/latent fields control mask post-processing only.
    """

    gop_size: int = 10
    alpha: float = 5.0
    beta: float = 10.0
    mask_threshold: float = 0.5
    temperature: float = 20.0
    blur_sigma: float = 2.0
    blur_kernel_radius: int = 4
    latent_factor: int = 8
    blur_binarize_threshold: float = 0.5


def validate_config(cfg: PipelineConfig) -> PipelineConfig:
    """Return ``cfg`` unchanged if every invariant holds, else raise.

    The error message names the offending field.
    """
    if not isinstance(cfg.gop_size, int) or cfg.gop_size < 1:
        raise InvalidConfigError(f"gop_size must be a positive integer, got {cfg.gop_size}")
    if cfg.alpha < 0:
        raise InvalidConfigError(f"alpha must be non-negative, got {cfg.alpha}")
    if cfg.beta < 0:
        raise InvalidConfigError(f"beta must be non-negative, got {cfg.beta}")
    if not np.isfinite(cfg.mask_threshold):
        raise InvalidConfigError(f"mask_threshold must be finite, got {cfg.mask_threshold}")
    if cfg.temperature <= 0:
        raise InvalidConfigError(f"temperature must be positive, got {cfg.temperature}")
    if cfg.blur_sigma < 0:
        raise InvalidConfigError(f"blur_sigma must be non-negative, got {cfg.blur_sigma}")
    if not isinstance(cfg.blur_kernel_radius, int) or cfg.blur_kernel_radius < 0:
        raise InvalidConfigError(
            f"blur_kernel_radius must be a non-negative integer, got {cfg.blur_kernel_radius}")
    if not isinstance(cfg.latent_factor, int) or cfg.latent_factor < 1:
        raise InvalidConfigError(f"latent_factor must be a positive integer, got {cfg.latent_factor}")
    if not (0.0 < cfg.blur_binarize_threshold < 1.0):
        raise InvalidConfigError(
            f"blur_binarize_threshold must be in (0, 1), got {cfg.blur_binarize_threshold}")
    return cfg


def config_to_text(cfg: PipelineConfig) -> str:
    """Serialize a config as `key = value` lines (lossless for round trips)."""
    lines = ["# flowpaint pipeline configuration"]
    for f in fields(cfg):
        lines.append(f"{f.name} = {getattr(cfg, f.name)!r}")
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> PipelineConfig:
    """Parse `key = value` lines back into a config.

    Unknown keys and malformed lines raise InvalidConfigError.
    """
    defaults = PipelineConfig()
    known = {f.name for f in fields(PipelineConfig)}
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise InvalidConfigError(f"line {lineno}: unknown config key {key!r}")
        parse = int if isinstance(getattr(defaults, key), int) else float
        try:
            overrides[key] = parse(value)
        except ValueError as exc:
            raise InvalidConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return replace(defaults, **overrides)


def save_config(cfg: PipelineConfig, path: str | Path) -> None:
    Path(path).write_text(config_to_text(cfg))


def load_config(path: str | Path) -> PipelineConfig:
    return config_from_text(Path(path).read_text())
