"""Residual maps and the inpainting mask with its post-processing.

The mask combines two detectors of content that cannot be motion-compensated:
the occlusion map (zeros where no reference pixel lands) and the residual
between the current frame and its warped prediction. A pixel is kept (1) only
when ``occlusion - alpha * residual`` clears the threshold; everything else
is handed to the generator.

Post-processing can only grow the inpaint region, never shrink it:
``expand_mask`` takes the min of the input with the re-binarized blur, and
``to_latent_mask`` min-pools, so one inpaint pixel anywhere in a window
forces the whole latent cell to regenerate.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import correlate1d

from .core import BinaryMask, DimensionMismatchError, Frame, ScalarField


def _check_same_shape(a, b, what: str) -> None:
    if (a.height, a.width) != (b.height, b.width):
        raise DimensionMismatchError(
            f"{what}: {a.width}x{a.height} vs {b.width}x{b.height}")


def residual_map(x: Frame, x_warped: Frame) -> ScalarField:
    """Squared difference averaged over channels; in [0, 1] for [0, 1] frames."""
    _check_same_shape(x, x_warped, "residual inputs")
    diff = x.data - x_warped.data
    return ScalarField(np.mean(diff * diff, axis=2))


def inpaint_mask(occlusion: ScalarField, residual: ScalarField,
                 alpha: float, threshold: float) -> BinaryMask:
    """1 (keep) where occlusion - alpha * residual strictly exceeds threshold."""
    _check_same_shape(occlusion, residual, "mask inputs")
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    score = occlusion.data - alpha * residual.data
    return BinaryMask((score > threshold).astype(np.uint8))


def _gaussian_kernel(sigma: float, radius: int) -> np.ndarray:
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(offsets * offsets) / (2.0 * sigma * sigma))
    return k / k.sum()


def expand_mask(mask: BinaryMask, sigma: float, radius: int,
                binarize_threshold: float) -> BinaryMask:
    """Grow the inpaint (zero) region by blurring and re-binarizing.

    The mask is blurred as a real field (truncated, normalized Gaussian,
    clamp-to-edge borders); pixels whose blurred value drops below
    ``binarize_threshold`` become 0. Taking the min with the input guarantees
    expansion-only semantics: every original zero stays zero.
    """
    if sigma < 0 or radius < 0:
        raise ValueError(f"sigma and radius must be non-negative, got {sigma}, {radius}")
    if sigma == 0:
        return mask
    kernel = _gaussian_kernel(sigma, radius)
    blurred = mask.data.astype(np.float64)
    blurred = correlate1d(blurred, kernel, axis=0, mode="nearest")
    blurred = correlate1d(blurred, kernel, axis=1, mode="nearest")
    binarized = (blurred >= binarize_threshold).astype(np.uint8)
    return BinaryMask(np.minimum(mask.data, binarized))


def to_latent_mask(mask: BinaryMask, factor: int) -> BinaryMask:
    """Min-pool into latent resolution, ceil(W/f) x ceil(H/f).

    Partial border windows pool over the pixels that exist.
    """
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    if factor == 1:
        return mask
    ys = np.arange(0, mask.height, factor)
    xs = np.arange(0, mask.width, factor)
    pooled = np.minimum.reduceat(np.minimum.reduceat(mask.data, ys, axis=0), xs, axis=1)
    return BinaryMask(pooled)


def upsample_mask(mask: BinaryMask, factor: int, target_w: int, target_h: int) -> BinaryMask:
    """Nearest-neighbor expansion by ``factor``, cropped to the target size."""
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    full_w, full_h = mask.width * factor, mask.height * factor
    if target_w > full_w or target_h > full_h:
        raise DimensionMismatchError(
            f"cannot cover {target_w}x{target_h} from a {mask.width}x{mask.height} "
            f"mask at factor {factor}")
    big = np.repeat(np.repeat(mask.data, factor, axis=0), factor, axis=1)
    return BinaryMask(big[:target_h, :target_w])
