"""Backward bilinear warping and forward unit-mass splatting.

Both kernels take a flow field under the package-wide SAMPLE-AT-TARGET
convention (see ``core``). ``backward_warp`` gathers: output pixel ``p``
reads the source at ``p + flow(p)`` with bilinear interpolation, coordinates
clamped to the image rectangle. ``forward_warp_ones`` scatters: every pixel
``p`` of the flow's grid splats one unit of mass onto the four integer
neighbors of ``p + flow(p)``; mass that lands outside the image is discarded.

The splat result is read on the coordinate space the flow points INTO: feed
it the field estimated from the current frame toward its reference and the
zeros of the clamped accumulator mark positions of the current frame that no
reference pixel reaches, i.e. newly revealed (occluded) content. For a scene
sliding left by d pixels this produces a zero stripe of width exactly d at
the right border.
"""

from __future__ import annotations

import numpy as np

from .core import DimensionMismatchError, FlowField, Frame, ScalarField


def _check_dims(src_h: int, src_w: int, flow: FlowField) -> None:
    if (src_h, src_w) != (flow.height, flow.width):
        raise DimensionMismatchError(
            f"flow is {flow.width}x{flow.height}, source is {src_w}x{src_h}")


def _sample_coords(flow: FlowField) -> tuple[np.ndarray, np.ndarray]:
    h, w = flow.height, flow.width
    gy, gx = np.mgrid[0:h, 0:w]
    sx = np.clip(gx.astype(np.float64) + flow.u.astype(np.float64), 0.0, float(w - 1))
    sy = np.clip(gy.astype(np.float64) + flow.v.astype(np.float64), 0.0, float(h - 1))
    return sx, sy


def _bilinear_gather(data: np.ndarray, flow: FlowField) -> np.ndarray:
    """Sample ``data`` (H x W or H x W x C) at grid + flow, border-clamped."""
    h, w = data.shape[0], data.shape[1]
    sx, sy = _sample_coords(flow)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = sx - x0
    fy = sy - y0
    w00 = (1.0 - fx) * (1.0 - fy)
    w01 = fx * (1.0 - fy)
    w10 = (1.0 - fx) * fy
    w11 = fx * fy
    if data.ndim == 3:
        w00, w01, w10, w11 = (w[:, :, None] for w in (w00, w01, w10, w11))
    return (w00 * data[y0, x0] + w01 * data[y0, x1]
            + w10 * data[y1, x0] + w11 * data[y1, x1])


def backward_warp(source: Frame, flow: FlowField) -> Frame:
    """Warp ``source`` onto the flow's grid; output clamped to [0, 1].

    With a zero flow this is the bitwise identity.
    """
    _check_dims(source.height, source.width, flow)
    out = _bilinear_gather(source.data, flow)
    return Frame(np.clip(out, 0.0, 1.0))


def backward_warp_scalar(source: ScalarField, flow: FlowField) -> ScalarField:
    """Same gather as ``backward_warp`` but without the [0, 1] value clamp."""
    _check_dims(source.height, source.width, flow)
    return ScalarField(_bilinear_gather(source.data, flow))


def _splat_unit_mass(flow: FlowField) -> np.ndarray:
    """Raw (pre-clamp) accumulation of one unit of mass per flow pixel."""
    h, w = flow.height, flow.width
    gy, gx = np.mgrid[0:h, 0:w]
    tx = gx.astype(np.float64) + flow.u.astype(np.float64)
    ty = gy.astype(np.float64) + flow.v.astype(np.float64)
    x0 = np.floor(tx).astype(np.intp)
    y0 = np.floor(ty).astype(np.intp)
    fx = tx - x0
    fy = ty - y0
    acc = np.zeros((h, w), dtype=np.float64)
    corners = (
        (x0, y0, (1.0 - fx) * (1.0 - fy)),
        (x0 + 1, y0, fx * (1.0 - fy)),
        (x0, y0 + 1, (1.0 - fx) * fy),
        (x0 + 1, y0 + 1, fx * fy),
    )
    for cx, cy, weight in corners:
        inside = (cx >= 0) & (cx < w) & (cy >= 0) & (cy < h)
        np.add.at(acc, (cy[inside], cx[inside]), weight[inside])
    return acc


def forward_warp_ones(flow: FlowField) -> ScalarField:
    """Splat ones along ``flow``; zeros mark unreached (revealed) positions.

    The accumulator is clamped to [0, 1]: a cell hit by several sources
    saturates at one, a cell hit by nothing stays zero.
    """
    return ScalarField(np.clip(_splat_unit_mass(flow), 0.0, 1.0))
