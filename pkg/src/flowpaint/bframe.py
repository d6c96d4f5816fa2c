"""Interpolation of in-between frames from two generated key frames.

No generator call happens here. Both key-frame outputs are warped onto the
in-between position's grid and blended per pixel. The blend weights come from
a temperature softmax over per-side match scores (occlusion minus weighted
residual, both measured on the INPUT frames), so a side that cannot explain a
pixel, because it is occluded or badly compensated, loses weight there. The
two weights sum to one exactly at every pixel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DimensionMismatchError, Frame, PipelineConfig, ScalarField
from .flow import FlowSource, flow_between
from .maskgen import residual_map
from .warp import backward_warp, forward_warp_ones


@dataclass(frozen=True)
class BFrameDiagnostics:
    score_front: ScalarField
    score_back: ScalarField
    residual_front: ScalarField
    residual_back: ScalarField
    occlusion_front: ScalarField
    occlusion_back: ScalarField
    warped_front: Frame
    warped_back: Frame


def match_scores(occ_front: ScalarField, res_front: ScalarField,
                 occ_back: ScalarField, res_back: ScalarField,
                 beta: float, temperature: float) -> tuple[ScalarField, ScalarField]:
    """Per-pixel blend weights for the two warped candidates.

    Intermediate scores are occlusion - beta * residual per side; the final
    weights are a numerically stable two-way softmax at the given temperature
    (the max score is subtracted before exponentiation, which leaves the
    result unchanged). Returns (front, back) with front + back == 1 exactly.
    """
    for other in (res_front, occ_back, res_back):
        if (other.height, other.width) != (occ_front.height, occ_front.width):
            raise DimensionMismatchError("score inputs must share dimensions")
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    s_front = occ_front.data - beta * res_front.data
    s_back = occ_back.data - beta * res_back.data
    m = np.maximum(s_front, s_back)
    e_front = np.exp((s_front - m) / temperature)
    e_back = np.exp((s_back - m) / temperature)
    front = e_front / (e_front + e_back)
    return ScalarField(front), ScalarField(1.0 - front)


def interpolate_bframe(front_out: Frame, back_out: Frame,
                       x_front: Frame, x_back: Frame, x_j: Frame,
                       flow_src: FlowSource, cfg: PipelineConfig,
                       indices: tuple[int, int, int]) -> tuple[Frame, BFrameDiagnostics]:
    """Blend the two bracketing key-frame outputs at position ``indices[2]``.

    ``indices`` is (front key, back key, in-between); the in-between index
    must lie strictly between its brackets. All flows are estimated on the
    input frames, never on outputs.
    """
    i_front, i_back, j = indices
    if not (i_front < j < i_back):
        raise ValueError(
            f"in-between index must satisfy {i_front} < j < {i_back}, got j={j}")
    for name, f in (("front_out", front_out), ("back_out", back_out),
                    ("x_front", x_front), ("x_back", x_back)):
        if (f.height, f.width) != (x_j.height, x_j.width):
            raise DimensionMismatchError(
                f"{name} is {f.width}x{f.height}, in-between frame is "
                f"{x_j.width}x{x_j.height}")

    flow_front = flow_between(flow_src, x_front, x_j, i_front, j)
    flow_back = flow_between(flow_src, x_back, x_j, i_back, j)

    warped_front = backward_warp(front_out, flow_front)
    warped_back = backward_warp(back_out, flow_back)

    res_front = residual_map(x_j, backward_warp(x_front, flow_front))
    res_back = residual_map(x_j, backward_warp(x_back, flow_back))
    occ_front = forward_warp_ones(flow_between(flow_src, x_j, x_front, j, i_front))
    occ_back = forward_warp_ones(flow_between(flow_src, x_j, x_back, j, i_back))

    score_front, score_back = match_scores(occ_front, res_front, occ_back, res_back,
                                           cfg.beta, cfg.temperature)
    blended = (score_front.data[:, :, None] * warped_front.data
               + score_back.data[:, :, None] * warped_back.data)
    out = Frame(np.clip(blended, 0.0, 1.0))
    diag = BFrameDiagnostics(score_front=score_front, score_back=score_back,
                             residual_front=res_front, residual_back=res_back,
                             occlusion_front=occ_front, occlusion_back=occ_back,
                             warped_front=warped_front, warped_back=warped_back)
    return out, diag
