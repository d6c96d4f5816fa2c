"""Motion-compensated key-frame generation.

A new key frame is produced in two strands that never mix domains. From the
INPUT frames alone we derive where motion compensation will fail: warp the
previous input onto the current grid, take the residual, splat ones along the
reverse flow for the occlusion map, and combine both into the inpaint mask.
From the OUTPUT domain we warp the previously generated key frame with the
same forward flow and hand the backend only the mask zeros to repaint.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import BinaryMask, DimensionMismatchError, Frame, PipelineConfig, ScalarField
from .flow import FlowSource, flow_between
from .generator import GenerationRequest, GeneratorBackend, generate_inpaint
from .maskgen import expand_mask, inpaint_mask, residual_map, to_latent_mask, upsample_mask
from .warp import backward_warp, forward_warp_ones


@dataclass(frozen=True)
class PFrameDiagnostics:
    """Intermediates of one key-frame generation, for inspection/dumping."""

    residual: ScalarField
    occlusion: ScalarField
    mask: BinaryMask          # pixel-space mask after expansion
    latent_mask: BinaryMask   # min-pooled mask the backend actually receives
    applied_mask: BinaryMask  # latent mask upsampled back to pixels
    warped: Frame             # previous output warped onto the current grid


def generate_pframe(prev_out: Frame, x_prev: Frame, x_cur: Frame, cond_cur: Frame,
                    flow_src: FlowSource, backend: GeneratorBackend,
                    cfg: PipelineConfig, prompt: str, seed: int,
                    indices: tuple[int, int]) -> tuple[Frame, PFrameDiagnostics]:
    """Generate the output frame at ``indices[1]`` from the key frame at
    ``indices[0]``.

    ``prev_out`` is the previously generated key frame, ``x_prev``/``x_cur``
    the corresponding input frames, ``cond_cur`` the condition image for the
    current position.
    """
    i_prev, i_cur = indices
    for name, f in (("prev_out", prev_out), ("x_prev", x_prev), ("cond_cur", cond_cur)):
        if (f.height, f.width) != (x_cur.height, x_cur.width):
            raise DimensionMismatchError(
                f"{name} is {f.width}x{f.height}, current frame is "
                f"{x_cur.width}x{x_cur.height}")

    # input domain: where will motion compensation fail?
    fwd = flow_between(flow_src, x_prev, x_cur, i_prev, i_cur)
    predicted = backward_warp(x_prev, fwd)
    residual = residual_map(x_cur, predicted)
    rev = flow_between(flow_src, x_cur, x_prev, i_cur, i_prev)
    occlusion = forward_warp_ones(rev)

    raw_mask = inpaint_mask(occlusion, residual, cfg.alpha, cfg.mask_threshold)
    mask = expand_mask(raw_mask, cfg.blur_sigma, cfg.blur_kernel_radius,
                       cfg.blur_binarize_threshold)
    latent = to_latent_mask(mask, cfg.latent_factor)

    # output domain: carry the previous result, repaint only the mask zeros
    warped = backward_warp(prev_out, fwd)
    req = GenerationRequest(mode="inpaint", condition=cond_cur, prompt=prompt,
                            seed=seed, base=warped, mask=latent,
                            latent_factor=cfg.latent_factor)
    out = generate_inpaint(backend, req)

    applied = upsample_mask(latent, cfg.latent_factor, x_cur.width, x_cur.height)
    diag = PFrameDiagnostics(residual=residual, occlusion=occlusion, mask=mask,
                             latent_mask=latent, applied_mask=applied, warped=warped)
    return out, diag
