"""Anatomy of the inpaint mask on a moving scene.

Shows the two failure detectors separately, the residual between a frame and
its motion-compensated prediction, and the occlusion map from forward
splatting, and how combining them yields the final keep/inpaint decision
with blur expansion and latent min-pooling. Writes PNGs to demos/out/mask/.
"""

from pathlib import Path

import numpy as np

from flowpaint import (
    FlowField,
    Frame,
    PipelineConfig,
    backward_warp,
    expand_mask,
    forward_warp_ones,
    inpaint_mask,
    residual_map,
    to_latent_mask,
    upsample_mask,
    write_scalar_field_png,
)
from flowpaint.core import ScalarField

OUT = Path(__file__).parent / "out" / "mask"
OUT.mkdir(parents=True, exist_ok=True)

SIZE, SHIFT = 128, 8
# a binarize threshold near 1 makes the blur step grow the inpaint region
# aggressively; the default 0.5 only rounds off large regions
cfg = PipelineConfig(blur_binarize_threshold=0.99)

# a background sliding left with a static box pasted over it: the box's
# trailing (left) edge reveals background the reference never saw
rng = np.random.default_rng(1)
strip = rng.random((SIZE, SIZE + SHIFT, 3))
prev = strip[:, :SIZE].copy()
cur = strip[:, SHIFT:SIZE + SHIFT].copy()
box = rng.random((32, 32, 3))
prev[48:80, 48:80] = box
cur[48:80, 48:80] = box

flow = np.zeros((SIZE, SIZE, 2), dtype=np.float32)
flow[:, :, 0] = SHIFT
flow[48:80, 48:80] = 0.0  # the box does not move
rev = np.zeros((SIZE, SIZE, 2), dtype=np.float32)
rev[:, :, 0] = -SHIFT
rev[48:80, 48:80] = 0.0

x_prev, x_cur = Frame(prev), Frame(cur)
predicted = backward_warp(x_prev, FlowField(flow))
residual = residual_map(x_cur, predicted)
occlusion = forward_warp_ones(FlowField(rev))

raw = inpaint_mask(occlusion, residual, cfg.alpha, cfg.mask_threshold)
expanded = expand_mask(raw, cfg.blur_sigma, cfg.blur_kernel_radius,
                       cfg.blur_binarize_threshold)
latent = to_latent_mask(expanded, cfg.latent_factor)
applied = upsample_mask(latent, cfg.latent_factor, SIZE, SIZE)

print(f"residual mean: {residual.data.mean():.4f}")
print(f"occlusion zeros: {(occlusion.data == 0).mean() * 100:.1f}% of pixels")
print(f"inpaint fraction raw/expanded/applied: "
      f"{(raw.data == 0).mean():.3f} / {(expanded.data == 0).mean():.3f} / "
      f"{(applied.data == 0).mean():.3f}")

write_scalar_field_png(residual, OUT / "residual.png", vmax=residual.data.max() or 1.0)
write_scalar_field_png(occlusion, OUT / "occlusion.png")
write_scalar_field_png(ScalarField(raw.data.astype(float)), OUT / "mask_raw.png")
write_scalar_field_png(ScalarField(applied.data.astype(float)), OUT / "mask_applied.png")
print(f"wrote images to {OUT}")
