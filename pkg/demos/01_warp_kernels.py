"""Warping kernels on a synthetic sliding scene.

Builds a textured scene that translates left, backward-warps the first frame
onto the second frame's grid, and splats ones along the reverse flow to show
how the revealed stripe appears as zeros. Writes PNGs under demos/out/warp/.
"""

from pathlib import Path

import numpy as np

from flowpaint import (
    FlowField,
    Frame,
    backward_warp,
    forward_warp_ones,
    write_scalar_field_png,
)
from flowpaint.frameio import write_frame

OUT = Path(__file__).parent / "out" / "warp"
OUT.mkdir(parents=True, exist_ok=True)

SIZE, SHIFT = 96, 6

rng = np.random.default_rng(0)
strip = rng.random((SIZE, SIZE + SHIFT, 3))
frame_a = Frame(strip[:, :SIZE])            # earlier frame
frame_b = Frame(strip[:, SHIFT:SIZE + SHIFT])  # scene moved left by SHIFT

# the field lives on frame_b's grid and points back into frame_a
flow_ab = np.zeros((SIZE, SIZE, 2), dtype=np.float32)
flow_ab[:, :, 0] = SHIFT
warped = backward_warp(frame_a, FlowField(flow_ab))

# reconstruction is exact except at the right border, where content is new
err = np.abs(warped.data - frame_b.data).mean(axis=2)
print(f"mean abs error, interior: {err[:, :SIZE - SHIFT].mean():.2e}")
print(f"mean abs error, revealed stripe: {err[:, SIZE - SHIFT:].mean():.2e}")

# splat ones along the reverse flow: zeros mark the revealed stripe
flow_ba = np.zeros((SIZE, SIZE, 2), dtype=np.float32)
flow_ba[:, :, 0] = -SHIFT
occlusion = forward_warp_ones(FlowField(flow_ba))
stripe_cols = int((occlusion.data == 0).any(axis=0).sum())
print(f"zero-stripe width: {stripe_cols} (expected {SHIFT})")

write_frame(frame_a, OUT / "frame_a.png")
write_frame(frame_b, OUT / "frame_b.png")
write_frame(warped, OUT / "warped_a_onto_b.png")
write_scalar_field_png(occlusion, OUT / "occlusion.png")
print(f"wrote images to {OUT}")
