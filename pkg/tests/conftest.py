"""Shared fixtures: synthetic translating scenes and exact flow stores.

The workhorse scene is a wide random texture viewed through a sliding window:
frame t shows columns [t*shift, t*shift + width), so the scene translates
LEFT by `shift` pixels per frame and new content enters at the right border.
Because every frame is a crop of one strip, the true motion between any two
frames is an exact constant translation, which lets tests write exact .flo
files and reason about occlusion stripes analytically.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from flowpaint.core import FlowField, Frame
from flowpaint.frameio import FrameSequence
from flowpaint.flow import write_flo
from flowpaint.pipeline import GopPlan, Role


def sliding_scene(n_frames: int, height: int, width: int, shift: int,
                  seed: int = 0) -> FrameSequence:
    rng = np.random.default_rng(seed)
    strip = rng.random((height, width + shift * max(n_frames - 1, 1), 3))
    frames = tuple(Frame(strip[:, t * shift: t * shift + width].copy())
                   for t in range(n_frames))
    return FrameSequence(frames)


def constant_flow(height: int, width: int, u: float, v: float = 0.0) -> FlowField:
    data = np.zeros((height, width, 2), dtype=np.float32)
    data[:, :, 0] = u
    data[:, :, 1] = v
    return FlowField(data)


def write_exact_flow(directory: Path, a: int, b: int, shift: int,
                     width: int, height: int) -> None:
    """True flow for the sliding scene: frame b's pixel p came from
    p + (b - a) * shift in frame a."""
    u = float((b - a) * shift)
    write_flo(constant_flow(height, width, u), directory / f"flow_{a:04d}_{b:04d}.flo")


def populate_exact_flows(directory: Path, plan: GopPlan, shift: int,
                         width: int, height: int) -> None:
    """Write every directed flow pair the plan's execution will request."""
    directory.mkdir(parents=True, exist_ok=True)
    pairs = set()
    for i, role in enumerate(plan.roles):
        if role is Role.P:
            (dep,) = plan.deps[i]
            pairs.update({(dep, i), (i, dep)})
        elif role is Role.B:
            f, b = plan.deps[i]
            pairs.update({(f, i), (b, i), (i, f), (i, b)})
    for a, b in sorted(pairs):
        write_exact_flow(directory, a, b, shift, width, height)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_frame(rng: np.random.Generator, height: int, width: int) -> Frame:
    return Frame(rng.random((height, width, 3)))


def random_flow(rng: np.random.Generator, height: int, width: int,
                scale: float = 3.0) -> FlowField:
    return FlowField((rng.random((height, width, 2)).astype(np.float32) - 0.5) * 2 * scale)
