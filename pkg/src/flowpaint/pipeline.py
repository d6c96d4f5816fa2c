"""Sequence-level orchestration: role planning, execution, and the flow metric.

Frame 0 is always generated fresh (I). Every ``gop_size``-th frame after it is
a key frame (P) predicted from the previous key frame's OUTPUT; whatever sits
between two key frames is interpolated (B) from both once they exist. When the
sequence length leaves a partial tail, its last frame is promoted to P so
every in-between frame keeps a bracketing pair.

The run report mirrors the cost structure of the scheme: one generator call
per I or P frame, none per B, so generator calls per frame approach 1/g for
long sequences.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .bframe import BFrameDiagnostics, interpolate_bframe
from .core import DimensionMismatchError, Frame, PipelineConfig, PipelineError, validate_config
from .flow import FlowSource, flow_between
from .frameio import FrameSequence
from .generator import GenerationRequest, GeneratorBackend, generate_full
from .pframe import PFrameDiagnostics, generate_pframe


class Role(str, Enum):
    I = "I"
    P = "P"
    B = "B"


@dataclass(frozen=True)
class GopPlan:
    """Role assignment, dependencies, and a topologically valid schedule."""

    n_frames: int
    gop_size: int
    roles: tuple[Role, ...]
    deps: tuple[tuple[int, ...], ...]
    schedule: tuple[int, ...]


def plan_gop(n_frames: int, gop_size: int) -> GopPlan:
    """Assign I/P/B roles for ``n_frames`` with groups of ``gop_size``.

    Frame 0 is I; frames g, 2g, ... are P; a partial tail promotes the final
    frame to P; everything else is B depending on its two bracketing keys.
    The schedule interleaves each group's P before its B frames.
    """
    if n_frames < 1:
        raise ValueError(f"n_frames must be >= 1, got {n_frames}")
    if gop_size < 1:
        raise ValueError(f"gop_size must be >= 1, got {gop_size}")

    keys = [0] + list(range(gop_size, n_frames, gop_size))
    if keys[-1] != n_frames - 1 and n_frames > 1:
        keys.append(n_frames - 1)

    roles: list[Role] = [Role.B] * n_frames
    deps: list[tuple[int, ...]] = [()] * n_frames
    roles[0] = Role.I
    for prev_key, key in zip(keys, keys[1:]):
        roles[key] = Role.P
        deps[key] = (prev_key,)
        for j in range(prev_key + 1, key):
            deps[j] = (prev_key, key)

    schedule: list[int] = [0]
    for prev_key, key in zip(keys, keys[1:]):
        schedule.append(key)
        schedule.extend(range(prev_key + 1, key))
    return GopPlan(n_frames=n_frames, gop_size=gop_size, roles=tuple(roles),
                   deps=tuple(deps), schedule=tuple(schedule))


@dataclass
class RunReport:
    """Call counts, per-role wall time, and the executed order of one run."""

    n_frames: int
    gop_size: int
    counts: dict = field(default_factory=lambda: {"full": 0, "pframe": 0, "bframe": 0})
    seconds: dict = field(default_factory=lambda: {"full": 0.0, "pframe": 0.0, "bframe": 0.0})
    trace: list = field(default_factory=list)  # (frame index, role) in execution order
    wall_seconds: float = 0.0

    @property
    def generator_calls(self) -> int:
        return self.counts["full"] + self.counts["pframe"]

    @property
    def generator_calls_per_frame(self) -> float:
        return self.generator_calls / self.n_frames

    def to_text(self) -> str:
        lines = [
            "flowpaint run report",
            f"frames = {self.n_frames}",
            f"gop_size = {self.gop_size}",
            f"full_generations = {self.counts['full']}",
            f"pframe_generations = {self.counts['pframe']}",
            f"bframe_interpolations = {self.counts['bframe']}",
            f"generator_calls = {self.generator_calls}",
            f"generator_calls_per_frame = {self.generator_calls_per_frame:.4f}",
            f"time_full_s = {self.seconds['full']:.4f}",
            f"time_pframe_s = {self.seconds['pframe']:.4f}",
            f"time_bframe_s = {self.seconds['bframe']:.4f}",
            f"time_total_s = {self.wall_seconds:.4f}",
            "order = " + " ".join(f"{i}:{r.value}" for i, r in self.trace),
        ]
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())


@dataclass
class RunResult:
    outputs: FrameSequence
    report: RunReport
    pframe_diagnostics: dict  # frame index -> PFrameDiagnostics
    bframe_diagnostics: dict  # frame index -> BFrameDiagnostics


def run_pipeline(frames: FrameSequence, conditions: FrameSequence,
                 flow_src: FlowSource, backend: GeneratorBackend,
                 cfg: PipelineConfig, prompt: str = "", seed: int = 0,
                 jobs: int = 1) -> RunResult:
    """Translate ``frames`` into a full output sequence.

    ``conditions`` must hold one condition image per input frame at the same
    size. ``jobs`` > 1 interpolates the in-between frames of each group in a
    thread pool; results are identical to sequential execution because they
    are mutually independent.
    """
    validate_config(cfg)
    if len(conditions) != len(frames):
        raise DimensionMismatchError(
            f"{len(conditions)} conditions for {len(frames)} frames")
    if (conditions.width, conditions.height) != (frames.width, frames.height):
        raise DimensionMismatchError(
            f"conditions are {conditions.width}x{conditions.height}, frames are "
            f"{frames.width}x{frames.height}")

    plan = plan_gop(len(frames), cfg.gop_size)
    outputs: list[Frame | None] = [None] * len(frames)
    report = RunReport(n_frames=len(frames), gop_size=cfg.gop_size)
    p_diags: dict[int, PFrameDiagnostics] = {}
    b_diags: dict[int, BFrameDiagnostics] = {}
    started = time.perf_counter()

    def run_bframe(j: int) -> tuple[int, Frame, BFrameDiagnostics]:
        f, b = plan.deps[j]
        out, diag = interpolate_bframe(outputs[f], outputs[b], frames[f], frames[b],
                                       frames[j], flow_src, cfg, (f, b, j))
        return j, out, diag

    idx = 0
    while idx < len(plan.schedule):
        i = plan.schedule[idx]
        role = plan.roles[i]
        if role is Role.B and jobs > 1:
            batch = []
            while idx < len(plan.schedule) and plan.roles[plan.schedule[idx]] is Role.B:
                batch.append(plan.schedule[idx])
                idx += 1
            t0 = time.perf_counter()
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = [(j, pool.submit(run_bframe, j)) for j in batch]
                for j, fut in futures:
                    try:
                        _, out, diag = fut.result()
                    except PipelineError as exc:
                        raise type(exc)(f"frame {j} (B): {exc}") from exc
                    outputs[j] = out
                    b_diags[j] = diag
                    report.counts["bframe"] += 1
                    report.trace.append((j, Role.B))
            report.seconds["bframe"] += time.perf_counter() - t0
            continue

        t0 = time.perf_counter()
        try:
            if role is Role.I:
                req = GenerationRequest(mode="full", condition=conditions[i],
                                        prompt=prompt, seed=seed)
                outputs[i] = generate_full(backend, req)
                report.counts["full"] += 1
                report.seconds["full"] += time.perf_counter() - t0
            elif role is Role.P:
                (dep,) = plan.deps[i]
                outputs[i], p_diags[i] = generate_pframe(
                    outputs[dep], frames[dep], frames[i], conditions[i],
                    flow_src, backend, cfg, prompt, seed, (dep, i))
                report.counts["pframe"] += 1
                report.seconds["pframe"] += time.perf_counter() - t0
            else:
                j, out, diag = run_bframe(i)
                outputs[j] = out
                b_diags[j] = diag
                report.counts["bframe"] += 1
                report.seconds["bframe"] += time.perf_counter() - t0
        except PipelineError as exc:
            raise type(exc)(f"frame {i} ({role.value}): {exc}") from exc
        report.trace.append((i, role))
        idx += 1

    report.wall_seconds = time.perf_counter() - started
    assert all(o is not None for o in outputs)
    return RunResult(outputs=FrameSequence(tuple(outputs)), report=report,
                     pframe_diagnostics=p_diags, bframe_diagnostics=b_diags)


def flow_error(input_seq: FrameSequence, output_seq: FrameSequence,
               flow_src: FlowSource) -> float:
    """Mean per-pixel Euclidean distance (pixels) between the motion of the
    two sequences, averaged over consecutive pairs.

    Use a content-driven source (block matcher or remote estimator); a file
    store would load the same flow for both sequences by construction.
    """
    if len(input_seq) != len(output_seq):
        raise DimensionMismatchError(
            f"sequences differ in length: {len(input_seq)} vs {len(output_seq)}")
    if len(input_seq) < 2:
        return 0.0
    per_pair = []
    for t in range(len(input_seq) - 1):
        f_in = flow_between(flow_src, input_seq[t], input_seq[t + 1], t, t + 1)
        f_out = flow_between(flow_src, output_seq[t], output_seq[t + 1], t, t + 1)
        du = f_in.u.astype(np.float64) - f_out.u.astype(np.float64)
        dv = f_in.v.astype(np.float64) - f_out.v.astype(np.float64)
        per_pair.append(float(np.mean(np.sqrt(du * du + dv * dv))))
    return float(np.mean(per_pair))
