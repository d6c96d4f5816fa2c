"""Command-line front end.

Subcommands: ``translate`` (full pipeline), ``mask-debug`` (key-frame mask
intermediates), ``interp-debug`` (interpolation intermediates), ``flow``
(estimate or round-trip .flo files), ``metrics`` (motion distance between two
sequences).

Exit codes: 0 success, 1 usage, 2 I/O, 3 backend or flow service failure,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields, replace
from pathlib import Path

from .core import (
    BackendError,
    DecodeError,
    FlowFileError,
    InvalidConfigError,
    MissingFramesError,
    PipelineConfig,
    PipelineError,
    ScalarField,
    load_config,
    validate_config,
)
from .flow import BlockMatcher, FileStore, FlowSource, RemoteEstimator, get_flow, read_flo, write_flo
from .frameio import read_sequence, write_frame, write_scalar_field_png, write_sequence
from .generator import MOCK_TRANSFORMS, GeneratorBackend, MockStylizer, RemoteService
from .maskgen import expand_mask, inpaint_mask, residual_map
from .bframe import interpolate_bframe
from .pipeline import flow_error, run_pipeline
from .warp import backward_warp, forward_warp_ones

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_SERVICE = 3
EXIT_INTERNAL = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we reserve that for I/O
        raise UsageError(message)


def parse_backend(selector: str) -> GeneratorBackend:
    kind, _, rest = selector.partition(":")
    if kind == "mock":
        return MockStylizer(rest or "identity")
    if kind == "http":
        if not rest:
            raise UsageError("http backend needs a URL, e.g. http:http://localhost:8760")
        return RemoteService(rest)
    raise UsageError(
        f"unknown backend {selector!r}; use mock:<{'|'.join(sorted(MOCK_TRANSFORMS))}> "
        "or http:<url>")


def parse_flow_source(selector: str) -> FlowSource:
    kind, _, rest = selector.partition(":")
    if kind == "flo":
        if not rest:
            raise UsageError("flo source needs a directory, e.g. flo:flows/")
        return FileStore(Path(rest))
    if kind == "block":
        try:
            size_s, radius_s = rest.split(",")
            return BlockMatcher(int(size_s), int(radius_s))
        except ValueError as exc:
            raise UsageError(f"block source needs block:<size>,<radius>, got {selector!r}") from exc
    if kind == "http":
        if not rest:
            raise UsageError("http flow source needs a URL")
        return RemoteEstimator(rest)
    raise UsageError(f"unknown flow source {selector!r}; use flo:<dir>, "
                     "block:<size>,<radius> or http:<url>")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="config file (key = value lines)")
    p.add_argument("--gop-size", "--gop", dest="gop_size", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--mask-threshold", dest="mask_threshold", type=float)
    p.add_argument("--temperature", "--tau", dest="temperature", type=float)
    p.add_argument("--blur-sigma", dest="blur_sigma", type=float)
    p.add_argument("--blur-kernel-radius", dest="blur_kernel_radius", type=int)
    p.add_argument("--latent-factor", dest="latent_factor", type=int)
    p.add_argument("--blur-binarize-threshold", dest="blur_binarize_threshold", type=float)


def _build_config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    overrides = {f.name: getattr(args, f.name)
                 for f in fields(PipelineConfig)
                 if getattr(args, f.name, None) is not None}
    return validate_config(replace(cfg, **overrides))


def build_parser() -> _Parser:
    parser = _Parser(prog="flowpaint",
                     description="Motion-compensated video-to-video translation.")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("translate", help="run the full pipeline over a frame directory")
    t.add_argument("--input", required=True, type=Path, help="input frame directory")
    t.add_argument("--conditions", required=True, type=Path,
                   help="pre-rendered condition images, one per frame")
    t.add_argument("--flows", required=True, help="flow source selector")
    t.add_argument("--backend", required=True, help="generator backend selector")
    t.add_argument("--prompt", default="")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", required=True, type=Path)
    t.add_argument("--jobs", type=int, default=1,
                   help="worker threads for in-between frames (default 1)")
    t.add_argument("--diagnostics", type=Path,
                   help="also dump per-frame mask/score maps under this directory")
    _add_config_flags(t)

    m = sub.add_parser("mask-debug", help="dump key-frame mask intermediates")
    m.add_argument("--input", required=True, type=Path)
    m.add_argument("--flows", required=True)
    m.add_argument("--frame", required=True, type=int)
    m.add_argument("--ref", type=int, help="reference index (default: frame - gop size)")
    m.add_argument("--out", required=True, type=Path)
    _add_config_flags(m)

    i = sub.add_parser("interp-debug", help="dump interpolation intermediates")
    i.add_argument("--input", required=True, type=Path)
    i.add_argument("--flows", required=True)
    i.add_argument("--front", required=True, type=int)
    i.add_argument("--back", required=True, type=int)
    i.add_argument("--frame", required=True, type=int)
    i.add_argument("--out", required=True, type=Path)
    _add_config_flags(i)

    f = sub.add_parser("flow", help="estimate a flow pair or round-trip a .flo file")
    f.add_argument("--in", dest="infile", type=Path, help=".flo file to round-trip")
    f.add_argument("--input", type=Path, help="frame directory (estimation mode)")
    f.add_argument("--a", type=int, help="source frame index")
    f.add_argument("--b", type=int, help="target frame index")
    f.add_argument("--source", help="flow source selector (estimation mode)")
    f.add_argument("--out", required=True, type=Path)

    g = sub.add_parser("metrics", help="motion distance between two sequences")
    g.add_argument("--input", required=True, type=Path)
    g.add_argument("--output", required=True, type=Path)
    g.add_argument("--flows", required=True, help="content-driven flow source selector")

    return parser


def _cmd_translate(args) -> int:
    cfg = _build_config(args)
    frames = read_sequence(args.input)
    conditions = read_sequence(args.conditions)
    flow_src = parse_flow_source(args.flows)
    backend = parse_backend(args.backend)
    result = run_pipeline(frames, conditions, flow_src, backend, cfg,
                          prompt=args.prompt, seed=args.seed, jobs=args.jobs)
    args.out.mkdir(parents=True, exist_ok=True)
    write_sequence(result.outputs, args.out)
    result.report.save(args.out / "report.txt")
    if args.diagnostics:
        _dump_diagnostics(result, args.diagnostics)
    print(f"wrote {len(result.outputs)} frames to {args.out} "
          f"({result.report.generator_calls} generator calls)")
    return EXIT_OK


def _dump_diagnostics(result, root: Path) -> None:
    for idx, diag in result.pframe_diagnostics.items():
        d = root / f"frame_{idx:04d}"
        d.mkdir(parents=True, exist_ok=True)
        write_scalar_field_png(diag.residual, d / "residual.png")
        write_scalar_field_png(diag.occlusion, d / "occlusion.png")
        write_scalar_field_png(_mask_field(diag.mask), d / "mask.png")
        write_frame(diag.warped, d / "warped.png")
    for idx, diag in result.bframe_diagnostics.items():
        d = root / f"frame_{idx:04d}"
        d.mkdir(parents=True, exist_ok=True)
        write_scalar_field_png(diag.score_front, d / "score_front.png")


def _mask_field(mask):
    return ScalarField(mask.data.astype(float))


def _cmd_mask_debug(args) -> int:
    cfg = _build_config(args)
    frames = read_sequence(args.input)
    flow_src = parse_flow_source(args.flows)
    cur = args.frame
    ref = args.ref if args.ref is not None else cur - cfg.gop_size
    if not (0 <= ref < len(frames)) or not (0 <= cur < len(frames)) or ref == cur:
        raise UsageError(f"bad frame/ref pair ({cur}, {ref}) for {len(frames)} frames")
    fwd = get_flow(flow_src, frames, ref, cur)
    rev = get_flow(flow_src, frames, cur, ref)
    warped = backward_warp(frames[ref], fwd)
    residual = residual_map(frames[cur], warped)
    occlusion = forward_warp_ones(rev)
    raw = inpaint_mask(occlusion, residual, cfg.alpha, cfg.mask_threshold)
    mask = expand_mask(raw, cfg.blur_sigma, cfg.blur_kernel_radius,
                       cfg.blur_binarize_threshold)
    args.out.mkdir(parents=True, exist_ok=True)
    write_scalar_field_png(residual, args.out / "residual.png")
    write_scalar_field_png(occlusion, args.out / "occlusion.png")
    write_scalar_field_png(_mask_field(mask), args.out / "mask.png")
    write_frame(warped, args.out / "warped.png")
    print(f"wrote mask intermediates for frame {cur} (ref {ref}) to {args.out}")
    return EXIT_OK


def _cmd_interp_debug(args) -> int:
    cfg = _build_config(args)
    frames = read_sequence(args.input)
    flow_src = parse_flow_source(args.flows)
    # no backend here: the input key frames stand in for generated outputs
    out, diag = interpolate_bframe(frames[args.front], frames[args.back],
                                   frames[args.front], frames[args.back],
                                   frames[args.frame], flow_src, cfg,
                                   (args.front, args.back, args.frame))
    args.out.mkdir(parents=True, exist_ok=True)
    write_scalar_field_png(diag.score_front, args.out / "score_front.png")
    write_frame(diag.warped_front, args.out / "warped_front.png")
    write_frame(diag.warped_back, args.out / "warped_back.png")
    write_frame(out, args.out / "blended.png")
    print(f"wrote interpolation intermediates for frame {args.frame} to {args.out}")
    return EXIT_OK


def _cmd_flow(args) -> int:
    if args.infile is not None:
        field = read_flo(args.infile)
        write_flo(field, args.out)
        print(f"round-tripped {args.infile} -> {args.out} ({field.width}x{field.height})")
        return EXIT_OK
    if args.input is None or args.a is None or args.b is None or args.source is None:
        raise UsageError("flow estimation needs --input, --a, --b and --source "
                         "(or --in for a round trip)")
    frames = read_sequence(args.input)
    field = get_flow(parse_flow_source(args.source), frames, args.a, args.b)
    write_flo(field, args.out)
    print(f"wrote flow ({args.a} -> grid {args.b}) to {args.out}")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    flow_src = parse_flow_source(args.flows)
    input_seq = read_sequence(args.input)
    output_seq = read_sequence(args.output)
    err = flow_error(input_seq, output_seq, flow_src)
    print(f"flow_error_px = {err:.6f}")
    return EXIT_OK


_COMMANDS = {
    "translate": _cmd_translate,
    "mask-debug": _cmd_mask_debug,
    "interp-debug": _cmd_interp_debug,
    "flow": _cmd_flow,
    "metrics": _cmd_metrics,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MissingFramesError, DecodeError, FlowFileError, FileNotFoundError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BackendError as exc:
        print(f"service error: {exc}", file=sys.stderr)
        return EXIT_SERVICE
    except (PipelineError, ValueError, IndexError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
