"""flowpaint: motion-compensated video-to-video translation.

The first frame of a sequence is generated fresh from its condition image;
later key frames are warped forward from the previous key frame's output and
only newly revealed content is regenerated; everything in between is
interpolated from its two bracketing key frames with no generator call.
"""

from .core import (
    BackendError,
    BinaryMask,
    DecodeError,
    DimensionMismatchError,
    FlowField,
    FlowFileError,
    Frame,
    InvalidConfigError,
    InvalidFieldError,
    MissingFramesError,
    PipelineConfig,
    PipelineError,
    ScalarField,
    load_config,
    save_config,
    validate_config,
)
from .frameio import FrameSequence, read_sequence, write_scalar_field_png, write_sequence
from .flow import BlockMatcher, FileStore, RemoteEstimator, block_match, get_flow, read_flo, write_flo
from .warp import backward_warp, backward_warp_scalar, forward_warp_ones
from .maskgen import expand_mask, inpaint_mask, residual_map, to_latent_mask, upsample_mask
from .generator import GenerationRequest, MockStylizer, RemoteService, generate_full, generate_inpaint
from .pframe import generate_pframe
from .bframe import interpolate_bframe, match_scores
from .pipeline import GopPlan, Role, RunReport, flow_error, plan_gop, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "BackendError", "BinaryMask", "BlockMatcher", "DecodeError",
    "DimensionMismatchError", "FileStore", "FlowField", "FlowFileError",
    "Frame", "FrameSequence", "GenerationRequest", "GopPlan",
    "InvalidConfigError", "InvalidFieldError", "MissingFramesError",
    "MockStylizer", "PipelineConfig", "PipelineError", "RemoteEstimator",
    "RemoteService", "Role", "RunReport", "ScalarField", "backward_warp",
    "backward_warp_scalar", "block_match", "expand_mask", "flow_error",
    "forward_warp_ones", "generate_full", "generate_inpaint",
    "generate_pframe", "get_flow", "inpaint_mask", "interpolate_bframe",
    "load_config", "match_scores", "plan_gop", "read_flo", "read_sequence",
    "residual_map", "run_pipeline", "save_config", "to_latent_mask",
    "upsample_mask", "validate_config", "write_flo",
    "write_scalar_field_png", "write_sequence",
]
