"""Frame generation backends: full-frame synthesis and masked inpainting.

Two backends share one interface: ``MockStylizer`` applies a small pure
pixel-wise transform to the condition image (deterministic, analytically
checkable), and ``RemoteService`` talks to an HTTP generation service.

The kept-pixel contract is enforced here, client-side, for every backend:
after upsampling the latent mask, output pixels under a 1 are copied from the
warped base frame byte-for-byte, and only the 0 pixels come from the backend.
A backend therefore cannot repaint content the motion compensation already
produced, no matter what it returns. An all-ones mask short-circuits without
consulting the backend at all.
"""

from __future__ import annotations

import base64
import math
from dataclasses import dataclass

import numpy as np
import requests

from .core import BackendError, BinaryMask, DimensionMismatchError, Frame
from .frameio import decode_frame_png, encode_frame_png
from .maskgen import upsample_mask


def _transform_identity(data: np.ndarray) -> np.ndarray:
    return data


def _transform_invert(data: np.ndarray) -> np.ndarray:
    return 1.0 - data


def _transform_channel_rotate(data: np.ndarray) -> np.ndarray:
    return data[:, :, [1, 2, 0]]


_SEPIA = np.array([[0.393, 0.769, 0.189],
                   [0.349, 0.686, 0.168],
                   [0.272, 0.534, 0.131]], dtype=np.float64)


def _transform_sepia(data: np.ndarray) -> np.ndarray:
    return np.clip(data @ _SEPIA.T, 0.0, 1.0)


MOCK_TRANSFORMS = {
    "identity": _transform_identity,
    "invert": _transform_invert,
    "rotate": _transform_channel_rotate,
    "sepia": _transform_sepia,
}


@dataclass(frozen=True)
class MockStylizer:
    """Pure pixel-wise restyling of the condition; no randomness, no network."""

    transform: str = "identity"

    def __post_init__(self):
        if self.transform not in MOCK_TRANSFORMS:
            raise ValueError(
                f"unknown mock transform {self.transform!r}; "
                f"choose from {sorted(MOCK_TRANSFORMS)}")


@dataclass(frozen=True)
class RemoteService:
    """Client for an HTTP generation service (POST /v1/generate)."""

    endpoint: str
    timeout: float = 60.0
    steps: int = 20

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")


GeneratorBackend = MockStylizer | RemoteService


@dataclass(frozen=True)
class GenerationRequest:
    """Inputs for one generation call.

    ``mode`` is "full" (fresh frame from the condition) or "inpaint"
    (regenerate only the latent-mask zeros of ``base``). The mask lives in
    latent resolution: ceil(frame dims / latent_factor).
    """

    mode: str
    condition: Frame
    prompt: str = ""
    seed: int = 0
    base: Frame | None = None
    mask: BinaryMask | None = None
    latent_factor: int = 8

    def __post_init__(self):
        if self.mode not in ("full", "inpaint"):
            raise ValueError(f"mode must be 'full' or 'inpaint', got {self.mode!r}")
        if self.latent_factor < 1:
            raise ValueError(f"latent_factor must be >= 1, got {self.latent_factor}")
        if self.mode == "inpaint":
            if self.base is None or self.mask is None:
                raise ValueError("inpaint mode requires both base and mask")
            if (self.base.height, self.base.width) != (self.condition.height,
                                                       self.condition.width):
                raise DimensionMismatchError(
                    f"base {self.base.width}x{self.base.height} vs condition "
                    f"{self.condition.width}x{self.condition.height}")
            want_w = math.ceil(self.condition.width / self.latent_factor)
            want_h = math.ceil(self.condition.height / self.latent_factor)
            if (self.mask.height, self.mask.width) != (want_h, want_w):
                raise DimensionMismatchError(
                    f"latent mask is {self.mask.width}x{self.mask.height}, "
                    f"expected {want_w}x{want_h} for factor {self.latent_factor}")


def _backend_frame(backend: GeneratorBackend, req: GenerationRequest) -> Frame:
    """Raw backend output at the condition's size, before any compositing."""
    if isinstance(backend, MockStylizer):
        return Frame(MOCK_TRANSFORMS[backend.transform](req.condition.data))
    if isinstance(backend, RemoteService):
        return _remote_generate(backend, req)
    raise TypeError(f"unknown backend {backend!r}")


def generate_full(backend: GeneratorBackend, req: GenerationRequest) -> Frame:
    """Generate a whole frame from the condition (key-frame bootstrap)."""
    if req.mode != "full":
        raise ValueError(f"generate_full needs mode='full', got {req.mode!r}")
    out = _backend_frame(backend, req)
    if (out.height, out.width) != (req.condition.height, req.condition.width):
        raise BackendError(
            f"backend returned {out.width}x{out.height}, condition is "
            f"{req.condition.width}x{req.condition.height}")
    return out


def generate_inpaint(backend: GeneratorBackend, req: GenerationRequest) -> Frame:
    """Regenerate the latent-mask zeros of ``req.base``; keep everything else.

    Kept pixels (mask 1 after nearest-neighbor upsampling) are copied from
    the base exactly. With an all-ones mask the base is returned as-is and
    the backend is never consulted.
    """
    if req.mode != "inpaint":
        raise ValueError(f"generate_inpaint needs mode='inpaint', got {req.mode!r}")
    assert req.base is not None and req.mask is not None
    pixel_mask = upsample_mask(req.mask, req.latent_factor,
                               req.base.width, req.base.height)
    if np.all(pixel_mask.data == 1):
        return req.base
    generated = _backend_frame(backend, req)
    if (generated.height, generated.width) != (req.base.height, req.base.width):
        raise BackendError(
            f"backend returned {generated.width}x{generated.height}, base is "
            f"{req.base.width}x{req.base.height}")
    keep = pixel_mask.data[:, :, None] == 1
    return Frame(np.where(keep, req.base.data, generated.data))


def _remote_generate(svc: RemoteService, req: GenerationRequest) -> Frame:
    body = {
        "mode": req.mode,
        "prompt": req.prompt,
        "seed": req.seed,
        "steps": svc.steps,
        "width": req.condition.width,
        "height": req.condition.height,
        "condition_png_b64": base64.b64encode(encode_frame_png(req.condition)).decode("ascii"),
    }
    if req.mode == "inpaint":
        body["base_png_b64"] = base64.b64encode(encode_frame_png(req.base)).decode("ascii")
        body["mask_b64"] = base64.b64encode(req.mask.data.tobytes()).decode("ascii")
        body["latent_factor"] = req.latent_factor
    url = svc.endpoint.rstrip("/") + "/v1/generate"
    try:
        resp = requests.post(url, json=body, timeout=svc.timeout)
    except requests.Timeout as exc:
        raise BackendError(f"generation service timed out: {url}") from exc
    except requests.RequestException as exc:
        raise BackendError(f"generation service unreachable: {url}: {exc}") from exc
    if resp.status_code != 200:
        raise BackendError(
            f"generation service returned {resp.status_code}: {resp.text[:200]}")
    try:
        payload = resp.json()
        blob = base64.b64decode(payload["frame_png_b64"])
    except (ValueError, KeyError) as exc:
        raise BackendError(f"malformed generation response: {exc}") from exc
    return decode_frame_png(blob)
