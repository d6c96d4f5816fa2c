"""Flow sources: .flo files, block matching against a SAD oracle, remote client."""

import base64
import json
import struct
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from http.server import BaseHTTPRequestHandler, HTTPServer, ThreadingHTTPServer

import numpy as np
import pytest

from flowpaint.core import BackendError, FlowField, FlowFileError, Frame, InvalidFieldError
from flowpaint.flow import (
    BlockMatcher,
    FileStore,
    RemoteEstimator,
    block_match,
    get_flow,
    read_flo,
    write_flo,
)
from flowpaint.frameio import FrameSequence
from flowpaint.warp import backward_warp

from conftest import random_frame, sliding_scene


# ---------------------------------------------------------------- .flo format

def test_flo_known_bytes(tmp_path):
    path = tmp_path / "tiny.flo"
    payload = struct.pack("<fii", 202021.25, 2, 1) + struct.pack("<4f", 1.0, 0.0, 0.0, -1.0)
    path.write_bytes(payload)
    field = read_flo(path)
    assert field.width == 2 and field.height == 1
    assert np.array_equal(field.data, np.array([[[1.0, 0.0], [0.0, -1.0]]], dtype=np.float32))


def test_flo_bad_magic(tmp_path):
    path = tmp_path / "bad.flo"
    path.write_bytes(b"XXXX" + struct.pack("<ii", 1, 1) + b"\0" * 8)
    with pytest.raises(FlowFileError, match="magic"):
        read_flo(path)


def test_flo_truncated(tmp_path):
    path = tmp_path / "short.flo"
    path.write_bytes(struct.pack("<fii", 202021.25, 4, 4) + b"\0" * 10)
    with pytest.raises(FlowFileError, match="truncated"):
        read_flo(path)


def test_flo_round_trip_bit_exact(tmp_path, rng):
    field = FlowField((rng.random((6, 9, 2)).astype(np.float32) - 0.5) * 100)
    path = tmp_path / "rt.flo"
    write_flo(field, path)
    back = read_flo(path)
    assert back.data.tobytes() == field.data.tobytes()


def test_flo_round_trip_small_cases(tmp_path):
    zeros = FlowField(np.zeros((4, 4, 2), dtype=np.float32))
    write_flo(zeros, tmp_path / "z.flo")
    assert read_flo(tmp_path / "z.flo").data.tobytes() == zeros.data.tobytes()
    one = FlowField(np.array([[[3.5, -2.25]]], dtype=np.float32))
    write_flo(one, tmp_path / "o.flo")
    assert read_flo(tmp_path / "o.flo").data.tobytes() == one.data.tobytes()


def test_flow_field_rejects_nan():
    bad = np.zeros((2, 2, 2), dtype=np.float32)
    bad[0, 0, 0] = np.nan
    with pytest.raises(InvalidFieldError):
        FlowField(bad)


# ------------------------------------------------------------- block matching

def oracle_block_displacement(a: np.ndarray, b: np.ndarray, y0: int, x0: int,
                              block: int, radius: int) -> tuple[int, int]:
    """Exhaustive SAD search for one tile of b, mirroring the tie-break rule."""
    h, w = a.shape[:2]
    tile = b[y0: y0 + block, x0: x0 + block]
    best = None
    for u in range(-radius, radius + 1):
        for v in range(-radius, radius + 1):
            sad = 0.0
            for dy in range(tile.shape[0]):
                for dx in range(tile.shape[1]):
                    sy = min(max(y0 + dy + v, 0), h - 1)
                    sx = min(max(x0 + dx + u, 0), w - 1)
                    sad += float(np.abs(tile[dy, dx] - a[sy, sx]).sum())
            key = (sad, u * u + v * v, u, v)
            if best is None or key < best:
                best = key
    return best[2], best[3]


def test_identical_frames_zero_flow(rng):
    f = random_frame(rng, 16, 16)
    flow = block_match(f, f, block=4, radius=3)
    assert np.array_equal(flow.data, np.zeros((16, 16, 2), dtype=np.float32))


def test_flat_frames_tie_break_to_zero():
    const = Frame(np.full((8, 8, 3), 0.25))
    flow = block_match(const, const, block=4, radius=2)
    assert np.array_equal(flow.data, np.zeros((8, 8, 2), dtype=np.float32))


def test_right_shift_convention(rng):
    # b shows a's content moved right by 2: the field on b's grid points back
    # into a with u = -2
    scene = sliding_scene(2, 32, 32, 2, seed=5)
    b, a = scene[0], scene[1]  # scene slides left, so frame 0 = frame 1 moved right
    flow = block_match(a, b, block=8, radius=4)
    interior = flow.data[:, 8:-8]
    assert np.all(interior[:, :, 0] == -2.0)
    assert np.all(interior[:, :, 1] == 0.0)


def test_left_shift_convention(rng):
    scene = sliding_scene(2, 32, 32, 3, seed=6)
    a, b = scene[0], scene[1]  # b = a shifted left by 3
    flow = block_match(a, b, block=8, radius=4)
    interior = flow.data[:, 8:-8]
    assert np.all(interior[:, :, 0] == 3.0)
    assert np.all(interior[:, :, 1] == 0.0)


def test_block_match_against_oracle(rng):
    scene = sliding_scene(2, 16, 16, 1, seed=9)
    a, b = scene[0], scene[1]
    flow = block_match(a, b, block=8, radius=2)
    for ty in (0, 8):
        for tx in (0, 8):
            u, v = oracle_block_displacement(a.data, b.data, ty, tx, 8, 2)
            assert flow.data[ty, tx, 0] == u
            assert flow.data[ty, tx, 1] == v


def test_partial_border_tiles(rng):
    # 10x10 with block 4 leaves 2-wide border tiles; must not crash and must
    # stay within the search window
    a = random_frame(rng, 10, 10)
    b = random_frame(rng, 10, 10)
    flow = block_match(a, b, block=4, radius=2)
    assert flow.width == 10 and flow.height == 10
    assert np.all(np.abs(flow.data) <= 2)


def test_convention_self_consistency_psnr(rng):
    # backward-warping A with the estimated field reconstructs B where motion
    # is pure translation and in-bounds
    shift = 2
    scene = sliding_scene(2, 48, 48, shift, seed=11)
    a, b = scene[0], scene[1]
    flow = get_flow(BlockMatcher(block_size=8, search_radius=4), scene, 0, 1)
    recon = backward_warp(a, flow)
    crop = (slice(8, -8), slice(8, 48 - 8 - shift))
    mse = float(np.mean((recon.data[crop] - b.data[crop]) ** 2))
    psnr = 10.0 * np.log10(1.0 / max(mse, 1e-12))
    assert psnr > 40.0


# ------------------------------------------------------------------ FileStore

def test_filestore_missing_pair_names_file(tmp_path, rng):
    scene = sliding_scene(11, 8, 8, 1)
    store = FileStore(tmp_path)
    with pytest.raises(FlowFileError, match="flow_0000_0010.flo"):
        get_flow(store, scene, 0, 10)


def test_filestore_round_trip(tmp_path, rng):
    scene = sliding_scene(2, 8, 8, 1)
    field = FlowField(np.full((8, 8, 2), -1.0, dtype=np.float32))
    write_flo(field, tmp_path / "flow_0000_0001.flo")
    got = get_flow(FileStore(tmp_path), scene, 0, 1)
    assert np.array_equal(got.data, field.data)


def test_get_flow_validates_indices(rng):
    scene = sliding_scene(3, 8, 8, 1)
    src = BlockMatcher(2, 1)
    with pytest.raises(ValueError):
        get_flow(src, scene, 1, 1)
    with pytest.raises(IndexError):
        get_flow(src, scene, 0, 5)


# ------------------------------------------------------------ remote estimator

class _FlowHandler(BaseHTTPRequestHandler):
    respond_with = "echo-zero"  # zero field of the request size

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        if self.path != "/v1/flow":
            self.send_response(404)
            self.end_headers()
            return
        w, h = body["width"], body["height"]
        flow = np.zeros((h, w, 2), dtype="<f4")
        payload = json.dumps(
            {"flow_b64": base64.b64encode(flow.tobytes()).decode("ascii")}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def flow_server():
    server = HTTPServer(("127.0.0.1", 0), _FlowHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


def test_remote_estimator_happy_path(flow_server, rng):
    scene = sliding_scene(2, 6, 7, 1)
    flow = get_flow(RemoteEstimator(flow_server), scene, 0, 1)
    assert flow.width == 7 and flow.height == 6
    assert np.all(flow.data == 0.0)


def test_remote_estimator_unreachable(rng):
    scene = sliding_scene(2, 4, 4, 1)
    src = RemoteEstimator("http://127.0.0.1:1", timeout=0.5)
    with pytest.raises(BackendError, match="unreachable"):
        get_flow(src, scene, 0, 1)


class _SlowCountingHandler(_FlowHandler):
    lock = threading.Lock()
    live = 0
    peak = 0

    def do_POST(self):
        cls = _SlowCountingHandler
        with cls.lock:
            cls.live += 1
            cls.peak = max(cls.peak, cls.live)
        time.sleep(0.05)
        try:
            super().do_POST()
        finally:
            with cls.lock:
                cls.live -= 1


def test_remote_estimator_in_flight_limit(rng):
    server = ThreadingHTTPServer(("127.0.0.1", 0), _SlowCountingHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        _SlowCountingHandler.peak = 0
        scene = sliding_scene(2, 6, 6, 1)
        src = RemoteEstimator(f"http://127.0.0.1:{server.server_port}", max_in_flight=2)
        with ThreadPoolExecutor(max_workers=6) as pool:
            flows = list(pool.map(lambda _: get_flow(src, scene, 0, 1), range(6)))
        assert all(f.width == 6 for f in flows)
        assert _SlowCountingHandler.peak <= 2
    finally:
        server.shutdown()


def test_remote_estimator_rejects_bad_limit():
    with pytest.raises(ValueError):
        RemoteEstimator("http://x", max_in_flight=0)
