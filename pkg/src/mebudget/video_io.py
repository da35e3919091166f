"""Luma frame containers, padded reference planes, and 4:2:0 file I/O.

Only the luma plane is kept in memory: the matcher works on 16x16 luma
blocks and never reads chroma. Frame dimensions must be multiples of 16
so the macroblock grid tiles the frame exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

MB_SIZE = 16
SEARCH_RANGE = 32


class VideoFormatError(ValueError):
    """Malformed or unsupported video input."""


class MbIndex(NamedTuple):
    col: int
    row: int


def _check_dimensions(width, height):
    if width <= 0 or height <= 0:
        raise VideoFormatError(f"bad frame size {width}x{height}")
    if width % MB_SIZE or height % MB_SIZE:
        raise VideoFormatError(
            f"dimensions must be multiples of {MB_SIZE}, got {width}x{height}")


@dataclass(frozen=True)
class LumaFrame:
    """One 8-bit luma plane, shape (height, width)."""

    plane: np.ndarray

    def __post_init__(self):
        plane = np.asarray(self.plane)
        if plane.ndim != 2:
            raise VideoFormatError("luma plane must be 2-D")
        if plane.dtype != np.uint8:
            raise VideoFormatError(f"luma plane must be uint8, got {plane.dtype}")
        _check_dimensions(plane.shape[1], plane.shape[0])
        object.__setattr__(self, "plane", plane)

    @property
    def width(self) -> int:
        return self.plane.shape[1]

    @property
    def height(self) -> int:
        return self.plane.shape[0]

    @property
    def mb_cols(self) -> int:
        return self.width // MB_SIZE

    @property
    def mb_rows(self) -> int:
        return self.height // MB_SIZE

    def block(self, mb: MbIndex) -> np.ndarray:
        """16x16 view of the macroblock at grid position (col, row)."""
        col, row = mb
        if not (0 <= col < self.mb_cols and 0 <= row < self.mb_rows):
            raise IndexError(f"macroblock {col},{row} outside grid")
        y, x = row * MB_SIZE, col * MB_SIZE
        return self.plane[y:y + MB_SIZE, x:x + MB_SIZE]


class PaddedFrame:
    """Reference plane with edge-replicated padding.

    Padding by the search range makes every displacement within
    +-SEARCH_RANGE evaluable without bounds checks; samples outside the
    original frame replicate the nearest edge pixel.
    """

    def __init__(self, frame: LumaFrame, pad: int = SEARCH_RANGE):
        if pad < 0:
            raise ValueError("pad must be >= 0")
        self.frame = frame
        self.pad = pad
        self.plane = np.pad(frame.plane, pad, mode="edge")

    @property
    def width(self) -> int:
        return self.frame.width

    @property
    def height(self) -> int:
        return self.frame.height

    def sample(self, x: int, y: int) -> int:
        """Pixel at unpadded coordinates; valid for x in [-pad, width+pad)."""
        return int(self.plane[y + self.pad, x + self.pad])

    def block(self, x: int, y: int, size: int = MB_SIZE) -> np.ndarray:
        """size x size view whose top-left sits at unpadded (x, y)."""
        px, py = x + self.pad, y + self.pad
        if px < 0 or py < 0 or px + size > self.plane.shape[1] \
                or py + size > self.plane.shape[0]:
            raise IndexError(f"block at {x},{y} leaves the padded plane")
        return self.plane[py:py + size, px:px + size]


_Y4M_MAGIC = b"YUV4MPEG2"


def _parse_y4m_header(line: bytes):
    tokens = line.decode("ascii", "replace").split(" ")
    if tokens[0] != _Y4M_MAGIC.decode():
        raise VideoFormatError("not a YUV4MPEG2 stream")
    width = height = None
    chroma = "420"
    for tok in tokens[1:]:
        if not tok:
            continue
        key, val = tok[0], tok[1:]
        if key == "W":
            width = int(val)
        elif key == "H":
            height = int(val)
        elif key == "C":
            chroma = val
    if width is None or height is None:
        raise VideoFormatError("Y4M header missing W or H")
    if not chroma.startswith("420"):
        raise VideoFormatError(f"unsupported chroma subsampling C{chroma}")
    return width, height


def load_y4m(path) -> list[LumaFrame]:
    """Load all frames of a 4:2:0 Y4M file, keeping luma only."""
    data = Path(path).read_bytes()
    nl = data.find(b"\n")
    if nl < 0:
        raise VideoFormatError("missing Y4M stream header")
    width, height = _parse_y4m_header(data[:nl])
    _check_dimensions(width, height)
    luma_size = width * height
    frame_size = luma_size + (width // 2) * (height // 2) * 2
    frames = []
    pos = nl + 1
    while pos < len(data):
        nl = data.find(b"\n", pos)
        if nl < 0 or not data[pos:nl].startswith(b"FRAME"):
            raise VideoFormatError(f"missing FRAME marker at offset {pos}")
        start = nl + 1
        payload = data[start:start + frame_size]
        if len(payload) < frame_size:
            raise VideoFormatError("truncated frame payload")
        plane = np.frombuffer(payload[:luma_size], dtype=np.uint8)
        frames.append(LumaFrame(plane.reshape(height, width).copy()))
        pos = start + frame_size
    if not frames:
        raise VideoFormatError("Y4M stream holds no frames")
    return frames


def write_y4m(path, frames, fps=(30, 1)):
    """Write frames as C420 Y4M with flat mid-grey chroma."""
    if not frames:
        raise VideoFormatError("nothing to write")
    w, h = frames[0].width, frames[0].height
    chroma = np.full((h // 2) * (w // 2), 128, dtype=np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(f"YUV4MPEG2 W{w} H{h} F{fps[0]}:{fps[1]} Ip A1:1 C420\n"
                 .encode("ascii"))
        for frame in frames:
            if (frame.width, frame.height) != (w, h):
                raise VideoFormatError("frame size changes mid-stream")
            fh.write(b"FRAME\n")
            fh.write(frame.plane.tobytes())
            fh.write(chroma)
            fh.write(chroma)


def load_raw_yuv420(path, width: int, height: int) -> list[LumaFrame]:
    """Load headerless planar 4:2:0; dimensions must be supplied."""
    _check_dimensions(width, height)
    data = Path(path).read_bytes()
    frame_size = width * height * 3 // 2
    if not data or len(data) % frame_size:
        raise VideoFormatError(
            f"file size {len(data)} is not a multiple of the "
            f"{frame_size}-byte frame size for {width}x{height}")
    luma_size = width * height
    frames = []
    for off in range(0, len(data), frame_size):
        plane = np.frombuffer(data[off:off + luma_size], dtype=np.uint8)
        frames.append(LumaFrame(plane.reshape(height, width).copy()))
    return frames


def write_raw_yuv420(path, frames):
    """Write headerless planar 4:2:0 with flat mid-grey chroma."""
    if not frames:
        raise VideoFormatError("nothing to write")
    w, h = frames[0].width, frames[0].height
    chroma = np.full((h // 2) * (w // 2), 128, dtype=np.uint8).tobytes()
    with open(path, "wb") as fh:
        for frame in frames:
            if (frame.width, frame.height) != (w, h):
                raise VideoFormatError("frame size changes mid-stream")
            fh.write(frame.plane.tobytes())
            fh.write(chroma)
            fh.write(chroma)
