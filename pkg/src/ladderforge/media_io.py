"""Y4M (YUV4MPEG2) ingest and frame-difference primitives.

Only progressive planar 4:2:0 at 8 or 10 bits is accepted. Luma is
normalized to [0, 1] at ingest (divide by 2^depth - 1) so everything
downstream is bit-depth agnostic; chroma planes are skipped, never decoded.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from typing import BinaryIO, Iterator

import numpy as np

from .errors import (
    MalformedHeader,
    ShapeMismatch,
    TruncatedFrame,
    UnsupportedFormat,
)

_MAGIC = b"YUV4MPEG2"
# Y4M colourspace tags we can decode, mapped to sample bit depth.
_CHROMA_DEPTH = {
    "420": 8,
    "420jpeg": 8,
    "420paldv": 8,
    "420mpeg2": 8,
    "420p10": 10,
}
MIN_DIMENSION = 16  # floor for four dyadic scales of 3x3 analysis blocks
_MAX_HEADER_BYTES = 4096


@dataclass(frozen=True)
class VideoHeader:
    width: int
    height: int
    frame_rate: Fraction
    bit_depth: int
    chroma: str

    @property
    def bytes_per_sample(self) -> int:
        return 1 if self.bit_depth == 8 else 2

    @property
    def frame_size_bytes(self) -> int:
        luma = self.width * self.height
        chroma = (self.width // 2) * (self.height // 2) * 2
        return (luma + chroma) * self.bytes_per_sample


@dataclass(frozen=True)
class LumaFrame:
    """Normalized luma plane; samples is float64 with shape (height, width)."""

    width: int
    height: int
    samples: np.ndarray
    index: int


@dataclass(frozen=True)
class DiffFrame:
    """Signed difference of consecutive luma planes; samples in [-1, 1]."""

    width: int
    height: int
    samples: np.ndarray
    index: int


def parse_y4m_header(data: bytes) -> VideoHeader:
    """Parse the stream header line from a byte prefix.

    Raises MalformedHeader for structural problems and UnsupportedFormat for
    valid Y4M we refuse (interlaced, chroma other than 8/10-bit 4:2:0,
    frames smaller than MIN_DIMENSION or with odd dimensions).
    """
    newline = data.find(b"\n", 0, _MAX_HEADER_BYTES)
    if newline < 0:
        raise MalformedHeader("header line is not newline-terminated")
    line = data[:newline]
    if not line.startswith(_MAGIC) or (len(line) > len(_MAGIC) and line[len(_MAGIC):len(_MAGIC) + 1] != b" "):
        raise MalformedHeader("missing YUV4MPEG2 magic")

    width = height = None
    rate = None
    chroma = "420"
    for token in line[len(_MAGIC):].split(b" "):
        if not token:
            continue
        key, value = token[:1], token[1:].decode("ascii", "replace")
        if key == b"W":
            width = _parse_int(value, "width")
        elif key == b"H":
            height = _parse_int(value, "height")
        elif key == b"F":
            rate = _parse_rate(value)
        elif key == b"I":
            if value != "p":
                raise UnsupportedFormat(f"interlaced stream (I{value}) not supported")
        elif key == b"C":
            if value not in _CHROMA_DEPTH:
                raise UnsupportedFormat(f"colourspace C{value} not supported")
            chroma = value
        # A (aspect) and X (extensions) are irrelevant here and ignored.

    if width is None or height is None:
        raise MalformedHeader("header must carry W and H")
    if rate is None:
        raise MalformedHeader("header must carry a frame rate (F)")
    if width < MIN_DIMENSION or height < MIN_DIMENSION:
        raise UnsupportedFormat(
            f"{width}x{height} below the {MIN_DIMENSION}x{MIN_DIMENSION} minimum"
        )
    if width % 2 or height % 2:
        raise UnsupportedFormat("4:2:0 chroma requires even dimensions")
    return VideoHeader(width, height, rate, _CHROMA_DEPTH[chroma], chroma)


def _parse_int(text: str, what: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise MalformedHeader(f"non-integer {what}: {text!r}") from None
    if value <= 0:
        raise MalformedHeader(f"non-positive {what}: {value}")
    return value


def _parse_rate(text: str) -> Fraction:
    num, sep, den = text.partition(":")
    if not sep:
        raise MalformedHeader(f"frame rate must be num:den, got {text!r}")
    try:
        rate = Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError):
        raise MalformedHeader(f"bad frame rate {text!r}") from None
    if rate <= 0:
        raise MalformedHeader(f"non-positive frame rate {text!r}")
    return rate


def read_header(stream: BinaryIO) -> VideoHeader:
    """Consume and parse the header line, leaving the stream at frame 0."""
    line = _read_line(stream)
    if line is None:
        raise MalformedHeader("empty stream")
    return parse_y4m_header(line + b"\n")


def _read_line(stream: BinaryIO) -> bytes | None:
    """Read bytes up to (not including) a newline; None on immediate EOF."""
    chunks = []
    total = 0
    while True:
        byte = stream.read(1)
        if not byte:
            if not chunks:
                return None
            raise MalformedHeader("stream ended inside a record line")
        if byte == b"\n":
            return b"".join(chunks)
        chunks.append(byte)
        total += 1
        if total > _MAX_HEADER_BYTES:
            raise MalformedHeader("record line exceeds sane length")


def _read_frame_record(stream: BinaryIO, header: VideoHeader, index: int) -> LumaFrame | None:
    """Read one frame; None when the stream ends cleanly at a frame boundary."""
    marker = _read_line(stream)
    if marker is None:
        return None
    if marker != b"FRAME" and not marker.startswith(b"FRAME "):
        raise MalformedHeader(f"expected FRAME record, got {marker[:24]!r}")

    bps = header.bytes_per_sample
    luma_bytes = header.width * header.height * bps
    chroma_bytes = (header.width // 2) * (header.height // 2) * bps * 2
    buf = stream.read(luma_bytes)
    if len(buf) < luma_bytes:
        raise TruncatedFrame(f"frame {index}: luma plane truncated")
    skipped = stream.read(chroma_bytes)
    if len(skipped) < chroma_bytes:
        raise TruncatedFrame(f"frame {index}: chroma planes truncated")

    dtype = np.uint8 if bps == 1 else np.dtype("<u2")
    peak = float((1 << header.bit_depth) - 1)
    samples = np.frombuffer(buf, dtype=dtype).astype(np.float64)
    samples = samples.reshape(header.height, header.width) / peak
    return LumaFrame(header.width, header.height, samples, index)


def read_luma_frame(stream: BinaryIO, header: VideoHeader, index: int) -> LumaFrame:
    """Read the next frame; raises TruncatedFrame if the stream is exhausted."""
    frame = _read_frame_record(stream, header, index)
    if frame is None:
        raise TruncatedFrame(f"stream ended before frame {index}")
    return frame


def iter_luma_frames(stream: BinaryIO, header: VideoHeader) -> Iterator[LumaFrame]:
    """Yield frames until the stream ends at a clean frame boundary."""
    index = 0
    while True:
        frame = _read_frame_record(stream, header, index)
        if frame is None:
            return
        yield frame
        index += 1


def open_y4m(path) -> tuple[VideoHeader, Iterator[LumaFrame]]:
    """Open a file and return (header, frame iterator owning the handle)."""
    stream = open(path, "rb")
    try:
        header = read_header(stream)
    except Exception:
        stream.close()
        raise
    return header, _owned_frames(stream, header)


def _owned_frames(stream: BinaryIO, header: VideoHeader) -> Iterator[LumaFrame]:
    try:
        yield from iter_luma_frames(stream, header)
    finally:
        stream.close()


def frame_diff(current: LumaFrame, previous: LumaFrame) -> DiffFrame:
    """Signed luma difference current - previous."""
    if (current.width, current.height) != (previous.width, previous.height):
        raise ShapeMismatch(
            f"frame {current.index} is {current.width}x{current.height}, "
            f"frame {previous.index} is {previous.width}x{previous.height}"
        )
    return DiffFrame(
        current.width,
        current.height,
        current.samples - previous.samples,
        current.index,
    )


def mean_abs_luma_diff(diff: DiffFrame) -> float:
    """Mean absolute difference, rescaled to 8-bit-equivalent units.

    The x255 rescale keeps the motion feature's magnitude in line with the
    conventional 8-bit definition regardless of source bit depth.
    """
    return float(np.mean(np.abs(diff.samples)) * 255.0)


def load_luma_frames(data: bytes) -> tuple[VideoHeader, list[LumaFrame]]:
    """Decode an in-memory stream fully; convenience for small inputs."""
    stream = io.BytesIO(data)
    header = read_header(stream)
    return header, list(iter_luma_frames(stream, header))
