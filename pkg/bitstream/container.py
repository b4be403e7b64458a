# File: bitstream/container.py

"""FCMS container: header, statistics segments and per-frame records.

Layout (little-endian):
    magic 'FCMS' | version u8 | mode u8 | q u8 | N u8 | L u16 | fusion u8 |
    codec u8 | temporal u8 | frame_count u32 | N x (C, H, W) u32 |
    fused (C, H, W) u32 | fps_num u16 | fps_den u16
    then for every coded frame i:
        [stats segment if mode != baseline and i % L == 0]
        [MinMax (min f32, max f32) if mode == baseline]
        payload length u32 | payload
"""
import io
import logging
import struct
from dataclasses import dataclass
from fractions import Fraction

from featurecodec.exceptions import (
    CodecError,
    CorruptStream,
    MuxError,
    NotAStream,
    TruncatedStream,
)
from fusion.rules import get_fusion
from packing.frames import MinMax, QuantFrame
from signaling.params import (
    SignalingMode,
    StatsParams,
    decode_stats,
    encode_stats,
    refresh_count,
    segment_size,
)
from temporal.resampling import kept_count
from tensors.structures import ShapeSpec

logger = logging.getLogger(__name__)

FCMS_MAGIC = b'FCMS'
FCMS_VERSION = 1

_FIXED = struct.Struct('<4sBBBBHBBBI')
_SHAPE = struct.Struct('<III')
_FPS = struct.Struct('<HH')
_MINMAX = struct.Struct('<ff')
_LENGTH = struct.Struct('<I')

LENGTH_PREFIX_BYTES = _LENGTH.size


@dataclass(frozen=True)
class StreamHeader:
    mode: SignalingMode
    bit_depth: int
    refresh_period: int
    fusion_id: int
    codec_id: int
    temporal: bool
    frame_count: int
    shapes: ShapeSpec
    fused_shape: tuple
    fps_num: int = 30
    fps_den: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'mode', SignalingMode(self.mode))
        object.__setattr__(self, 'temporal', bool(self.temporal))
        object.__setattr__(self, 'fused_shape', tuple(int(d) for d in self.fused_shape))
        if not isinstance(self.shapes, ShapeSpec):
            object.__setattr__(self, 'shapes', ShapeSpec(tuple(self.shapes)))
        problems = self.problems()
        if problems:
            raise MuxError(f"invalid stream header: {'; '.join(problems)}")

    def problems(self):
        """Header fields that cannot describe a valid stream"""
        problems = []
        if not 1 <= self.bit_depth <= QuantFrame.MAX_BIT_DEPTH:
            problems.append(f"bit depth {self.bit_depth}")
        if not 1 <= self.refresh_period <= 0xFFFF:
            problems.append(f"refresh period {self.refresh_period}")
        if not 1 <= self.shapes.n_tensors <= 255:
            problems.append(f"tensor count {self.shapes.n_tensors}")
        if not 1 <= self.frame_count <= 0xFFFFFFFF:
            problems.append(f"frame count {self.frame_count}")
        if not (1 <= self.fps_num <= 0xFFFF and 1 <= self.fps_den <= 0xFFFF):
            problems.append(f"frame rate {self.fps_num}/{self.fps_den}")
        if not 0 <= self.codec_id <= 255:
            problems.append(f"codec id {self.codec_id}")
        try:
            expected = get_fusion(self.fusion_id).fused_shape(self.shapes)
        except CodecError as exc:
            problems.append(str(exc))
        else:
            if expected != self.fused_shape:
                problems.append(f"fused shape {self.fused_shape} != {expected}")
        return problems

    @property
    def n_tensors(self):
        return self.shapes.n_tensors

    @property
    def coded_frame_count(self):
        return kept_count(self.frame_count, self.temporal)

    @property
    def fps(self):
        return Fraction(self.fps_num, self.fps_den)

    @property
    def size(self):
        return header_size(self.n_tensors)

    @property
    def stats_segment_size(self):
        return segment_size(self.mode, self.n_tensors)

    def carries_stats(self, coded_index):
        return self.mode != SignalingMode.BASELINE and coded_index % self.refresh_period == 0

    def pack(self):
        parts = [
            _FIXED.pack(
                FCMS_MAGIC,
                FCMS_VERSION,
                int(self.mode),
                self.bit_depth,
                self.n_tensors,
                self.refresh_period,
                self.fusion_id,
                self.codec_id,
                int(self.temporal),
                self.frame_count,
            )
        ]
        parts.extend(_SHAPE.pack(*shape) for shape in self.shapes)
        parts.append(_SHAPE.pack(*self.fused_shape))
        parts.append(_FPS.pack(self.fps_num, self.fps_den))
        return b''.join(parts)

    def as_dict(self):
        return {
            'version': FCMS_VERSION,
            'mode': self.mode.label,
            'q': self.bit_depth,
            'n_tensors': self.n_tensors,
            'refresh_period': self.refresh_period,
            'fusion': self.fusion_id,
            'codec': self.codec_id,
            'temporal': int(self.temporal),
            'frame_count': self.frame_count,
            'coded_frames': self.coded_frame_count,
            'shapes': str(self.shapes),
            'fused_shape': 'x'.join(str(d) for d in self.fused_shape),
            'fps': f'{self.fps_num}/{self.fps_den}',
        }


def header_size(n_tensors):
    return _FIXED.size + _SHAPE.size * (n_tensors + 1) + _FPS.size


@dataclass(frozen=True)
class FrameRecord:
    """One coded frame: its inner-codec payload and, in baseline mode, its MinMax"""

    payload: bytes
    minmax: MinMax = None

    def __post_init__(self):
        object.__setattr__(self, 'payload', bytes(self.payload))


@dataclass(frozen=True)
class Bitstream:
    header: StreamHeader
    stats: tuple
    records: tuple


# ========== MUX ==========
def mux(header, stats, records):
    """Serialize a complete stream; counts must agree with the header's schedule"""
    stats, records = list(stats), list(records)
    coded = header.coded_frame_count
    if len(records) != coded:
        raise MuxError(f"header announces {coded} coded frames, got {len(records)} records")
    expected_segments = 0 if header.mode == SignalingMode.BASELINE else refresh_count(coded, header.refresh_period)
    if len(stats) != expected_segments:
        raise MuxError(f"schedule needs {expected_segments} statistics segments, got {len(stats)}")
    for params in stats:
        if not isinstance(params, StatsParams) or params.mode != header.mode:
            raise MuxError(f"statistics segment does not match mode {header.mode.label}")
        if params.mode == SignalingMode.FULL and len(params.per_tensor) != header.n_tensors:
            raise MuxError(f"full segment carries {len(params.per_tensor)} pairs for {header.n_tensors} tensors")

    out = io.BytesIO()
    out.write(header.pack())
    segments = iter(stats)
    for index, record in enumerate(records):
        if header.carries_stats(index):
            out.write(encode_stats(next(segments)))
        if header.mode == SignalingMode.BASELINE:
            if record.minmax is None:
                raise MuxError(f"baseline frame {index} has no MinMax")
            out.write(_MINMAX.pack(record.minmax.min, record.minmax.max))
        elif record.minmax is not None:
            raise MuxError(f"{header.mode.label} frame {index} must not carry a MinMax")
        if len(record.payload) > 0xFFFFFFFF:
            raise MuxError(f"frame {index} payload exceeds the u32 length prefix")
        out.write(_LENGTH.pack(len(record.payload)))
        out.write(record.payload)

    data = out.getvalue()
    logger.info(f"Muxed {coded} frames ({header.mode.label}) into {len(data)} bytes")
    return data


# ========== DEMUX ==========
class _Reader:
    def __init__(self, buffer):
        self.view = memoryview(buffer)
        self.offset = 0

    @property
    def remaining(self):
        return len(self.view) - self.offset

    def read(self, size, what):
        if size > self.remaining:
            raise TruncatedStream(
                f"{what} needs {size} bytes at offset {self.offset}, {self.remaining} left"
            )
        chunk = bytes(self.view[self.offset:self.offset + size])
        self.offset += size
        return chunk

    def unpack(self, layout, what):
        return layout.unpack(self.read(layout.size, what))


def read_header(reader):
    if reader.remaining < len(FCMS_MAGIC):
        raise TruncatedStream("stream is shorter than its magic")
    if bytes(reader.view[:len(FCMS_MAGIC)]) != FCMS_MAGIC:
        raise NotAStream(f"bad magic {bytes(reader.view[:len(FCMS_MAGIC)])!r}")

    fields = reader.unpack(_FIXED, 'header')
    _, version, mode, bit_depth, n_tensors, refresh, fusion_id, codec_id, temporal, frames = fields
    if version != FCMS_VERSION:
        raise CorruptStream(f"unsupported FCMS version {version}")
    if mode not in SignalingMode.values:
        raise CorruptStream(f"unknown signaling mode {mode}")
    if temporal not in (0, 1):
        raise CorruptStream(f"temporal flag must be 0 or 1, got {temporal}")
    shapes = [reader.unpack(_SHAPE, 'tensor shape') for _ in range(n_tensors)]
    fused_shape = reader.unpack(_SHAPE, 'fused shape')
    fps_num, fps_den = reader.unpack(_FPS, 'frame rate')
    try:
        return StreamHeader(
            mode, bit_depth, refresh, fusion_id, codec_id, temporal, frames,
            ShapeSpec(tuple(shapes)), fused_shape, fps_num, fps_den,
        )
    except CodecError as exc:
        raise CorruptStream(f"inconsistent header: {exc}") from exc


def demux(buffer):
    """Parse FCMS bytes; every malformation maps to a typed stream error"""
    reader = _Reader(buffer)
    header = read_header(reader)

    stats, records = [], []
    for index in range(header.coded_frame_count):
        if header.carries_stats(index):
            segment = reader.read(header.stats_segment_size, f"statistics segment {len(stats)}")
            try:
                stats.append(decode_stats(segment, header.mode, header.n_tensors, header.refresh_period))
            except CodecError as exc:
                if isinstance(exc, (TruncatedStream, CorruptStream)):
                    raise
                raise CorruptStream(f"statistics segment {len(stats)}: {exc}") from exc
        minmax = None
        if header.mode == SignalingMode.BASELINE:
            low, high = reader.unpack(_MINMAX, f"MinMax of frame {index}")
            try:
                minmax = MinMax(low, high)
            except CodecError as exc:
                raise CorruptStream(f"MinMax of frame {index}: {exc}") from exc
        (length,) = reader.unpack(_LENGTH, f"length of frame {index}")
        records.append(FrameRecord(reader.read(length, f"payload of frame {index}"), minmax))

    if reader.remaining:
        raise CorruptStream(f"{reader.remaining} trailing bytes after the last frame")
    logger.debug(f"Demuxed {len(records)} frames and {len(stats)} statistics segments")
    return Bitstream(header, tuple(stats), tuple(records))
