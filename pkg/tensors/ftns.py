# File: tensors/ftns.py

"""FTNS feature-sequence files.

Layout (little-endian):
    magic 'FTNS' | version u8 | N u8 | N x (C u32, H u32, W u32) |
    frame count u32 | frames as raw binary32 payloads in declaration order
"""
import struct

import numpy as np

from featurecodec.exceptions import InvalidInput, NotAStream, TruncatedStream
from .structures import FeatureSet, FeatureTensor, ShapeSpec

FTNS_MAGIC = b'FTNS'
FTNS_VERSION = 1

_PREAMBLE = struct.Struct('<4sBB')
_SHAPE = struct.Struct('<III')
_COUNT = struct.Struct('<I')


def encode_ftns(sequence):
    """Serialize a sequence of feature sets into FTNS bytes"""
    sequence = list(sequence)
    if not sequence:
        raise InvalidInput("cannot write an empty feature sequence")
    spec = sequence[0].shape_spec
    if spec.n_tensors > 255:
        raise InvalidInput(f"FTNS holds at most 255 tensors per frame, got {spec.n_tensors}")

    parts = [_PREAMBLE.pack(FTNS_MAGIC, FTNS_VERSION, spec.n_tensors)]
    parts.extend(_SHAPE.pack(*shape) for shape in spec)
    parts.append(_COUNT.pack(len(sequence)))
    for feature_set in sequence:
        if feature_set.shape_spec != spec:
            raise InvalidInput(
                f"frame {feature_set.frame_index} has shapes {feature_set.shape_spec}, expected {spec}"
            )
        parts.extend(t.data.astype('<f4', copy=False).tobytes() for t in feature_set)
    return b''.join(parts)


def decode_ftns(buffer):
    """Parse FTNS bytes into a list of feature sets"""
    view = memoryview(buffer)
    if len(view) < _PREAMBLE.size:
        raise TruncatedStream("FTNS preamble is incomplete")
    magic, version, n_tensors = _PREAMBLE.unpack_from(view, 0)
    if magic != FTNS_MAGIC:
        raise NotAStream(f"bad FTNS magic {bytes(magic)!r}")
    if version != FTNS_VERSION:
        raise NotAStream(f"unsupported FTNS version {version}")

    offset = _PREAMBLE.size
    needed = offset + n_tensors * _SHAPE.size + _COUNT.size
    if len(view) < needed:
        raise TruncatedStream("FTNS header is incomplete")
    shapes = []
    for _ in range(n_tensors):
        shapes.append(_SHAPE.unpack_from(view, offset))
        offset += _SHAPE.size
    (frame_count,) = _COUNT.unpack_from(view, offset)
    offset += _COUNT.size

    spec = ShapeSpec(tuple(shapes))
    frame_bytes = spec.total_size * 4
    if len(view) < offset + frame_count * frame_bytes:
        raise TruncatedStream(
            f"FTNS declares {frame_count} frames but holds {(len(view) - offset) // frame_bytes}"
        )

    sequence = []
    for frame_index in range(frame_count):
        tensors = []
        for shape, size in zip(spec, spec.sizes):
            values = np.frombuffer(view, dtype='<f4', count=size, offset=offset)
            tensors.append(FeatureTensor(values.astype(np.float32).reshape(shape)))
            offset += size * 4
        sequence.append(FeatureSet(tuple(tensors), frame_index))
    return sequence


def write_ftns(path, sequence):
    with open(path, 'wb') as handle:
        handle.write(encode_ftns(sequence))


def read_ftns(path):
    with open(path, 'rb') as handle:
        return decode_ftns(handle.read())
