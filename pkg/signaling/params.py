# File: signaling/params.py

"""Statistics parameters, their byte layouts and refresh-period scheduling.

Segment layouts (little-endian):
    baseline   -> no segment; a MinMax (2 x binary32) travels with every frame
    full       -> (N+1) x (mean binary32, std binary32): x_1..x_N, then fused
    simplified -> (mean bfloat16, std bfloat16) of the pooled statistics
"""
import logging
import math
import struct
from dataclasses import dataclass

import numpy as np
from django.db import models

from featurecodec.exceptions import CorruptStream, InvalidInput, InvalidStats, TruncatedStream
from tensors.structures import TensorStats
from .bfloat16 import bfloat16_bits_to_float32, float32_to_bfloat16_bits

logger = logging.getLogger(__name__)

MINMAX_BYTES = 8
FULL_PAIR_BYTES = 8
SIMPLIFIED_BYTES = 4

_BFLOAT16_PAIR = struct.Struct('<HH')


class SignalingMode(models.IntegerChoices):
    BASELINE = 0, 'baseline'
    FULL = 1, 'full'
    SIMPLIFIED = 2, 'simplified'

    @classmethod
    def from_name(cls, name):
        for mode in cls:
            if mode.label == str(name).lower():
                return mode
        try:
            return cls(int(name))
        except (TypeError, ValueError):
            raise InvalidInput(f"unknown signaling mode '{name}'") from None


@dataclass(frozen=True)
class StatsParams:
    """Statistics transmitted once per refresh period"""

    mode: SignalingMode
    per_tensor: tuple = ()
    fused: TensorStats = None
    pooled: TensorStats = None
    refresh_period: int = 1

    def __post_init__(self):
        mode = SignalingMode(self.mode)
        per_tensor = tuple(self.per_tensor)
        object.__setattr__(self, 'mode', mode)
        object.__setattr__(self, 'per_tensor', per_tensor)
        if self.refresh_period < 1:
            raise InvalidInput(f"refresh period must be positive, got {self.refresh_period}")
        if mode == SignalingMode.FULL:
            if not per_tensor or self.fused is None or self.pooled is not None:
                raise InvalidStats("full mode carries N per-tensor pairs plus the fused pair")
        elif mode == SignalingMode.SIMPLIFIED:
            if per_tensor or self.fused is not None or self.pooled is None:
                raise InvalidStats("simplified mode carries exactly one pooled pair")
        elif per_tensor or self.fused is not None or self.pooled is not None:
            raise InvalidStats("baseline mode carries no statistics")

    @property
    def pair_count(self):
        if self.mode == SignalingMode.FULL:
            return len(self.per_tensor) + 1
        if self.mode == SignalingMode.SIMPLIFIED:
            return 1
        return 0


def segment_size(mode, n_tensors):
    """Bytes of one statistics segment"""
    mode = SignalingMode(mode)
    if mode == SignalingMode.FULL:
        return FULL_PAIR_BYTES * (n_tensors + 1)
    if mode == SignalingMode.SIMPLIFIED:
        return SIMPLIFIED_BYTES
    return 0


def encode_stats(params):
    """Serialize statistics parameters per the segment layout of their mode"""
    if params.mode == SignalingMode.FULL:
        pairs = [s.as_tuple() for s in params.per_tensor] + [params.fused.as_tuple()]
        values = [value for pair in pairs for value in pair]
        if not all(math.isfinite(v) for v in values):
            raise InvalidStats("statistics must be finite")
        return struct.pack(f'<{len(values)}f', *values)

    if params.mode == SignalingMode.SIMPLIFIED:
        bits = float32_to_bfloat16_bits(params.pooled.as_tuple())
        if not np.isfinite(bfloat16_bits_to_float32(bits)).all():
            raise InvalidStats(f"pooled statistics {params.pooled} overflow bfloat16")
        return _BFLOAT16_PAIR.pack(int(bits[0]), int(bits[1]))

    return b''


def decode_stats(buffer, mode, n_tensors, refresh_period=1):
    """Inverse of encode_stats; simplified values come back bfloat16-rounded"""
    mode = SignalingMode(mode)
    expected = segment_size(mode, n_tensors)
    if len(buffer) < expected:
        raise TruncatedStream(f"statistics segment holds {len(buffer)} bytes, expected {expected}")
    if len(buffer) > expected:
        raise CorruptStream(f"statistics segment holds {len(buffer)} bytes, expected {expected}")

    try:
        if mode == SignalingMode.FULL:
            values = struct.unpack(f'<{2 * (n_tensors + 1)}f', bytes(buffer))
            pairs = [TensorStats(values[i], values[i + 1]) for i in range(0, len(values), 2)]
            return StatsParams(mode, tuple(pairs[:-1]), fused=pairs[-1], refresh_period=refresh_period)
        if mode == SignalingMode.SIMPLIFIED:
            bits = np.array(_BFLOAT16_PAIR.unpack(bytes(buffer)), dtype=np.uint16)
            mean, std = bfloat16_bits_to_float32(bits).tolist()
            return StatsParams(mode, pooled=TensorStats(mean, std), refresh_period=refresh_period)
    except InvalidStats:
        logger.warning(f"Rejected undecodable {mode.label} statistics segment")
        raise
    return StatsParams(mode, refresh_period=refresh_period)


# ========== REFRESH PERIODS ==========
def refresh_schedule(frame_index, refresh_period):
    """True when statistics are emitted with this (coded) frame"""
    if refresh_period < 1:
        raise InvalidInput(f"refresh period must be positive, got {refresh_period}")
    return frame_index % refresh_period == 0


def refresh_count(frames, refresh_period):
    return -(-frames // refresh_period)


def overhead_bytes(mode, n_tensors, refresh_period, frames):
    """Side-information bytes spent on normalization over `frames` frames"""
    if min(n_tensors, refresh_period, frames) < 1:
        raise InvalidInput("tensor count, refresh period and frame count must be positive")
    mode = SignalingMode(mode)
    if mode == SignalingMode.BASELINE:
        return MINMAX_BYTES * frames
    return segment_size(mode, n_tensors) * refresh_count(frames, refresh_period)
