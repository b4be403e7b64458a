# File: innercodec/codecs.py

"""Built-in inner codecs: raw, zdeflate and requant."""
import logging
import zlib

import numpy as np

from featurecodec.exceptions import DecodeError, InvalidConfig
from packing.frames import QuantFrame
from packing.quantization import bytes_to_samples, round_half_away, samples_to_bytes
from .base import InnerCodec

logger = logging.getLogger(__name__)


class RawCodec(InnerCodec):
    """Lossless: the packing module's raw sample layout"""

    codec_id = 0
    name = 'raw'

    def encode(self, quant, params=None):
        return self._payload(samples_to_bytes(quant))

    def decode(self, payload, geometry):
        return bytes_to_samples(payload.frame_bytes, geometry.height, geometry.width, geometry.bit_depth)


class ZDeflateCodec(InnerCodec):
    """Lossless: raw layout compressed with zlib"""

    codec_id = 1
    name = 'zdeflate'
    DEFAULT_LEVEL = 9

    def validate_params(self, params, bit_depth):
        unknown = set(params or {}) - {'level'}
        if unknown:
            raise InvalidConfig(f"zdeflate does not understand {sorted(unknown)}")
        level = _int_param(params, 'level', self.DEFAULT_LEVEL)
        if not 0 <= level <= 9:
            raise InvalidConfig(f"zdeflate level must be 0..9, got {level}")
        return {'level': level}

    def encode(self, quant, params=None):
        level = self.validate_params(params, quant.bit_depth)['level']
        return self._payload(zlib.compress(samples_to_bytes(quant), level))

    def decode(self, payload, geometry):
        try:
            raw = zlib.decompress(payload.frame_bytes)
        except zlib.error as exc:
            raise DecodeError(f"corrupt zdeflate payload: {exc}") from exc
        return bytes_to_samples(raw, geometry.height, geometry.width, geometry.bit_depth)


class RequantCodec(InnerCodec):
    """
    Lossy stand-in for a video codec: q-bit samples are requantized to
    q' bits, bit-packed, and expanded back to q bits at the decoder.
    Payload = q' (u8) followed by ceil(n * q' / 8) packed bytes.
    """

    codec_id = 2
    name = 'requant'
    lossless = False
    DEFAULT_BITS = 8

    def validate_params(self, params, bit_depth):
        unknown = set(params or {}) - {'bits'}
        if unknown:
            raise InvalidConfig(f"requant does not understand {sorted(unknown)}")
        bits = _int_param(params, 'bits', min(self.DEFAULT_BITS, bit_depth))
        if not 1 <= bits <= bit_depth:
            raise InvalidConfig(f"requant bits must lie in 1..{bit_depth}, got {bits}")
        return {'bits': bits}

    @staticmethod
    def reduce(samples, bit_depth, bits):
        ratio = ((1 << bits) - 1) / ((1 << bit_depth) - 1)
        return np.clip(round_half_away(samples * ratio), 0, (1 << bits) - 1).astype(np.uint16)

    @staticmethod
    def expand(codes, bit_depth, bits):
        ratio = ((1 << bit_depth) - 1) / ((1 << bits) - 1)
        return np.clip(round_half_away(codes * ratio), 0, (1 << bit_depth) - 1).astype(np.uint16)

    def encode(self, quant, params=None):
        bits = self.validate_params(params, quant.bit_depth)['bits']
        codes = self.reduce(quant.samples.reshape(-1), quant.bit_depth, bits)
        planes = np.empty((codes.size, bits), dtype=np.uint8)
        for plane in range(bits):
            planes[:, plane] = (codes >> plane) & 1
        packed = np.packbits(planes.reshape(-1), bitorder='little')
        return self._payload(bytes([bits]) + packed.tobytes())

    def decode(self, payload, geometry):
        buffer = payload.frame_bytes
        if not buffer:
            raise DecodeError("empty requant payload")
        bits = buffer[0]
        if not 1 <= bits <= geometry.bit_depth:
            raise DecodeError(f"requant payload declares {bits} bits for a {geometry.bit_depth}-bit frame")
        count = geometry.sample_count
        expected = 1 + -(-count * bits // 8)
        if len(buffer) != expected:
            raise DecodeError(f"requant payload holds {len(buffer)} bytes, expected {expected}")

        stream = np.frombuffer(buffer, dtype=np.uint8, offset=1)
        planes = np.unpackbits(stream, count=count * bits, bitorder='little').reshape(count, bits)
        codes = np.zeros(count, dtype=np.uint16)
        for plane in range(bits):
            codes |= planes[:, plane].astype(np.uint16) << plane
        samples = self.expand(codes, geometry.bit_depth, bits)
        return QuantFrame(samples.reshape(geometry.height, geometry.width), geometry.bit_depth)


def _int_param(params, key, default):
    value = (params or {}).get(key, default)
    try:
        return int(value)
    except (TypeError, ValueError):
        raise InvalidConfig(f"codec parameter {key}={value!r} is not an integer") from None
