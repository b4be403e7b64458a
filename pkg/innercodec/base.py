# File: innercodec/base.py

"""Shared types of the pluggable 2-D frame codecs."""
from dataclasses import dataclass

from featurecodec.exceptions import InvalidConfig


@dataclass(frozen=True)
class CodecPayload:
    codec_id: int
    frame_bytes: bytes

    @property
    def byte_count(self):
        return len(self.frame_bytes)


@dataclass(frozen=True)
class FrameGeometry:
    """What a decoder must know to rebuild a QuantFrame"""

    height: int
    width: int
    bit_depth: int

    @property
    def sample_count(self):
        return self.height * self.width


def parse_codec_params(text):
    """Parse 'key=value;key=value' (commas also accepted) into a dict of strings"""
    if not text:
        return {}
    if isinstance(text, dict):
        return {str(k): str(v) for k, v in text.items()}
    params = {}
    for item in text.replace(',', ';').split(';'):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition('=')
        if not sep or not key.strip():
            raise InvalidConfig(f"codec parameter '{item}' is not key=value")
        params[key.strip()] = value.strip()
    return params


def format_codec_params(params):
    return ';'.join(f'{key}={params[key]}' for key in sorted(params))


class InnerCodec:
    """Stateless per-frame codec; subclasses set codec_id and name"""

    codec_id = None
    name = None
    lossless = True

    def encode(self, quant, params=None):
        raise NotImplementedError

    def decode(self, payload, geometry):
        raise NotImplementedError

    def validate_params(self, params, bit_depth):
        """Return the params this codec understands, raising InvalidConfig otherwise"""
        if params:
            raise InvalidConfig(f"codec '{self.name}' takes no parameters, got {sorted(params)}")
        return {}

    def _payload(self, frame_bytes):
        return CodecPayload(self.codec_id, bytes(frame_bytes))
