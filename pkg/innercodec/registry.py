# File: innercodec/registry.py

"""codec_id registry: 0 raw, 1 zdeflate, 2 requant, 255 external."""
import logging

from featurecodec.exceptions import DecodeError, UnknownCodec
from .base import CodecPayload, FrameGeometry, parse_codec_params
from .codecs import RawCodec, RequantCodec, ZDeflateCodec
from .external import ExternalCodec

logger = logging.getLogger(__name__)

CODECS = {codec.codec_id: codec for codec in (RawCodec(), ZDeflateCodec(), RequantCodec(), ExternalCodec())}
CODEC_NAMES = {codec.name: codec_id for codec_id, codec in CODECS.items()}


def get_codec(codec_id):
    try:
        return CODECS[int(codec_id)]
    except (KeyError, TypeError, ValueError):
        raise UnknownCodec(f"codec id {codec_id!r} is not registered") from None


def resolve_codec_id(value):
    """Accept a registered id or name ('2' or 'requant')"""
    text = str(value).strip()
    if text in CODEC_NAMES:
        return CODEC_NAMES[text]
    return get_codec(text).codec_id


def encode_frame(quant, codec_id, params=None):
    codec = get_codec(codec_id)
    params = codec.validate_params(parse_codec_params(params), quant.bit_depth)
    payload = codec.encode(quant, params)
    logger.debug(f"{codec.name}: {quant.height}x{quant.width} frame -> {payload.byte_count} bytes")
    return payload


def decode_frame(payload, geometry):
    codec = get_codec(payload.codec_id)
    quant = codec.decode(payload, geometry)
    if (quant.height, quant.width, quant.bit_depth) != (geometry.height, geometry.width, geometry.bit_depth):
        raise DecodeError(f"{codec.name} decoded a frame that does not match {geometry}")
    return quant


__all__ = [
    'CODECS',
    'CodecPayload',
    'FrameGeometry',
    'decode_frame',
    'encode_frame',
    'get_codec',
    'parse_codec_params',
    'resolve_codec_id',
]
