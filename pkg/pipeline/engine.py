# File: pipeline/engine.py

"""End-to-end encoder and decoder.

Encoder: temporal downsample -> statistics of each refresh frame -> fuse ->
pack -> min-max quantize -> inner codec -> mux.

Decoder: demux -> inner codec -> dequantize -> unpack -> [full: rescale the
fused tensor] -> restore -> [full: rescale every tensor; simplified: shared
pooled rescale] -> temporal upsample.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

from bitstream.container import Bitstream, FrameRecord, StreamHeader, demux, mux
from featurecodec.exceptions import InvalidInput
from fusion.rules import get_fusion
from innercodec.registry import CodecPayload, FrameGeometry, decode_frame, encode_frame
from packing.frames import Tiling
from packing.quantization import dequantize_baseline, dequantize_proposed, quantize
from packing.tiling import pack, unpack
from rescaling.zscore import rescale_fused, rescale_per_tensor, rescale_simplified
from signaling.params import SignalingMode, StatsParams
from temporal.resampling import downsample, upsample
from tensors.stats import compute_stats, feature_set_stats, pooled_sum_stats

logger = logging.getLogger(__name__)


def _map(function, items, workers):
    """Order-preserving map, threaded when workers > 1"""
    if workers <= 1 or len(items) <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, items))


def _check_shapes(sequence):
    if not sequence:
        raise InvalidInput("cannot encode an empty sequence")
    spec = sequence[0].shape_spec
    for feature_set in sequence[1:]:
        if feature_set.shape_spec != spec:
            raise InvalidInput(
                f"frame {feature_set.frame_index} has shapes {feature_set.shape_spec}, expected {spec}"
            )
    return spec


def stream_header(spec, frame_count, config):
    rule = get_fusion(config.fusion_id)
    return StreamHeader(
        mode=config.mode,
        bit_depth=config.bit_depth,
        refresh_period=config.refresh_period,
        fusion_id=config.fusion_id,
        codec_id=config.codec_id,
        temporal=config.temporal,
        frame_count=frame_count,
        shapes=spec,
        fused_shape=rule.fused_shape(spec),
        fps_num=config.fps_num,
        fps_den=config.fps_den,
    )


def refresh_stats(feature_set, fused, mode, refresh_period):
    """Statistics signaled for the refresh period that starts at this frame"""
    if mode == SignalingMode.FULL:
        return StatsParams(
            mode,
            tuple(feature_set_stats(feature_set)),
            fused=compute_stats(fused),
            refresh_period=refresh_period,
        )
    if mode == SignalingMode.SIMPLIFIED:
        pooled = pooled_sum_stats(feature_set_stats(feature_set))
        return StatsParams(mode, pooled=pooled, refresh_period=refresh_period)
    return None


def encode(sequence, config):
    """Encode a sequence of FeatureSets into FCMS bytes"""
    sequence = list(sequence)
    spec = _check_shapes(sequence)
    header = stream_header(spec, len(sequence), config)
    rule = get_fusion(config.fusion_id)
    kept, _ = downsample(sequence, config.temporal)

    def encode_one(item):
        coded_index, feature_set = item
        fused = rule.fuse(feature_set)
        params = None
        if header.carries_stats(coded_index):
            params = refresh_stats(feature_set, fused, config.mode, config.refresh_period)
        quant, minmax = quantize(pack(fused), config.bit_depth)
        payload = encode_frame(quant, config.codec_id, config.codec_params)
        keep_minmax = minmax if config.mode == SignalingMode.BASELINE else None
        return FrameRecord(payload.frame_bytes, keep_minmax), params

    results = _map(encode_one, list(enumerate(kept)), config.workers)
    records = [record for record, _ in results]
    stats = [params for _, params in results if params is not None]

    stream = mux(header, stats, records)
    logger.info(
        f"Encoded {len(sequence)} frames ({len(kept)} coded) as {config.mode.label}, "
        f"q={config.bit_depth}, codec={config.codec_id}: {len(stream)} bytes"
    )
    return stream


def decode(stream, workers=1):
    """Decode FCMS bytes (or a demuxed Bitstream) back into FeatureSets"""
    bitstream = stream if isinstance(stream, Bitstream) else demux(stream)
    header = bitstream.header
    rule = get_fusion(header.fusion_id)
    channels, height, width = header.fused_shape
    tiling = Tiling.for_shape(channels, height, width)
    geometry = FrameGeometry(*tiling.frame_shape, header.bit_depth)
    step = 2 if header.temporal else 1

    def decode_one(coded_index):
        record = bitstream.records[coded_index]
        quant = decode_frame(CodecPayload(header.codec_id, record.payload), geometry)
        if header.mode == SignalingMode.BASELINE:
            packed = dequantize_baseline(quant, record.minmax, tiling)
        else:
            packed = dequantize_proposed(quant, tiling)
        fused = unpack(packed, channels, height, width)

        params = None
        if header.mode != SignalingMode.BASELINE:
            params = bitstream.stats[coded_index // header.refresh_period]
        if header.mode == SignalingMode.FULL:
            fused = rescale_fused(fused, params.fused)
        feature_set = rule.restore(fused, header.shapes, coded_index * step)
        if header.mode == SignalingMode.FULL:
            return rescale_per_tensor(feature_set, params.per_tensor)
        if header.mode == SignalingMode.SIMPLIFIED:
            return rescale_simplified(feature_set, params.pooled)
        return feature_set

    frames = _map(decode_one, list(range(len(bitstream.records))), workers)
    if header.temporal:
        frames = upsample(frames, header.frame_count)
    logger.info(f"Decoded {len(frames)} frames ({header.mode.label})")
    return frames
