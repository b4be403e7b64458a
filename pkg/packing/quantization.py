# File: packing/quantization.py

"""q-bit uniform scalar quantization with min-max normalization.

Rounding is half-away-from-zero everywhere in the project so results do not
depend on the platform's default rounding mode.
"""
import numpy as np

from featurecodec.exceptions import DecodeError, InvalidInput
from .frames import MinMax, PackedFrame, QuantFrame


def round_half_away(values):
    values = np.asarray(values, dtype=np.float64)
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def quantize(packed, bit_depth):
    """
    Min-max normalize and quantize a packed frame.

    y = round((x - min) / (max - min) * (2^q - 1)). The range is taken over
    the samples that belong to channels; padding cells map to 0. A flat
    frame (max == min) quantizes to all zeros.

    Returns:
        (QuantFrame, MinMax actually used)
    """
    if not 1 <= bit_depth <= QuantFrame.MAX_BIT_DEPTH:
        raise InvalidInput(f"bit depth {bit_depth} outside 1..{QuantFrame.MAX_BIT_DEPTH}")
    data = packed.data
    if not np.isfinite(data).all():
        raise InvalidInput("packed frame contains NaN or Inf")

    if packed.tiling is not None and packed.tiling.padding_cells:
        mask = packed.tiling.occupancy_mask()
        occupied = data[mask]
    else:
        mask = None
        occupied = data
    minmax = MinMax(occupied.min(), occupied.max())

    levels = (1 << bit_depth) - 1
    if minmax.span == 0:
        samples = np.zeros(data.shape, dtype=np.uint16)
    else:
        scaled = (data.astype(np.float64) - minmax.min) / minmax.span * levels
        samples = np.clip(round_half_away(scaled), 0, levels).astype(np.uint16)
    if mask is not None:
        samples[~mask] = 0
    return QuantFrame(samples, bit_depth), minmax


def dequantize_proposed(quant, tiling=None):
    """x_p = x_q / (2^q - 1); no inverse min-max, samples stay in [0, 1]"""
    values = quant.samples.astype(np.float64) / quant.max_level
    return PackedFrame(values.astype(np.float32), tiling)


def dequantize_baseline(quant, minmax, tiling=None):
    """x_p = x_q / (2^q - 1) * (max - min) + min"""
    values = quant.samples.astype(np.float64) / quant.max_level * minmax.span + minmax.min
    return PackedFrame(values.astype(np.float32), tiling)


# ========== RAW SAMPLE LAYOUT ==========
def sample_width(bit_depth):
    """Bytes per sample: 1 for q <= 8, 2 (little-endian) for q <= 16"""
    return 1 if bit_depth <= 8 else 2


def samples_to_bytes(quant):
    dtype = np.uint8 if quant.bit_depth <= 8 else np.dtype('<u2')
    return quant.samples.astype(dtype).tobytes()


def bytes_to_samples(buffer, height, width, bit_depth):
    width_bytes = sample_width(bit_depth)
    expected = height * width * width_bytes
    if len(buffer) != expected:
        raise DecodeError(f"raw frame holds {len(buffer)} bytes, expected {expected}")
    dtype = np.uint8 if width_bytes == 1 else np.dtype('<u2')
    samples = np.frombuffer(buffer, dtype=dtype).reshape(height, width).astype(np.uint16)
    if samples.size and samples.max() >= (1 << bit_depth):
        raise DecodeError(f"raw frame holds samples beyond {bit_depth} bits")
    return QuantFrame(samples, bit_depth)
