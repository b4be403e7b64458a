# File: signaling/bfloat16.py

"""binary32 <-> bfloat16 conversion.

A bfloat16 is the top 16 bits of a binary32 after round-to-nearest-even on
the 16 dropped mantissa bits.
"""
import numpy as np


def float32_to_bfloat16_bits(values):
    """Round binary32 values to bfloat16 bit patterns (uint16)"""
    bits = np.asarray(values, dtype=np.float32).view(np.uint32).astype(np.uint64)
    lsb = (bits >> 16) & 1
    rounded = (bits + 0x7FFF + lsb) >> 16
    return (rounded & 0xFFFF).astype(np.uint16)


def bfloat16_bits_to_float32(bits):
    widened = np.asarray(bits, dtype=np.uint16).astype(np.uint32) << 16
    return widened.view(np.float32)


def round_to_bfloat16(values):
    """The binary32 value a bfloat16 round trip produces"""
    return bfloat16_bits_to_float32(float32_to_bfloat16_bits(values))
