# File: packing/tiling.py

"""Tile fused-tensor channels into a single 2-D frame and back."""
import numpy as np

from featurecodec.exceptions import UnsupportedGeometry
from fusion.rules import FusedTensor
from .frames import PackedFrame, Tiling


def pack(fused):
    """Tile channels row-major into a ceil(sqrt(C_f))-wide grid"""
    channels, height, width = fused.shape
    tiling = Tiling.for_shape(channels, height, width)
    cells = np.zeros((tiling.rows * tiling.cols, height, width), dtype=np.float32)
    cells[:channels] = fused.data
    frame = cells.reshape(tiling.rows, tiling.cols, height, width).transpose(0, 2, 1, 3)
    return PackedFrame(frame.reshape(tiling.frame_shape), tiling)


def unpack(packed, channels, height, width):
    """Inverse of pack; padding cells are discarded"""
    tiling = Tiling.for_shape(channels, height, width)
    if packed.data.shape != tiling.frame_shape or packed.tiling not in (None, tiling):
        raise UnsupportedGeometry(
            f"packed frame {packed.data.shape} does not hold {channels}x{height}x{width}"
        )
    cells = packed.data.reshape(tiling.rows, height, tiling.cols, width).transpose(0, 2, 1, 3)
    cells = cells.reshape(tiling.rows * tiling.cols, height, width)
    return FusedTensor(cells[:channels])
