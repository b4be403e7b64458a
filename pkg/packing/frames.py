# File: packing/frames.py

"""2-D frame types produced by packing and quantization."""
import math
from dataclasses import dataclass

import numpy as np

from featurecodec.exceptions import InvalidInput, InvalidStats, UnsupportedGeometry


@dataclass(frozen=True)
class Tiling:
    """Near-square row-major tile grid for C_f channels of H_f x W_f"""

    rows: int
    cols: int
    channels: int
    tile_height: int
    tile_width: int

    @classmethod
    def for_shape(cls, channels, height, width):
        if min(channels, height, width) <= 0:
            raise UnsupportedGeometry(f"cannot tile shape {channels}x{height}x{width}")
        cols = math.isqrt(channels - 1) + 1
        rows = -(-channels // cols)
        return cls(rows, cols, channels, height, width)

    @property
    def frame_shape(self):
        return (self.rows * self.tile_height, self.cols * self.tile_width)

    @property
    def padding_cells(self):
        return self.rows * self.cols - self.channels

    def occupancy_mask(self):
        """Boolean frame mask of the samples that belong to a channel"""
        cells = (np.arange(self.rows * self.cols) < self.channels).reshape(self.rows, self.cols)
        return np.repeat(np.repeat(cells, self.tile_height, axis=0), self.tile_width, axis=1)


@dataclass(frozen=True)
class PackedFrame:
    """Real-valued 2-D frame x_p holding tiled channels; padding cells are 0.0"""

    data: np.ndarray
    tiling: Tiling = None

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.ndim != 2:
            raise UnsupportedGeometry(f"packed frame must be 2-D, got {data.ndim}-D")
        if self.tiling is not None and data.shape != self.tiling.frame_shape:
            raise UnsupportedGeometry(
                f"frame shape {data.shape} does not match tiling {self.tiling.frame_shape}"
            )
        view = data.view()
        view.flags.writeable = False
        object.__setattr__(self, 'data', view)

    @property
    def height(self):
        return int(self.data.shape[0])

    @property
    def width(self):
        return int(self.data.shape[1])


@dataclass(frozen=True)
class QuantFrame:
    """q-bit integer frame x_q; every sample is below 2^q"""

    samples: np.ndarray
    bit_depth: int

    MAX_BIT_DEPTH = 16

    def __post_init__(self):
        if not 1 <= self.bit_depth <= self.MAX_BIT_DEPTH:
            raise InvalidInput(f"bit depth {self.bit_depth} outside 1..{self.MAX_BIT_DEPTH}")
        samples = np.asarray(self.samples)
        if samples.ndim != 2:
            raise InvalidInput(f"quantized frame must be 2-D, got {samples.ndim}-D")
        if samples.size and (samples.min() < 0 or samples.max() >= (1 << self.bit_depth)):
            raise InvalidInput(f"sample outside the {self.bit_depth}-bit range")
        view = np.ascontiguousarray(samples, dtype=np.uint16).view()
        view.flags.writeable = False
        object.__setattr__(self, 'samples', view)

    @property
    def height(self):
        return int(self.samples.shape[0])

    @property
    def width(self):
        return int(self.samples.shape[1])

    @property
    def max_level(self):
        return (1 << self.bit_depth) - 1

    def __eq__(self, other):
        if not isinstance(other, QuantFrame):
            return NotImplemented
        return self.bit_depth == other.bit_depth and np.array_equal(self.samples, other.samples)


@dataclass(frozen=True)
class MinMax:
    """Per-frame normalization range signaled in baseline mode"""

    min: float
    max: float

    def __post_init__(self):
        low, high = float(np.float32(self.min)), float(np.float32(self.max))
        if not (math.isfinite(low) and math.isfinite(high)):
            raise InvalidStats(f"non-finite range ({self.min}, {self.max})")
        if high < low:
            raise InvalidStats(f"max {high} is below min {low}")
        object.__setattr__(self, 'min', low)
        object.__setattr__(self, 'max', high)

    @property
    def span(self):
        return self.max - self.min
