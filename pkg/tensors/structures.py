# File: tensors/structures.py

"""Core feature-tensor types.

All tensors are binary32, channel-major (C, then H, then W) and immutable
once constructed.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from featurecodec.exceptions import InvalidInput, InvalidStats, InvalidTensor


def _frozen_view(values):
    view = np.asarray(values).view()
    view.flags.writeable = False
    return view


@dataclass(frozen=True)
class FeatureTensor:
    """A single 3-D split-point tensor x_n of shape (C, H, W)"""

    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.ndim != 3:
            raise InvalidTensor(f"feature tensor must be 3-D, got {data.ndim}-D")
        if data.size == 0:
            raise InvalidTensor("feature tensor is empty")
        if not np.isfinite(data).all():
            raise InvalidTensor("feature tensor contains NaN or Inf")
        object.__setattr__(self, 'data', _frozen_view(data))

    @classmethod
    def from_values(cls, values, channels, height, width):
        """Build a tensor from a flat channel-major sequence of values"""
        flat = np.asarray(values, dtype=np.float32).ravel()
        expected = channels * height * width
        if min(channels, height, width) <= 0:
            raise InvalidTensor(f"non-positive shape {channels}x{height}x{width}")
        if flat.size != expected:
            raise InvalidTensor(
                f"expected {expected} values for {channels}x{height}x{width}, got {flat.size}"
            )
        return cls(flat.reshape(channels, height, width))

    @property
    def shape(self):
        return tuple(int(d) for d in self.data.shape)

    @property
    def channels(self):
        return self.shape[0]

    @property
    def height(self):
        return self.shape[1]

    @property
    def width(self):
        return self.shape[2]

    @property
    def size(self):
        return int(self.data.size)

    def __eq__(self, other):
        if not isinstance(other, FeatureTensor):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)



@dataclass(frozen=True)
class FeatureSet:
    """One inference frame's worth of split-point tensors X = {x_n}"""

    tensors: tuple
    frame_index: int = 0

    def __post_init__(self):
        tensors = tuple(self.tensors)
        if not tensors:
            raise InvalidInput("a feature set needs at least one tensor")
        if self.frame_index < 0:
            raise InvalidInput(f"negative frame index {self.frame_index}")
        object.__setattr__(self, 'tensors', tensors)

    @classmethod
    def from_arrays(cls, arrays, frame_index=0):
        return cls(tuple(FeatureTensor(a) for a in arrays), frame_index)

    @property
    def shape_spec(self):
        return ShapeSpec(tuple(t.shape for t in self.tensors))

    def with_index(self, frame_index):
        return FeatureSet(self.tensors, frame_index)

    def __len__(self):
        return len(self.tensors)

    def __iter__(self):
        return iter(self.tensors)

    def __getitem__(self, index):
        return self.tensors[index]


@dataclass(frozen=True)
class TensorStats:
    """Global (mean, std) of a tensor, held at binary32 precision"""

    mean: float
    std: float

    def __post_init__(self):
        mean = float(np.float32(self.mean))
        std = float(np.float32(self.std))
        if not (math.isfinite(mean) and math.isfinite(std)):
            raise InvalidStats(f"non-finite statistics ({self.mean}, {self.std})")
        if std < 0:
            raise InvalidStats(f"negative standard deviation {self.std}")
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'std', std)

    def as_tuple(self):
        return (self.mean, self.std)


# ========== SHAPE SPECIFICATIONS ==========
@dataclass(frozen=True)
class ShapeSpec:
    """Ordered per-tensor (C, H, W) shapes of a split point"""

    shapes: tuple = field(default_factory=tuple)

    PRESETS = ('fpn', 'darknet', 'darknet-alt')

    def __post_init__(self):
        shapes = tuple(tuple(int(d) for d in shape) for shape in self.shapes)
        if not shapes:
            raise InvalidInput("shape spec needs at least one tensor")
        for shape in shapes:
            if len(shape) != 3 or min(shape) <= 0:
                raise InvalidInput(f"invalid tensor shape {shape}")
        object.__setattr__(self, 'shapes', shapes)

    @classmethod
    def fpn(cls, height=256, width=384, levels=4, channels=256):
        """Feature pyramid split: level n has H_r/2^(n+1) x W_r/2^(n+1)"""
        shapes = []
        for level in range(1, levels + 1):
            step = 2 ** (level + 1)
            if height % step or width % step:
                raise InvalidInput(
                    f"input resolution {height}x{width} is not divisible by {step}"
                )
            shapes.append((channels, height // step, width // step))
        return cls(tuple(shapes))

    @classmethod
    def darknet(cls):
        return cls(((256, 76, 136), (512, 38, 68), (1024, 19, 34)))

    @classmethod
    def darknet_alt(cls):
        """Second tracking split point, near the YOLO layers"""
        return cls(((128, 76, 136), (256, 38, 68), (512, 19, 34)))

    @classmethod
    def preset(cls, name, **kwargs):
        if name == 'fpn':
            return cls.fpn(**kwargs)
        if name == 'darknet':
            return cls.darknet()
        if name == 'darknet-alt':
            return cls.darknet_alt()
        raise InvalidInput(f"unknown shape preset '{name}'")

    @classmethod
    def parse(cls, text):
        """Parse 'CxHxW,CxHxW,...'"""
        shapes = []
        for item in text.split(','):
            item = item.strip()
            if not item:
                continue
            try:
                shapes.append(tuple(int(part) for part in item.lower().split('x')))
            except ValueError as exc:
                raise InvalidInput(f"cannot parse tensor shape '{item}'") from exc
        return cls(tuple(shapes))

    @property
    def n_tensors(self):
        return len(self.shapes)

    @property
    def sizes(self):
        return tuple(c * h * w for c, h, w in self.shapes)

    @property
    def total_size(self):
        return sum(self.sizes)

    def __iter__(self):
        return iter(self.shapes)

    def __len__(self):
        return len(self.shapes)

    def __str__(self):
        return ','.join('x'.join(str(d) for d in shape) for shape in self.shapes)
