# File: fusion/rules.py

"""Multi-scale feature fusion and restoration.

Fusion rules are pluggable and identified by the one-byte fusion ID carried
in the stream header. The reference rule is a pure rearrangement: every
tensor is folded onto the coarsest spatial grid by space-to-channel blocks,
then all tensors are concatenated along channels in declaration order.
"""
import logging
from dataclasses import dataclass

import numpy as np

from featurecodec.exceptions import UnsupportedGeometry
from tensors.structures import FeatureSet, FeatureTensor, ShapeSpec

logger = logging.getLogger(__name__)


class FusedTensor(FeatureTensor):
    """Single fused tensor x_f of shape (C_f, H_f, W_f)"""


# ========== SPACE-TO-CHANNEL ==========
def space_to_channel(data, factor_h, factor_w):
    """(C, H, W) -> (C*fh*fw, H/fh, W/fw); channel index = (c, i, j)"""
    channels, height, width = data.shape
    if height % factor_h or width % factor_w:
        raise UnsupportedGeometry(
            f"{height}x{width} is not divisible by block {factor_h}x{factor_w}"
        )
    out_h, out_w = height // factor_h, width // factor_w
    blocks = data.reshape(channels, out_h, factor_h, out_w, factor_w)
    return blocks.transpose(0, 2, 4, 1, 3).reshape(channels * factor_h * factor_w, out_h, out_w)


def channel_to_space(data, factor_h, factor_w):
    """Exact inverse of space_to_channel"""
    channels, height, width = data.shape
    block = factor_h * factor_w
    if channels % block:
        raise UnsupportedGeometry(f"{channels} channels do not fold into {factor_h}x{factor_w} blocks")
    blocks = data.reshape(channels // block, factor_h, factor_w, height, width)
    return blocks.transpose(0, 3, 1, 4, 2).reshape(channels // block, height * factor_h, width * factor_w)


@dataclass(frozen=True)
class FusionLayout:
    """Where each input tensor lives inside the fused tensor"""

    grid: tuple
    factors: tuple
    channel_offsets: tuple
    fused_shape: tuple


class FusionRule:
    """Base class for fusion/restoration pairs"""

    fusion_id = None
    name = None

    def layout(self, spec):
        raise NotImplementedError

    def fuse(self, feature_set):
        raise NotImplementedError

    def restore(self, fused, target_shapes, frame_index=0):
        raise NotImplementedError

    def fused_shape(self, spec):
        return self.layout(spec).fused_shape


class IdentityFusion(FusionRule):
    """Single-tensor passthrough (N = 1)"""

    fusion_id = 0
    name = 'identity'

    def layout(self, spec):
        if spec.n_tensors != 1:
            raise UnsupportedGeometry(f"identity fusion needs exactly one tensor, got {spec.n_tensors}")
        shape = spec.shapes[0]
        return FusionLayout(shape[1:], ((1, 1),), (0,), shape)

    def fuse(self, feature_set):
        self.layout(feature_set.shape_spec)
        return FusedTensor(feature_set.tensors[0].data)

    def restore(self, fused, target_shapes, frame_index=0):
        layout = self.layout(target_shapes)
        if fused.shape != layout.fused_shape:
            raise UnsupportedGeometry(f"fused shape {fused.shape} does not match {layout.fused_shape}")
        return FeatureSet((FeatureTensor(fused.data),), frame_index)


class SpaceToChannelFusion(FusionRule):
    """Reference rule: fold every level onto the coarsest grid, then concatenate"""

    fusion_id = 1
    name = 'space-to-channel'

    def layout(self, spec):
        grid_h = min(h for _, h, _ in spec)
        grid_w = min(w for _, _, w in spec)
        factors, offsets = [], []
        channel_total = 0
        for channels, height, width in spec:
            if height % grid_h or width % grid_w:
                raise UnsupportedGeometry(
                    f"{height}x{width} is not an integer multiple of the coarsest grid {grid_h}x{grid_w}"
                )
            factor = (height // grid_h, width // grid_w)
            factors.append(factor)
            offsets.append(channel_total)
            channel_total += channels * factor[0] * factor[1]
        return FusionLayout(
            (grid_h, grid_w), tuple(factors), tuple(offsets), (channel_total, grid_h, grid_w)
        )

    def fuse(self, feature_set):
        layout = self.layout(feature_set.shape_spec)
        folded = [
            space_to_channel(tensor.data, *factor)
            for tensor, factor in zip(feature_set, layout.factors)
        ]
        return FusedTensor(np.concatenate(folded, axis=0))

    def restore(self, fused, target_shapes, frame_index=0):
        layout = self.layout(target_shapes)
        if fused.shape != layout.fused_shape:
            raise UnsupportedGeometry(f"fused shape {fused.shape} does not match {layout.fused_shape}")
        tensors = []
        for (channels, _, _), factor, offset in zip(target_shapes, layout.factors, layout.channel_offsets):
            span = channels * factor[0] * factor[1]
            block = fused.data[offset:offset + span]
            tensors.append(FeatureTensor(channel_to_space(block, *factor)))
        return FeatureSet(tuple(tensors), frame_index)


FUSION_RULES = {
    IdentityFusion.fusion_id: IdentityFusion(),
    SpaceToChannelFusion.fusion_id: SpaceToChannelFusion(),
}

REFERENCE_FUSION = FUSION_RULES[SpaceToChannelFusion.fusion_id]


def get_fusion(fusion_id):
    try:
        return FUSION_RULES[fusion_id]
    except KeyError:
        raise UnsupportedGeometry(f"unknown fusion id {fusion_id}") from None


def fuse(feature_set, rule=REFERENCE_FUSION):
    return rule.fuse(feature_set)


def restore(fused, target_shapes, rule=REFERENCE_FUSION, frame_index=0):
    if not isinstance(target_shapes, ShapeSpec):
        target_shapes = ShapeSpec(tuple(target_shapes))
    return rule.restore(fused, target_shapes, frame_index)
