import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from featurecodec.exceptions import UnsupportedGeometry
from tensors.structures import FeatureSet, ShapeSpec
from tensors.synthetic import generate_sequence
from .rules import (
    FusedTensor,
    IdentityFusion,
    REFERENCE_FUSION,
    channel_to_space,
    fuse,
    get_fusion,
    restore,
    space_to_channel,
)


class SpaceToChannelTests(SimpleTestCase):

    def test_blocks_become_channels(self):
        data = np.arange(16, dtype=np.float32).reshape(1, 4, 4)
        folded = space_to_channel(data, 2, 2)
        self.assertEqual(folded.shape, (4, 2, 2))
        # channel k holds the samples at offset (k // 2, k % 2) of every 2x2 block
        np.testing.assert_array_equal(folded[0], [[0, 2], [8, 10]])
        np.testing.assert_array_equal(folded[3], [[5, 7], [13, 15]])
        np.testing.assert_array_equal(channel_to_space(folded, 2, 2), data)

    def test_indivisible_sizes(self):
        with self.assertRaises(UnsupportedGeometry):
            space_to_channel(np.zeros((1, 3, 4), dtype=np.float32), 2, 2)


class FusionRuleTests(SimpleTestCase):

    def test_identity_for_single_tensor(self):
        frame = generate_sequence(ShapeSpec.parse('3x4x5'), 1, seed=1)[0]
        fused = fuse(frame, get_fusion(0))
        np.testing.assert_array_equal(fused.data, frame[0].data)
        self.assertEqual(restore(fused, frame.shape_spec, get_fusion(0)), frame)

    def test_identity_needs_one_tensor(self):
        with self.assertRaises(UnsupportedGeometry):
            IdentityFusion().layout(ShapeSpec.parse('1x2x2,1x1x1'))

    def test_fpn_channel_count(self):
        layout = REFERENCE_FUSION.layout(ShapeSpec.fpn())
        self.assertEqual(layout.fused_shape, (21760, 8, 12))
        self.assertEqual(layout.factors, ((8, 8), (4, 4), (2, 2), (1, 1)))

    def test_darknet_channel_count(self):
        self.assertEqual(REFERENCE_FUSION.fused_shape(ShapeSpec.darknet()), (4096 + 2048 + 1024, 19, 34))

    def test_fpn_round_trip_is_exact(self):
        frame = generate_sequence(ShapeSpec.fpn(height=64, width=64), 1, seed=4)[0]
        fused = fuse(frame)
        self.assertEqual(fused.channels, 21760)
        self.assertEqual(restore(fused, frame.shape_spec, frame_index=frame.frame_index), frame)

    def test_fusion_is_a_rearrangement(self):
        frame = generate_sequence(ShapeSpec.parse('2x8x8,4x4x4'), 1, seed=2)[0]
        original = np.sort(np.concatenate([t.data.ravel() for t in frame]))
        np.testing.assert_array_equal(np.sort(fuse(frame).data.ravel()), original)

    def test_non_integer_factor(self):
        with self.assertRaises(UnsupportedGeometry):
            REFERENCE_FUSION.layout(ShapeSpec.parse('1x6x6,1x4x4'))

    def test_restore_rejects_wrong_shape(self):
        with self.assertRaises(UnsupportedGeometry):
            restore(FusedTensor(np.zeros((3, 2, 2))), ShapeSpec.parse('1x4x4,1x2x2'))

    def test_unknown_rule(self):
        with self.assertRaises(UnsupportedGeometry):
            get_fusion(9)

    @settings(max_examples=25, deadline=None)
    @given(
        levels=st.integers(1, 3),
        channels=st.integers(1, 4),
        grid=st.tuples(st.integers(1, 3), st.integers(1, 3)),
        seed=st.integers(0, 2 ** 16),
    )
    def test_dyadic_round_trip(self, levels, channels, grid, seed):
        shapes = tuple((channels, grid[0] * 2 ** k, grid[1] * 2 ** k) for k in reversed(range(levels)))
        frame = generate_sequence(ShapeSpec(shapes), 1, seed=seed)[0]
        self.assertEqual(restore(fuse(frame), ShapeSpec(shapes)), frame)
        self.assertIsInstance(frame, FeatureSet)
