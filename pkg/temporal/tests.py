import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from featurecodec.exceptions import InvalidInput
from tensors.structures import FeatureSet, FeatureTensor, ShapeSpec
from tensors.synthetic import generate_sequence
from .resampling import downsample, kept_count, upsample


def constant_frame(value, index=0):
    return FeatureSet((FeatureTensor(np.full((1, 2, 2), value)),), index)


def affine_sequence(frames):
    base = np.linspace(-2.0, 2.0, 24, dtype=np.float32).reshape(2, 3, 4)
    slope = np.linspace(0.5, -0.25, 24, dtype=np.float32).reshape(2, 3, 4)
    return [FeatureSet((FeatureTensor(base + slope * t),), t) for t in range(frames)]


class DownsampleTests(SimpleTestCase):

    def test_disabled_is_identity(self):
        sequence = affine_sequence(5)
        kept, indices = downsample(sequence, False)
        self.assertEqual(kept, sequence)
        self.assertEqual(indices, [0, 1, 2, 3, 4])

    def test_keeps_even_frames(self):
        kept, indices = downsample(affine_sequence(5), True)
        self.assertEqual(indices, [0, 2, 4])
        self.assertEqual([f.frame_index for f in kept], [0, 2, 4])

    def test_single_frame(self):
        self.assertEqual(downsample(affine_sequence(1), True)[1], [0])

    def test_kept_count(self):
        self.assertEqual([kept_count(n) for n in range(6)], [0, 1, 1, 2, 2, 3])
        self.assertEqual(kept_count(5, enabled=False), 5)


class UpsampleTests(SimpleTestCase):

    def test_midpoint(self):
        restored = upsample([constant_frame(1.0), constant_frame(3.0)], 3)
        self.assertEqual([float(f[0].data[0, 0, 0]) for f in restored], [1.0, 2.0, 3.0])
        self.assertEqual([f.frame_index for f in restored], [0, 1, 2])

    def test_trailing_frame_repeats_last(self):
        restored = upsample([constant_frame(1.0), constant_frame(3.0)], 4)
        self.assertEqual([float(f[0].data[0, 0, 0]) for f in restored], [1.0, 2.0, 3.0, 3.0])

    def test_count_mismatch(self):
        with self.assertRaises(InvalidInput):
            upsample([constant_frame(1.0)], 4)
        with self.assertRaises(InvalidInput):
            upsample([], 0)

    def test_affine_sequences_are_exact(self):
        for frames in (3, 5, 8):
            sequence = affine_sequence(frames)
            restored = upsample(downsample(sequence, True)[0], frames)
            self.assertEqual(len(restored), frames)
            last = frames - 1 if frames % 2 == 0 else frames
            for original, estimate in zip(sequence[:last], restored[:last]):
                np.testing.assert_allclose(estimate[0].data, original[0].data, rtol=0, atol=1e-6)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 9), st.integers(0, 1000))
    def test_kept_frames_survive_and_midpoints_lie_between(self, frames, seed):
        sequence = generate_sequence(ShapeSpec.parse('2x3x3,1x2x2'), frames, seed=seed)
        kept, indices = downsample(sequence, True)
        restored = upsample(kept, frames)
        self.assertEqual(len(restored), frames)
        for index in indices:
            self.assertEqual(restored[index].tensors, sequence[index].tensors)
        for index in range(1, frames - 1, 2):
            for before, middle, after in zip(restored[index - 1], restored[index], restored[index + 1]):
                low = np.minimum(before.data, after.data)
                high = np.maximum(before.data, after.data)
                self.assertTrue(((middle.data >= low) & (middle.data <= high)).all())
