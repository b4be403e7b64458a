import numpy as np
from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings, strategies as st

from featurecodec.exceptions import InvalidInput
from fusion.rules import FusedTensor
from tensors.stats import compute_stats, pooled_moments, tensor_moments
from tensors.structures import FeatureSet, FeatureTensor, ShapeSpec, TensorStats
from tensors.synthetic import generate_sequence
from .zscore import rescale_fused, rescale_per_tensor, rescale_simplified, simplified_map


def assert_close(case, actual, expected, rel):
    case.assertLessEqual(abs(actual - expected), rel * max(1.0, abs(expected)))


class RescaleFusedTests(SimpleTestCase):

    def test_unit_range_to_target(self):
        data = np.random.default_rng(0).uniform(0, 1, size=(8, 4, 4)).astype(np.float32)
        output = rescale_fused(FusedTensor(data), TensorStats(2.0, 3.0))
        mean, std = tensor_moments(output)
        assert_close(self, mean, 2.0, 1e-4)
        assert_close(self, std, 3.0, 1e-4)

    def test_fixed_point(self):
        fused = FusedTensor(np.random.default_rng(1).normal(4.0, 2.0, size=(3, 5, 5)))
        output = rescale_fused(fused, compute_stats(fused))
        np.testing.assert_allclose(output.data, fused.data, rtol=1e-5, atol=1e-5)

    def test_constant_input(self):
        output = rescale_fused(FusedTensor(np.full((2, 3, 3), 0.25)), TensorStats(7.0, 1.0))
        self.assertTrue((output.data == 7.0).all())

    @override_settings(FCM_RESCALE_EPSILON=1.0)
    def test_epsilon_comes_from_settings(self):
        fused = FusedTensor(np.array([0.0, 0.5], dtype=np.float32).reshape(1, 1, 2))
        self.assertTrue((rescale_fused(fused, TensorStats(3.0, 1.0)).data == 3.0).all())


class RescalePerTensorTests(SimpleTestCase):

    def test_every_tensor_hits_its_target(self):
        frame = generate_sequence(ShapeSpec.parse('4x8x8,8x4x4,16x2x2'), 1, seed=2)[0]
        targets = [TensorStats(-1.0, 0.5), TensorStats(3.0, 2.0), TensorStats(0.0, 7.0)]
        output = rescale_per_tensor(frame, targets)
        for tensor, target in zip(output, targets):
            mean, std = tensor_moments(tensor)
            assert_close(self, mean, target.mean, 1e-4)
            assert_close(self, std, target.std, 1e-4)

    def test_count_mismatch(self):
        frame = generate_sequence(ShapeSpec.parse('1x2x2,1x1x1'), 1, seed=0)[0]
        with self.assertRaises(InvalidInput):
            rescale_per_tensor(frame, [TensorStats(0, 1)])

    def test_idempotent(self):
        frame = generate_sequence(ShapeSpec.parse('4x8x8'), 1, seed=3)[0]
        once = rescale_per_tensor(frame, [TensorStats(1.0, 2.0)])
        twice = rescale_per_tensor(once, [TensorStats(1.0, 2.0)])
        np.testing.assert_allclose(twice[0].data, once[0].data, rtol=1e-5, atol=1e-5)

    def test_preserves_order(self):
        frame = generate_sequence(ShapeSpec.parse('2x4x4'), 1, seed=4)[0]
        output = rescale_per_tensor(frame, [TensorStats(-5.0, 0.1)])
        np.testing.assert_array_equal(np.argsort(frame[0].data.ravel()), np.argsort(output[0].data.ravel()))


class RescaleSimplifiedTests(SimpleTestCase):

    def test_single_tensor_matches_per_tensor(self):
        frame = generate_sequence(ShapeSpec.parse('4x4x4'), 1, seed=5)[0]
        target = TensorStats(2.0, 0.75)
        np.testing.assert_allclose(
            rescale_simplified(frame, target)[0].data,
            rescale_per_tensor(frame, [target])[0].data,
            rtol=1e-6,
            atol=1e-6,
        )

    @settings(max_examples=20, deadline=None)
    @given(
        seed=st.integers(0, 10000),
        mean=st.floats(-50, 50),
        std=st.floats(0.1, 20),
    )
    def test_pooled_target_is_met(self, seed, mean, std):
        frame = generate_sequence(ShapeSpec.parse('2x8x8,4x4x4,8x2x2'), 1, seed=seed)[0]
        output = rescale_simplified(frame, TensorStats(mean, std))
        pooled_mean, pooled_std = pooled_moments(tensor_moments(t) for t in output)
        target = TensorStats(mean, std)
        self.assertLessEqual(abs(pooled_mean - target.mean), 2 ** -8 * max(abs(target.mean), target.std))
        self.assertLessEqual(abs(pooled_std - target.std), 2 ** -8 * target.std)

    def test_one_affine_map_for_all_tensors(self):
        frame = generate_sequence(ShapeSpec.parse('2x4x4,2x2x2'), 1, seed=6)[0]
        scale, offset = simplified_map(frame, TensorStats(1.0, 3.0))
        output = rescale_simplified(frame, TensorStats(1.0, 3.0))
        for before, after in zip(frame, output):
            expected = before.data.astype(np.float64) * scale + offset
            np.testing.assert_allclose(after.data, expected, rtol=1e-6, atol=1e-6)
        self.assertGreater(scale, 0)

    def test_fixed_point(self):
        frame = generate_sequence(ShapeSpec.parse('2x4x4,2x2x2'), 1, seed=7)[0]
        pooled = TensorStats(*pooled_moments(tensor_moments(t) for t in frame))
        output = rescale_simplified(frame, pooled)
        for before, after in zip(frame, output):
            np.testing.assert_allclose(after.data, before.data, rtol=1e-5, atol=1e-5)

    def test_degenerate_equal_share(self):
        frame = FeatureSet((FeatureTensor(np.ones((1, 2, 2))), FeatureTensor(np.zeros((2, 1, 1)))))
        output = rescale_simplified(frame, TensorStats(6.0, 1.0))
        for tensor in output:
            self.assertTrue((tensor.data == 3.0).all())
