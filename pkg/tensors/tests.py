import math
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from featurecodec.exceptions import InvalidInput, InvalidStats, InvalidTensor, NotAStream, TruncatedStream
from .ftns import decode_ftns, encode_ftns, read_ftns, write_ftns
from .stats import compute_stats, pooled_moments, pooled_sum_stats, tensor_moments
from .structures import FeatureSet, FeatureTensor, ShapeSpec, TensorStats
from .synthetic import generate_sequence, target_stats


class FeatureTensorTests(SimpleTestCase):

    def test_from_values_is_channel_major(self):
        tensor = FeatureTensor.from_values(range(12), 3, 2, 2)
        self.assertEqual(tensor.shape, (3, 2, 2))
        self.assertEqual(float(tensor.data[1, 0, 1]), 5.0)

    def test_data_is_read_only(self):
        tensor = FeatureTensor(np.zeros((1, 2, 2)))
        with self.assertRaises(ValueError):
            tensor.data[0, 0, 0] = 1.0

    def test_rejects_bad_tensors(self):
        with self.assertRaises(InvalidTensor):
            FeatureTensor(np.zeros((2, 2)))
        with self.assertRaises(InvalidTensor):
            FeatureTensor(np.zeros((0, 2, 2)))
        with self.assertRaises(InvalidTensor):
            FeatureTensor(np.array([[[np.nan]]]))
        with self.assertRaises(InvalidTensor):
            FeatureTensor.from_values(range(5), 1, 2, 2)

    def test_empty_feature_set_is_invalid(self):
        with self.assertRaises(InvalidInput):
            FeatureSet(())


class StatsTests(SimpleTestCase):

    def test_population_moments(self):
        stats = compute_stats(FeatureTensor.from_values([1, 2, 3, 4], 1, 1, 4))
        self.assertEqual(stats.mean, 2.5)
        self.assertAlmostEqual(stats.std, math.sqrt(1.25), places=6)

    def test_constant_tensor_has_zero_std(self):
        stats = compute_stats(FeatureTensor(np.full((2, 3, 3), 7.0)))
        self.assertEqual(stats.as_tuple(), (7.0, 0.0))

    def test_pooled_sum(self):
        pooled = pooled_sum_stats([TensorStats(1.0, 3.0), TensorStats(2.0, 4.0)])
        self.assertEqual(pooled.as_tuple(), (3.0, 5.0))

    def test_pooling_nothing_is_invalid(self):
        with self.assertRaises(InvalidInput):
            pooled_moments([])

    def test_stats_are_validated(self):
        with self.assertRaises(InvalidStats):
            TensorStats(0.0, -1.0)
        with self.assertRaises(InvalidStats):
            TensorStats(float('inf'), 1.0)

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float32, (2, 3, 4), elements=st.floats(-1e3, 1e3, width=32)))
    def test_moments_are_shift_consistent(self, values):
        mean, std = tensor_moments(values)
        shifted_mean, shifted_std = tensor_moments(values.astype(np.float64) + 10.0)
        self.assertAlmostEqual(shifted_mean, mean + 10.0, delta=1e-6 * max(1.0, abs(mean)))
        self.assertAlmostEqual(shifted_std, std, delta=1e-6 * max(1.0, std))

    @settings(max_examples=60, deadline=None)
    @given(
        arrays(np.float32, (2, 3, 4), elements=st.floats(-1e3, 1e3, width=32)),
        st.floats(0.01, 100.0),
        st.booleans(),
        st.floats(-1e3, 1e3),
    )
    def test_moments_are_affine_equivariant(self, values, magnitude, negative, offset):
        scale = -magnitude if negative else magnitude
        mean, std = tensor_moments(values)
        mapped_mean, mapped_std = tensor_moments(scale * values.astype(np.float64) + offset)
        extent = magnitude * float(np.abs(values).max()) + abs(offset) + 1.0
        self.assertAlmostEqual(mapped_mean, scale * mean + offset, delta=1e-9 * extent)
        self.assertAlmostEqual(mapped_std, magnitude * std, delta=1e-5 * magnitude * std + 1e-9 * extent)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(0.0, 1e3)), min_size=1, max_size=8),
        st.randoms(use_true_random=False),
    )
    def test_pooling_ignores_order(self, pairs, rng):
        stats = [TensorStats(mean, std) for mean, std in pairs]
        shuffled = list(stats)
        rng.shuffle(shuffled)
        self.assertEqual(pooled_sum_stats(shuffled), pooled_sum_stats(stats))

    def test_large_tensor_against_two_pass_oracle(self):
        values = np.random.default_rng(2024).standard_normal((256, 76, 136), dtype=np.float32)
        flat = values.ravel().tolist()
        mean = math.fsum(flat) / len(flat)
        std = math.sqrt(math.fsum((v - mean) ** 2 for v in flat) / len(flat))
        stats = compute_stats(FeatureTensor(values))
        self.assertAlmostEqual(stats.mean, mean, delta=1e-6)
        self.assertAlmostEqual(stats.std, std, delta=1e-6)


class ShapeSpecTests(SimpleTestCase):

    def test_fpn_preset(self):
        spec = ShapeSpec.fpn()
        self.assertEqual(spec.shapes, ((256, 64, 96), (256, 32, 48), (256, 16, 24), (256, 8, 12)))

    def test_fpn_needs_divisible_resolution(self):
        with self.assertRaises(InvalidInput):
            ShapeSpec.fpn(height=100, width=96)

    def test_darknet_presets(self):
        self.assertEqual(ShapeSpec.preset('darknet').shapes, ((256, 76, 136), (512, 38, 68), (1024, 19, 34)))
        self.assertEqual(ShapeSpec.preset('darknet-alt').n_tensors, 3)
        with self.assertRaises(InvalidInput):
            ShapeSpec.preset('resnet')

    def test_parse_and_str(self):
        spec = ShapeSpec.parse('4x8x8, 2x4x4')
        self.assertEqual(spec.shapes, ((4, 8, 8), (2, 4, 4)))
        self.assertEqual(str(spec), '4x8x8,2x4x4')
        self.assertEqual(spec.total_size, 256 + 32)
        with self.assertRaises(InvalidInput):
            ShapeSpec.parse('4x8')


class SyntheticTests(SimpleTestCase):
    spec = ShapeSpec.parse('4x8x8,8x4x4')

    def test_same_seed_same_sequence(self):
        self.assertEqual(generate_sequence(self.spec, 3, seed=7), generate_sequence(self.spec, 3, seed=7))
        self.assertNotEqual(generate_sequence(self.spec, 1, seed=7), generate_sequence(self.spec, 1, seed=8))

    def test_hits_target_moments(self):
        sequence = generate_sequence(self.spec, 3, seed=3, drift=0.1)
        for frame in sequence:
            for tensor, target in zip(frame, target_stats(self.spec, 3, 0.1, frame.frame_index)):
                mean, std = tensor_moments(tensor)
                self.assertAlmostEqual(mean, target.mean, delta=1e-5 * target.std)
                self.assertAlmostEqual(std, target.std, delta=1e-5 * target.std)

    def test_rejects_bad_arguments(self):
        with self.assertRaises(InvalidInput):
            generate_sequence(self.spec, 0, seed=0)
        with self.assertRaises(InvalidInput):
            generate_sequence(self.spec, 2, seed=0, correlation=1.0)

    def test_correlated_frames_are_closer(self):
        loose = generate_sequence(self.spec, 2, seed=1)
        tight = generate_sequence(self.spec, 2, seed=1, correlation=0.95)
        gap = lambda seq: float(np.abs(seq[1][0].data - seq[0][0].data).mean())
        self.assertLess(gap(tight), gap(loose))


class FtnsTests(SimpleTestCase):

    def test_round_trip(self):
        sequence = generate_sequence(ShapeSpec.parse('2x4x4,3x2x2'), 3, seed=5)
        self.assertEqual(decode_ftns(encode_ftns(sequence)), sequence)

    def test_bad_magic(self):
        with self.assertRaises(NotAStream):
            decode_ftns(b'NOPE' + bytes(20))

    def test_truncation_is_typed(self):
        data = encode_ftns(generate_sequence(ShapeSpec.parse('1x2x2'), 2, seed=0))
        for cut in range(len(data)):
            with self.assertRaises(TruncatedStream):
                decode_ftns(data[:cut])

    def test_mixed_shapes_are_rejected(self):
        a = generate_sequence(ShapeSpec.parse('1x2x2'), 1, seed=0)
        b = generate_sequence(ShapeSpec.parse('1x4x4'), 1, seed=0)
        with self.assertRaises(InvalidInput):
            encode_ftns(a + b)

    def test_files(self):
        sequence = generate_sequence(ShapeSpec.parse('2x2x2'), 2, seed=9)
        with tempfile.TemporaryDirectory() as workdir:
            path = Path(workdir) / 'seq.ftns'
            write_ftns(path, sequence)
            self.assertEqual(read_ftns(path), sequence)


class GenCommandTests(SimpleTestCase):

    def test_gen_is_deterministic(self):
        with tempfile.TemporaryDirectory() as workdir:
            first, second = Path(workdir) / 'a.ftns', Path(workdir) / 'b.ftns'
            for path in (first, second):
                call_command('gen', '--preset', 'darknet', '--frames', '2', '--seed', '7', '-o', str(path),
                             stdout=StringIO())
            self.assertEqual(first.read_bytes(), second.read_bytes())
            self.assertEqual(read_ftns(first)[0].shape_spec, ShapeSpec.darknet())

    def test_gen_custom_shapes(self):
        with tempfile.TemporaryDirectory() as workdir:
            path = Path(workdir) / 'c.ftns'
            out = StringIO()
            call_command('gen', '--shapes', '4x4x4,2x2x2', '--frames', '3', '-o', str(path), stdout=out)
            self.assertIn('shapes=4x4x4,2x2x2', out.getvalue())
            self.assertEqual(len(read_ftns(path)), 3)
