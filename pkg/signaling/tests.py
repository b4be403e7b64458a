import struct

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from featurecodec.exceptions import CorruptStream, InvalidInput, InvalidStats, TruncatedStream
from tensors.structures import TensorStats
from .bfloat16 import bfloat16_bits_to_float32, float32_to_bfloat16_bits, round_to_bfloat16
from .params import (
    SignalingMode,
    StatsParams,
    decode_stats,
    encode_stats,
    overhead_bytes,
    refresh_count,
    refresh_schedule,
    segment_size,
)

finite_stats = st.builds(
    TensorStats,
    st.floats(-1e6, 1e6, width=32),
    st.floats(0, 1e6, width=32),
)


def bits_of(value):
    return struct.unpack('<I', struct.pack('<f', value))[0]


def float_of(bits):
    return struct.unpack('<f', struct.pack('<I', bits))[0]


class Bfloat16Tests(SimpleTestCase):

    def test_exact_values(self):
        self.assertEqual(int(float32_to_bfloat16_bits(1.0)), 0x3F80)
        self.assertEqual(int(float32_to_bfloat16_bits(0.5)), 0x3F00)
        self.assertEqual(int(float32_to_bfloat16_bits(-2.0)), 0xC000)

    def test_round_to_nearest_even(self):
        self.assertEqual(int(float32_to_bfloat16_bits(float_of(0x3F808000))), 0x3F80)
        self.assertEqual(int(float32_to_bfloat16_bits(float_of(0x3F818000))), 0x3F82)
        self.assertEqual(int(float32_to_bfloat16_bits(float_of(0x3F808001))), 0x3F81)
        self.assertEqual(int(float32_to_bfloat16_bits(float_of(0x3F807FFF))), 0x3F80)

    def test_widening_is_exact(self):
        self.assertEqual(float(bfloat16_bits_to_float32(np.uint16(0x4049))), float_of(0x40490000))

    @settings(max_examples=200)
    @given(st.floats(2.0 ** -100, 2.0 ** 100, width=32))
    def test_relative_error(self, value):
        rounded = float(round_to_bfloat16(value))
        self.assertLessEqual(abs(rounded - value), 2 ** -8 * abs(value))
        self.assertEqual(bits_of(rounded) & 0xFFFF, 0)


class StatsSegmentTests(SimpleTestCase):

    def full(self, n_tensors=2):
        pairs = tuple(TensorStats(0.5 * n, 1.0 + n) for n in range(n_tensors))
        return StatsParams(SignalingMode.FULL, pairs, fused=TensorStats(9.0, 2.0))

    def test_segment_sizes(self):
        self.assertEqual(segment_size(SignalingMode.FULL, 4), 40)
        self.assertEqual(segment_size(SignalingMode.SIMPLIFIED, 4), 4)
        self.assertEqual(segment_size(SignalingMode.BASELINE, 4), 0)
        self.assertEqual(len(encode_stats(self.full(4))), 40)

    def test_full_layout_order(self):
        params = StatsParams(SignalingMode.FULL, (TensorStats(1.0, 2.0),), fused=TensorStats(3.0, 4.0))
        self.assertEqual(encode_stats(params), struct.pack('<4f', 1.0, 2.0, 3.0, 4.0))

    def test_simplified_layout(self):
        params = StatsParams(SignalingMode.SIMPLIFIED, pooled=TensorStats(0.5, 1.0))
        self.assertEqual(encode_stats(params), bytes.fromhex('003f803f'))

    def test_baseline_is_empty(self):
        self.assertEqual(encode_stats(StatsParams(SignalingMode.BASELINE)), b'')
        self.assertEqual(decode_stats(b'', SignalingMode.BASELINE, 3).mode, SignalingMode.BASELINE)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(finite_stats, min_size=1, max_size=6), finite_stats)
    def test_full_round_trip_is_exact(self, pairs, fused):
        params = StatsParams(SignalingMode.FULL, tuple(pairs), fused=fused)
        self.assertEqual(decode_stats(encode_stats(params), SignalingMode.FULL, len(pairs)), params)

    @settings(max_examples=100)
    @given(st.floats(2.0 ** -10, 1e6, width=32), st.floats(2.0 ** -10, 1e6, width=32))
    def test_simplified_round_trip_precision(self, mean, std):
        params = StatsParams(SignalingMode.SIMPLIFIED, pooled=TensorStats(mean, std))
        decoded = decode_stats(encode_stats(params), SignalingMode.SIMPLIFIED, 4).pooled
        self.assertLessEqual(abs(decoded.mean - params.pooled.mean), 2 ** -8 * params.pooled.mean)
        self.assertLessEqual(abs(decoded.std - params.pooled.std), 2 ** -8 * params.pooled.std)

    def test_wrong_lengths(self):
        data = encode_stats(self.full())
        with self.assertRaises(TruncatedStream):
            decode_stats(data[:-1], SignalingMode.FULL, 2)
        with self.assertRaises(CorruptStream):
            decode_stats(data + b'\x00', SignalingMode.FULL, 2)

    def test_negative_std_in_segment(self):
        with self.assertRaises(InvalidStats):
            decode_stats(struct.pack('<4f', 0.0, -1.0, 0.0, 1.0), SignalingMode.FULL, 1)

    def test_mode_consistency(self):
        with self.assertRaises(InvalidStats):
            StatsParams(SignalingMode.SIMPLIFIED, (TensorStats(0, 1),), pooled=TensorStats(0, 1))
        with self.assertRaises(InvalidStats):
            StatsParams(SignalingMode.FULL, (TensorStats(0, 1),))
        with self.assertRaises(InvalidStats):
            StatsParams(SignalingMode.BASELINE, pooled=TensorStats(0, 1))

    def test_mode_names(self):
        self.assertEqual(SignalingMode.from_name('Simplified'), SignalingMode.SIMPLIFIED)
        self.assertEqual(SignalingMode.from_name('0'), SignalingMode.BASELINE)
        with self.assertRaises(InvalidInput):
            SignalingMode.from_name('lossless')


class RefreshScheduleTests(SimpleTestCase):

    def test_schedule(self):
        self.assertTrue(all(refresh_schedule(i, 1) for i in range(10)))
        self.assertEqual([i for i in range(64) if refresh_schedule(i, 32)], [0, 32])
        self.assertEqual(refresh_count(65, 32), 3)
        with self.assertRaises(InvalidInput):
            refresh_schedule(0, 0)

    def test_overhead(self):
        self.assertEqual(overhead_bytes(SignalingMode.FULL, 4, 32, 64), 80)
        self.assertEqual(overhead_bytes(SignalingMode.BASELINE, 4, 32, 64), 512)
        self.assertEqual(overhead_bytes(SignalingMode.SIMPLIFIED, 4, 32, 32), 4)

    def test_crossover(self):
        self.assertLess(overhead_bytes(SignalingMode.FULL, 4, 6, 6), overhead_bytes(SignalingMode.BASELINE, 4, 6, 6))
        self.assertEqual(overhead_bytes(SignalingMode.FULL, 4, 5, 5), overhead_bytes(SignalingMode.BASELINE, 4, 5, 5))

    def test_crossover_grid(self):
        for n_tensors in (1, 3, 4):
            for refresh in (1, 2, 4, 8, 32):
                for frames in range(1, 65):
                    full = overhead_bytes(SignalingMode.FULL, n_tensors, refresh, frames)
                    baseline = overhead_bytes(SignalingMode.BASELINE, n_tensors, refresh, frames)
                    periods = -(-frames // refresh)
                    self.assertEqual(full < baseline, frames > (n_tensors + 1) * periods)
