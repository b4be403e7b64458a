import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from featurecodec.exceptions import DecodeError, InvalidInput, UnsupportedGeometry
from fusion.rules import FusedTensor, fuse
from tensors.structures import ShapeSpec
from tensors.synthetic import generate_sequence
from .frames import MinMax, PackedFrame, QuantFrame, Tiling
from .quantization import (
    bytes_to_samples,
    dequantize_baseline,
    dequantize_proposed,
    quantize,
    samples_to_bytes,
)
from .tiling import pack, unpack


class TilingTests(SimpleTestCase):

    def test_single_channel(self):
        fused = FusedTensor(np.arange(6, dtype=np.float32).reshape(1, 2, 3))
        packed = pack(fused)
        self.assertEqual((packed.tiling.rows, packed.tiling.cols), (1, 1))
        np.testing.assert_array_equal(packed.data, fused.data[0])

    def test_ten_channels(self):
        tiling = Tiling.for_shape(10, 2, 3)
        self.assertEqual((tiling.rows, tiling.cols, tiling.padding_cells), (3, 4, 2))
        self.assertEqual(tiling.frame_shape, (6, 12))

    def test_row_major_layout_with_zero_padding(self):
        fused = FusedTensor(np.arange(1, 41, dtype=np.float32).reshape(10, 2, 2))
        packed = pack(fused)
        np.testing.assert_array_equal(packed.data[0:2, 2:4], fused.data[1])
        np.testing.assert_array_equal(packed.data[2:4, 0:2], fused.data[4])
        self.assertTrue((packed.data[4:6, 4:8] == 0).all())

    def test_fpn_round_trip(self):
        fused = fuse(generate_sequence(ShapeSpec.fpn(height=64, width=64), 1, seed=0)[0])
        packed = pack(fused)
        self.assertEqual(unpack(packed, *fused.shape), fused)

    def test_unpack_mismatch(self):
        packed = pack(FusedTensor(np.ones((4, 2, 2))))
        with self.assertRaises(UnsupportedGeometry):
            unpack(packed, 5, 2, 2)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 40), st.integers(1, 5), st.integers(1, 5), st.integers(0, 1000))
    def test_round_trip(self, channels, height, width, seed):
        data = np.random.default_rng(seed).standard_normal((channels, height, width)).astype(np.float32)
        fused = FusedTensor(data)
        self.assertEqual(unpack(pack(fused), channels, height, width), fused)


class QuantizationTests(SimpleTestCase):

    def frame(self, values):
        return PackedFrame(np.asarray(values, dtype=np.float32))

    def test_endpoints_and_midpoint(self):
        quant, minmax = quantize(self.frame([[-1.0, 0.0, 1.0]]), 10)
        self.assertEqual(quant.samples.tolist(), [[0, 512, 1023]])
        self.assertEqual((minmax.min, minmax.max), (-1.0, 1.0))

    def test_constant_frame(self):
        quant, minmax = quantize(self.frame([[3.5, 3.5], [3.5, 3.5]]), 8)
        self.assertFalse(quant.samples.any())
        self.assertEqual((minmax.min, minmax.max), (3.5, 3.5))
        np.testing.assert_array_equal(dequantize_baseline(quant, minmax).data, 3.5)

    def test_range_ignores_padding(self):
        packed = pack(FusedTensor(np.array([5.0, 6.0, 7.0], dtype=np.float32).reshape(3, 1, 1)))
        self.assertEqual(packed.tiling.padding_cells, 1)
        quant, minmax = quantize(packed, 8)
        self.assertEqual((minmax.min, minmax.max), (5.0, 7.0))
        self.assertEqual(quant.samples.tolist(), [[0, 128], [255, 0]])

    def test_proposed_dequantization(self):
        quant = QuantFrame(np.array([[0, 1023]]), 10)
        self.assertEqual(dequantize_proposed(quant).data.tolist(), [[0.0, 1.0]])
        half = dequantize_proposed(QuantFrame(np.array([[128]]), 8)).data[0, 0]
        self.assertAlmostEqual(float(half), 128 / 255, places=6)

    def test_baseline_dequantization(self):
        quant = QuantFrame(np.array([[0, 255]]), 8)
        self.assertEqual(dequantize_baseline(quant, MinMax(-3.0, 5.0)).data.tolist(), [[-3.0, 5.0]])
        unit = dequantize_baseline(QuantFrame(np.array([[7, 100]]), 8), MinMax(0.0, 1.0))
        np.testing.assert_array_equal(unit.data, dequantize_proposed(QuantFrame(np.array([[7, 100]]), 8)).data)

    def test_baseline_error_is_half_a_step(self):
        rng = np.random.default_rng(11)
        for bit_depth in (8, 10, 12):
            data = rng.uniform(-4.0, 9.0, size=(400, 500)).astype(np.float32)
            quant, minmax = quantize(PackedFrame(data), bit_depth)
            recon = dequantize_baseline(quant, minmax).data.astype(np.float64)
            bound = minmax.span / (2 * ((1 << bit_depth) - 1)) + 2 * float(np.spacing(np.float32(9.0)))
            self.assertLessEqual(float(np.abs(recon - data).max()), bound)

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float32, (1, 16), elements=st.floats(-100, 100, width=32)), st.integers(1, 16))
    def test_monotone_and_in_range(self, values, bit_depth):
        order = np.argsort(values[0], kind='stable')
        quant, _ = quantize(PackedFrame(values), bit_depth)
        self.assertTrue((np.diff(quant.samples[0][order].astype(np.int64)) >= 0).all())
        self.assertLess(int(quant.samples.max()), 1 << bit_depth)

    def test_bad_bit_depth(self):
        with self.assertRaises(InvalidInput):
            quantize(self.frame([[0.0, 1.0]]), 17)
        with self.assertRaises(InvalidInput):
            QuantFrame(np.array([[256]]), 8)


class SampleLayoutTests(SimpleTestCase):

    def test_eight_bit_layout(self):
        quant = QuantFrame(np.array([[0, 255]]), 8)
        self.assertEqual(samples_to_bytes(quant), b'\x00\xff')

    def test_sixteen_bit_layout_is_little_endian(self):
        quant = QuantFrame(np.array([[0x0102, 1023]]), 10)
        self.assertEqual(samples_to_bytes(quant), b'\x02\x01\xff\x03')
        self.assertEqual(bytes_to_samples(b'\x02\x01\xff\x03', 1, 2, 10), quant)

    def test_wrong_length_or_range(self):
        with self.assertRaises(DecodeError):
            bytes_to_samples(b'\x00', 1, 2, 8)
        with self.assertRaises(DecodeError):
            bytes_to_samples(b'\x00\x04', 1, 1, 10)
