import shutil
import zlib

import numpy as np
from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from featurecodec.exceptions import DecodeError, ExternalCodecError, InvalidConfig, UnknownCodec
from packing.frames import QuantFrame
from .base import CodecPayload, FrameGeometry, format_codec_params, parse_codec_params
from .codecs import RequantCodec
from .external import ExternalCodec, external_available
from .registry import decode_frame, encode_frame, get_codec, resolve_codec_id


def random_frame(bit_depth, shape=(6, 9), seed=0):
    samples = np.random.default_rng(seed).integers(0, 1 << bit_depth, size=shape)
    return QuantFrame(samples, bit_depth)


def geometry_of(quant):
    return FrameGeometry(quant.height, quant.width, quant.bit_depth)


class RegistryTests(SimpleTestCase):

    def test_lookup(self):
        self.assertEqual(get_codec(2).name, 'requant')
        self.assertEqual(resolve_codec_id('zdeflate'), 1)
        self.assertEqual(resolve_codec_id('255'), 255)
        with self.assertRaises(UnknownCodec):
            get_codec(7)
        with self.assertRaises(UnknownCodec):
            resolve_codec_id('vvc')

    def test_payload_byte_count(self):
        payload = encode_frame(random_frame(8), 0)
        self.assertEqual(payload.byte_count, len(payload.frame_bytes))
        self.assertEqual(payload.byte_count, 54)

    def test_codec_params(self):
        self.assertEqual(parse_codec_params('bits=6; level = 3'), {'bits': '6', 'level': '3'})
        self.assertEqual(parse_codec_params(''), {})
        self.assertEqual(format_codec_params({'level': 3, 'bits': 6}), 'bits=6;level=3')
        with self.assertRaises(InvalidConfig):
            parse_codec_params('bits')


class LosslessCodecTests(SimpleTestCase):

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from([0, 1]), st.integers(1, 16), st.integers(0, 1000))
    def test_bit_exact_round_trip(self, codec_id, bit_depth, seed):
        quant = random_frame(bit_depth, seed=seed)
        payload = encode_frame(quant, codec_id)
        self.assertEqual(decode_frame(payload, geometry_of(quant)), quant)

    def test_zdeflate_level(self):
        quant = QuantFrame(np.zeros((32, 32), dtype=np.uint16), 10)
        payload = encode_frame(quant, 1, 'level=1')
        self.assertEqual(zlib.decompress(payload.frame_bytes), bytes(2048))
        with self.assertRaises(InvalidConfig):
            encode_frame(quant, 1, 'level=12')
        with self.assertRaises(InvalidConfig):
            encode_frame(quant, 0, 'level=1')

    def test_corrupt_zdeflate(self):
        quant = random_frame(8)
        with self.assertRaises(DecodeError):
            decode_frame(CodecPayload(1, b'not zlib'), geometry_of(quant))

    def test_raw_length_mismatch(self):
        with self.assertRaises(DecodeError):
            decode_frame(CodecPayload(0, b'\x00' * 5), FrameGeometry(2, 3, 8))


class RequantCodecTests(SimpleTestCase):

    def test_same_depth_is_identity(self):
        quant = random_frame(10)
        payload = encode_frame(quant, 2, 'bits=10')
        self.assertEqual(decode_frame(payload, geometry_of(quant)), quant)

    def test_error_bound_over_every_level(self):
        quant = QuantFrame(np.arange(1024, dtype=np.uint16).reshape(32, 32), 10)
        decoded = decode_frame(encode_frame(quant, 2, 'bits=8'), geometry_of(quant))
        error = np.abs(decoded.samples.astype(np.int64) - quant.samples.astype(np.int64))
        self.assertLessEqual(int(error.max()), 4)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 16), st.data())
    def test_error_bound(self, bit_depth, data):
        bits = data.draw(st.integers(1, bit_depth))
        quant = data.draw(arrays(np.uint16, (4, 5), elements=st.integers(0, (1 << bit_depth) - 1)))
        quant = QuantFrame(quant, bit_depth)
        decoded = decode_frame(encode_frame(quant, 2, {'bits': bits}), geometry_of(quant))
        error = np.abs(decoded.samples.astype(np.int64) - quant.samples.astype(np.int64))
        self.assertLessEqual(int(error.max()), 1 << (bit_depth - bits))

    def test_payload_is_bit_packed(self):
        quant = random_frame(10, shape=(8, 8))
        for bits in (3, 6, 8):
            payload = encode_frame(quant, 2, f'bits={bits}')
            self.assertEqual(payload.frame_bytes[0], bits)
            self.assertEqual(payload.byte_count, 1 + (64 * bits + 7) // 8)

    def test_fewer_bits_never_cost_more(self):
        quant = random_frame(12, shape=(16, 16))
        sizes = [encode_frame(quant, 2, f'bits={bits}').byte_count for bits in range(1, 13)]
        self.assertEqual(sizes, sorted(sizes))

    def test_reduce_expand_endpoints(self):
        codes = RequantCodec.reduce(np.array([0, 1023]), 10, 8)
        self.assertEqual(codes.tolist(), [0, 255])
        self.assertEqual(RequantCodec.expand(codes, 10, 8).tolist(), [0, 1023])

    def test_invalid_parameters_and_payloads(self):
        quant = random_frame(8)
        with self.assertRaises(InvalidConfig):
            encode_frame(quant, 2, 'bits=9')
        with self.assertRaises(InvalidConfig):
            encode_frame(quant, 2, 'depth=4')
        with self.assertRaises(DecodeError):
            decode_frame(CodecPayload(2, b''), geometry_of(quant))
        with self.assertRaises(DecodeError):
            decode_frame(CodecPayload(2, b'\x04\x00'), geometry_of(quant))


class ExternalCodecTests(SimpleTestCase):

    @override_settings(FCM_EXTERNAL_ENCODER_CMD='cp {input} {output}', FCM_EXTERNAL_DECODER_CMD='cp {input} {output}')
    def test_copy_round_trip(self):
        if not external_available():
            self.skipTest('cp is not available')
        quant = random_frame(10)
        payload = encode_frame(quant, 255)
        self.assertEqual(payload.byte_count, quant.height * quant.width * 2)
        self.assertEqual(decode_frame(payload, geometry_of(quant)), quant)

    @override_settings(FCM_EXTERNAL_ENCODER_CMD='sh -c "echo boom >&2; exit 3"')
    def test_failure_carries_diagnostics(self):
        if shutil.which('sh') is None:
            self.skipTest('sh is not available')
        with self.assertRaises(ExternalCodecError) as caught:
            ExternalCodec().encode(random_frame(8))
        self.assertEqual(caught.exception.returncode, 3)
        self.assertIn('boom', caught.exception.stderr)

    @override_settings(FCM_EXTERNAL_ENCODER_CMD='')
    def test_missing_template(self):
        with self.assertRaises(InvalidConfig):
            ExternalCodec().encode(random_frame(8))

    @override_settings(FCM_EXTERNAL_ENCODER_CMD='fcm-no-such-encoder {input} {output}')
    def test_missing_program(self):
        with self.assertRaises(ExternalCodecError):
            ExternalCodec().encode(random_frame(8))

    @override_settings(FCM_EXTERNAL_ENCODER_CMD='cp {input} {output} {')
    def test_malformed_template(self):
        with self.assertRaises(InvalidConfig):
            ExternalCodec().encode(random_frame(8))

    @override_settings(FCM_EXTERNAL_ENCODER_CMD='cp "{input} {output}')
    def test_unbalanced_quotes(self):
        with self.assertRaises(InvalidConfig):
            ExternalCodec().encode(random_frame(8))
