import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from bitstream.container import demux
from bitstream.tests import load_hex
from featurecodec.exceptions import InvalidConfig, InvalidInput
from signaling.params import SignalingMode
from tensors.ftns import read_ftns, write_ftns
from tensors.stats import pooled_moments, tensor_moments
from tensors.structures import FeatureSet, FeatureTensor, ShapeSpec
from tensors.synthetic import generate_sequence
from .config import EncodeConfig
from .engine import decode, encode

SMALL = ShapeSpec.parse('4x8x8,4x4x4,8x2x2')


class EncodeConfigTests(SimpleTestCase):

    def test_defaults(self):
        config = EncodeConfig.resolve()
        self.assertEqual(config.mode, SignalingMode.FULL)
        self.assertEqual((config.bit_depth, config.refresh_period, config.codec_id), (10, 32, 0))
        self.assertEqual((config.fusion_id, config.fps_num, config.fps_den, config.workers), (1, 30, 1, 1))
        self.assertFalse(config.temporal)

    def test_config_line(self):
        config = EncodeConfig.resolve(codec='requant', codec_params='bits=8')
        line = config.to_line()
        self.assertEqual(
            line,
            'config: mode=full q=10 refresh=32 codec=2 codec_params=bits=8 fusion=1 temporal=0 fps=30/1 workers=1',
        )
        self.assertEqual(EncodeConfig.from_line(line), config)

    def test_line_round_trip_with_temporal(self):
        config = EncodeConfig.resolve(mode='baseline', bit_depth=8, temporal=True, fps='25', codec=1)
        self.assertEqual(EncodeConfig.from_line(config.to_line()), config)

    def test_flags_override_file(self):
        with tempfile.TemporaryDirectory() as workdir:
            path = Path(workdir) / 'codec.env'
            path.write_text('# sweep anchor\nFCM_MODE=baseline\nFCM_BIT_DEPTH=8\nFCM_TEMPORAL=1\n')
            config = EncodeConfig.resolve(path, bit_depth=12)
        self.assertEqual(config.mode, SignalingMode.BASELINE)
        self.assertEqual(config.bit_depth, 12)
        self.assertTrue(config.temporal)

    def test_invalid_values(self):
        with self.assertRaises(InvalidConfig) as caught:
            EncodeConfig.resolve(bit_depth=17)
        self.assertIn('bit_depth', caught.exception.errors)
        with self.assertRaises(InvalidConfig) as caught:
            EncodeConfig.resolve(codec='requant', codec_params='bits=12', bit_depth=10)
        self.assertIn('codec_params', caught.exception.errors)
        with self.assertRaises(InvalidConfig):
            EncodeConfig.resolve(codec='vvc')
        with self.assertRaises(InvalidConfig):
            EncodeConfig.resolve(fps='30/0')
        with self.assertRaises(InvalidConfig):
            EncodeConfig.resolve(mode='lossless')
        with self.assertRaises(InvalidConfig):
            EncodeConfig.from_line('config: mode=full quality=3')


class PipelineTests(SimpleTestCase):

    def config(self, **overrides):
        values = {'codec': 0, 'refresh_period': 1}
        values.update(overrides)
        return EncodeConfig.resolve(**values)

    def test_matches_golden_stream(self):
        frame = FeatureSet((FeatureTensor.from_values([0.0, 1.0], 1, 1, 2),))
        config = self.config(mode='simplified', bit_depth=8, fusion=0)
        self.assertEqual(encode([frame], config), load_hex('golden_simplified.hex'))

    def test_identity_chain(self):
        sequence = generate_sequence(ShapeSpec.parse('2x4x4'), 3, seed=1)
        decoded = decode(encode(sequence, self.config(mode='full', fusion=0)))
        for before, after in zip(sequence, decoded):
            mean, std = tensor_moments(before[0])
            mean_r, std_r = tensor_moments(after[0])
            self.assertAlmostEqual(mean_r, mean, delta=1e-4 * max(abs(mean), std))
            self.assertAlmostEqual(std_r, std, delta=1e-4 * std)
            step = float(before[0].data.max() - before[0].data.min()) / 1023
            # half a step of quantization plus the small affine correction
            self.assertLessEqual(float(np.abs(after[0].data - before[0].data).max()), 0.55 * step)

    def test_full_mode_restores_every_tensor(self):
        cases = ((ShapeSpec.fpn(height=64, width=64), 2), (SMALL, 2), (ShapeSpec.darknet(), 1))
        for preset, frames in cases:
            sequence = generate_sequence(preset, frames, seed=3, drift=0.2)
            decoded = decode(encode(sequence, self.config(mode='full')))
            self.assertEqual(len(decoded), frames)
            for before, after in zip(sequence, decoded):
                self.assertEqual(after.shape_spec, preset)
                for x, y in zip(before, after):
                    (mean, std), (mean_r, std_r) = tensor_moments(x), tensor_moments(y)
                    self.assertLessEqual(abs(mean - mean_r), 1e-4 * max(abs(mean), std))
                    self.assertLessEqual(abs(std - std_r), 1e-4 * std)

    def test_simplified_mode_restores_pooled_stats(self):
        sequence = generate_sequence(SMALL, 3, seed=4)
        decoded = decode(encode(sequence, self.config(mode='simplified')))
        for before, after in zip(sequence, decoded):
            mean, std = pooled_moments(tensor_moments(t) for t in before)
            mean_r, std_r = pooled_moments(tensor_moments(t) for t in after)
            self.assertLessEqual(abs(mean - mean_r), 2 ** -8 * abs(mean))
            self.assertLessEqual(abs(std - std_r), 2 ** -8 * std)

    def test_baseline_within_half_step(self):
        sequence = generate_sequence(SMALL, 2, seed=5)
        decoded = decode(encode(sequence, self.config(mode='baseline', bit_depth=8)))
        for before, after in zip(sequence, decoded):
            low = min(float(t.data.min()) for t in before)
            high = max(float(t.data.max()) for t in before)
            bound = (high - low) / (2 * 255) + 4 * float(np.spacing(np.float32(max(abs(low), abs(high)))))
            for x, y in zip(before, after):
                self.assertLessEqual(float(np.abs(x.data.astype(np.float64) - y.data).max()), bound)

    def test_full_mode_beats_baseline_on_overhead(self):
        sequence = generate_sequence(SMALL, 12, seed=6)
        full = encode(sequence, self.config(mode='full', refresh_period=12))
        baseline = encode(sequence, self.config(mode='baseline'))
        self.assertLess(len(full), len(baseline))

    def test_temporal_counts(self):
        sequence = generate_sequence(SMALL, 10, seed=7)
        stream = encode(sequence, self.config(temporal=True, refresh_period=4))
        self.assertEqual(len(demux(stream).records), 5)
        decoded = decode(stream)
        self.assertEqual(len(decoded), 10)
        self.assertEqual([f.frame_index for f in decoded], list(range(10)))

    def test_refresh_stats_come_from_first_frame(self):
        sequence = generate_sequence(SMALL, 4, seed=8, drift=0.5)
        stream = demux(encode(sequence, self.config(mode='full', refresh_period=4)))
        self.assertEqual(len(stream.stats), 1)
        first = stream.stats[0].per_tensor[0]
        self.assertAlmostEqual(first.mean, tensor_moments(sequence[0][0])[0], places=4)

    def test_deterministic_and_worker_independent(self):
        sequence = generate_sequence(SMALL, 4, seed=9)
        config = self.config(mode='full', codec='requant', codec_params='bits=6')
        threaded = config.replace(workers=3)
        stream = encode(sequence, config)
        self.assertEqual(encode(sequence, config), stream)
        self.assertEqual(encode(sequence, threaded), stream)
        for a, b in zip(decode(stream), decode(stream, workers=3)):
            self.assertEqual(a, b)

    def test_rejects_mixed_shapes(self):
        sequence = generate_sequence(SMALL, 1, seed=0) + generate_sequence(ShapeSpec.parse('1x2x2'), 1, seed=0)
        with self.assertRaises(InvalidInput):
            encode(sequence, self.config())
        with self.assertRaises(InvalidInput):
            encode([], self.config())


class PipelineCommandTests(SimpleTestCase):

    def setUp(self):
        self.workdir = tempfile.TemporaryDirectory()
        self.root = Path(self.workdir.name)
        self.features = self.root / 'features.ftns'
        spec = ShapeSpec.parse('1x8x8,1x4x4,1x2x2,1x2x2')
        write_ftns(self.features, generate_sequence(spec, 64, seed=2))

    def tearDown(self):
        self.workdir.cleanup()

    def test_encode_inspect_decode(self):
        stream = self.root / 'out.fcms'
        out = StringIO()
        call_command('encode', str(self.features), '-o', str(stream), '--mode', 'full', '--refresh', '32',
                     stdout=out)
        self.assertTrue(out.getvalue().startswith('config: mode=full q=10 refresh=32 codec=0'))

        report = StringIO()
        call_command('inspect', str(stream), '--json', stdout=report)
        self.assertEqual(json.loads(report.getvalue())['accounting']['stats_bytes'], 80)

        decoded = self.root / 'decoded.ftns'
        call_command('decode', str(stream), '-o', str(decoded), stdout=StringIO())
        self.assertEqual(len(read_ftns(decoded)), 64)

    def test_config_line_reproduces_stream(self):
        first, second = self.root / 'a.fcms', self.root / 'b.fcms'
        out = StringIO()
        call_command('encode', str(self.features), '-o', str(first), '--mode', 'simplified', '--codec', 'zdeflate',
                     '--codec-param', 'level=6', '--temporal', stdout=out)
        line = out.getvalue().splitlines()[0]
        config = EncodeConfig.from_line(line)
        second.write_bytes(encode(read_ftns(self.features), config))
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_roundtrip_full_mode(self):
        out = StringIO()
        call_command('roundtrip', str(self.features), '--mode', 'full', '--codec', '0', '--json', stdout=out)
        body = out.getvalue().split('\n', 1)[1]
        report = json.loads(body)
        self.assertLessEqual(report['fidelity']['rel_mean_drift'], 1e-4)
        self.assertLessEqual(report['fidelity']['rel_std_drift'], 1e-4)

    def test_roundtrip_text_report(self):
        out = StringIO()
        call_command('roundtrip', str(self.features), '--mode', 'baseline', '--q', '8', stdout=out)
        self.assertIn('fidelity: mse=', out.getvalue())
        self.assertIn('minmax=512', out.getvalue())

    def test_config_file_and_errors(self):
        config_file = self.root / 'codec.env'
        config_file.write_text('FCM_MODE=baseline\nFCM_BIT_DEPTH=12\n')
        out = StringIO()
        call_command('encode', str(self.features), '-o', str(self.root / 'c.fcms'), '--config', str(config_file),
                     '--q', '9', stdout=out)
        self.assertIn('mode=baseline q=9', out.getvalue())

        with self.assertRaises(CommandError) as caught:
            call_command('encode', str(self.features), '-o', str(self.root / 'd.fcms'), '--q', '40',
                         stdout=StringIO())
        self.assertIn('error=InvalidConfig', str(caught.exception))
        with self.assertRaises(CommandError):
            call_command('encode', str(self.features), '-o', str(self.root / 'e.fcms'), '--mode', 'bogus',
                         stdout=StringIO())
