import csv
import json
import math
import re
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from hypothesis import given, settings, strategies as st

from featurecodec.exceptions import InsufficientPoints, InvalidInput, NoOverlap
from pipeline.config import EncodeConfig
from signaling.params import SignalingMode
from tensors.ftns import write_ftns
from tensors.structures import FeatureSet, FeatureTensor, ShapeSpec
from tensors.synthetic import generate_sequence
from .bjontegaard import RateAccuracyPoint, bd_accuracy, bd_rate
from .fidelity import fidelity
from .models import SweepRun
from .sweep import SWEEP_COLUMNS, read_curve, record_run, sweep, write_csv, write_json

SMALL = ShapeSpec.parse('2x8x8,2x4x4,4x2x2')


def curve(rates, accuracies):
    return [RateAccuracyPoint(r, a) for r, a in zip(rates, accuracies)]


class FidelityTests(SimpleTestCase):

    def setUp(self):
        self.sequence = generate_sequence(SMALL, 3, seed=1)

    def test_identical_sequences(self):
        report = fidelity(self.sequence, self.sequence, cap=120.0)
        self.assertEqual(report.mse, 0.0)
        self.assertEqual(report.psnr, 120.0)
        self.assertEqual(report.proxy_accuracy, 120.0)
        self.assertEqual(report.mean_drift, 0.0)
        self.assertEqual(len(report.tensors), 3)

    def test_constant_shift(self):
        shifted = [
            FeatureSet(tuple(FeatureTensor(t.data + np.float32(0.25)) for t in frame), frame.frame_index)
            for frame in self.sequence
        ]
        report = fidelity(self.sequence, shifted)
        self.assertAlmostEqual(report.mse, 0.0625, places=5)
        self.assertAlmostEqual(report.mean_drift, 0.25, places=5)
        self.assertLess(report.std_drift, 1e-5)
        self.assertLess(report.proxy_accuracy, 150.0)
        self.assertEqual(report.as_dict()['tensors'][0]['index'], 0)

    def test_mismatch(self):
        with self.assertRaises(InvalidInput):
            fidelity(self.sequence, self.sequence[:2])
        other = generate_sequence(ShapeSpec.parse('2x8x8'), 3, seed=1)
        with self.assertRaises(InvalidInput):
            fidelity(self.sequence, other)
        with self.assertRaises(InvalidInput):
            fidelity([], [])


class BjontegaardTests(SimpleTestCase):

    def setUp(self):
        self.accuracy = [30.0, 32.0, 34.0, 36.0]
        self.anchor = curve([100.0, 200.0, 400.0, 800.0], self.accuracy)

    def test_identical_curves(self):
        for method in ('cubic', 'pchip', 'polyfit'):
            self.assertEqual(bd_rate(self.anchor, self.anchor, method=method), 0.0)
            self.assertEqual(bd_accuracy(self.anchor, self.anchor, method=method), 0.0)

    def test_halved_rates(self):
        halved = [RateAccuracyPoint(p.rate / 2, p.accuracy) for p in self.anchor]
        for method in ('cubic', 'pchip', 'polyfit'):
            self.assertAlmostEqual(bd_rate(self.anchor, halved, method=method), -50.0, places=6)

    def test_linear_log_rate_curves(self):
        # Linear log-rate curves integrate exactly with every method
        anchor = curve([100.0 * math.exp(0.35 * (a - 30.0)) for a in self.accuracy], self.accuracy)
        shifted = [a + 0.5 for a in self.accuracy]
        test = curve([90.0 * math.exp(0.34 * (a - 30.5)) for a in shifted], shifted)
        low, high = 30.5, 36.0
        middle = (low + high) / 2
        gap = (math.log(90.0) + 0.34 * (middle - 30.5)) - (math.log(100.0) + 0.35 * (middle - 30.0))
        expected = (math.exp(gap) - 1.0) * 100.0
        for method in ('cubic', 'pchip', 'polyfit'):
            self.assertAlmostEqual(bd_rate(anchor, test, method=method), expected, places=6)
        self.assertLess(expected, 0.0)

    def test_accuracy_gain(self):
        better = curve([p.rate for p in self.anchor], [a + 1.0 for a in self.accuracy])
        self.assertAlmostEqual(bd_accuracy(self.anchor, better), 1.0, places=6)
        self.assertLess(bd_rate(self.anchor, better), 0.0)

    def test_invalid_curves(self):
        with self.assertRaises(InsufficientPoints):
            bd_rate(self.anchor[:3], self.anchor)
        far = curve([100.0, 200.0, 400.0, 800.0], [50.0, 52.0, 54.0, 56.0])
        with self.assertRaises(NoOverlap):
            bd_rate(self.anchor, far)
        with self.assertRaises(InvalidInput):
            bd_rate(curve([0.0, 200.0, 400.0, 800.0], self.accuracy), self.anchor)
        with self.assertRaises(InvalidInput):
            bd_rate(curve([100.0, 100.0, 400.0, 800.0], self.accuracy), self.anchor)
        with self.assertRaises(InvalidInput):
            bd_rate(self.anchor, self.anchor, method='akima')

    def test_curved_fixture_against_trapezoid_integration(self):
        anchor = curve([100.0, 180.0, 350.0, 700.0], [30.0, 33.5, 35.8, 37.0])
        test = curve([90.0, 170.0, 320.0, 650.0], [30.4, 33.9, 36.0, 37.3])
        low, high = 30.4, 37.0
        grid = np.linspace(low, high, 20001)

        def mean_log_rate(points):
            accuracy = np.array([p.accuracy for p in points])
            log_rate = np.log([p.rate for p in points])
            return np.trapz(np.interp(grid, accuracy, log_rate), grid) / (high - low)

        expected = (math.exp(mean_log_rate(test) - mean_log_rate(anchor)) - 1.0) * 100.0
        self.assertAlmostEqual(bd_rate(anchor, test), expected, delta=0.5)
        self.assertAlmostEqual(bd_rate(anchor, test, method='pchip'), expected, delta=0.5)
        self.assertLess(bd_rate(anchor, test), 0.0)

    def test_swapping_curves_inverts_the_rate_ratio(self):
        anchor = curve([100.0, 180.0, 350.0, 700.0], [30.0, 33.5, 35.8, 37.0])
        test = curve([90.0, 170.0, 320.0, 650.0], [30.4, 33.9, 36.0, 37.3])
        for method in ('cubic', 'pchip', 'polyfit'):
            forward = bd_rate(anchor, test, method=method)
            backward = bd_rate(test, anchor, method=method)
            self.assertLess(forward, 0.0)
            self.assertGreater(backward, 0.0)
            self.assertAlmostEqual((1 + forward / 100) * (1 + backward / 100), 1.0, places=9)
            self.assertAlmostEqual(
                bd_accuracy(anchor, test, method=method), -bd_accuracy(test, anchor, method=method), places=9
            )

    @settings(max_examples=30, deadline=None)
    @given(st.floats(min_value=0.125, max_value=8.0))
    def test_uniform_rate_scaling(self, factor):
        scaled = [RateAccuracyPoint(p.rate * factor, p.accuracy) for p in self.anchor]
        self.assertAlmostEqual(bd_rate(self.anchor, scaled), (factor - 1.0) * 100.0, places=6)


class SweepTests(SimpleTestCase):

    def setUp(self):
        self.sequence = generate_sequence(SMALL, 4, seed=2, drift=0.05)
        self.base = EncodeConfig.resolve(mode='full', bit_depth=10, refresh_period=2, codec='requant')

    def test_rows_follow_config_order(self):
        configs = [self.base.replace(codec_params=f'bits={bits}') for bits in (2, 4, 6, 8)]
        rows = sweep(self.sequence, configs, n_jobs=2)
        self.assertEqual([row['index'] for row in rows], [0, 1, 2, 3])
        self.assertEqual([row['codec_params'] for row in rows], ['bits=2', 'bits=4', 'bits=6', 'bits=8'])
        payloads = [row['payload_bytes'] for row in rows]
        self.assertEqual(payloads, sorted(set(payloads)))
        accuracies = [row['proxy_accuracy'] for row in rows]
        self.assertEqual(accuracies, sorted(accuracies))
        for row in rows:
            self.assertEqual(EncodeConfig.from_line(row['config']).codec_params, {'bits': int(row['codec_params'][5:])})

    def test_identical_configs_give_identical_rows(self):
        first, second = sweep(self.sequence, [self.base, self.base])
        first.pop('index')
        second.pop('index')
        self.assertEqual(first, second)

    def test_full_mode_drifts_less_than_baseline(self):
        configs = [self.base.replace(mode=mode, codec_params='bits=6', refresh_period=1) for mode in ('baseline', 'full')]
        baseline, full = sweep(self.sequence, configs)
        self.assertLess(full['rel_mean_drift'], baseline['rel_mean_drift'])
        self.assertLessEqual(full['rel_std_drift'], 1e-4)
        self.assertEqual(full['minmax_bytes'], 0)
        self.assertEqual(baseline['stats_bytes'], 0)

    def test_reports(self):
        rows = sweep(self.sequence, [self.base.replace(mode='baseline'), self.base])
        with tempfile.TemporaryDirectory() as workdir:
            csv_path, json_path = Path(workdir) / 'sweep.csv', Path(workdir) / 'sweep.json'
            write_csv(rows, csv_path)
            write_json(rows, json_path)
            with open(csv_path, newline='') as handle:
                header = next(csv.reader(handle))
            self.assertEqual(tuple(header), SWEEP_COLUMNS)
            mirror = json.loads(json_path.read_text())
            self.assertEqual(tuple(mirror['columns']), SWEEP_COLUMNS)
            self.assertEqual(mirror['rows'][1]['total_bytes'], rows[1]['total_bytes'])
            points = read_curve(csv_path, mode='full')
            self.assertEqual(len(points), 1)
            self.assertEqual(points[0].rate, rows[1]['kbps'])

    def test_empty_matrix(self):
        with self.assertRaises(InvalidInput):
            sweep(self.sequence, [])


class SweepRunTests(TestCase):

    def setUp(self):
        self.workdir = tempfile.TemporaryDirectory()
        self.root = Path(self.workdir.name)
        self.features = self.root / 'features.ftns'
        write_ftns(self.features, generate_sequence(SMALL, 4, seed=3))

    def tearDown(self):
        self.workdir.cleanup()

    def run_sweep(self, *extra):
        out = StringIO()
        call_command(
            'sweep', str(self.features), '-o', str(self.root / 'sweep.csv'),
            '--mode', 'full', '--codec', 'requant', '--q', '10',
            '--param-sets', 'bits=2', 'bits=4', 'bits=6', 'bits=8', *extra,
            stdout=out,
        )
        return out.getvalue()

    def test_record_and_compare(self):
        output = self.run_sweep('--record', 'requant-ladder', '--json', str(self.root / 'sweep.json'))
        self.assertEqual(output.count('config: mode=full q=10'), 4)
        run_id = int(re.search(r'Recorded sweep run (\d+)', output).group(1))
        run = SweepRun.objects.get(pk=run_id)
        self.assertEqual(run.results.count(), 4)
        self.assertEqual(run.frame_count, 4)
        self.assertEqual(len(run.curve('full')), 4)
        self.assertEqual(run.curve(SignalingMode.BASELINE), [])

        out = StringIO()
        call_command('bdrate', f'run:{run_id}', str(self.root / 'sweep.csv'), '--accuracy', stdout=out)
        self.assertIn('bd_rate=0.0000%', out.getvalue())
        self.assertIn('bd_accuracy=0.0000dB', out.getvalue())

    def test_record_run_directly(self):
        sequence = generate_sequence(SMALL, 2, seed=4)
        rows = sweep(sequence, [EncodeConfig.resolve(mode='simplified')])
        run = record_run(rows, 'single', frame_count=2, shapes=SMALL)
        result = run.results.get()
        self.assertEqual(result.mode, SignalingMode.SIMPLIFIED)
        self.assertEqual(result.total_bytes, rows[0]['total_bytes'])
        self.assertEqual(run.shapes, str(SMALL))

    def test_sweep_needs_a_positive_job_count(self):
        with self.assertRaises(CommandError) as caught:
            self.run_sweep('--jobs', '0')
        self.assertIn('--jobs', str(caught.exception))
        self.assertFalse((self.root / 'sweep.csv').exists())

    def test_bdrate_errors(self):
        self.run_sweep()
        with self.assertRaises(CommandError) as caught:
            call_command('bdrate', 'run:999', str(self.root / 'sweep.csv'), stdout=StringIO())
        self.assertIn('error=InvalidInput', str(caught.exception))
        with self.assertRaises(CommandError) as caught:
            call_command('bdrate', str(self.root / 'sweep.csv'), str(self.root / 'sweep.csv'),
                         '--test-mode', 'baseline', stdout=StringIO())
        self.assertIn('error=InsufficientPoints', str(caught.exception))
        with self.assertRaises(CommandError) as caught:
            call_command('bdrate', str(self.root / 'missing.csv'), str(self.root / 'sweep.csv'), stdout=StringIO())
        self.assertEqual(caught.exception.returncode, 3)


class VerifyCommandTests(SimpleTestCase):

    def test_all_checks_pass(self):
        out = StringIO()
        call_command('verify', '--seeds', '1', '--frames', '2', '--presets', 'fpn', '--height', '32', '--width', '64',
                     stdout=out)
        self.assertEqual(out.getvalue().count('PASS'), 8)
        self.assertNotIn('FAIL', out.getvalue())

    def test_restoration_covers_darknet(self):
        out = StringIO()
        call_command('verify', '--seeds', '1', '--frames', '1', '--presets', 'fpn,darknet',
                     '--height', '32', '--width', '64', stdout=out)
        self.assertIn('PASS moment restoration (full)', out.getvalue())
        self.assertIn('PASS pooled restoration (simplified)', out.getvalue())

    def test_unknown_preset(self):
        with self.assertRaises(CommandError) as caught:
            call_command('verify', '--presets', 'resnet', stdout=StringIO())
        self.assertIn('error=InvalidInput', str(caught.exception))
