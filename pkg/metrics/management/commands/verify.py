# File: metrics/management/commands/verify.py
# PURPOSE: Check the codec's statistics and accounting guarantees on seeded data

import math
from itertools import product

import numpy as np
from django.core.management.base import CommandError

from bitstream.container import demux, mux
from featurecodec.cli import CodecCommand
from featurecodec.exceptions import CodecError, InvalidInput, TruncatedStream
from metrics.bjontegaard import RateAccuracyPoint, bd_rate
from metrics.fidelity import fidelity
from packing.frames import PackedFrame
from packing.quantization import dequantize_baseline, quantize
from pipeline.config import EncodeConfig
from pipeline.engine import decode, encode
from signaling.params import SignalingMode, overhead_bytes
from temporal.resampling import downsample, upsample
from tensors.stats import pooled_moments, tensor_moments
from tensors.structures import FeatureSet, FeatureTensor, ShapeSpec
from tensors.synthetic import generate_sequence


class Command(CodecCommand):
    help = 'Verify moment restoration, overhead accounting and BD-rate on seeded data'

    def add_arguments(self, parser):
        parser.add_argument('--seeds', type=int, default=5, help='Random sequences per check')
        parser.add_argument('--frames', type=int, default=4)
        parser.add_argument(
            '--presets',
            default='fpn,darknet',
            help='Comma-separated shape presets for the restoration checks (fpn, darknet, darknet-alt)',
        )
        parser.add_argument('--height', type=int, default=64, help='FPN input height used for the checks')
        parser.add_argument('--width', type=int, default=96, help='FPN input width used for the checks')

    def handle(self, *args, **options):
        self.seeds = range(options['seeds'])
        self.frames = options['frames']
        self.specs = []
        for name in (item.strip() for item in options['presets'].split(',')):
            if not name:
                continue
            if name == 'fpn':
                spec = ShapeSpec.fpn(height=options['height'], width=options['width'])
            else:
                spec = ShapeSpec.preset(name)
            self.specs.append((name, spec))
        if not self.specs:
            raise InvalidInput("verify needs at least one shape preset")
        self.spec = self.specs[0][1]

        checks = [
            ('moment restoration (full)', self.check_full_restoration),
            ('pooled restoration (simplified)', self.check_simplified_restoration),
            ('overhead crossover', self.check_overhead_crossover),
            ('robustness under requant', self.check_requant_robustness),
            ('quantization bound', self.check_quantization_bound),
            ('stream round trip', self.check_stream_round_trip),
            ('temporal affine exactness', self.check_temporal),
            ('bd-rate identities', self.check_bd_rate),
        ]
        failures = 0
        for name, check in checks:
            detail = check()
            if detail:
                failures += 1
                self.stdout.write(self.style.ERROR(f'FAIL {name}: {detail}'))
            else:
                self.stdout.write(self.style.SUCCESS(f'PASS {name}'))

        if failures:
            raise CommandError(f'error=VerificationFailed {failures} check(s) failed', returncode=1)

    def sequence(self, seed, drift=0.0, spec=None):
        return generate_sequence(spec or self.spec, self.frames, seed, drift=drift)

    def check_full_restoration(self):
        config = EncodeConfig.resolve(mode='full', codec=0, refresh_period=1)
        for (name, spec), seed in product(self.specs, self.seeds):
            original = self.sequence(seed, spec=spec)
            for before, after in zip(original, decode(encode(original, config))):
                for x, y in zip(before, after):
                    (mu, sigma), (mu_r, sigma_r) = tensor_moments(x), tensor_moments(y)
                    if abs(mu - mu_r) > 1e-4 * max(abs(mu), sigma) or abs(sigma - sigma_r) > 1e-4 * sigma:
                        return f'{name} seed {seed}: ({mu}, {sigma}) came back as ({mu_r}, {sigma_r})'
        return None

    def check_simplified_restoration(self):
        config = EncodeConfig.resolve(mode='simplified', codec=0, refresh_period=1)
        for (name, spec), seed in product(self.specs, self.seeds):
            original = self.sequence(seed, spec=spec)
            for before, after in zip(original, decode(encode(original, config))):
                mu, sigma = pooled_moments(tensor_moments(t) for t in before)
                mu_r, sigma_r = pooled_moments(tensor_moments(t) for t in after)
                if abs(mu - mu_r) > 2 ** -8 * abs(mu) or abs(sigma - sigma_r) > 2 ** -8 * sigma:
                    return f'{name} seed {seed}: pooled ({mu}, {sigma}) came back as ({mu_r}, {sigma_r})'
        return None

    def check_overhead_crossover(self):
        for n_tensors in (1, 3, 4):
            for refresh in (1, 2, 4, 8, 32):
                for frames in range(1, 65):
                    full = overhead_bytes(SignalingMode.FULL, n_tensors, refresh, frames)
                    baseline = overhead_bytes(SignalingMode.BASELINE, n_tensors, refresh, frames)
                    if full != 8 * (n_tensors + 1) * math.ceil(frames / refresh) or baseline != 8 * frames:
                        return f"N={n_tensors} L={refresh} F={frames}: unexpected sizes {full}, {baseline}"
                    if frames % refresh == 0 and (full < baseline) != (refresh > n_tensors + 1):
                        return f"N={n_tensors} L={refresh} F={frames}: crossover at the wrong period"
        return None

    def check_requant_robustness(self):
        for bits in (6, 8):
            for seed in self.seeds:
                original = self.sequence(seed, drift=0.05)
                drifts = {}
                for mode in ('full', 'baseline'):
                    config = EncodeConfig.resolve(
                        mode=mode, bit_depth=10, codec='requant', codec_params=f'bits={bits}', refresh_period=1
                    )
                    drifts[mode] = fidelity(original, decode(encode(original, config)))
                full, baseline = drifts['full'], drifts['baseline']
                if max(full.rel_mean_drift, full.rel_std_drift) > 1e-4:
                    return f'bits={bits} seed {seed}: full-mode drift {full.rel_mean_drift:.2e}'
                if baseline.mean_drift + baseline.std_drift <= full.mean_drift + full.std_drift:
                    return f'bits={bits} seed {seed}: baseline drift is not larger than full-mode drift'
        return None

    def check_quantization_bound(self):
        rng = np.random.default_rng(0)
        for bit_depth in (8, 10, 12):
            data = rng.uniform(-5.0, 5.0, size=(1000, 1000)).astype(np.float32)
            quant, minmax = quantize(PackedFrame(data), bit_depth)
            recon = dequantize_baseline(quant, minmax).data
            bound = minmax.span / (2 * ((1 << bit_depth) - 1)) + 2 * np.spacing(np.float32(5.0))
            error = float(np.abs(recon.astype(np.float64) - data).max())
            if error > bound:
                return f'q={bit_depth}: error {error} exceeds {bound}'
        return None

    def check_stream_round_trip(self):
        config = EncodeConfig.resolve(mode='baseline', codec='zdeflate', refresh_period=2)
        stream = encode(self.sequence(0), config)
        parsed = demux(stream)
        if mux(parsed.header, parsed.stats, parsed.records) != stream:
            return 'demux followed by mux changed the stream'
        for cut in range(0, len(stream), max(1, len(stream) // 257)):
            try:
                demux(stream[:cut])
            except CodecError as exc:
                if not isinstance(exc, TruncatedStream):
                    return f'cut at {cut} raised {type(exc).__name__}'
            else:
                return f'cut at {cut} parsed successfully'
        return None

    def check_temporal(self):
        base = np.linspace(-1.0, 1.0, 12, dtype=np.float32).reshape(3, 2, 2)
        sequence = [FeatureSet((FeatureTensor(base + 0.5 * t),), t) for t in range(7)]
        kept, _ = downsample(sequence, True)
        restored = upsample(kept, len(sequence))
        for t, (a, b) in enumerate(zip(sequence, restored)):
            if not np.allclose(a[0].data, b[0].data, rtol=0, atol=1e-6):
                return f'frame {t} is not reconstructed exactly'
        return None

    def check_bd_rate(self):
        accuracy = [30.0, 32.0, 34.0, 36.0]
        anchor = [RateAccuracyPoint(100.0 * 2 ** i, a) for i, a in enumerate(accuracy)]
        halved = [RateAccuracyPoint(p.rate / 2, p.accuracy) for p in anchor]
        if bd_rate(anchor, anchor) != 0.0:
            return 'identical curves do not give 0%'
        if not math.isclose(bd_rate(anchor, halved), -50.0, abs_tol=0.1):
            return 'halved rates do not give -50%'
        return None
