import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from featurecodec.exceptions import CorruptStream, MuxError, NotAStream, TruncatedStream
from packing.frames import MinMax
from signaling.params import SignalingMode, StatsParams
from tensors.structures import ShapeSpec, TensorStats
from .accounting import BitrateReport, accounting
from .container import Bitstream, FrameRecord, StreamHeader, demux, header_size, mux

FIXTURES = Path(__file__).resolve().parent / 'fixtures'


def load_hex(name):
    lines = (line.split('#', 1)[0] for line in (FIXTURES / name).read_text().splitlines())
    return bytes.fromhex(''.join(''.join(lines).split()))


def make_header(mode=SignalingMode.FULL, frames=4, refresh=2, shapes='2x4x4,2x2x2', temporal=False, fps=(30, 1)):
    spec = ShapeSpec.parse(shapes)
    fused = (sum(c * (h // 2) * (w // 2) for c, h, w in spec), 2, 2)
    if spec.n_tensors == 1:
        fusion, fused = 0, spec.shapes[0]
    else:
        fusion = 1
    return StreamHeader(mode, 10, refresh, fusion, 0, temporal, frames, spec, fused, *fps)


def make_stats(header, seed=0):
    segments = []
    for k in range(-(-header.coded_frame_count // header.refresh_period)):
        if header.mode == SignalingMode.FULL:
            pairs = tuple(TensorStats(seed + k + n, 1.0 + n) for n in range(header.n_tensors))
            segments.append(StatsParams(
                header.mode, pairs, fused=TensorStats(k, 2.0), refresh_period=header.refresh_period
            ))
        elif header.mode == SignalingMode.SIMPLIFIED:
            segments.append(StatsParams(
                header.mode, pooled=TensorStats(k + 0.5, 1.5), refresh_period=header.refresh_period
            ))
    return segments


def make_records(header, payload=b'\x01\x02\x03'):
    minmax = MinMax(-1.0, 2.0) if header.mode == SignalingMode.BASELINE else None
    return [FrameRecord(payload * (i + 1), minmax) for i in range(header.coded_frame_count)]


class GoldenStreamTests(SimpleTestCase):

    def golden_parts(self):
        header = StreamHeader(SignalingMode.SIMPLIFIED, 8, 1, 0, 0, False, 1, ShapeSpec(((1, 1, 2),)), (1, 1, 2))
        stats = [StatsParams(SignalingMode.SIMPLIFIED, pooled=TensorStats(0.5, 0.5))]
        return header, stats, [FrameRecord(b'\x00\xff')]

    def test_mux_matches_fixture(self):
        self.assertEqual(mux(*self.golden_parts()), load_hex('golden_simplified.hex'))

    def test_demux_fixture(self):
        stream = demux(load_hex('golden_simplified.hex'))
        header, stats, records = self.golden_parts()
        self.assertEqual(stream, Bitstream(header, tuple(stats), tuple(records)))
        self.assertEqual(header.size, 45)

    def test_fixture_accounting(self):
        data = load_hex('golden_simplified.hex')
        report = accounting(data)
        self.assertEqual(report.split(), {'header': 45, 'stats': 4, 'minmax': 0, 'framing': 4, 'payload': 2})
        self.assertEqual(report.total_bytes, len(data))


class MuxTests(SimpleTestCase):

    def test_round_trip_all_modes(self):
        for mode in SignalingMode:
            header = make_header(mode, frames=5, refresh=2)
            stats, records = make_stats(header), make_records(header)
            parsed = demux(mux(header, stats, records))
            self.assertEqual(parsed.header, header)
            self.assertEqual(list(parsed.stats), stats)
            self.assertEqual(list(parsed.records), records)

    @settings(max_examples=30, deadline=None)
    @given(
        mode=st.sampled_from(list(SignalingMode)),
        frames=st.integers(1, 12),
        refresh=st.integers(1, 5),
        temporal=st.booleans(),
        payloads=st.lists(st.binary(max_size=20), min_size=12, max_size=12),
    )
    def test_demux_inverts_mux(self, mode, frames, refresh, temporal, payloads):
        header = make_header(mode, frames=frames, refresh=refresh, temporal=temporal)
        minmax = MinMax(0.0, 1.0) if mode == SignalingMode.BASELINE else None
        records = [FrameRecord(payloads[i], minmax) for i in range(header.coded_frame_count)]
        stream = mux(header, make_stats(header), records)
        parsed = demux(stream)
        self.assertEqual(mux(parsed.header, parsed.stats, parsed.records), stream)

    def test_layout_size(self):
        header = make_header(SignalingMode.SIMPLIFIED, frames=1, refresh=1, shapes='1x1x2')
        stream = mux(header, make_stats(header), [FrameRecord(b'\x00\xff')])
        self.assertEqual(len(stream), header_size(1) + 4 + 4 + 2)

    def test_baseline_minmax_per_frame(self):
        for frames in (1, 7, 20):
            header = make_header(SignalingMode.BASELINE, frames=frames)
            report = accounting(mux(header, [], make_records(header)))
            self.assertEqual(report.minmax_bytes, 8 * frames)
            self.assertEqual(report.stats_bytes, 0)

    def test_count_errors(self):
        header = make_header(SignalingMode.FULL, frames=4, refresh=2)
        stats, records = make_stats(header), make_records(header)
        with self.assertRaises(MuxError):
            mux(header, stats, records[:-1])
        with self.assertRaises(MuxError):
            mux(header, stats[:1], records)
        with self.assertRaises(MuxError):
            mux(header, stats, [FrameRecord(b'', MinMax(0, 1))] * 4)
        with self.assertRaises(MuxError):
            mux(make_header(SignalingMode.BASELINE, frames=2), [], [FrameRecord(b'')] * 2)

    def test_invalid_header(self):
        with self.assertRaises(MuxError):
            make_header(refresh=0)
        with self.assertRaises(MuxError):
            StreamHeader(SignalingMode.FULL, 10, 1, 1, 0, False, 1, ShapeSpec.parse('2x4x4,2x2x2'), (9, 2, 2))


class DemuxErrorTests(SimpleTestCase):

    def stream(self, mode=SignalingMode.FULL):
        header = make_header(mode, frames=3, refresh=2)
        return mux(header, make_stats(header), make_records(header))

    def test_every_truncation_is_typed(self):
        for mode in SignalingMode:
            data = self.stream(mode)
            for cut in range(len(data)):
                with self.assertRaises(TruncatedStream):
                    demux(data[:cut])

    def test_bad_magic(self):
        with self.assertRaises(NotAStream):
            demux(b'RIFF' + self.stream()[4:])

    def test_bad_version(self):
        data = bytearray(self.stream())
        data[4] = 2
        with self.assertRaises(CorruptStream):
            demux(bytes(data))

    def test_trailing_bytes(self):
        with self.assertRaises(CorruptStream):
            demux(self.stream() + b'\x00')

    def test_length_overrun(self):
        data = bytearray(self.stream(SignalingMode.SIMPLIFIED))
        offset = header_size(2) + 4
        data[offset:offset + 4] = (10 ** 6).to_bytes(4, 'little')
        with self.assertRaises(TruncatedStream):
            demux(bytes(data))

    def test_inconsistent_fused_shape(self):
        data = bytearray(self.stream())
        fused_offset = header_size(2) - 16
        data[fused_offset:fused_offset + 4] = (99).to_bytes(4, 'little')
        with self.assertRaises(CorruptStream):
            demux(bytes(data))


class AccountingTests(SimpleTestCase):

    def test_full_mode_stats_bytes(self):
        header = make_header(SignalingMode.FULL, frames=64, refresh=32, shapes='1x8x8,1x4x4,1x2x2,1x2x2')
        stream = mux(header, make_stats(header), make_records(header, b''))
        report = accounting(stream)
        self.assertEqual(report.stats_bytes, 80)
        self.assertEqual(report.payload_bytes, 0)
        self.assertEqual(sum(report.split().values()), len(stream))

    def test_kbps(self):
        report = BitrateReport(4500, 0, 0, 0, 0, frame_count=30, coded_frames=30, fps=30.0)
        self.assertEqual(report.total_bits, 36000)
        self.assertAlmostEqual(report.kbps, 36.0)

    def test_temporal_frame_count(self):
        header = make_header(SignalingMode.SIMPLIFIED, frames=10, refresh=4, temporal=True)
        report = accounting(mux(header, make_stats(header), make_records(header)))
        self.assertEqual((report.frame_count, report.coded_frames), (10, 5))
        self.assertEqual(report.stats_bytes, 8)


class InspectCommandTests(SimpleTestCase):

    def test_inspect_json(self):
        header = make_header(SignalingMode.FULL, frames=64, refresh=32, shapes='1x8x8,1x4x4,1x2x2,1x2x2')
        with tempfile.TemporaryDirectory() as workdir:
            path = Path(workdir) / 'stream.fcms'
            path.write_bytes(mux(header, make_stats(header), make_records(header)))
            out = StringIO()
            call_command('inspect', str(path), '--json', stdout=out)
        report = json.loads(out.getvalue())
        self.assertEqual(report['accounting']['stats_bytes'], 80)
        self.assertEqual(report['header']['mode'], 'full')
        self.assertEqual(len(report['stats']), 2)

    def test_inspect_text(self):
        with tempfile.TemporaryDirectory() as workdir:
            path = Path(workdir) / 'golden.fcms'
            path.write_bytes(load_hex('golden_simplified.hex'))
            out = StringIO()
            call_command('inspect', str(path), stdout=out)
        self.assertIn('pooled=(0.5, 0.5)', out.getvalue())
        self.assertIn('total_bytes: 55', out.getvalue())

    def test_not_a_stream(self):
        with tempfile.TemporaryDirectory() as workdir:
            path = Path(workdir) / 'junk.bin'
            path.write_bytes(b'junkjunkjunk')
            with self.assertRaises(CommandError) as caught:
                call_command('inspect', str(path), stdout=StringIO())
        self.assertIn('error=NotAStream', str(caught.exception))
        self.assertEqual(caught.exception.returncode, 1)

    def test_missing_file(self):
        with self.assertRaises(CommandError) as caught:
            call_command('inspect', '/nonexistent/stream.fcms', stdout=StringIO())
        self.assertEqual(caught.exception.returncode, 3)
        self.assertIn('/nonexistent/stream.fcms', str(caught.exception))
