# File: bitstream/management/commands/inspect.py

import json
from pathlib import Path

from bitstream.accounting import accounting
from bitstream.container import demux
from featurecodec.cli import CodecCommand
from signaling.params import SignalingMode


def _segment_values(params):
    if params.mode == SignalingMode.FULL:
        values = {f'tensor_{n}': list(s.as_tuple()) for n, s in enumerate(params.per_tensor)}
        values['fused'] = list(params.fused.as_tuple())
        return values
    return {'pooled': list(params.pooled.as_tuple())}


class Command(CodecCommand):
    help = 'Dump the header, statistics segments and byte accounting of an FCMS stream'

    def add_arguments(self, parser):
        parser.add_argument('input', help='FCMS file')
        parser.add_argument('--json', action='store_true')

    def handle(self, *args, **options):
        stream = Path(options['input']).read_bytes()
        bitstream = demux(stream)
        report = accounting(stream, bitstream)
        header = bitstream.header
        segments = [
            {'first_coded_frame': i * header.refresh_period, **_segment_values(params)}
            for i, params in enumerate(bitstream.stats)
        ]

        if options['json']:
            self.stdout.write(json.dumps({
                'header': header.as_dict(),
                'stats': segments,
                'accounting': report.as_dict(),
            }, indent=2))
            return

        self.stdout.write(self.style.SUCCESS(f"FCMS stream {options['input']} ({len(stream)} bytes)"))
        for key, value in header.as_dict().items():
            self.stdout.write(f"  {key}: {value}")
        for segment in segments:
            pairs = ' '.join(
                f"{name}=({pair[0]:.6g}, {pair[1]:.6g})"
                for name, pair in segment.items() if name != 'first_coded_frame'
            )
            self.stdout.write(f"  stats @ frame {segment['first_coded_frame']}: {pairs}")
        for name, size in report.split().items():
            self.stdout.write(f"  {name}_bytes: {size}")
        self.stdout.write(f"  total_bytes: {report.total_bytes}")
        self.stdout.write(f"  kbps: {report.kbps:.3f}")
