# File: pipeline/management/commands/roundtrip.py

import json
from pathlib import Path

from bitstream.accounting import accounting
from bitstream.container import demux
from featurecodec.cli import CodecCommand, add_encode_arguments, config_from_options
from metrics.fidelity import fidelity
from pipeline.engine import decode, encode
from tensors.ftns import read_ftns


class Command(CodecCommand):
    help = 'Encode, decode and score a feature sequence in one step'

    def add_arguments(self, parser):
        parser.add_argument('input', help='FTNS file')
        parser.add_argument('--stream', help='Also keep the FCMS stream at this path')
        parser.add_argument('--json', action='store_true', help='Print the report as JSON')
        add_encode_arguments(parser)

    def handle(self, *args, **options):
        config = config_from_options(options)
        self.echo_config(config)

        sequence = read_ftns(options['input'])
        stream = encode(sequence, config)
        if options['stream']:
            Path(options['stream']).write_bytes(stream)
        bitstream = demux(stream)
        rate = accounting(stream, bitstream)
        scores = fidelity(sequence, decode(bitstream, workers=config.workers))

        if options['json']:
            self.stdout.write(json.dumps({'rate': rate.as_dict(), 'fidelity': scores.as_dict()}, indent=2))
            return

        self.stdout.write(
            f"rate: total_bytes={rate.total_bytes} kbps={rate.kbps:.3f} "
            + ' '.join(f'{name}={size}' for name, size in rate.split().items())
        )
        for tensor in scores.tensors:
            self.stdout.write(
                f"tensor {tensor.index}: mse={tensor.mse:.6g} psnr={tensor.psnr:.2f} "
                f"mean_drift={tensor.mean_drift:.3e} std_drift={tensor.std_drift:.3e} "
                f"rel_mean_drift={tensor.rel_mean_drift:.3e} rel_std_drift={tensor.rel_std_drift:.3e}"
            )
        self.stdout.write(self.style.SUCCESS(
            f"fidelity: mse={scores.mse:.6g} psnr={scores.psnr:.2f} "
            f"rel_mean_drift={scores.rel_mean_drift:.3e} rel_std_drift={scores.rel_std_drift:.3e} "
            f"proxy_accuracy={scores.proxy_accuracy:.2f}"
        ))
