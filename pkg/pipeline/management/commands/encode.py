# File: pipeline/management/commands/encode.py

from pathlib import Path

from featurecodec.cli import CodecCommand, add_encode_arguments, config_from_options
from pipeline.engine import encode
from tensors.ftns import read_ftns


class Command(CodecCommand):
    help = 'Encode an FTNS feature sequence into an FCMS stream'

    def add_arguments(self, parser):
        parser.add_argument('input', help='FTNS file')
        parser.add_argument('-o', '--output', required=True, help='FCMS file to write')
        add_encode_arguments(parser)

    def handle(self, *args, **options):
        config = config_from_options(options)
        self.echo_config(config)

        sequence = read_ftns(options['input'])
        stream = encode(sequence, config)
        Path(options['output']).write_bytes(stream)
        self.stdout.write(self.style.SUCCESS(
            f"Encoded {len(sequence)} frames into {len(stream)} bytes -> {options['output']}"
        ))
