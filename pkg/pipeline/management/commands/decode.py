# File: pipeline/management/commands/decode.py

from pathlib import Path

from featurecodec.cli import CodecCommand
from pipeline.engine import decode
from tensors.ftns import write_ftns


class Command(CodecCommand):
    help = 'Decode an FCMS stream back into an FTNS feature sequence'

    def add_arguments(self, parser):
        parser.add_argument('input', help='FCMS file')
        parser.add_argument('-o', '--output', required=True, help='FTNS file to write')
        parser.add_argument('--workers', type=int, default=1)

    def handle(self, *args, **options):
        stream = Path(options['input']).read_bytes()
        frames = decode(stream, workers=options['workers'])
        write_ftns(options['output'], frames)
        self.stdout.write(self.style.SUCCESS(f"Decoded {len(frames)} frames -> {options['output']}"))
