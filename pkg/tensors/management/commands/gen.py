# File: tensors/management/commands/gen.py

from featurecodec.cli import CodecCommand
from tensors.ftns import write_ftns
from tensors.structures import ShapeSpec
from tensors.synthetic import generate_sequence


class Command(CodecCommand):
    help = 'Synthesize a seeded FTNS feature sequence'

    def add_arguments(self, parser):
        parser.add_argument('-o', '--output', required=True, help='FTNS file to write')
        parser.add_argument('--preset', choices=ShapeSpec.PRESETS, default='fpn')
        parser.add_argument('--shapes', help='Custom shapes CxHxW,CxHxW,... (overrides --preset)')
        parser.add_argument('--height', type=int, default=256, help='FPN input height H_r (default: 256)')
        parser.add_argument('--width', type=int, default=384, help='FPN input width W_r (default: 384)')
        parser.add_argument('--frames', type=int, default=8)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--drift', type=float, default=0.0, help='Per-frame drift of target mean/std')
        parser.add_argument('--correlation', type=float, default=0.0, help='Temporal noise correlation in [0, 1)')

    def handle(self, *args, **options):
        if options['shapes']:
            spec = ShapeSpec.parse(options['shapes'])
        elif options['preset'] == 'fpn':
            spec = ShapeSpec.fpn(height=options['height'], width=options['width'])
        else:
            spec = ShapeSpec.preset(options['preset'])

        sequence = generate_sequence(
            spec,
            options['frames'],
            options['seed'],
            drift=options['drift'],
            correlation=options['correlation'],
        )
        write_ftns(options['output'], sequence)
        self.stdout.write(
            f"gen: shapes={spec} frames={options['frames']} seed={options['seed']} "
            f"drift={options['drift']} correlation={options['correlation']}"
        )
        self.stdout.write(self.style.SUCCESS(f"Wrote {options['output']}"))
