# File: metrics/management/commands/sweep.py

from itertools import product

from featurecodec.cli import CodecCommand, add_encode_arguments, encode_overrides, positive_int
from metrics.sweep import record_run, sweep, write_csv, write_json
from pipeline.config import EncodeConfig
from tensors.ftns import read_ftns


def _split(text, cast=str):
    return [cast(item.strip()) for item in text.split(',') if item.strip()] if text else [None]


class Command(CodecCommand):
    help = 'Run a matrix of encoder configurations and write a rate-accuracy CSV'

    def add_arguments(self, parser):
        parser.add_argument('input', help='FTNS file')
        parser.add_argument('-o', '--output', required=True, help='CSV file to write')
        parser.add_argument('--json', dest='json_path', help='Also write a JSON mirror here')
        parser.add_argument('--modes', help='Comma-separated modes, e.g. baseline,full')
        parser.add_argument('--qs', help='Comma-separated bit depths, e.g. 8,10,12')
        parser.add_argument(
            '--param-sets',
            nargs='+',
            help='Codec parameter variants, one per point, e.g. bits=4 bits=6 bits=8',
        )
        parser.add_argument('--configs', nargs='+', help='Config files; each adds one configuration')
        parser.add_argument('--jobs', type=positive_int, default=1, help='Configurations evaluated in parallel')
        parser.add_argument('--record', metavar='NAME', help='Store the run in the database under NAME')
        add_encode_arguments(parser)

    def build_configs(self, options):
        if options['configs']:
            overrides = encode_overrides(options)
            return [EncodeConfig.resolve(path, **overrides) for path in options['configs']]

        base = EncodeConfig.resolve(options['config'], **encode_overrides(options))
        configs = []
        for mode, bit_depth, params in product(
            _split(options['modes']),
            _split(options['qs'], int),
            options['param_sets'] or [None],
        ):
            changes = {}
            if mode is not None:
                changes['mode'] = mode
            if bit_depth is not None:
                changes['bit_depth'] = bit_depth
            if params is not None:
                changes['codec_params'] = params
            configs.append(base.replace(**changes) if changes else base)
        return configs

    def handle(self, *args, **options):
        configs = self.build_configs(options)
        for config in configs:
            self.echo_config(config)

        sequence = read_ftns(options['input'])
        rows = sweep(sequence, configs, n_jobs=options['jobs'])
        write_csv(rows, options['output'])
        if options['json_path']:
            write_json(rows, options['json_path'])
        if options['record']:
            run = record_run(
                rows,
                options['record'],
                source=options['input'],
                frame_count=len(sequence),
                shapes=sequence[0].shape_spec,
            )
            self.stdout.write(f"Recorded sweep run {run.pk}")

        for row in rows:
            self.stdout.write(
                f"{row['index']}: {row['mode']} q={row['q']} codec={row['codec']} "
                f"params={row['codec_params'] or '-'} -> {row['total_bytes']} bytes, "
                f"{row['kbps']:.3f} kbps, {row['proxy_accuracy']:.2f} dB"
            )
        self.stdout.write(self.style.SUCCESS(f"Wrote {len(rows)} rows -> {options['output']}"))
