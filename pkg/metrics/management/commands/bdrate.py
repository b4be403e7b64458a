# File: metrics/management/commands/bdrate.py

from featurecodec.cli import CodecCommand
from featurecodec.exceptions import InvalidInput
from metrics.bjontegaard import METHODS, bd_accuracy, bd_rate
from metrics.models import SweepRun
from metrics.sweep import read_curve

RUN_PREFIX = 'run:'


class Command(CodecCommand):
    help = 'BD-rate of a test curve against an anchor curve (sweep CSVs or recorded runs)'

    def add_arguments(self, parser):
        parser.add_argument('anchor', help='Sweep CSV or run:<id>')
        parser.add_argument('test', help='Sweep CSV or run:<id>')
        parser.add_argument('--anchor-mode', help='Only use anchor rows of this mode')
        parser.add_argument('--test-mode', help='Only use test rows of this mode')
        parser.add_argument('--method', choices=METHODS, default='cubic')
        parser.add_argument('--accuracy', action='store_true', help='Also report BD-accuracy')

    def load_curve(self, source, mode):
        if source.startswith(RUN_PREFIX):
            try:
                run = SweepRun.objects.get(pk=int(source[len(RUN_PREFIX):]))
            except (ValueError, SweepRun.DoesNotExist):
                raise InvalidInput(f"no recorded sweep run '{source}'") from None
            return run.curve(mode)
        return read_curve(source, mode)

    def handle(self, *args, **options):
        anchor = self.load_curve(options['anchor'], options['anchor_mode'])
        test = self.load_curve(options['test'], options['test_mode'])

        value = bd_rate(anchor, test, method=options['method'])
        self.stdout.write(f"bd_rate={value:.4f}%")
        if options['accuracy']:
            delta = bd_accuracy(anchor, test, method=options['method'])
            self.stdout.write(f"bd_accuracy={delta:.4f}dB")
