# File: featurecodec/cli.py

"""Shared plumbing of the codec management commands.

Exit codes: 0 success, 1 codec error, 2 usage error (argparse), 3 I/O error.
Failures print one line: ``CommandError: error=<Category> <detail>``.
"""
import argparse
import logging

from django.core.management.base import BaseCommand, CommandError

from pipeline.config import EncodeConfig

from .exceptions import CodecError

logger = logging.getLogger(__name__)

CODEC_ERROR_EXIT = 1
IO_ERROR_EXIT = 3


def positive_int(text):
    """argparse type for counts that must be at least 1"""
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid int value: '{text}'") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


class CodecCommand(BaseCommand):
    """BaseCommand that turns codec and I/O failures into the exit-code contract"""

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except CodecError as exc:
            logger.debug(f"Command failed with {exc.category}: {exc}")
            raise CommandError(f"error={exc.category} {exc}", returncode=CODEC_ERROR_EXIT) from exc
        except OSError as exc:
            path = exc.filename or ''
            raise CommandError(
                f"error=IOError {path}: {exc.strerror or exc}", returncode=IO_ERROR_EXIT
            ) from exc

    def echo_config(self, config):
        self.stdout.write(config.to_line())


def add_encode_arguments(parser):
    """Flags that override fields of the effective EncodeConfig"""
    parser.add_argument('--config', help='KEY=VALUE config file (FCM_MODE, FCM_BIT_DEPTH, ...)')
    parser.add_argument('--mode', choices=['baseline', 'full', 'simplified'])
    parser.add_argument('--q', type=int, dest='bit_depth', help='Quantization bit depth (1-16)')
    parser.add_argument('--refresh', type=int, dest='refresh_period', help='Refresh period L in coded frames')
    parser.add_argument('--codec', help='Inner codec id or name (0 raw, 1 zdeflate, 2 requant, 255 external)')
    parser.add_argument(
        '--codec-param',
        action='append',
        dest='codec_params',
        help='Inner codec parameter key=value (repeatable), e.g. bits=8',
    )
    parser.add_argument('--fusion', type=int, help='Fusion rule id (0 identity, 1 space-to-channel)')
    parser.add_argument(
        '--temporal',
        action=argparse.BooleanOptionalAction,
        default=None,
        help='Drop every other frame before coding',
    )
    parser.add_argument('--fps', help='Frame rate as N or N/D')
    parser.add_argument('--workers', type=positive_int, help='Threads used for per-frame work')


def encode_overrides(options):
    params = options.get('codec_params')
    return {
        'mode': options.get('mode'),
        'bit_depth': options.get('bit_depth'),
        'refresh_period': options.get('refresh_period'),
        'codec': options.get('codec'),
        'codec_params': ';'.join(params) if params else None,
        'fusion': options.get('fusion'),
        'temporal': options.get('temporal'),
        'fps': options.get('fps'),
        'workers': options.get('workers'),
    }


def config_from_options(options):
    return EncodeConfig.resolve(options.get('config'), **encode_overrides(options))
