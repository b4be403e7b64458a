# File: pipeline/config.py

"""Effective encoder configuration.

Precedence: CLI flag > config file > settings default. Config files are
KEY=VALUE files read through python-decouple:

    FCM_MODE=full
    FCM_BIT_DEPTH=10
    FCM_REFRESH_PERIOD=32
    FCM_CODEC=requant
    FCM_CODEC_PARAMS=bits=8
    FCM_FUSION=1
    FCM_TEMPORAL=0
    FCM_FPS=30/1
    FCM_WORKERS=1
"""
import logging
from dataclasses import dataclass, field

from decouple import Config, RepositoryEnv
from django.conf import settings

from featurecodec.exceptions import InvalidConfig
from innercodec.base import format_codec_params
from signaling.params import SignalingMode
from .forms import EncodeConfigForm

logger = logging.getLogger(__name__)

# form field -> config-file key
FILE_KEYS = {
    'mode': 'FCM_MODE',
    'bit_depth': 'FCM_BIT_DEPTH',
    'refresh_period': 'FCM_REFRESH_PERIOD',
    'codec': 'FCM_CODEC',
    'codec_params': 'FCM_CODEC_PARAMS',
    'fusion': 'FCM_FUSION',
    'temporal': 'FCM_TEMPORAL',
    'fps': 'FCM_FPS',
    'workers': 'FCM_WORKERS',
}

# form field -> token of the effective-config line
LINE_KEYS = {
    'mode': 'mode',
    'bit_depth': 'q',
    'refresh_period': 'refresh',
    'codec': 'codec',
    'codec_params': 'codec_params',
    'fusion': 'fusion',
    'temporal': 'temporal',
    'fps': 'fps',
    'workers': 'workers',
}

LINE_PREFIX = 'config:'


def default_values():
    return {
        'mode': settings.FCM_DEFAULT_MODE,
        'bit_depth': settings.FCM_DEFAULT_BIT_DEPTH,
        'refresh_period': settings.FCM_DEFAULT_REFRESH_PERIOD,
        'codec': settings.FCM_DEFAULT_CODEC,
        'codec_params': '',
        'fusion': settings.FCM_DEFAULT_FUSION,
        'temporal': False,
        'fps': settings.FCM_DEFAULT_FPS,
        'workers': settings.FCM_DEFAULT_WORKERS,
    }


def read_config_file(path):
    """Raw values present in a KEY=VALUE config file"""
    repository = RepositoryEnv(str(path))
    reader = Config(repository)
    return {name: reader(key) for name, key in FILE_KEYS.items() if key in repository}


@dataclass(frozen=True)
class EncodeConfig:
    mode: SignalingMode = SignalingMode.FULL
    bit_depth: int = 10
    refresh_period: int = 32
    codec_id: int = 0
    codec_params: dict = field(default_factory=dict)
    fusion_id: int = 1
    temporal: bool = False
    fps_num: int = 30
    fps_den: int = 1
    workers: int = 1

    @classmethod
    def from_values(cls, values):
        """Validate raw values (strings or native) through EncodeConfigForm"""
        data = dict(values)
        if isinstance(data.get('temporal'), str):
            data['temporal'] = data['temporal'].strip().lower() not in ('', '0', 'false', 'no', 'off')
        if isinstance(data.get('mode'), SignalingMode):
            data['mode'] = data['mode'].label
        if isinstance(data.get('codec_params'), dict):
            data['codec_params'] = format_codec_params(data['codec_params'])
        form = EncodeConfigForm(data)
        if not form.is_valid():
            errors = {name: [str(e) for e in messages] for name, messages in form.errors.items()}
            detail = '; '.join(f'{name}: {" ".join(messages)}' for name, messages in errors.items())
            raise InvalidConfig(f"invalid encode configuration ({detail})", errors)

        cleaned = form.cleaned_data
        fps_num, fps_den = cleaned['fps']
        return cls(
            mode=cleaned['mode'],
            bit_depth=cleaned['bit_depth'],
            refresh_period=cleaned['refresh_period'],
            codec_id=cleaned['codec'],
            codec_params=cleaned['codec_params'],
            fusion_id=cleaned['fusion'],
            temporal=cleaned['temporal'],
            fps_num=fps_num,
            fps_den=fps_den,
            workers=cleaned['workers'],
        )

    @classmethod
    def resolve(cls, config_file=None, **overrides):
        """Merge settings defaults, an optional config file and non-None overrides"""
        values = default_values()
        if config_file:
            values.update(read_config_file(config_file))
        values.update({name: value for name, value in overrides.items() if value is not None})
        return cls.from_values(values)

    @classmethod
    def from_file(cls, path):
        return cls.resolve(config_file=path)

    @classmethod
    def from_line(cls, line):
        """Parse the line printed by to_line back into a config"""
        text = line.strip()
        if text.startswith(LINE_PREFIX):
            text = text[len(LINE_PREFIX):]
        names = {token: name for name, token in LINE_KEYS.items()}
        values = default_values()
        for token in text.split():
            key, sep, value = token.partition('=')
            if not sep or key not in names:
                raise InvalidConfig(f"unexpected token '{token}' in config line")
            values[names[key]] = value
        return cls.from_values(values)

    def to_line(self):
        return (
            f"{LINE_PREFIX} mode={self.mode.label} q={self.bit_depth} refresh={self.refresh_period} "
            f"codec={self.codec_id} codec_params={format_codec_params(self.codec_params)} "
            f"fusion={self.fusion_id} temporal={int(self.temporal)} "
            f"fps={self.fps_num}/{self.fps_den} workers={self.workers}"
        )

    def replace(self, **changes):
        values = {
            'mode': self.mode, 'bit_depth': self.bit_depth, 'refresh_period': self.refresh_period,
            'codec': self.codec_id, 'codec_params': self.codec_params, 'fusion': self.fusion_id,
            'temporal': self.temporal, 'fps': f'{self.fps_num}/{self.fps_den}', 'workers': self.workers,
        }
        values.update(changes)
        return EncodeConfig.from_values(values)
