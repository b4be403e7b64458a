# File: pipeline/forms.py

from django import forms
from django.core.exceptions import ValidationError
from django.core.validators import RegexValidator

from featurecodec.exceptions import CodecError
from fusion.rules import FUSION_RULES
from innercodec.base import parse_codec_params
from innercodec.registry import get_codec, resolve_codec_id
from packing.frames import QuantFrame
from signaling.params import SignalingMode


class EncodeConfigForm(forms.Form):
    """Validates raw encoder settings coming from flags, config files or config lines"""

    mode = forms.ChoiceField(choices=[(m.label, m.label) for m in SignalingMode])
    bit_depth = forms.IntegerField(min_value=1, max_value=QuantFrame.MAX_BIT_DEPTH)
    refresh_period = forms.IntegerField(min_value=1, max_value=0xFFFF)
    codec = forms.CharField()
    codec_params = forms.CharField(required=False)
    fusion = forms.TypedChoiceField(
        choices=[(str(fusion_id), rule.name) for fusion_id, rule in FUSION_RULES.items()],
        coerce=int,
    )
    temporal = forms.BooleanField(required=False)
    fps = forms.CharField(
        validators=[RegexValidator(r'^\d+(/\d+)?$', "Frame rate must look like 30 or 30000/1001.")]
    )
    workers = forms.IntegerField(min_value=1)

    def clean_mode(self):
        return SignalingMode.from_name(self.cleaned_data['mode'])

    def clean_fps(self):
        num, _, den = self.cleaned_data['fps'].partition('/')
        num, den = int(num), int(den or 1)
        if not (1 <= num <= 0xFFFF and 1 <= den <= 0xFFFF):
            raise ValidationError("Frame rate numerator and denominator must lie in 1..65535.")
        return num, den

    def clean(self):
        cleaned_data = super().clean()
        codec = cleaned_data.get('codec')
        bit_depth = cleaned_data.get('bit_depth')

        if codec is not None:
            try:
                cleaned_data['codec'] = resolve_codec_id(codec)
                params = parse_codec_params(cleaned_data.get('codec_params', ''))
                if bit_depth is not None:
                    params = get_codec(cleaned_data['codec']).validate_params(params, bit_depth)
                cleaned_data['codec_params'] = params
            except CodecError as exc:
                self.add_error('codec_params' if cleaned_data.get('codec_params') else 'codec', str(exc))

        return cleaned_data
