# File: innercodec/external.py

"""
Codec 255: hands the raw frame layout to an external encoder process.

Command templates come from settings (FCM_EXTERNAL_ENCODER_CMD and
FCM_EXTERNAL_DECODER_CMD) and may use the placeholders {input}, {output},
{width}, {height} and {bit_depth}. The encoder reads the raw samples from
{input} and writes its bitstream to {output}; the decoder does the reverse.
"""
import logging
import shlex
import shutil
import subprocess
import tempfile
import threading
from pathlib import Path

from django.conf import settings

from featurecodec.exceptions import ExternalCodecError, InvalidConfig
from packing.quantization import bytes_to_samples, samples_to_bytes
from .base import InnerCodec

logger = logging.getLogger(__name__)

_pool_lock = threading.Lock()
_pool = None


def _process_slots():
    """Semaphore bounding concurrent external processes"""
    global _pool
    with _pool_lock:
        if _pool is None:
            _pool = threading.BoundedSemaphore(max(1, int(settings.FCM_EXTERNAL_POOL_SIZE)))
        return _pool


def external_available():
    """True when both templates are configured and their programs are on PATH"""
    for template in (settings.FCM_EXTERNAL_ENCODER_CMD, settings.FCM_EXTERNAL_DECODER_CMD):
        if not template:
            return False
        program = shlex.split(template)[0]
        if shutil.which(program) is None:
            return False
    return True


class ExternalCodec(InnerCodec):
    codec_id = 255
    name = 'external'
    lossless = False

    def encode(self, quant, params=None):
        template = settings.FCM_EXTERNAL_ENCODER_CMD
        output = self._run(template, samples_to_bytes(quant), quant.width, quant.height, quant.bit_depth)
        return self._payload(output)

    def decode(self, payload, geometry):
        template = settings.FCM_EXTERNAL_DECODER_CMD
        output = self._run(
            template, payload.frame_bytes, geometry.width, geometry.height, geometry.bit_depth
        )
        return bytes_to_samples(output, geometry.height, geometry.width, geometry.bit_depth)

    def _run(self, template, data, width, height, bit_depth):
        if not template:
            raise InvalidConfig("external codec selected but no command template is configured")

        with _process_slots(), tempfile.TemporaryDirectory(prefix='fcm-') as workdir:
            source = Path(workdir) / 'input.bin'
            target = Path(workdir) / 'output.bin'
            source.write_bytes(data)
            try:
                command = [
                    part.format(
                        input=source, output=target, width=width, height=height, bit_depth=bit_depth
                    )
                    for part in shlex.split(template)
                ]
            except (KeyError, IndexError, ValueError) as exc:
                raise InvalidConfig(f"malformed external command template: {exc}") from exc

            logger.debug(f"Running external codec: {' '.join(command)}")
            try:
                result = subprocess.run(
                    command,
                    capture_output=True,
                    timeout=settings.FCM_EXTERNAL_TIMEOUT,
                    check=False,
                )
            except FileNotFoundError as exc:
                raise ExternalCodecError(f"external codec program not found: {command[0]}") from exc
            except subprocess.TimeoutExpired as exc:
                raise ExternalCodecError(
                    f"external codec timed out after {settings.FCM_EXTERNAL_TIMEOUT}s",
                    stderr=(exc.stderr or b'').decode(errors='replace'),
                ) from exc

            stderr = result.stderr.decode(errors='replace').strip()
            if result.returncode != 0:
                logger.error(f"External codec exited with {result.returncode}: {stderr}")
                raise ExternalCodecError(
                    f"external codec exited with status {result.returncode}",
                    returncode=result.returncode,
                    stderr=stderr,
                )
            if stderr:
                logger.warning(f"External codec stderr: {stderr}")
            if not target.exists():
                raise ExternalCodecError(f"external codec wrote no output to {target}", stderr=stderr)
            return target.read_bytes()
