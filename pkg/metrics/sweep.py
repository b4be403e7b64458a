# File: metrics/sweep.py

"""Rate-accuracy sweeps over a matrix of encoder configurations."""
import csv
import json
import logging
from pathlib import Path

from django.db import transaction
from joblib import Parallel, delayed

from bitstream.accounting import accounting
from bitstream.container import demux
from featurecodec.exceptions import InvalidInput
from innercodec.base import format_codec_params
from pipeline.engine import decode, encode
from signaling.params import SignalingMode
from .bjontegaard import RateAccuracyPoint
from .fidelity import fidelity
from .models import SweepResult, SweepRun

logger = logging.getLogger(__name__)

# Fixed CSV column order
SWEEP_COLUMNS = (
    'index', 'mode', 'q', 'refresh', 'codec', 'codec_params', 'fusion', 'temporal',
    'total_bytes', 'kbps', 'header_bytes', 'stats_bytes', 'minmax_bytes',
    'framing_bytes', 'payload_bytes',
    'mse', 'psnr', 'mean_drift', 'std_drift', 'rel_mean_drift', 'rel_std_drift',
    'proxy_accuracy', 'config',
)


def evaluate(sequence, config, index=0):
    """Encode, decode and score one configuration; returns one sweep row"""
    stream = encode(sequence, config)
    bitstream = demux(stream)
    report = accounting(stream, bitstream)
    recon = decode(bitstream, workers=config.workers)
    scores = fidelity(sequence, recon)
    logger.debug(f"Sweep row {index}: {report.total_bytes} bytes, {scores.proxy_accuracy:.2f} dB")
    return {
        'index': index,
        'mode': config.mode.label,
        'q': config.bit_depth,
        'refresh': config.refresh_period,
        'codec': config.codec_id,
        'codec_params': format_codec_params(config.codec_params),
        'fusion': config.fusion_id,
        'temporal': int(config.temporal),
        'total_bytes': report.total_bytes,
        'kbps': report.kbps,
        'header_bytes': report.header_bytes,
        'stats_bytes': report.stats_bytes,
        'minmax_bytes': report.minmax_bytes,
        'framing_bytes': report.framing_bytes,
        'payload_bytes': report.payload_bytes,
        'mse': scores.mse,
        'psnr': scores.psnr,
        'mean_drift': scores.mean_drift,
        'std_drift': scores.std_drift,
        'rel_mean_drift': scores.rel_mean_drift,
        'rel_std_drift': scores.rel_std_drift,
        'proxy_accuracy': scores.proxy_accuracy,
        'config': config.to_line(),
    }


def sweep(sequence, configs, n_jobs=1):
    """One row per config, in config order, evaluated on up to n_jobs threads"""
    sequence, configs = list(sequence), list(configs)
    if not configs:
        raise InvalidInput("a sweep needs at least one configuration")
    logger.info(f"Sweeping {len(configs)} configurations over {len(sequence)} frames")
    return Parallel(n_jobs=n_jobs, prefer='threads')(
        delayed(evaluate)(sequence, config, index) for index, config in enumerate(configs)
    )


# ========== REPORTS ==========
def write_csv(rows, path):
    with open(path, 'w', newline='') as handle:
        writer = csv.DictWriter(handle, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def write_json(rows, path):
    Path(path).write_text(json.dumps({'columns': list(SWEEP_COLUMNS), 'rows': rows}, indent=2))


def read_curve(path, mode=None, rate_column='kbps', accuracy_column='proxy_accuracy'):
    """Rate-accuracy points of a sweep CSV, ordered by rate"""
    with open(path, newline='') as handle:
        reader = csv.DictReader(handle)
        missing = {rate_column, accuracy_column} - set(reader.fieldnames or ())
        if missing:
            raise InvalidInput(f"{path} lacks columns {sorted(missing)}")
        points = [
            RateAccuracyPoint(float(row[rate_column]), float(row[accuracy_column]))
            for row in reader
            if mode is None or row.get('mode') == mode
        ]
    return sorted(points, key=lambda point: point.rate)


@transaction.atomic
def record_run(rows, name, source='', frame_count=0, shapes=''):
    """Store sweep rows so later bdrate runs can refer to them by id"""
    run = SweepRun.objects.create(name=name, source=str(source), frame_count=frame_count, shapes=str(shapes))
    SweepResult.objects.bulk_create([
        SweepResult(
            run=run,
            index=row['index'],
            mode=SignalingMode.from_name(row['mode']),
            bit_depth=row['q'],
            refresh_period=row['refresh'],
            codec_id=row['codec'],
            codec_params=row['codec_params'],
            fusion_id=row['fusion'],
            temporal=bool(row['temporal']),
            config_line=row['config'],
            total_bytes=row['total_bytes'],
            kbps=row['kbps'],
            header_bytes=row['header_bytes'],
            stats_bytes=row['stats_bytes'],
            minmax_bytes=row['minmax_bytes'],
            framing_bytes=row['framing_bytes'],
            payload_bytes=row['payload_bytes'],
            mse=row['mse'],
            psnr=row['psnr'],
            mean_drift=row['mean_drift'],
            std_drift=row['std_drift'],
            rel_mean_drift=row['rel_mean_drift'],
            rel_std_drift=row['rel_std_drift'],
            proxy_accuracy=row['proxy_accuracy'],
        )
        for row in rows
    ])
    logger.info(f"Recorded sweep run {run.pk} with {len(rows)} results")
    return run
