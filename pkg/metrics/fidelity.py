# File: metrics/fidelity.py

"""Feature-space fidelity of a reconstruction.

Proxy accuracy is the feature-space SNR in dB. It stands in for task accuracy
and is not comparable to detection or tracking scores.
"""
import math
from dataclasses import asdict, dataclass

import numpy as np
from django.conf import settings

from featurecodec.exceptions import InvalidInput
from tensors.stats import tensor_moments


def _decibels(power, noise, cap):
    if noise <= 0:
        return cap
    if power <= 0:
        return 0.0
    return min(cap, 10.0 * math.log10(power / noise))


def _relative(drift, reference):
    return drift / reference if reference > 0 else drift


@dataclass(frozen=True)
class TensorFidelity:
    index: int
    mse: float
    psnr: float
    mean_drift: float
    std_drift: float
    rel_mean_drift: float
    rel_std_drift: float
    snr: float


@dataclass(frozen=True)
class FidelityReport:
    tensors: tuple
    mse: float
    psnr: float
    mean_drift: float
    std_drift: float
    rel_mean_drift: float
    rel_std_drift: float
    proxy_accuracy: float

    def as_dict(self):
        data = asdict(self)
        data['tensors'] = [asdict(t) for t in self.tensors]
        return data


def _check_pair(original, reconstructed):
    original, reconstructed = list(original), list(reconstructed)
    if not original:
        raise InvalidInput("fidelity needs at least one frame")
    if len(original) != len(reconstructed):
        raise InvalidInput(f"{len(original)} original frames vs {len(reconstructed)} reconstructed")
    for a, b in zip(original, reconstructed):
        if a.shape_spec != b.shape_spec:
            raise InvalidInput(f"shape mismatch: {a.shape_spec} vs {b.shape_spec}")
    return original, reconstructed


def fidelity(original, reconstructed, cap=None):
    """
    Compare two sequences tensor by tensor.

    MSE and SNR pool every sample of a tensor over all frames. PSNR uses
    the original tensor's dynamic range. Drifts are per-frame absolute
    differences of (mean, std), averaged over frames; relative drifts divide
    by max(|mean|, std) and by std of the original frame. Aggregates pool
    MSE and SNR over all tensors and keep the worst drift.
    """
    cap = settings.FCM_PSNR_CAP if cap is None else cap
    original, reconstructed = _check_pair(original, reconstructed)
    n_tensors = len(original[0])

    tensors = []
    total_error = total_power = total_count = 0.0
    low, high = math.inf, -math.inf
    for n in range(n_tensors):
        error = power = count = 0.0
        t_low, t_high = math.inf, -math.inf
        drifts = []
        for a, b in zip(original, reconstructed):
            x = a[n].data.astype(np.float64)
            y = b[n].data.astype(np.float64)
            diff = y - x
            error += float(np.dot(diff.ravel(), diff.ravel()))
            power += float(np.dot(x.ravel(), x.ravel()))
            count += x.size
            t_low, t_high = min(t_low, float(x.min())), max(t_high, float(x.max()))

            mean_a, std_a = tensor_moments(x)
            mean_b, std_b = tensor_moments(y)
            mean_drift, std_drift = abs(mean_a - mean_b), abs(std_a - std_b)
            drifts.append((
                mean_drift,
                std_drift,
                _relative(mean_drift, max(abs(mean_a), std_a)),
                _relative(std_drift, std_a),
            ))

        mse = error / count
        peak = t_high - t_low
        averaged = np.mean(np.array(drifts), axis=0)
        tensors.append(TensorFidelity(
            index=n,
            mse=mse,
            psnr=_decibels(peak * peak if peak > 0 else 1.0, mse, cap),
            mean_drift=float(averaged[0]),
            std_drift=float(averaged[1]),
            rel_mean_drift=float(averaged[2]),
            rel_std_drift=float(averaged[3]),
            snr=_decibels(power / count, mse, cap),
        ))
        total_error += error
        total_power += power
        total_count += count
        low, high = min(low, t_low), max(high, t_high)

    mse = total_error / total_count
    peak = high - low
    return FidelityReport(
        tensors=tuple(tensors),
        mse=mse,
        psnr=_decibels(peak * peak if peak > 0 else 1.0, mse, cap),
        mean_drift=max(t.mean_drift for t in tensors),
        std_drift=max(t.std_drift for t in tensors),
        rel_mean_drift=max(t.rel_mean_drift for t in tensors),
        rel_std_drift=max(t.rel_std_drift for t in tensors),
        proxy_accuracy=_decibels(total_power / total_count, mse, cap),
    )
