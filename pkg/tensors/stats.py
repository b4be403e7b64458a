# File: tensors/stats.py

"""Deterministic global statistics of feature tensors.

Reductions accumulate in 64-bit and use the population form (divisor K).
"""
import math

import numpy as np

from featurecodec.exceptions import InvalidInput, InvalidTensor
from .structures import TensorStats


def tensor_moments(values):
    """Two-pass population mean and std of any tensor-like, in float64"""
    data = np.asarray(getattr(values, 'data', values))
    if data.size == 0:
        raise InvalidTensor("cannot compute statistics of an empty tensor")
    flat = data.reshape(-1)
    mean = float(np.mean(flat, dtype=np.float64))
    centered = flat.astype(np.float64) - mean
    variance = float(np.dot(centered, centered)) / flat.size
    return mean, math.sqrt(variance)


def compute_stats(tensor):
    """Population (mean, std) of a feature tensor, rounded to binary32"""
    mean, std = tensor_moments(tensor)
    return TensorStats(mean, std)


def pooled_moments(moments):
    """Sum-of-Gaussians pooling: (sum of means, root-sum-square of stds)"""
    moments = list(moments)
    if not moments:
        raise InvalidInput("pooling needs at least one (mean, std) pair")
    mean = math.fsum(m for m, _ in moments)
    std = math.sqrt(math.fsum(s * s for _, s in moments))
    return mean, std


def pooled_sum_stats(stats):
    """Pool per-tensor statistics into a single (mu_X, sigma_X) pair"""
    return TensorStats(*pooled_moments(s.as_tuple() for s in stats))


def feature_set_stats(feature_set):
    return [compute_stats(t) for t in feature_set]
