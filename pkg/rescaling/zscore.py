# File: rescaling/zscore.py

"""Decoder-side Z-score rescaling of reconstructed features.

The decoder measures the reconstruction's own (mean, std), normalizes by
them and denormalizes with the signaled originals. Arithmetic is float64,
outputs are binary32. Reconstruction statistics are never transmitted.
"""
import logging

import numpy as np
from django.conf import settings

from featurecodec.exceptions import InvalidInput
from fusion.rules import FusedTensor
from tensors.stats import pooled_moments, tensor_moments
from tensors.structures import FeatureSet, FeatureTensor

logger = logging.getLogger(__name__)


def _epsilon(epsilon):
    return settings.FCM_RESCALE_EPSILON if epsilon is None else epsilon


def _affine(data, scale, offset):
    return (data.astype(np.float64) * scale + offset).astype(np.float32)


def zscore_map(data, target, epsilon=None):
    """Return data normalized by its own moments and denormalized to target"""
    mean, std = tensor_moments(data)
    if std < _epsilon(epsilon):
        logger.warning(f"Degenerate reconstruction (std={std:.3g}); emitting constant {target.mean}")
        return np.full(data.shape, target.mean, dtype=np.float32)
    scale = target.std / std
    return _affine(data, scale, target.mean - scale * mean)


def rescale_fused(fused, target, epsilon=None):
    """Rescale the reconstructed fused tensor to the signaled fused statistics"""
    return FusedTensor(zscore_map(fused.data, target, epsilon))


def rescale_per_tensor(feature_set, targets, epsilon=None):
    """Rescale every restored tensor to its own signaled statistics"""
    targets = list(targets)
    if len(targets) != len(feature_set):
        raise InvalidInput(f"{len(targets)} targets for {len(feature_set)} tensors")
    tensors = tuple(
        FeatureTensor(zscore_map(tensor.data, target, epsilon))
        for tensor, target in zip(feature_set, targets)
    )
    return FeatureSet(tensors, feature_set.frame_index)


def simplified_map(feature_set, pooled_target, epsilon=None):
    """
    The single affine map (scale, offset) shared by all tensors.

    scale = sigma_X / sigma_Xhat and offset = (mu_X - scale * mu_Xhat) / N,
    where (mu_Xhat, sigma_Xhat) pool the reconstruction's per-tensor moments.
    The offset is shared equally so the pooled output mean is mu_X.
    """
    n_tensors = len(feature_set)
    pooled_mean, pooled_std = pooled_moments(tensor_moments(t.data) for t in feature_set)
    if pooled_std < _epsilon(epsilon):
        logger.warning(f"Degenerate pooled reconstruction (std={pooled_std:.3g})")
        return 0.0, pooled_target.mean / n_tensors
    scale = pooled_target.std / pooled_std
    return scale, (pooled_target.mean - scale * pooled_mean) / n_tensors


def rescale_simplified(feature_set, pooled_target, epsilon=None):
    """Rescale all restored tensors with one map derived from pooled statistics"""
    if len(feature_set) < 1:
        raise InvalidInput("simplified rescaling needs at least one tensor")
    scale, offset = simplified_map(feature_set, pooled_target, epsilon)
    tensors = tuple(FeatureTensor(_affine(t.data, scale, offset)) for t in feature_set)
    return FeatureSet(tensors, feature_set.frame_index)
