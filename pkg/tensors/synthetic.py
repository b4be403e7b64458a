# File: tensors/synthetic.py

"""Seeded synthetic split-point features.

Each tensor is Gaussian with a per-tensor target (mean, std) that drifts
linearly across frames. Draws are standardized before scaling, so every
generated tensor hits its requested moments up to binary32 rounding.
"""
import logging
import math

import numpy as np

from featurecodec.exceptions import InvalidInput
from .structures import FeatureSet, FeatureTensor, TensorStats

logger = logging.getLogger(__name__)

MIN_TARGET_STD = 0.05


def _base_targets(rng, n_tensors):
    means = rng.uniform(0.5, 3.0, size=n_tensors)
    stds = rng.uniform(0.5, 2.0, size=n_tensors)
    return list(zip(means.tolist(), stds.tolist()))


def _drifted(base, drift, frame_index):
    mean, std = base
    return mean + drift * frame_index, max(std + drift * frame_index, MIN_TARGET_STD)


def target_stats(spec, seed, drift, frame_index):
    """Requested (mean, std) of every tensor at a given frame"""
    rng = np.random.default_rng(seed)
    return [
        TensorStats(*_drifted(base, drift, frame_index))
        for base in _base_targets(rng, spec.n_tensors)
    ]


def generate_sequence(spec, frames, seed, drift=0.0, correlation=0.0):
    """
    Generate `frames` feature sets with the shapes of `spec`.

    Args:
        spec: ShapeSpec of the split point
        frames: number of frames (>= 1)
        seed: RNG seed; identical seeds give bit-identical output
        drift: per-frame linear change of every target mean and std
        correlation: temporal correlation rho of the underlying noise in [0, 1)
    """
    if frames < 1:
        raise InvalidInput(f"frame count must be at least 1, got {frames}")
    if not 0.0 <= correlation < 1.0:
        raise InvalidInput(f"correlation must lie in [0, 1), got {correlation}")

    rng = np.random.default_rng(seed)
    bases = _base_targets(rng, spec.n_tensors)
    innovation = math.sqrt(1.0 - correlation * correlation)
    previous = [None] * spec.n_tensors

    logger.debug(f"Generating {frames} frames of {spec} (seed={seed}, drift={drift})")
    sequence = []
    for frame_index in range(frames):
        tensors = []
        for n, shape in enumerate(spec):
            noise = rng.standard_normal(shape, dtype=np.float32)
            if previous[n] is not None and correlation > 0.0:
                noise = correlation * previous[n] + innovation * noise
            previous[n] = noise

            z = noise.astype(np.float64)
            z -= z.mean()
            scale = z.std()
            if scale > 0:
                z /= scale
            mean, std = _drifted(bases[n], drift, frame_index)
            tensors.append(FeatureTensor((z * std + mean).astype(np.float32)))
        sequence.append(FeatureSet(tuple(tensors), frame_index))
    return sequence
