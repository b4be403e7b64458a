# File: temporal/resampling.py

"""Drop every other frame at the encoder, interpolate it back at the decoder."""
import logging

import numpy as np

from featurecodec.exceptions import InvalidInput
from tensors.structures import FeatureSet, FeatureTensor

logger = logging.getLogger(__name__)


def kept_count(original_count, enabled=True):
    """Number of frames that survive downsampling"""
    if original_count < 0:
        raise InvalidInput(f"negative frame count {original_count}")
    return -(-original_count // 2) if enabled else original_count


def downsample(sequence, enabled):
    """
    Keep frames 0, 2, 4, ... when enabled, everything otherwise.

    Returns:
        (kept sequence, kept-frame indices)
    """
    sequence = list(sequence)
    indices = list(range(0, len(sequence), 2 if enabled else 1))
    return [sequence[i] for i in indices], indices


def _midpoint(before, after, frame_index):
    tensors = []
    for left, right in zip(before, after):
        if left.shape != right.shape:
            raise InvalidInput(f"neighbouring frames disagree on shape: {left.shape} vs {right.shape}")
        average = (left.data.astype(np.float64) + right.data.astype(np.float64)) / 2.0
        tensors.append(FeatureTensor(average.astype(np.float32)))
    return FeatureSet(tuple(tensors), frame_index)


def upsample(kept, original_count):
    """
    Rebuild ``original_count`` frames from the even-indexed frames in ``kept``.

    Frame 2k+1 is the element-wise average of frames 2k and 2k+2; a missing
    last frame repeats the last kept frame.
    """
    kept = list(kept)
    if not kept:
        raise InvalidInput("nothing to upsample")
    if len(kept) != kept_count(original_count):
        raise InvalidInput(
            f"{len(kept)} kept frames cannot come from {original_count} original frames"
        )

    frames = []
    for index in range(original_count):
        if index % 2 == 0:
            frames.append(kept[index // 2].with_index(index))
        elif index // 2 + 1 < len(kept):
            frames.append(_midpoint(kept[index // 2], kept[index // 2 + 1], index))
        else:
            frames.append(kept[-1].with_index(index))
    logger.debug(f"Upsampled {len(kept)} frames to {original_count}")
    return frames
