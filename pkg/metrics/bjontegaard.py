# File: metrics/bjontegaard.py

"""Bjontegaard deltas between two rate-accuracy curves.

Log-rate is interpolated as a function of accuracy and integrated over the
overlapping accuracy range. Interpolation methods:

    cubic   -- natural cubic spline through every point (default)
    pchip   -- piecewise cubic Hermite, monotone between points
    polyfit -- least-squares cubic polynomial
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import interpolate

from featurecodec.exceptions import InsufficientPoints, InvalidInput, NoOverlap

MIN_POINTS = 4
METHODS = ('cubic', 'pchip', 'polyfit')


@dataclass(frozen=True)
class RateAccuracyPoint:
    rate: float
    accuracy: float


def _arrays(points, label):
    points = list(points)
    if len(points) < MIN_POINTS:
        raise InsufficientPoints(f"{label} curve has {len(points)} points, need {MIN_POINTS}")
    rate = np.array([float(p.rate) for p in points], dtype=np.float64)
    accuracy = np.array([float(p.accuracy) for p in points], dtype=np.float64)
    if not (np.isfinite(rate).all() and np.isfinite(accuracy).all()):
        raise InvalidInput(f"{label} curve holds non-finite values")
    if (rate <= 0).any():
        raise InvalidInput(f"{label} curve rates must be positive")
    if (np.diff(rate) <= 0).any():
        raise InvalidInput(f"{label} curve rates must be strictly increasing")
    return np.log(rate), accuracy


def _integral(x, y, low, high, method):
    order = np.argsort(x)
    x, y = x[order], y[order]
    if (np.diff(x) <= 0).any():
        raise InvalidInput("interpolation abscissae must be distinct")
    if method == 'cubic':
        return float(interpolate.CubicSpline(x, y, bc_type='natural').integrate(low, high))
    if method == 'pchip':
        return float(interpolate.PchipInterpolator(x, y).integrate(low, high))
    if method == 'polyfit':
        antiderivative = np.polyint(np.polyfit(x, y, 3))
        return float(np.polyval(antiderivative, high) - np.polyval(antiderivative, low))
    raise InvalidInput(f"unknown interpolation method '{method}', expected one of {METHODS}")


def _overlap(a, b):
    low, high = max(a.min(), b.min()), min(a.max(), b.max())
    if high <= low:
        raise NoOverlap(f"ranges [{a.min()}, {a.max()}] and [{b.min()}, {b.max()}] do not overlap")
    return low, high


def bd_rate(anchor, test, method='cubic'):
    """Average rate difference of test vs anchor in percent; negative saves rate"""
    log_a, acc_a = _arrays(anchor, 'anchor')
    log_t, acc_t = _arrays(test, 'test')
    low, high = _overlap(acc_a, acc_t)
    area_a = _integral(acc_a, log_a, low, high, method)
    area_t = _integral(acc_t, log_t, low, high, method)
    return (math.exp((area_t - area_a) / (high - low)) - 1.0) * 100.0


def bd_accuracy(anchor, test, method='cubic'):
    """Average accuracy difference of test vs anchor at equal rate"""
    log_a, acc_a = _arrays(anchor, 'anchor')
    log_t, acc_t = _arrays(test, 'test')
    low, high = _overlap(log_a, log_t)
    area_a = _integral(log_a, acc_a, low, high, method)
    area_t = _integral(log_t, acc_t, low, high, method)
    return (area_t - area_a) / (high - low)
