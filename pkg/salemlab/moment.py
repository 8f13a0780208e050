# -*- coding: utf-8 -*-

from __future__ import absolute_import

import numpy as np


class MomentAccumulator(object):
    """\
    An accumulator for the first two moments of a stream of Monte
    Carlo samples: count, mean, variance, standard deviation and the
    standard error of the mean.

    Values arrive one at a time through add(), or a chunk at a time
    through add_array(). Chunks are summarized with numpy and folded
    in with the pairwise update of Chan et al., and two accumulators
    can be combined with merge(). Merging in a fixed order gives
    results that do not depend on how the chunks were scheduled, which
    is what the trial runners in salemlab.workers rely on.

    N.B. As in the accumulator this grew out of, values default to
    -0.0 when initially uncomputable, such as the mean with no data or
    the variance with a single data point.
    """
    def __init__(self):
        self._count = 0
        self._min = float('inf')
        self._max = float('-inf')
        self._mean = -0.0
        self._m2 = -0.0

    def add(self, val):
        if val > self._max:
            self._max = val
        if val < self._min:
            self._min = val

        self._count += 1
        n = self._count
        delta = val - self._mean
        delta_n = delta / n
        self._mean = self._mean + delta_n
        self._m2 = self._m2 + delta * delta_n * (n - 1)

    def add_array(self, values):
        values = np.asarray(values, dtype=float).ravel()
        if not values.size:
            return
        other = type(self)()
        other._count = int(values.size)
        other._mean = float(np.mean(values))
        other._m2 = float(np.sum((values - other._mean) ** 2))
        other._min = float(np.min(values))
        other._max = float(np.max(values))
        self.merge(other)

    def merge(self, other):
        if not other._count:
            return self
        if not self._count:
            self._count, self._mean, self._m2 = (other._count, other._mean,
                                                 other._m2)
            self._min, self._max = other._min, other._max
            return self
        n_a, n_b = self._count, other._count
        n = n_a + n_b
        delta = other._mean - self._mean
        self._mean = self._mean + delta * n_b / n
        self._m2 = self._m2 + other._m2 + delta * delta * n_a * n_b / n
        self._count = n
        self._min = min(self._min, other._min)
        self._max = max(self._max, other._max)
        return self

    @property
    def count(self):
        return self._count

    @property
    def mean(self):
        return self._mean

    @property
    def min(self):
        return self._min if self._count else -0.0

    @property
    def max(self):
        return self._max if self._count else -0.0

    @property
    def variance(self):
        try:
            return self._m2 / (self._count - 1)
        except ArithmeticError:
            return -0.0

    @property
    def std_dev(self):
        return abs(self.variance) ** 0.5

    @property
    def std_error(self):
        if self._count < 2:
            return 0.0
        return (self.variance / self._count) ** 0.5

    def to_dict(self):
        return {'count': self.count,
                'mean': self.mean,
                'std_dev': self.std_dev,
                'std_error': self.std_error,
                'min': self.min,
                'max': self.max}

    def __repr__(self):
        cn = self.__class__.__name__
        return ('<%s count=%r mean=%r std_error=%r>'
                % (cn, self._count, self._mean, self.std_error))
