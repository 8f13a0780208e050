"""Block-wise accumulators used by the spectral layer.

Frequencies are bucketed by their binary exponent, so every block is
an octave and the bucket of a sample never depends on the grid.
"""

from __future__ import absolute_import

import math

import numpy as np


class DyadicBlockEnvelope(object):
    """Tracks the supremum and the mean square of a nonnegative
    quantity over the dyadic frequency blocks [2^k, 2^(k+1)). The
    frequency zero gets a block of its own, reported with bounds
    (0.0, 0.0).
    """
    def __init__(self):
        self._sups = {}
        self._argmax = {}
        self._counts = {}
        self._sumsq = {}

    @staticmethod
    def block_of(u):
        if u < 0 or math.isnan(u) or math.isinf(u):
            raise ValueError('expected finite nonnegative frequency, not %r'
                             % (u,))
        if u == 0:
            return None
        return math.frexp(u)[1] - 1

    def _update(self, k, count, sumsq, u, val):
        self._counts[k] = self._counts.get(k, 0) + count
        self._sumsq[k] = self._sumsq.get(k, 0.0) + sumsq
        if k not in self._sups or val > self._sups[k]:
            self._sups[k] = val
            self._argmax[k] = u

    def add(self, u, val):
        self._update(self.block_of(u), 1, val * val, u, val)
        return

    def add_array(self, us, vals):
        """Same as add() over paired arrays, one pass per block. Ties
        keep the first frequency, as with add().
        """
        us = np.asarray(us, dtype=float).ravel()
        vals = np.asarray(vals, dtype=float).ravel()
        if us.shape != vals.shape:
            raise ValueError('expected one value per frequency')
        if not us.size:
            return
        if not np.all(np.isfinite(us)) or np.any(us < 0):
            raise ValueError('expected finite nonnegative frequencies')
        zero = us == 0
        exps = np.frexp(us)[1] - 1
        if np.any(zero):
            self._add_selected(None, us[zero], vals[zero])
        for k in np.unique(exps[~zero]).tolist():
            sel = (exps == k) & ~zero
            self._add_selected(int(k), us[sel], vals[sel])
        return

    def _add_selected(self, k, us, vals):
        i = int(np.argmax(vals))
        self._update(k, int(us.size), float(np.sum(vals * vals)),
                     float(us[i]), float(vals[i]))

    def get_results(self):
        """Returns (lo, hi, sup, argmax, count, mean_square) tuples in
        ascending order.
        """
        ret = []
        keys = sorted(k for k in self._sups if k is not None)
        if None in self._sups:
            keys.insert(0, None)
        for k in keys:
            if k is None:
                lo = hi = 0.0
            else:
                lo, hi = math.ldexp(1.0, k), math.ldexp(1.0, k + 1)
            count = self._counts[k]
            ret.append((lo, hi, self._sups[k], self._argmax[k], count,
                        self._sumsq[k] / count))
        return ret
