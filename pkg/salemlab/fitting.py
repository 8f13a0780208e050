"""Power-law fits by ordinary least squares in log-log space."""

from __future__ import absolute_import

from collections import namedtuple

import numpy as np

from salemlab.common import DomainError


PowerLawFit = namedtuple('PowerLawFit', 'slope intercept r_squared points')


def loglog_fit(x, y, min_points=2):
    """Fits log(y) = intercept + slope * log(x) and returns the slope,
    the intercept and the coefficient of determination.

    A perfectly flat series has no variance to explain, and is given
    r_squared = 1.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DomainError('expected matching x and y, got shapes %r and %r'
                          % (x.shape, y.shape))
    if x.size < min_points:
        raise DomainError('expected at least %d points, not %d'
                          % (min_points, x.size))
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError('expected positive values for a log-log fit')
    log_x, log_y = np.log(x), np.log(y)
    slope, intercept = np.polyfit(log_x, log_y, 1)
    residuals = log_y - (intercept + slope * log_x)
    ss_res = float(np.sum(residuals ** 2))
    ss_tot = float(np.sum((log_y - np.mean(log_y)) ** 2))
    if ss_tot <= 1e-24 * max(1.0, float(np.sum(log_y ** 2))):
        r_squared = 1.0
    else:
        r_squared = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return PowerLawFit(float(slope), float(intercept), r_squared, int(x.size))


def linear_fit(x, y):
    "Plain least-squares line, returned as (slope, intercept)."
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise DomainError('expected at least 2 points, not %d' % (x.size,))
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)
