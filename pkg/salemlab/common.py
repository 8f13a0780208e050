# -*- coding: utf-8 -*-
"""Shared constants, budgets and the exception hierarchy.

Every error raised on purpose by salemlab is a SalemLabError. Most
also subclass the builtin they most resemble, so callers who only
care about ValueError keep working.
"""

from __future__ import absolute_import

import math


__version__ = '0.3.0-dev'

SCHEMA_VERSION = 1

MAX_FLOW_DEPTH = 22
MAX_WALK_LEVEL = 22
MAX_EXACT_WORD_LENGTH = 16

FLOW_TOLERANCE = 1e-12
IDENTITY_TOLERANCE = 1e-9

# constants carried over as stated, not sharpened
MOMENT_CONSTANT = 22
GEOMETRIC_CONSTANT = 11
FROSTMAN_COVER_FACTOR = 3

SQRT2 = math.sqrt(2.0)


class SalemLabError(Exception):
    pass


class InvalidSpecError(SalemLabError, ValueError):
    pass


class DomainError(SalemLabError, ValueError):
    pass


class ResourceLimitError(SalemLabError):
    def __init__(self, what, requested, limit):
        self.what = what
        self.requested = requested
        self.limit = limit
        msg = ('%s of %r exceeds the configured limit of %r'
               % (what, requested, limit))
        super(ResourceLimitError, self).__init__(msg)


class RegimeError(SalemLabError, ValueError):
    pass


class ValidityError(RegimeError):
    def __init__(self, u_max, valid_u_max):
        self.u_max = u_max
        self.valid_u_max = valid_u_max
        msg = ('expected u_max <= valid_u_max=%r for this walk level, not %r'
               % (valid_u_max, u_max))
        super(ValidityError, self).__init__(msg)


class ArtifactError(SalemLabError, IOError):
    def __init__(self, path, reason):
        self.path = path
        self.reason = reason
        super(ArtifactError, self).__init__('%s: %s' % (path, reason))


def check_kwargs(kwargs):
    if kwargs:
        raise TypeError('unexpected keyword arguments: %r'
                        % sorted(kwargs.keys()))


def is_power_of_two(n):
    return n > 0 and (n & (n - 1)) == 0


def ceil_log2(n):
    if n < 1:
        raise DomainError('expected positive integer, not %r' % (n,))
    return (n - 1).bit_length()
