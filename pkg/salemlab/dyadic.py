# -*- coding: utf-8 -*-
"""Frostman measures on Cantor-type sets, stored as flows on the
dyadic tree, and their n-step atomic approximations.

Interval endpoints and flow masses are exact ``Fraction`` values.
Floating point only appears once a flow is flattened into an
AtomicMeasure for the spectral layer.

Dyadic intervals are half-open, ``[(j-1)/2^n, j/2^n)``, except the
last one on each level, which is closed at 1.
"""

from __future__ import absolute_import

import io
import math
from fractions import Fraction
from collections import namedtuple

import numpy as np

from salemlab.common import (InvalidSpecError,
                             DomainError,
                             ResourceLimitError,
                             MAX_FLOW_DEPTH,
                             FLOW_TOLERANCE,
                             FROSTMAN_COVER_FACTOR,
                             check_kwargs)
from salemlab.log import lab_log
from salemlab.workers import make_rng


__all__ = ['DyadicIndex', 'CantorSpec', 'TreeFlowMeasure', 'AtomicMeasure',
           'cantor_intervals', 'cantor_flow', 'lebesgue_flow', 'flow_check',
           'frostman_check', 'survivor_hull_check', 'n_approximation',
           'interval_mass', 'three_cover', 'dump_flow', 'load_flow',
           'dump_atoms', 'load_atoms']


MAX_SURVIVOR_COUNT = 2 ** 20
ONE = Fraction(1)
HALF = Fraction(1, 2)


def parse_ratio(ratio):
    """Accepts a Fraction, an int, or a ``'p/q'`` string. Floats are
    rejected so that no decimal drift sneaks into the construction.
    """
    if isinstance(ratio, Fraction):
        return ratio
    if isinstance(ratio, float):
        raise InvalidSpecError('expected exact ratio such as "1/4", not'
                               ' float %r' % (ratio,))
    try:
        return Fraction(ratio)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InvalidSpecError('expected ratio as "p/q", not %r' % (ratio,))


class DyadicIndex(namedtuple('DyadicIndex', 'j n')):
    __slots__ = ()

    def __new__(cls, j, n):
        j, n = int(j), int(n)
        if n < 0:
            raise DomainError('expected nonnegative level, not %r' % (n,))
        if not 1 <= j <= 2 ** n:
            raise DomainError('expected 1 <= j <= 2**%d, not %r' % (n, j))
        return super(DyadicIndex, cls).__new__(cls, j, n)

    @property
    def interval(self):
        return (Fraction(self.j - 1, 2 ** self.n), Fraction(self.j, 2 ** self.n))

    @property
    def length(self):
        return Fraction(1, 2 ** self.n)

    @property
    def closed_right(self):
        return self.j == 2 ** self.n

    def contains(self, x):
        a, b = self.interval
        return a <= x < b or (self.closed_right and x == b)

    def children(self):
        return (DyadicIndex(2 * self.j - 1, self.n + 1),
                DyadicIndex(2 * self.j, self.n + 1))

    def parent(self):
        if self.n == 0:
            return None
        return DyadicIndex((self.j + 1) // 2, self.n - 1)


class CantorSpec(object):
    """The middle-gap Cantor set C_xi: start from [0, 1] and remove the
    open middle part of every interval, keeping two end pieces of
    relative length *ratio*, *depth* times over.
    """
    def __init__(self, ratio, depth=0):
        self.ratio = parse_ratio(ratio)
        if not 0 < self.ratio < HALF:
            raise InvalidSpecError('expected ratio in (0, 1/2), not %s'
                                   % (self.ratio,))
        try:
            self.depth = int(depth)
        except (TypeError, ValueError):
            raise InvalidSpecError('expected integer depth, not %r' % (depth,))
        if self.depth < 0:
            raise InvalidSpecError('expected nonnegative depth, not %r'
                                   % (depth,))

    @property
    def beta(self):
        # log2 keeps powers of two exact: ratio 1/4 gives 0.5, not 0.49999
        return 1.0 / math.log2(float(1 / self.ratio))

    @property
    def gamma(self):
        return min(1.0, 2 * self.beta)

    @property
    def saturates(self):
        return 2 * self.beta > 1

    def with_depth(self, depth):
        return type(self)(self.ratio, depth)

    def __eq__(self, other):
        return (type(self) is type(other) and self.ratio == other.ratio
                and self.depth == other.depth)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((type(self), self.ratio, self.depth))

    def __repr__(self):
        cn = self.__class__.__name__
        return '%s(%r, depth=%r)' % (cn, str(self.ratio), self.depth)


def cantor_intervals(spec, level=None):
    """Returns the 2^level closed intervals of the construction, as
    (left, right) Fraction pairs in ascending order. *level* defaults
    to spec.depth.
    """
    level = spec.depth if level is None else int(level)
    if level < 0:
        raise DomainError('expected nonnegative level, not %r' % (level,))
    if 2 ** level > MAX_SURVIVOR_COUNT:
        raise ResourceLimitError('survivor count', 2 ** level,
                                 MAX_SURVIVOR_COUNT)
    xi = spec.ratio
    intervals = [(Fraction(0), ONE)]
    for _ in range(level):
        next_intervals = []
        for a, b in intervals:
            step = (b - a) * xi
            next_intervals.append((a, a + step))
            next_intervals.append((b - step, b))
        intervals = next_intervals
    return intervals


def resolution_level(ratio, depth):
    "Smallest m with ratio^m < 2^-depth."
    ratio = parse_ratio(ratio)
    cell = Fraction(1, 2 ** depth)
    m = int(depth / math.log2(float(1 / ratio)))
    while m > 0 and ratio ** (m - 1) < cell:
        m -= 1
    while ratio ** m >= cell:
        m += 1
    return m


class TreeFlowMeasure(object):
    """A measure on [0, 1] given by its masses on dyadic intervals.

    *levels* is a sequence of mappings, one per level 0..max_depth,
    from the 1-based index j to the mass of I_{j,n}. Missing indices
    have mass zero. The mappings are copied, so a flow never changes
    after construction.
    """
    def __init__(self, levels, frostman_exponent=1.0, frostman_constant=1,
                 **kwargs):
        self.label = kwargs.pop('label', None)
        self.resolution = kwargs.pop('resolution', None)
        check_kwargs(kwargs)
        if not levels:
            raise InvalidSpecError('expected at least the root level')
        self._levels = tuple(dict((int(j), m) for j, m in dict(lvl).items()
                                  if m) for lvl in levels)
        for n, lvl in enumerate(self._levels):
            for j, m in lvl.items():
                if not 1 <= j <= 2 ** n:
                    raise InvalidSpecError('index %r out of range on level %r'
                                           % (j, n))
                if m < 0:
                    raise InvalidSpecError('expected nonnegative mass, got %r'
                                           ' at %r' % (m, DyadicIndex(j, n)))
        self.frostman_exponent = float(frostman_exponent)
        if not 0 < self.frostman_exponent <= 1:
            raise InvalidSpecError('expected frostman exponent in (0, 1],'
                                   ' not %r' % (frostman_exponent,))
        self.frostman_constant = frostman_constant
        self._float_levels = None

    @property
    def max_depth(self):
        return len(self._levels) - 1

    @property
    def root_mass(self):
        return self._levels[0].get(1, 0)

    def mass(self, j, n):
        if not 0 <= n <= self.max_depth:
            raise ResourceLimitError('flow depth', n, self.max_depth)
        return self._levels[n].get(j, 0)

    def mass_of(self, index):
        return self.mass(index.j, index.n)

    def level(self, n):
        "Sorted (j, mass) pairs of the nonzero cells on level *n*."
        return sorted(self._levels[n].items())

    @property
    def masses(self):
        ret = {}
        for n, lvl in enumerate(self._levels):
            for j, m in lvl.items():
                ret[DyadicIndex(j, n)] = m
        return ret

    def _get_float_levels(self):
        if self._float_levels is None:
            self._float_levels = [dict((j, float(m)) for j, m in lvl.items())
                                  for lvl in self._levels]
        return self._float_levels

    def interval_mass(self, a, b):
        """Mass of the general interval [a, b].

        Cells inside the interval count fully, cells outside not at
        all, and leaf cells cut by an endpoint contribute in
        proportion to the covered length. Computed in floats.
        """
        a, b = float(a), float(b)
        if not 0 <= a <= b <= 1:
            raise DomainError('expected 0 <= a <= b <= 1, not [%r, %r]'
                              % (a, b))
        levels = self._get_float_levels()
        depth = self.max_depth
        total = 0.0
        stack = [(1, 0)]
        while stack:
            j, n = stack.pop()
            m = levels[n].get(j)
            if not m:
                continue
            lo, hi = math.ldexp(j - 1, -n), math.ldexp(j, -n)
            if hi <= a or lo >= b:
                continue
            if a <= lo and hi <= b:
                total += m
            elif n == depth:
                total += m * (min(b, hi) - max(a, lo)) / (hi - lo)
            else:
                stack.append((2 * j, n + 1))
                stack.append((2 * j - 1, n + 1))
        return total

    def perturbed(self, index, delta):
        "A copy with *delta* added to one cell, for fault injection."
        levels = [dict(lvl) for lvl in self._levels]
        levels[index.n][index.j] = levels[index.n].get(index.j, 0) + delta
        return type(self)(levels, self.frostman_exponent,
                          self.frostman_constant, label=self.label)

    def __repr__(self):
        cn = self.__class__.__name__
        return ('<%s label=%r depth=%r alpha=%r C=%r>'
                % (cn, self.label, self.max_depth, self.frostman_exponent,
                   self.frostman_constant))


def _sum_upward(leaves, depth):
    levels = [None] * (depth + 1)
    levels[depth] = leaves
    for n in range(depth - 1, -1, -1):
        parents = {}
        for j, m in levels[n + 1].items():
            p = (j + 1) // 2
            parents[p] = parents.get(p, 0) + m
        levels[n] = parents
    return levels


def cantor_flow(spec, **kwargs):
    """The natural measure of C_xi as a flow down to level
    ``spec.depth``.

    Survivors of the construction at resolution m (the first level
    whose pieces are shorter than a leaf cell) each carry 2^-m. A
    survivor sitting inside one leaf gives it all of its mass; one
    straddling two leaves is split by length. Parents are exact sums
    of their children. When 1/ratio is a power of two every survivor
    is itself a dyadic interval and the masses are exact.
    """
    max_depth = kwargs.pop('max_depth', MAX_FLOW_DEPTH)
    check_kwargs(kwargs)
    depth = spec.depth
    if depth > max_depth:
        raise ResourceLimitError('flow depth', depth, max_depth)
    with lab_log.debug('cantor_flow', ratio=str(spec.ratio),
                       depth=depth) as act:
        m = resolution_level(spec.ratio, depth)
        if 2 ** m > MAX_SURVIVOR_COUNT:
            raise ResourceLimitError('survivor count', 2 ** m,
                                     MAX_SURVIVOR_COUNT)
        act['resolution'] = m
        scale = 2 ** depth
        weight = Fraction(1, 2 ** m)
        leaves = {}
        for a, b in cantor_intervals(spec, m):
            k0 = math.floor(a * scale)
            k1 = min(math.floor(b * scale), scale - 1)
            if k0 == k1:
                leaves[k0 + 1] = leaves.get(k0 + 1, 0) + weight
                continue
            width = b - a
            for k in range(k0, k1 + 1):
                lo, hi = Fraction(k, scale), Fraction(k + 1, scale)
                share = min(b, hi) - max(a, lo)
                if share > 0:
                    leaves[k + 1] = leaves.get(k + 1, 0) + weight * share / width
        levels = _sum_upward(leaves, depth)
        act['leaf_cells'] = len(leaves)
        act.success('built flow with {leaf_cells} nonzero leaves'
                    ' at resolution {resolution}')
    return TreeFlowMeasure(levels, frostman_exponent=spec.beta,
                           frostman_constant=1,
                           label='cantor:%s' % spec.ratio, resolution=m)


def lebesgue_flow(depth, **kwargs):
    max_depth = kwargs.pop('max_depth', MAX_FLOW_DEPTH)
    check_kwargs(kwargs)
    depth = int(depth)
    if depth > max_depth:
        raise ResourceLimitError('flow depth', depth, max_depth)
    levels = [dict((j, Fraction(1, 2 ** n)) for j in range(1, 2 ** n + 1))
              for n in range(depth + 1)]
    return TreeFlowMeasure(levels, frostman_exponent=1.0,
                           frostman_constant=1, label='lebesgue')


FlowReport = namedtuple('FlowReport', ('max_violation worst_index checked'
                                       ' root_mass passed'))


def flow_check(flow, tolerance=FLOW_TOLERANCE):
    """Checks that every vertex carries the sum of its two children and
    that the root carries at most unit mass. Never raises; the report
    says what failed.
    """
    worst, worst_index, checked = 0.0, None, 0
    for n in range(flow.max_depth):
        upper = flow._levels[n]
        lower = flow._levels[n + 1]
        parents = set(upper)
        parents.update((j + 1) // 2 for j in lower)
        for j in sorted(parents):
            diff = upper.get(j, 0) - lower.get(2 * j - 1, 0) - lower.get(2 * j, 0)
            diff = abs(float(diff))
            checked += 1
            if diff > worst:
                worst, worst_index = diff, DyadicIndex(j, n)
    root = flow.root_mass
    passed = worst <= tolerance and root <= 1 + tolerance
    return FlowReport(worst, worst_index, checked, root, passed)


FrostmanReport = namedtuple('FrostmanReport',
                            ('alpha constant dyadic_worst_ratio'
                             ' dyadic_worst_index general_worst_ratio'
                             ' general_worst_interval samples passed'))


def frostman_check(flow, alpha, C=1, samples=10000, seed=0, tolerance=1e-9):
    """Ratios mass(I) / (C |I|^alpha) over every stored dyadic cell, and
    mass(I) / (3 C |I|^alpha) over *samples* seeded random intervals
    with lengths log-uniform between one leaf cell and 1.

    A ratio above 1 (beyond *tolerance*) fails the check.
    """
    alpha = float(alpha)
    if not 0 < alpha <= 1:
        raise DomainError('expected 0 < alpha <= 1, not %r' % (alpha,))
    C = float(C)
    dyadic_worst, dyadic_index = 0.0, None
    for n, lvl in enumerate(flow._get_float_levels()):
        bound = C * 2.0 ** (-n * alpha)
        for j in sorted(lvl):
            ratio = lvl[j] / bound
            if ratio > dyadic_worst:
                dyadic_worst, dyadic_index = ratio, DyadicIndex(j, n)

    general_worst, general_interval = 0.0, None
    if samples:
        rng = make_rng(seed, 'frostman')
        starts = rng.random(samples)
        lengths = 2.0 ** (-flow.max_depth * rng.random(samples))
        for a, length in zip(starts.tolist(), lengths.tolist()):
            if a + length > 1:
                a = 1.0 - length
            b = a + length
            mass = flow.interval_mass(a, b)
            ratio = mass / (FROSTMAN_COVER_FACTOR * C * (b - a) ** alpha)
            if ratio > general_worst:
                general_worst, general_interval = ratio, (a, b)

    passed = (dyadic_worst <= 1 + tolerance
              and general_worst <= 1 + tolerance)
    return FrostmanReport(alpha, C, dyadic_worst, dyadic_index,
                          general_worst, general_interval, samples, passed)


HullReport = namedtuple('HullReport', ('checked exact_mass_matches'
                                       ' power_matches worst_ratio passed'))


def dyadic_hull(a, b, max_level):
    "Deepest dyadic interval, at most *max_level*, containing [a, b]."
    hull = DyadicIndex(1, 0)
    for level in range(1, max_level + 1):
        scale = 2 ** level
        k_a = math.floor(a * scale)
        k_b = math.ceil(b * scale) - 1
        if k_a != k_b:
            break
        hull = DyadicIndex(k_a + 1, level)
    return hull


def survivor_hull_check(flow, spec, max_level=None):
    """Compares the mass of the dyadic hull of every survivor against
    the survivor's own mass 2^-k and against |hull|^beta, for every
    construction level k whose hulls fit in the flow.

    Masses are compared exactly. When 1/ratio is a power of two each
    hull is the survivor itself and both comparisons are equalities.
    """
    beta = spec.beta
    if max_level is None:
        max_level = resolution_level(spec.ratio, flow.max_depth) - 1
    checked = exact = power = 0
    worst = 0.0
    for k in range(0, max_level + 1):
        target = Fraction(1, 2 ** k)
        for a, b in cantor_intervals(spec, k):
            hull = dyadic_hull(a, b, flow.max_depth)
            mass = flow.mass_of(hull)
            checked += 1
            if mass == target:
                exact += 1
            ratio = float(mass) / float(hull.length) ** beta
            if abs(ratio - 1.0) <= 1e-12:
                power += 1
            worst = max(worst, ratio)
    passed = exact == checked and worst <= 1 + 1e-12
    return HullReport(checked, exact, power, worst, passed)


class AtomicMeasure(object):
    """A finite list of atoms (t, c) with nonnegative weights c.

    Positions are sorted on construction. Atoms sharing a position are
    merged by adding weights, unless *merge* is False, in which case a
    repeated position is an error.
    """
    def __init__(self, positions, weights, merge=True):
        positions = np.asarray(positions, dtype=float).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        if positions.shape != weights.shape:
            raise DomainError('expected as many weights as positions, got'
                              ' %r and %r' % (weights.size, positions.size))
        if not (np.all(np.isfinite(positions))
                and np.all(np.isfinite(weights))):
            raise DomainError('expected finite atoms')
        if np.any(weights < 0):
            raise DomainError('expected nonnegative weights')
        order = np.argsort(positions, kind='stable')
        positions, weights = positions[order], weights[order]
        if positions.size > 1 and np.any(np.diff(positions) == 0):
            if not merge:
                raise DomainError('expected distinct atom positions')
            positions, inverse = np.unique(positions, return_inverse=True)
            weights = np.bincount(inverse, weights=weights,
                                  minlength=positions.size)
        self.positions = positions
        self.weights = weights
        self.positions.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def total_mass(self):
        return float(np.sum(self.weights))

    @property
    def atoms(self):
        return list(zip(self.positions.tolist(), self.weights.tolist()))

    def support(self):
        keep = self.weights > 0
        return type(self)(self.positions[keep], self.weights[keep])

    def interval_mass(self, a, b, closed_right=None):
        """Total weight in [a, b), or in [a, b] when *closed_right* is
        true. By default the interval is closed exactly when b is 1.
        """
        if closed_right is None:
            closed_right = (b == 1)
        lo = np.searchsorted(self.positions, a, side='left')
        side = 'right' if closed_right else 'left'
        hi = np.searchsorted(self.positions, b, side=side)
        if hi <= lo:
            return 0.0
        return float(np.sum(self.weights[lo:hi]))

    def cumulative(self):
        "mu[0, t_j] for every atom position t_j."
        return np.cumsum(self.weights)

    def __len__(self):
        return int(self.positions.size)

    def __repr__(self):
        cn = self.__class__.__name__
        return '<%s atoms=%r total_mass=%r>' % (cn, len(self), self.total_mass)


def n_approximation(flow, n):
    """theta_n: an atom of mass mass(I_{j,n}) at every right endpoint
    j/2^n, zero-mass atoms included so that atom j sits at index j-1.
    """
    n = int(n)
    if n < 0:
        raise DomainError('expected nonnegative level, not %r' % (n,))
    if n > flow.max_depth:
        raise ResourceLimitError('approximation level', n, flow.max_depth)
    N = 2 ** n
    weights = np.zeros(N)
    for j, m in flow.level(n):
        weights[j - 1] = float(m)
    positions = np.arange(1, N + 1, dtype=float) / N
    return AtomicMeasure(positions, weights)


def interval_mass(measure, a, b):
    return measure.interval_mass(a, b)


def three_cover(a, b):
    """Three dyadic intervals of a common length l, |I|/2 < l <= |I|,
    whose union contains [a, b]. Level 0 has a single interval, which
    is then repeated.
    """
    a, b = Fraction(a), Fraction(b)
    if not 0 <= a <= b <= 1:
        raise DomainError('expected 0 <= a <= b <= 1, not [%s, %s]' % (a, b))
    width = b - a
    if width <= 0:
        raise DomainError('expected interval of positive length, not [%s, %s]'
                          % (a, b))
    k = 0
    while Fraction(1, 2 ** k) > width:
        k += 1
    count = 2 ** k
    first = min(math.floor(a * count), count - 1)
    first = max(0, min(first, count - 3))
    cover = [DyadicIndex(min(first + i, count - 1) + 1, k) for i in range(3)]
    return tuple(cover)


def dump_flow(flow, fileobj):
    fileobj.write(u'# flow α=%r C=%s depth=%d\n'
                  % (flow.frostman_exponent, flow.frostman_constant,
                     flow.max_depth))
    for n in range(flow.max_depth + 1):
        for j, m in flow.level(n):
            m = Fraction(m)
            fileobj.write(u'%d %d %d/%d\n' % (n, j, m.numerator, m.denominator))


def load_flow(fileobj):
    header = fileobj.readline().split()
    if len(header) != 5 or header[:2] != ['#', 'flow']:
        raise InvalidSpecError('expected "# flow" header, not %r' % (header,))
    fields = dict(h.split('=', 1) for h in header[2:])
    depth = int(fields['depth'])
    levels = [{} for _ in range(depth + 1)]
    for line in fileobj:
        line = line.strip()
        if not line:
            continue
        n, j, m = line.split()
        levels[int(n)][int(j)] = Fraction(m)
    return TreeFlowMeasure(levels, frostman_exponent=float(fields[u'α']),
                           frostman_constant=Fraction(fields['C']))


def dump_atoms(measure, fileobj):
    fileobj.write(u't,weight\n')
    for t, c in measure.atoms:
        fileobj.write(u'%.17g,%.17g\n' % (t, c))


def load_atoms(fileobj):
    header = fileobj.readline().strip()
    if header != 't,weight':
        raise InvalidSpecError('expected "t,weight" header, not %r' % (header,))
    positions, weights = [], []
    for line in fileobj:
        line = line.strip()
        if not line:
            continue
        t, c = line.split(',')
        positions.append(float(t))
        weights.append(float(c))
    return AtomicMeasure(positions, weights)


def flow_to_text(flow):
    buf = io.StringIO()
    dump_flow(flow, buf)
    return buf.getvalue()
