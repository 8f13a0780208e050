# -*- coding: utf-8 -*-
"""Dimension estimates for Cantor sets and their walk images.

Three estimators sit side by side: box counting on image points,
the growth of the off-diagonal energy of theta_n (capacity), and the
decay exponent of the image measure's transform. salem_report() runs
them all against the target min(1, 2 beta).
"""

from __future__ import absolute_import

import math
from fractions import Fraction
from collections import namedtuple

import numpy as np

from salemlab.common import (InvalidSpecError,
                             DomainError,
                             ResourceLimitError,
                             MAX_FLOW_DEPTH,
                             MAX_WALK_LEVEL)
from salemlab.dyadic import (MAX_SURVIVOR_COUNT,
                             cantor_intervals,
                             cantor_flow,
                             n_approximation)
from salemlab.fitting import loglog_fit, linear_fit
from salemlab.log import lab_log, check
from salemlab.spectral import (DEFAULT_U_LO,
                               energy_offdiag,
                               decay_pipeline)
from salemlab.walks import (WalkPath,
                            RefinementLadder,
                            build_ladder,
                            constant_word,
                            alternating_word)


DEFAULT_CAPACITY_DEPTHS = (6, 8, 10, 12, 14)
DEFAULT_ALPHA_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))
GROWTH_THRESHOLD = 0.02 * math.log(2)
BOX_TOLERANCE = 0.15
FOURIER_TOLERANCE = 0.2
FOURIER_BOX_SLACK = 0.1
LADDER_SPAN = 6
CAPACITY_ATOM_BUDGET = 2048

WORD_KINDS = ('random', 'ones', 'alt')


def deepest_image_level(spec, N):
    "Largest m with ratio^m >= 1/N, capped by the survivor budget."
    cell = Fraction(1, int(N))
    m = 0
    while spec.ratio ** (m + 1) >= cell:
        m += 1
    return min(m, MAX_SURVIVOR_COUNT.bit_length() - 1)


def image_points(path, spec, m):
    """One image point per survivor J of level *m*: the walk value at
    the grid point j/N nearest to the middle of J.

    Every survivor must contain a grid point, so ratio^m >= 1/N.
    """
    m = int(m)
    if m < 0:
        raise DomainError('expected nonnegative level, not %r' % (m,))
    if path.level is not None and path.level > MAX_WALK_LEVEL:
        raise ResourceLimitError('walk level', path.level, MAX_WALK_LEVEL)
    N = path.N
    if spec.ratio ** m < Fraction(1, N):
        raise DomainError('level %d is too deep for a walk of length %d,'
                          ' use at most %d' % (m, N, deepest_image_level(spec,
                                                                         N)))
    ks = []
    for a, b in cantor_intervals(spec, m):
        k = math.floor((a + b) * N / 2 + Fraction(1, 2))
        k = max(math.ceil(a * N), min(k, math.floor(b * N)))
        ks.append(k)
    return path.partial_sums[np.array(ks, dtype=np.int64)] / path.scale


BoxCount = namedtuple('BoxCount', 'dimension r_squared scales counts')


def default_scales(points, spec, m):
    """diam 2^-k for k = 1..K, where diam 2^-K is about the image size
    ratio^((m-1)/2) of a level-(m-1) survivor. Finer scales only split
    the last pairs of points, so counts there saturate.
    """
    points = np.asarray(points, dtype=float)
    diam = float(np.max(points) - np.min(points)) if points.size else 0.0
    if diam <= 0:
        diam = 1.0
    piece = float(spec.ratio) ** (max(0, int(m) - 1) / 2.0)
    octaves = int(math.floor(math.log2(diam / piece)))
    return [math.ldexp(diam, -k) for k in range(1, max(4, octaves) + 1)]


def box_count(points, scales):
    """Occupied boxes per scale and the slope of log N(delta) against
    log(1/delta). Boxes are anchored at the smallest point.
    """
    points = np.asarray(points, dtype=float).ravel()
    scales = sorted(float(s) for s in scales)
    if not points.size or not np.all(np.isfinite(points)):
        raise DomainError('expected a nonempty set of finite points')
    if len(scales) < 4 or scales[0] <= 0 or scales[-1] / scales[0] < 8:
        raise InvalidSpecError('expected at least 4 positive scales over'
                               ' 3 octaves, not %r' % (scales,))
    shifted = points - np.min(points)
    counts = [int(np.unique(np.floor(shifted / s)).size) for s in scales]
    with lab_log.debug('box_count', points=points.size,
                       scales=len(scales)) as act:
        if not np.any(shifted):
            act.warn('all {points} points coincide, dimension is 0')
            act.success('degenerate point set')
            return BoxCount(0.0, 1.0, scales, counts)
        fit = loglog_fit([1 / s for s in scales], counts)
        act['dimension'] = fit.slope
        act.success('box dimension {dimension}')
    return BoxCount(fit.slope, fit.r_squared, scales, counts)


CapacityReport = namedtuple('CapacityReport', ('dimension alphas slopes'
                                               ' growing depths boundary'))


def _energy_slope(energies, depths):
    # growth per level of the energy increments between depths
    incs = np.diff(np.asarray(energies))
    mids = np.asarray(depths[1:], dtype=float)
    keep = incs > 0
    if np.count_nonzero(keep) < 2:
        return -np.inf
    return linear_fit(mids[keep], np.log(incs[keep]))[0]


def capacity_dim(flow, depths=DEFAULT_CAPACITY_DEPTHS,
                 alpha_grid=DEFAULT_ALPHA_GRID, positions=None):
    """The crossover exponent between bounded and growing off-diagonal
    energy of theta_n.

    For each alpha the increments of energy_offdiag(theta_n, alpha)
    along *depths* are regressed in log scale against n. Their slope
    is near (alpha - dim) log 2: negative while the energy converges,
    positive once it diverges. The crossover is interpolated where the
    slope passes GROWTH_THRESHOLD. Without a crossover the grid
    boundary on the far side is returned and *boundary* is set.

    *positions* replaces the depths as regressors, for depths that
    stand for fractional levels (see capacity_depths()).
    """
    depths = [int(d) for d in depths]
    if positions is None:
        positions = depths
    if len(positions) != len(depths):
        raise InvalidSpecError('expected one position per depth')
    pairs = sorted(zip(depths, [float(p) for p in positions]))
    depths, positions = [d for d, _ in pairs], [p for _, p in pairs]
    alphas = sorted(float(a) for a in alpha_grid)
    if len(depths) < 3:
        raise InvalidSpecError('expected at least 3 depths, not %r'
                               % (depths,))
    if not alphas or alphas[0] <= 0 or alphas[-1] >= 1:
        raise InvalidSpecError('expected alpha grid inside (0, 1), not %r'
                               % (alphas,))
    if depths[-1] > flow.max_depth:
        raise ResourceLimitError('capacity depth', depths[-1], flow.max_depth)
    with lab_log.info('capacity_dim', depths=depths,
                      alphas=len(alphas)) as act:
        thetas = [n_approximation(flow, n) for n in depths]
        slopes = []
        for alpha in alphas:
            energies = [energy_offdiag(theta, alpha) for theta in thetas]
            if not any(energies):
                act.warn('zero energy at alpha {alpha}, degenerate flow',
                         alpha=alpha)
                act['dimension'] = alphas[0]
                act.success('degenerate flow, capacity dimension {dimension}')
                return CapacityReport(alphas[0], alphas, [], [], depths, True)
            slopes.append(_energy_slope(energies, positions))
        growing = [s > GROWTH_THRESHOLD for s in slopes]
        dim, boundary = None, False
        for i in reversed(range(len(alphas) - 1)):
            if not growing[i] and growing[i + 1]:
                s0, s1 = slopes[i], slopes[i + 1]
                if math.isinf(s0):
                    dim = alphas[i]
                else:
                    frac = (GROWTH_THRESHOLD - s0) / (s1 - s0)
                    dim = alphas[i] + frac * (alphas[i + 1] - alphas[i])
                break
        if dim is None:
            boundary = True
            dim = alphas[0] if growing[0] else alphas[-1]
            act.warn('no crossover on the alpha grid, using {dimension}',
                     dimension=dim)
        act['dimension'] = dim
        act.success('capacity dimension {dimension}')
    return CapacityReport(dim, alphas, slopes, growing, depths, boundary)


def capacity_depths(spec, max_depth=MAX_FLOW_DEPTH, count=5,
                    atom_budget=CAPACITY_ATOM_BUDGET):
    """Depths n_k = ceil(k log2(1/ratio)) for the last *count*
    construction levels k that fit in *max_depth* and *atom_budget*,
    with k log2(1/ratio) as their regression positions. At n_k every
    level-k survivor holds whole level-(k+1) survivors, so theta_n
    moves one construction level per step.
    """
    depths, positions = [], []
    step = math.log2(float(1 / spec.ratio))
    k = 1
    while 2 ** (k + 1) <= atom_budget:
        target = spec.ratio ** k
        n = 0
        while Fraction(1, 2 ** n) > target:
            n += 1
        if n > max_depth:
            break
        depths.append(n)
        positions.append(k * step)
        k += 1
    if len(depths) < 3:
        raise InvalidSpecError('expected at least 3 construction depths within'
                               ' depth %d, not %r' % (max_depth, depths))
    return depths[-count:], positions[-count:]


def cantor_capacity(spec, alpha_grid=DEFAULT_ALPHA_GRID,
                    max_depth=MAX_FLOW_DEPTH):
    "capacity_dim() of C_ratio along its construction depths."
    depths, positions = capacity_depths(spec, max_depth)
    flow = cantor_flow(spec.with_depth(depths[-1]))
    return capacity_dim(flow, depths, alpha_grid, positions=positions)


def cantor_points(spec, m):
    "Left endpoints of the 2^m survivors of level m."
    return np.array([float(a) for a, _ in cantor_intervals(spec, m)])


CantorDims = namedtuple('CantorDims', 'ratio beta box capacity')


def cantor_dims(spec, m=12):
    """Box counting on the level-m survivors and the capacity crossover
    of the natural measure, both estimating beta.
    """
    points = cantor_points(spec, m)
    finest = int(math.floor(m * math.log2(float(1 / spec.ratio)))) - 3
    scales = [math.ldexp(1.0, -k) for k in range(2, max(6, finest) + 1)]
    box = box_count(points, scales)
    return CantorDims(str(spec.ratio), spec.beta, box, cantor_capacity(spec))


class DimensionReport(namedtuple('DimensionReport',
                                 ('ratio n seed word target_beta target_gamma'
                                  ' box_dim box_r_squared capacity_dim'
                                  ' fourier_exponent fourier_dim'
                                  ' fourier_r_squared salem_gap valid_u_max'
                                  ' beyond_validity image_level passed'))):
    """Estimates of one run. The Fourier figures are those achieved by
    the canonical image measure, so fourier_dim (twice the decay
    exponent) is an achieved exponent, not a supremum over measures.
    """
    __slots__ = ()

    def to_dict(self):
        return self._asdict()


def _clip(val):
    return min(1.0, max(0.0, val))


def report_ladder(word, seed, n):
    "The walk ladder of a salem_report run for each *word* kind."
    if word == 'random':
        return build_ladder(seed, max(1, n - LADDER_SPAN), n)
    if word == 'ones':
        path = WalkPath(constant_word(2 ** n))
    elif word == 'alt':
        path = WalkPath(alternating_word(2 ** n))
    else:
        raise InvalidSpecError('expected word kind in %r, not %r'
                               % (WORD_KINDS, word))
    return RefinementLadder(seed, n, [path], [])


SalemRun = namedtuple('SalemRun', 'report decay box capacity')


def salem_run(spec, seed, n, u_max, u_lo=DEFAULT_U_LO, word='random',
              capacity_depths=None, strict=False, threads=None):
    """Cantor flow, walk, decay fit, image points, box count and
    capacity for one (spec, seed, n), checked against min(1, 2 beta).

    Returns the DimensionReport together with the decay run, the box
    count and the capacity report it was assembled from.
    """
    n = int(n)
    if not 1 <= n <= MAX_WALK_LEVEL:
        raise ResourceLimitError('walk level', n, MAX_WALK_LEVEL)
    with lab_log.info('salem_report', ratio=str(spec.ratio), n=n,
                      seed=seed, word=word) as act:
        flow = cantor_flow(spec.with_depth(n))
        ladder = report_ladder(word, seed, n)
        run = decay_pipeline(ladder, flow, u_max, u_lo=u_lo, strict=strict,
                             threads=threads)
        m = deepest_image_level(spec, 2 ** n)
        points = image_points(ladder.finest, spec, m)
        box = box_count(points, default_scales(points, spec, m))
        if capacity_depths is None:
            capacity = cantor_capacity(spec)
        else:
            capacity = capacity_dim(flow, capacity_depths)

        gamma = spec.gamma
        box_dim = _clip(box.dimension)
        fourier_exp = max(0.0, run.fit.exponent)
        fourier_dim = _clip(2 * fourier_exp)
        ok = check('fourier_below_box',
                   fourier_dim <= box_dim + FOURIER_BOX_SLACK,
                   'fourier dimension {fourier_dim} against box {box_dim}',
                   fourier_dim=fourier_dim, box_dim=box_dim)
        ok &= check('box_near_target',
                    abs(box_dim - gamma) <= BOX_TOLERANCE,
                    'box dimension {box_dim} against {gamma}',
                    box_dim=box_dim, gamma=gamma)
        ok &= check('fourier_near_target',
                    abs(fourier_dim - gamma) <= FOURIER_TOLERANCE,
                    'fourier dimension {fourier_dim} against {gamma}',
                    fourier_dim=fourier_dim, gamma=gamma)
        act['box_dim'], act['fourier_dim'] = box_dim, fourier_dim
        act.success('box {box_dim}, fourier {fourier_dim}')
    report = DimensionReport(str(spec.ratio), n, seed, word, spec.beta, gamma,
                             box_dim, box.r_squared,
                             _clip(capacity.dimension), fourier_exp,
                             fourier_dim, run.fit.r_squared,
                             abs(fourier_dim - box_dim), run.valid_u_max,
                             run.beyond_validity, m, ok)
    return SalemRun(report, run, box, capacity)


def salem_report(spec, seed, n, u_max, **kwargs):
    "The DimensionReport of salem_run()."
    return salem_run(spec, seed, n, u_max, **kwargs).report
