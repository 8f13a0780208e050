# -*- coding: utf-8 -*-
"""Fourier transforms of walk images of atomic measures.

Everything here works on atomic measures. The image of theta_n under
a walk S_n is again atomic, with atoms at S_n(j/N), and its transform
is the finite sum

  nu^(u) = sum_j c(j) exp(i u S_n(j/N))

evaluated directly, in index order, with numpy's pairwise summation.
Only u >= 0 is ever stored since the measures are real.

The atoms of a walk image all sit on the lattice Z/sqrt(N), so its
transform is a trigonometric polynomial of period 2 pi sqrt(N).
lattice_transform() evaluates it exactly on a dense equispaced grid
with one inverse FFT, which is how decay_pipeline() samples by
default.

Monte Carlo estimates over random words are split into chunks whose
size depends on the word length alone (see salemlab.workers), and the
per-chunk MomentAccumulators are merged in chunk order.
"""

from __future__ import absolute_import

import math
from fractions import Fraction
from collections import namedtuple

import numpy as np

from salemlab.common import (InvalidSpecError,
                             DomainError,
                             ResourceLimitError,
                             RegimeError,
                             ValidityError,
                             MAX_EXACT_WORD_LENGTH,
                             MOMENT_CONSTANT,
                             GEOMETRIC_CONSTANT,
                             FROSTMAN_COVER_FACTOR,
                             SQRT2,
                             is_power_of_two)
from salemlab.accumulators import DyadicBlockEnvelope
from salemlab.dyadic import AtomicMeasure, n_approximation
from salemlab.fitting import loglog_fit
from salemlab.log import lab_log, check
from salemlab.moment import MomentAccumulator
from salemlab.walks import brownian_rate
from salemlab.workers import make_rng, trial_chunks, map_ordered


__all__ = ['SpectrumSample', 'MomentEstimate', 'TailEstimate', 'DecayFit',
           'pushout_measure', 'transform_at', 'transform_grid',
           'lattice_transform', 'effective_atoms', 'peak_factor', 'fit_window',
           'char_exact',
           'char_enumerated', 'moment_exact_small', 'q1_double_sum',
           'moment_mc', 'tail_mc', 'tail_exact_small', 'parts_lemma_eval',
           'geometric_sum_bound', 'energy_offdiag',
           'energy_fourier_crosscheck', 'decay_fit', 'error_chain',
           'valid_u_max', 'decay_pipeline', 'thm42_grid', 'parse_grid']


VALIDITY_KAPPA = 0.1
DEFAULT_U_LO = 8.0
MIN_TRIALS = 100
ZERO_BLOCK = 0.0
# lattice grid points per unit of atom spread and per 2 pi
DEFAULT_OVERSAMPLE = 8
MAX_LATTICE_SIZE = 2 ** 24
# a normalized fit stops at the first block whose level is within
# this many atom floors of the floor
FLOOR_STOP = 0.5

# elements per dense (rows x atoms) block in the grid and energy kernels
_BLOCK_ELEMENTS = 2 ** 20


EnvelopeBlock = namedtuple('EnvelopeBlock', ('lo hi sup argmax count'
                                             ' uncertainty mean_square'))


class SpectrumSample(object):
    """Transform values on a sorted grid of u >= 0, together with the
    dyadic-block envelope of their moduli.

    *uncertainty*, when given, is a per-point a-priori error that is
    carried into the envelope: each block records the uncertainty at
    its argmax.

    *spread* (the diameter of the transformed measure's support) and
    *effective_atoms* ((sum c)^2 / sum c^2) describe the measure behind
    the values. A normalized decay_fit() needs them; without them it
    treats every sample as independent and uses no atom floor.
    """
    def __init__(self, grid, values, valid_u_max=None, uncertainty=None,
                 total_mass=None, label=None, spread=None,
                 effective_atoms=None):
        grid = np.asarray(grid, dtype=float).ravel()
        values = np.asarray(values, dtype=complex).ravel()
        if not grid.size:
            raise DomainError('expected nonempty frequency grid')
        if grid.shape != values.shape:
            raise DomainError('expected one value per frequency, got %r and %r'
                              % (values.size, grid.size))
        if uncertainty is None:
            uncertainty = np.zeros(grid.size)
        uncertainty = np.asarray(uncertainty, dtype=float).ravel()
        if uncertainty.shape != grid.shape:
            raise DomainError('expected one uncertainty per frequency')
        self.grid = grid
        self.values = values
        self.uncertainty = uncertainty
        self.valid_u_max = valid_u_max
        self.total_mass = total_mass
        self.label = label
        self.spread = spread
        self.effective_atoms = effective_atoms
        self.envelope = _envelope(grid, np.abs(values), uncertainty)

    @property
    def abs(self):
        return np.abs(self.values)

    @property
    def floor(self):
        """sum c^2, the mean of |nu^|^2 at frequencies that resolve every
        atom, or 0.0 when unknown.
        """
        if not self.effective_atoms or self.total_mass is None:
            return 0.0
        return self.total_mass ** 2 / float(self.effective_atoms)

    @property
    def u_range(self):
        return float(self.grid[0]), float(self.grid[-1])

    def to_rows(self):
        "(u, re, im, abs) per grid point."
        return list(zip(self.grid.tolist(), self.values.real.tolist(),
                        self.values.imag.tolist(), self.abs.tolist()))

    def to_dict(self):
        return {'label': self.label,
                'points': int(self.grid.size),
                'u_range': list(self.u_range),
                'total_mass': self.total_mass,
                'spread': self.spread,
                'effective_atoms': self.effective_atoms,
                'valid_u_max': self.valid_u_max,
                'envelope': [b._asdict() for b in self.envelope]}

    def __len__(self):
        return int(self.grid.size)

    def __repr__(self):
        cn = self.__class__.__name__
        return ('<%s points=%r u_range=%r blocks=%r>'
                % (cn, len(self), self.u_range, len(self.envelope)))


def _envelope(grid, moduli, uncertainty):
    env = DyadicBlockEnvelope()
    env.add_array(grid, moduli)
    ret = []
    for lo, hi, sup, argmax, count, mean_sq in env.get_results():
        err = float(uncertainty[np.searchsorted(grid, argmax)])
        ret.append(EnvelopeBlock(lo, hi, sup, argmax, count, err, mean_sq))
    return ret


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float).ravel()
    if not grid.size:
        raise DomainError('expected nonempty frequency grid')
    if not np.all(np.isfinite(grid)):
        raise DomainError('expected finite frequencies')
    if np.any(grid < 0):
        raise DomainError('expected nonnegative frequencies')
    if np.any(np.diff(grid) < 0):
        raise DomainError('expected sorted frequency grid')
    return grid


def pushout_measure(path, theta, tolerance=1e-9):
    """The image of *theta* under the walk: an atom of weight c(j) at
    S_n(j/N) for each atom (j/N, c(j)). Atoms landing on the same
    point are merged by their integer partial sum, so merging is exact.
    """
    sums, weights = _lattice_atoms(path, theta, tolerance)
    keys, inverse = np.unique(sums, return_inverse=True)
    weights = np.bincount(inverse, weights=weights, minlength=keys.size)
    return AtomicMeasure(keys / path.scale, weights)


def _lattice_atoms(path, theta, tolerance=1e-9):
    "Integer partial sums S_n(j/N) sqrt(N) and weights of theta's atoms."
    N = path.N
    support = theta.support()
    scaled = support.positions * N
    idx = np.rint(scaled)
    if np.any(np.abs(scaled - idx) > tolerance) \
            or np.any(idx < 0) or np.any(idx > N):
        raise DomainError('expected atoms on the grid j/%d' % (N,))
    return path.partial_sums[idx.astype(np.int64)], support.weights


def effective_atoms(mu):
    "(sum c)^2 / sum c^2, the number of equal atoms with the same floor."
    sq = float(np.sum(mu.weights ** 2))
    if not sq:
        return 0.0
    return float(np.sum(mu.weights)) ** 2 / sq


def lattice_transform(path, theta, u_lo, u_hi, oversample=DEFAULT_OVERSAMPLE,
                      label=None):
    """The transform of the image of *theta* under *path* at every
    point of the grid u_k = 2 pi sqrt(N) k / M inside [u_lo, u_hi].

    M is the first power of two at or above *oversample* times the
    span of the atoms in lattice steps, so consecutive samples are at
    most pi / (4 spread) apart for the default oversample and narrow
    peaks are not stepped over. Values beyond the period 2 pi sqrt(N)
    repeat exactly.
    """
    u_lo, u_hi = float(u_lo), float(u_hi)
    if not 0 <= u_lo <= u_hi or not math.isfinite(u_hi):
        raise DomainError('expected 0 <= u_lo <= u_hi, not %r, %r'
                          % (u_lo, u_hi))
    if int(oversample) < 1:
        raise InvalidSpecError('expected oversample >= 1, not %r'
                               % (oversample,))
    sums, weights = _lattice_atoms(path, theta)
    if not sums.size:
        raise DomainError('expected a measure with positive mass')
    base = int(np.min(sums))
    span = int(np.max(sums)) - base
    size = 1
    while size < int(oversample) * (span + 1):
        size *= 2
    if size > MAX_LATTICE_SIZE:
        raise ResourceLimitError('lattice transform size', size,
                                 MAX_LATTICE_SIZE)
    step = 2 * math.pi * path.scale / size
    ks = np.arange(int(math.ceil(u_lo / step)),
                   int(math.floor(u_hi / step)) + 1, dtype=np.int64)
    if not ks.size:
        raise DomainError('expected a grid point in [%r, %r], step is %r'
                          % (u_lo, u_hi, step))
    with lab_log.debug('lattice_transform', size=size, span=span,
                       points=ks.size) as act:
        cells = np.bincount(sums - base, weights=weights, minlength=size)
        full = np.fft.ifft(cells) * size
        # the atoms were shifted by base lattice steps
        turns = (ks * base) % size
        values = full[ks % size] * np.exp(2j * math.pi * turns / size)
        act.success('{points} frequencies from a size {size} lattice')
    nu = pushout_measure(path, theta)
    return SpectrumSample(ks * step, values, total_mass=nu.total_mass,
                          label=label, spread=span / path.scale,
                          effective_atoms=effective_atoms(nu))


def transform_at(nu, u):
    u = float(u)
    if not math.isfinite(u):
        raise DomainError('expected finite frequency, not %r' % (u,))
    return complex(np.sum(nu.weights * np.exp(1j * u * nu.positions)))


def _transform_rows(chunk, positions, weights):
    phases = np.exp(1j * np.outer(chunk, positions))
    return (weights * phases).sum(axis=1)


def transform_grid(nu, grid, threads=None, label=None):
    """transform_at over a whole grid. Rows are computed in blocks of a
    size fixed by the number of atoms, so values do not depend on
    *threads*.
    """
    grid = _check_grid(grid)
    rows = max(1, _BLOCK_ELEMENTS // max(1, len(nu)))
    chunks = [grid[i:i + rows] for i in range(0, grid.size, rows)]
    with lab_log.debug('transform_grid', points=grid.size,
                       atoms=len(nu)) as act:
        parts = map_ordered(lambda c: _transform_rows(c, nu.positions,
                                                      nu.weights),
                            chunks, threads)
        act.success('{points} frequencies over {atoms} atoms')
    spread = float(nu.positions[-1] - nu.positions[0]) if len(nu) else 0.0
    return SpectrumSample(grid, np.concatenate(parts),
                          total_mass=nu.total_mass, label=label,
                          spread=spread, effective_atoms=effective_atoms(nu))


def char_exact(u, N, h):
    "E[exp(i u S_n(h/N))] = cos(u/sqrt(N))^h."
    N, h = int(N), int(h)
    if not 1 <= h <= N:
        raise DomainError('expected 1 <= h <= N=%d, not %r' % (N, h))
    return math.cos(u / math.sqrt(N)) ** h


def _all_steps(length):
    if length > MAX_EXACT_WORD_LENGTH:
        raise ResourceLimitError('exhaustive word length', length,
                                 MAX_EXACT_WORD_LENGTH)
    codes = np.arange(2 ** length, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(length)) & 1
    return (2 * bits - 1).astype(np.int32)


def char_enumerated(u, N, h):
    """The average of exp(i u S_n(h/N)) over all 2^h sign words, the
    oracle for char_exact.
    """
    N, h = int(N), int(h)
    if not 1 <= h <= N:
        raise DomainError('expected 1 <= h <= N=%d, not %r' % (N, h))
    ends = _all_steps(h).sum(axis=1)
    return complex(np.mean(np.exp(1j * u * ends / math.sqrt(N))))


def _dense_weights(theta, n):
    N = 2 ** int(n)
    if len(theta) != N:
        raise DomainError('expected %d atoms for level %d, not %d'
                          % (N, n, len(theta)))
    expected = np.arange(1, N + 1) / float(N)
    if not np.array_equal(theta.positions, expected):
        raise DomainError('expected atoms at j/%d, j = 1..%d' % (N, N))
    return theta.weights


def _support(theta, n):
    "Indices j-1 and weights of the nonzero atoms of theta_n."
    weights = _dense_weights(theta, n)
    idx = np.nonzero(weights)[0]
    return idx, weights[idx]


def _exhaustive_moduli(theta, n, u):
    N = 2 ** int(n)
    idx, w = _support(theta, n)
    sums = np.cumsum(_all_steps(N), axis=1)[:, idx]
    return np.abs(_transform_sums(sums, w, u, math.sqrt(N)))


def _transform_sums(sums, weights, u, scale):
    return (weights * np.exp(1j * u * sums / scale)).sum(axis=1)


def moment_exact_small(n, q, u, theta):
    """E|sum_j c(j) exp(i u S_n(j/N))|^(2q), averaged over all 2^N
    words.
    """
    _check_q(q)
    moduli = _exhaustive_moduli(theta, n, u)
    return float(np.mean(moduli ** (2 * q)))


def q1_double_sum(theta, n, u):
    """sum_{j,k} c(j) c(k) cos(u/sqrt(N))^|j-k|, the closed form of the
    second moment.
    """
    N = 2 ** int(n)
    c = _dense_weights(theta, n)
    a = math.cos(u / math.sqrt(N))
    corr = np.correlate(c, c, mode='full')
    lags = np.abs(np.arange(-(N - 1), N))
    return float(np.sum(corr * a ** lags))


def _check_q(q):
    if int(q) != q or q < 1:
        raise InvalidSpecError('expected integer q >= 1, not %r' % (q,))


def _check_trials(trials):
    if int(trials) != trials or trials < MIN_TRIALS:
        raise InvalidSpecError('expected at least %d trials, not %r'
                               % (MIN_TRIALS, trials))


def moment_bound(q, u, alpha):
    "(22 q u^(-2 alpha))^q"
    return (MOMENT_CONSTANT * q * u ** (-2 * alpha)) ** q


def moment_intermediate_bound(q, u, alpha):
    "(2q)!/q! (11 u^(-2 alpha))^q, which never exceeds moment_bound()."
    ratio = math.factorial(2 * q) // math.factorial(q)
    return ratio * (GEOMETRIC_CONSTANT * u ** (-2 * alpha)) ** q


class MomentEstimate(namedtuple('MomentEstimate',
                                ('n q u alpha trials seed mean std_error'
                                 ' bound intermediate_bound exact'))):
    __slots__ = ()

    @property
    def within_bound(self):
        return self.mean - 3 * self.std_error <= self.bound

    @property
    def agrees_with_exact(self):
        if self.exact is None:
            return None
        slack = max(3 * self.std_error, 1e-12 * max(1.0, abs(self.exact)))
        return abs(self.mean - self.exact) <= slack

    def to_dict(self):
        ret = self._asdict()
        ret['within_bound'] = self.within_bound
        ret['agrees_with_exact'] = self.agrees_with_exact
        return ret


def _run_trials(theta, n, u, trials, seed, threads, reducer):
    """Draws *trials* words, computes |transform| of the pushout for
    each, and returns the per-chunk *reducer* results in chunk order.
    """
    N = 2 ** int(n)
    idx, w = _support(theta, n)
    scale = math.sqrt(N)

    def _run_chunk(chunk):
        i, start, stop = chunk
        rng = make_rng(seed, 'trials', i)
        bits = rng.integers(0, 2, size=(stop - start, N), dtype=np.int8)
        sums = np.cumsum(2 * bits - 1, axis=1, dtype=np.int32)[:, idx]
        return reducer(np.abs(_transform_sums(sums, w, u, scale)))

    return map_ordered(_run_chunk, trial_chunks(trials, N), threads)


def _merged(accs):
    total = MomentAccumulator()
    for acc in accs:
        total.merge(acc)
    return total


def moment_mc(n, q, u, theta, trials, seed, alpha, threads=None):
    """Monte Carlo estimate of E|int exp(i u S_n) d theta_n|^(2q) over
    *trials* seeded words. Levels small enough for enumeration also
    carry the exact value.
    """
    _check_q(q)
    _check_trials(trials)
    u, alpha = float(u), float(alpha)

    def _reduce(moduli):
        acc = MomentAccumulator()
        acc.add_array(moduli ** (2 * q))
        return acc

    with lab_log.info('moment_mc', n=n, q=q, u=u, trials=trials) as act:
        acc = _merged(_run_trials(theta, n, u, trials, seed, threads,
                                  _reduce))
        exact = None
        if 2 ** n <= MAX_EXACT_WORD_LENGTH:
            exact = moment_exact_small(n, q, u, theta)
        act['mean'], act['std_error'] = acc.mean, acc.std_error
        act.success('mean {mean} +/- {std_error}')
    return MomentEstimate(n, q, u, alpha, trials, seed, acc.mean,
                          acc.std_error, moment_bound(q, u, alpha),
                          moment_intermediate_bound(q, u, alpha), exact)


def default_tail_q(eps):
    return int(math.ceil(6.0 / eps))


class TailEstimate(namedtuple('TailEstimate',
                              ('n u eps q alpha trials seed threshold p_hat'
                               ' chain mc_error theory theory_regime'))):
    """P{F > u^(-2 alpha + eps)} for F = |int exp(i u S_n) d theta_n|^2,
    next to the Chebyshev value mean(F^q) / threshold^q.

    *theory* is (22q)^q u^(-eps q); when *theory_regime* holds,
    u >= (22q)^q and the tail is at most u^-5.
    """
    __slots__ = ()

    @property
    def passed(self):
        return self.p_hat <= self.chain + 3 * self.mc_error

    def to_dict(self):
        ret = self._asdict()
        ret['passed'] = self.passed
        return ret


def _tail_parts(u, eps, q, alpha):
    if eps <= 0:
        raise InvalidSpecError('expected eps > 0, not %r' % (eps,))
    if q is None:
        q = default_tail_q(eps)
    _check_q(q)
    threshold = u ** (-2 * alpha + eps)
    theory = (MOMENT_CONSTANT * q) ** q * u ** (-eps * q)
    regime = u >= (MOMENT_CONSTANT * q) ** q
    return q, threshold, theory, regime


def tail_mc(n, u, eps, theta, trials, seed, alpha, q=None, threads=None):
    _check_trials(trials)
    u, eps, alpha = float(u), float(eps), float(alpha)
    q, threshold, theory, regime = _tail_parts(u, eps, q, alpha)

    def _reduce(moduli):
        sq = moduli ** 2
        hits, powers = MomentAccumulator(), MomentAccumulator()
        hits.add_array((sq > threshold).astype(float))
        powers.add_array((sq / threshold) ** q)
        return hits, powers

    with lab_log.info('tail_mc', n=n, u=u, eps=eps, q=q) as act:
        parts = _run_trials(theta, n, u, trials, seed, threads, _reduce)
        hits = _merged([h for h, _ in parts])
        powers = _merged([p for _, p in parts])
        p_hat = hits.mean
        binomial = math.sqrt(max(0.0, p_hat * (1 - p_hat)) / hits.count)
        mc_error = binomial + powers.std_error
        act['p_hat'], act['chain'] = p_hat, powers.mean
        act.success('tail {p_hat}, chain {chain}')
    ret = TailEstimate(n, u, eps, q, alpha, trials, seed, threshold, p_hat,
                       powers.mean, mc_error, theory, regime)
    check('tail_chain', ret.passed,
          'tail {p_hat} against chain {chain} + 3 * {mc_error}',
          p_hat=p_hat, chain=ret.chain, mc_error=mc_error)
    return ret


def tail_exact_small(n, u, eps, theta, alpha, q=None):
    """The exhaustive tail probability, as an exact Fraction over the
    2^N words, and the exact Chebyshev value.
    """
    u, eps, alpha = float(u), float(eps), float(alpha)
    q, threshold, _, _ = _tail_parts(u, eps, q, alpha)
    sq = _exhaustive_moduli(theta, n, u) ** 2
    prob = Fraction(int(np.count_nonzero(sq > threshold)), sq.size)
    chain = float(np.mean((sq / threshold) ** q))
    return prob, chain


PartsResult = namedtuple('PartsResult', ('lhs rhs quadrature_rhs abs_error'
                                         ' rel_error'))


def parts_lemma_eval(mu, f, fprime=None, quad_step=1e-4):
    """Both sides of

      int f dmu = mu[0, 1] f(1) - int_0^1 f'(t) mu[0, t] dt

    for an atomic *mu* on [0, 1]. mu[0, t] is a step function, so the
    right side is computed exactly by summing M_j (f(t_(j+1)) - f(t_j))
    over the gaps between atoms, M_j being the mass up to t_j.
    Midpoint quadrature with *fprime* is only a cross-check.

    *f* and *fprime* must accept numpy arrays.
    """
    t, c = mu.positions, mu.weights
    if t.size and (t[0] < 0 or t[-1] > 1):
        raise DomainError('expected atoms in [0, 1]')
    if not 0 < quad_step <= 1e-4:
        raise InvalidSpecError('expected quad_step in (0, 1e-4], not %r'
                               % (quad_step,))
    if not t.size:
        return PartsResult(0.0, 0.0, None, 0.0, 0.0)
    f_t = np.asarray(f(t), dtype=float)
    f_one = float(f(np.float64(1.0)))
    lhs = float(np.sum(c * f_t))
    cum = np.cumsum(c)
    nxt = np.append(t[1:], 1.0)
    rhs = float(cum[-1] * f_one
                - np.sum(cum * (np.asarray(f(nxt), dtype=float) - f_t)))
    quad_rhs = None
    if fprime is not None:
        steps = int(math.ceil(1.0 / quad_step))
        h = 1.0 / steps
        mids = (np.arange(steps) + 0.5) * h
        pos = np.searchsorted(t, mids, side='right') - 1
        below = np.where(pos >= 0, cum[np.maximum(pos, 0)], 0.0)
        quad = float(np.sum(np.asarray(fprime(mids), dtype=float) * below) * h)
        quad_rhs = cum[-1] * f_one - quad
    abs_err = abs(lhs - rhs)
    scale = max(abs(lhs), float(np.sum(c * np.abs(f_t))))
    rel_err = abs_err / scale if scale else abs_err
    return PartsResult(lhs, rhs, quad_rhs, abs_err, rel_err)


GeometricSum = namedtuple('GeometricSum', ('r u alpha a lhs rhs large_u_form'
                                           ' simplified'))


def geometric_sum_bound(theta, r, u, alpha, C=FROSTMAN_COVER_FACTOR):
    """The sum over h = 0..N of c(r+h) a^h with a = cos(u/sqrt(N)), and
    the bound a^N + (1-a)/N^alpha + C Gamma(alpha+1)/(N log(1/a))^alpha.

    Also returned are the large-u form of the bound,
    exp(-u^2/3) + u^(-4 alpha) + 3 C Gamma(alpha+1) u^(-2 alpha), and
    its simplification 11/u^(2 alpha). c(k) is zero outside 1..N.
    """
    N = len(theta)
    if not is_power_of_two(N):
        raise DomainError('expected dyadic approximation, not %d atoms' % N)
    u, alpha = float(u), float(alpha)
    x = u / math.sqrt(N)
    if not 0 < x < math.pi / 2:
        raise RegimeError('expected 0 < u/sqrt(N) < pi/2, not %r' % (x,))
    r = int(r)
    if not 0 <= r <= N:
        raise DomainError('expected 0 <= r <= %d, not %r' % (N, r))
    c = _dense_weights(theta, N.bit_length() - 1)
    a = math.cos(x)
    # only 1 <= r + h <= N contributes
    h = np.arange(max(0, 1 - r), N - r + 1)
    lhs = float(np.sum(c[r + h - 1] * a ** h))
    gamma = math.gamma(alpha + 1)
    rhs = (a ** N + (1 - a) / N ** alpha
           + C * gamma / (N * math.log(1 / a)) ** alpha)
    large_u = (math.exp(-u * u / 3) + u ** (-4 * alpha)
               + 3 * C * gamma * u ** (-2 * alpha))
    simplified = GEOMETRIC_CONSTANT / u ** (2 * alpha)
    return GeometricSum(r, u, alpha, a, lhs, rhs, large_u, simplified)


def energy_offdiag(mu, alpha):
    """sum over j != k of c_j c_k |t_j - t_k|^(-alpha).

    Atoms carry infinite self-energy, so only the off-diagonal part is
    kept. Its growth along theta_n, not its value, is what tracks
    capacity.
    """
    alpha = float(alpha)
    if not 0 < alpha < 1:
        raise DomainError('expected 0 < alpha < 1, not %r' % (alpha,))
    mu = mu.support()
    t, c = mu.positions, mu.weights
    if t.size < 2:
        return 0.0
    rows = max(1, _BLOCK_ELEMENTS // t.size)
    total = 0.0
    for start in range(0, t.size, rows):
        stop = min(start + rows, t.size)
        dist = np.abs(t[start:stop, None] - t[None, :])
        dist[np.arange(stop - start), np.arange(start, stop)] = np.inf
        total += float(np.sum(c[start:stop, None] * c[None, :]
                              * dist ** -alpha))
    return total


def energy_fourier_crosscheck(mu, alpha, grid):
    """The weighted spectral integral of |mu^(u)|^2 |u|^(alpha-1) over
    *grid*, by the trapezoid rule. Without the normalizing constant
    only its growth is comparable with energy_offdiag().
    """
    grid = _check_grid(grid)
    if grid.size < 2:
        raise DomainError('expected at least two frequencies')
    if grid[0] <= 0:
        raise DomainError('expected positive frequencies')
    spectrum = transform_grid(mu, grid)
    vals = spectrum.abs ** 2 * grid ** (float(alpha) - 1)
    return float(np.sum((vals[1:] + vals[:-1]) / 2 * np.diff(grid)))


class DecayFit(namedtuple('DecayFit', ('exponent intercept r_squared u_range'
                                       ' method blocks conservative'
                                       ' centers levels'))):
    """*centers* and *levels* are the points the line was fitted to:
    block centers and the per-block envelope values.
    """
    __slots__ = ()

    def to_dict(self):
        ret = self._asdict()
        ret['u_range'] = list(self.u_range)
        ret['centers'] = list(self.centers)
        ret['levels'] = list(self.levels)
        return ret


DECAY_METHOD = 'dyadic-block-sup/ols-loglog'
NORMALIZED_METHOD = 'dyadic-block-normalized-sup/ols-loglog'


def peak_factor(cells):
    """The expected maximum of *cells* independent unit exponentials,
    the harmonic number H(cells), continued to real arguments. This is
    the typical ratio of sup |Z|^2 to E|Z|^2 over a block of a random
    trigonometric sum with that many independent cells. At most one
    cell gives 1.
    """
    cells = float(cells)
    if cells <= 1:
        return 1.0
    return (math.log(cells) + np.euler_gamma + 1 / (2 * cells)
            - 1 / (12 * cells * cells))


def _block_cells(spectrum, block, u_lo, u_hi):
    "Independent cells of |nu^| in the part of *block* inside the range."
    if not spectrum.spread:
        cells = float(block.count)
    else:
        width = min(block.hi, u_hi) - max(block.lo, u_lo)
        cells = max(0.0, width) * spectrum.spread / math.pi
    if spectrum.effective_atoms:
        cells = min(cells, float(spectrum.effective_atoms))
    return max(1.0, cells)


def decay_fit(spectrum, u_lo=None, u_hi=None, conservative=False,
              min_blocks=4, normalized=False):
    """Fits the decay of the block envelope inside [u_lo, u_hi].

    Samples outside the range are discarded before the envelope is
    formed. Each block contributes its sup (minus its uncertainty when
    *conservative*) against the block's geometric center, and the
    exponent is the negated log-log slope.

    With *normalized*, a block contributes

      sqrt(max(mean |nu^|^2, sup^2 / peak_factor(cells)))

    instead. The sup of a random trigonometric sum over a block grows
    like sqrt(log cells) on top of its decay, so the sup is divided by
    that growth, and the block mean square stands in when it is
    larger. The atom floor (spectrum.floor) is the level the transform
    settles at once atoms are resolved one by one; the fit stops at
    the first block whose squared level is within FLOOR_STOP floors of
    it.
    """
    grid = spectrum.grid
    u_lo = float(grid[0]) if u_lo is None else float(u_lo)
    u_hi = float(grid[-1]) if u_hi is None else float(u_hi)
    keep = (grid >= u_lo) & (grid <= u_hi) & (grid > 0)
    blocks = _envelope(grid[keep], np.abs(spectrum.values[keep]),
                       spectrum.uncertainty[keep])
    floor = spectrum.floor if normalized else 0.0
    with lab_log.debug('decay_fit', u_lo=u_lo, u_hi=u_hi,
                       blocks=len(blocks), normalized=normalized) as act:
        centers, levels = [], []
        for b in blocks:
            val = b.sup - b.uncertainty if conservative else b.sup
            if val <= ZERO_BLOCK:
                act.warn('dropped block [{lo}, {hi}) with empty envelope',
                         lo=b.lo, hi=b.hi)
                continue
            if normalized:
                cells = _block_cells(spectrum, b, u_lo, u_hi)
                level = max(b.mean_square, val * val / peak_factor(cells))
                if level <= (1 + FLOOR_STOP) * floor:
                    act['stopped_at'] = b.lo
                    break
                val = math.sqrt(level)
            centers.append(b.lo * SQRT2)
            levels.append(val)
        if len(levels) < min_blocks:
            raise DomainError('expected at least %d usable envelope blocks in'
                              ' [%r, %r], not %d'
                              % (min_blocks, u_lo, u_hi, len(levels)))
        fit = loglog_fit(centers, levels)
        act['exponent'] = -fit.slope
        act.success('decay exponent {exponent}')
    method = NORMALIZED_METHOD if normalized else DECAY_METHOD
    return DecayFit(-fit.slope, fit.intercept, fit.r_squared, (u_lo, u_hi),
                    method, fit.points, bool(conservative), tuple(centers),
                    tuple(levels))


def error_chain(n, u, C1, C2):
    """A-priori bound on the error of replacing the limit path and
    measure by their level-n versions:

      C1 n(n+1) u/sqrt(N) + (n+1) u sqrt(C2 n)/sqrt(N)
    """
    N = 2 ** int(n)
    root = math.sqrt(N)
    return (C1 * n * (n + 1) * u / root
            + (n + 1) * u * math.sqrt(C2 * n) / root)


def valid_u_max(n, kappa=VALIDITY_KAPPA):
    "kappa sqrt(N) / (n (n+1))"
    n = int(n)
    if n < 1:
        raise DomainError('expected level n >= 1, not %r' % (n,))
    return kappa * math.sqrt(2 ** n) / (n * (n + 1))


def ladder_constants(ladder):
    """(C1, C2) measured from the recorded refinement distances: C1 is
    the Brownian rate of the ladder, C2 the worst of d^2 N / log N.
    A ladder without refinements gives (0.0, 0.0).
    """
    c2 = 0.0
    for offset, dist in enumerate(ladder.distances):
        N = 2 ** (ladder.n_min + offset)
        if N < 2:
            continue
        c2 = max(c2, dist * dist * N / math.log(N))
    return brownian_rate(ladder), c2


def thm42_grid(n):
    "u = n, n + 1/n, ..., n + 1"
    n = int(n)
    if n < 1:
        raise InvalidSpecError('expected n >= 1, not %r' % (n,))
    return np.array([n + Fraction(k, n) for k in range(n + 1)], dtype=float)


def parse_grid(text):
    """Frequency grids from the command line:

      linear:LO:HI:STEP     LO, LO+STEP, ... up to HI
      geom:LO:HI:PER_OCT    PER_OCT points per octave from LO up to HI
      thm42:N               N, N + 1/N, ..., N + 1
      U1,U2,...             an explicit list
    """
    kind, _, rest = text.partition(':')
    try:
        if kind == 'thm42':
            return thm42_grid(int(rest))
        if kind == 'linear':
            lo, hi, step = [float(p) for p in rest.split(':')]
            if step <= 0 or hi < lo:
                raise ValueError()
            count = int(math.floor((hi - lo) / step + 1e-9)) + 1
            grid = lo + step * np.arange(count)
        elif kind == 'geom':
            lo, hi, per_octave = rest.split(':')
            lo, hi, per_octave = float(lo), float(hi), int(per_octave)
            if lo <= 0 or hi < lo or per_octave < 1:
                raise ValueError()
            count = int(math.floor(per_octave * math.log2(hi / lo) + 1e-9)) + 1
            grid = lo * 2.0 ** (np.arange(count) / float(per_octave))
        else:
            grid = np.array(sorted(float(p) for p in text.split(',')))
    except ValueError:
        raise InvalidSpecError('expected grid like linear:8:2000:0.25,'
                               ' geom:1:4096:8, thm42:12 or a list, not %r'
                               % (text,))
    return _check_grid(grid)


def fit_window(n, u_lo, u_hi):
    """The part of [u_lo, u_hi] a level-n decay fit uses: frequencies
    below sqrt(N). The image lives on the lattice Z/sqrt(N), and above
    sqrt(N) its transform measures the lattice step, not the set.
    """
    return float(u_lo), min(float(u_hi), math.sqrt(2 ** int(n)))


DecayRun = namedtuple('DecayRun', ('spectrum fit n constants valid_u_max'
                                   ' beyond_validity'))


def decay_pipeline(ladder, flow, u_max, u_lo=DEFAULT_U_LO, grid=None,
                   strict=False, kappa=VALIDITY_KAPPA, threads=None, fit=True,
                   oversample=DEFAULT_OVERSAMPLE):
    """Transforms the image of theta_n under the finest walk of *ladder*
    and fits its decay.

    Without a *grid*, the transform is sampled exactly on the dense
    lattice grid of lattice_transform() over [u_lo, u_max]. The fit is
    the normalized decay_fit() over fit_window(), with the atom floor
    of theta_n.

    Every value carries the a-priori error_chain() uncertainty, with
    constants measured from the ladder. With *strict*, u_max must stay
    below valid_u_max(n) and the fit is run on envelope minus
    uncertainty. Otherwise a range beyond validity is flagged and the
    raw envelope is fitted. With *fit* false only the spectrum is
    computed and the returned fit is None.
    """
    path = ladder.finest
    n = path.level
    if n is None:
        raise DomainError('expected walk of dyadic length, not %d' % path.N)
    u_max = float(u_max)
    limit = valid_u_max(n, kappa) if n else 0.0
    beyond = u_max > limit
    if beyond and strict:
        raise ValidityError(u_max, limit)
    with lab_log.info('decay_pipeline', n=n, u_max=u_max,
                      valid_u_max=limit) as act:
        label = getattr(flow, 'label', None)
        theta = n_approximation(flow, n)
        if grid is None:
            raw = lattice_transform(path, theta, u_lo, u_max,
                                    oversample=oversample, label=label)
        else:
            raw = transform_grid(pushout_measure(path, theta),
                                 _check_grid(grid), threads=threads)
        C1, C2 = ladder_constants(ladder)
        spectrum = SpectrumSample(raw.grid, raw.values, valid_u_max=limit,
                                  uncertainty=error_chain(n, raw.grid, C1, C2),
                                  total_mass=raw.total_mass, label=label,
                                  spread=raw.spread,
                                  effective_atoms=effective_atoms(theta))
        act['points'] = len(spectrum)
        if beyond:
            act.warn('u_max {u_max} is beyond valid_u_max {valid_u_max}')
        if not fit:
            act.success('spectrum of {points} frequencies')
            return DecayRun(spectrum, None, n, (C1, C2), limit, beyond)
        lo, hi = fit_window(n, u_lo, u_max)
        res = decay_fit(spectrum, u_lo=lo, u_hi=hi, conservative=strict,
                        normalized=True)
        act['exponent'], act['r_squared'] = res.exponent, res.r_squared
        act.success('exponent {exponent} (r^2 {r_squared})')
    return DecayRun(spectrum, res, n, (C1, C2), limit, beyond)
