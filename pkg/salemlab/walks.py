# -*- coding: utf-8 -*-
"""Binary codes and the piecewise-linear walks they describe.

A word w of length N describes the walk S that starts at 0 and moves
by +1/sqrt(N) or -1/sqrt(N) over each interval [(j-1)/N, j/N],
depending on whether w_j is ``'1'`` or ``'0'``. Walks keep the
integer partial sums P(j) and divide by sqrt(N) only when a value is
read, so grid values are P(j)/sqrt(N) with a single rounding.
"""

from __future__ import absolute_import

import os
import json
import math
from collections import namedtuple

import numpy as np
from boltons.fileutils import atomic_save, mkdir_p

from salemlab.common import (DomainError,
                             InvalidSpecError,
                             ResourceLimitError,
                             ArtifactError,
                             MAX_WALK_LEVEL,
                             SQRT2,
                             is_power_of_two,
                             ceil_log2)
from salemlab.compress import check_word, compressed_length
from salemlab.log import lab_log
from salemlab.workers import make_rng


COUPLING_RULE = 'bridge-tracking/1'
_PAIRS = (('11', 2), ('10', 0), ('01', 0), ('00', -2))


def word_to_steps(word):
    "The word as an int8 array of +1/-1 steps."
    raw = np.frombuffer(word.encode('ascii'), dtype=np.uint8)
    return (2 * (raw - ord('0')) - 1).astype(np.int8)


def steps_to_word(steps):
    bits = (np.asarray(steps) > 0).astype(np.uint8) + ord('0')
    return bits.tobytes().decode('ascii')


class WalkPath(object):
    def __init__(self, word):
        self.word = check_word(word)
        self.N = len(word)
        self.level = self.N.bit_length() - 1 if is_power_of_two(self.N) else None
        sums = np.zeros(self.N + 1, dtype=np.int64)
        np.cumsum(word_to_steps(word), out=sums[1:])
        sums.setflags(write=False)
        self.partial_sums = sums
        self.scale = math.sqrt(self.N)

    def grid_values(self):
        "S(j/N) for j = 0..N."
        return self.partial_sums / self.scale

    def values_at(self, ts):
        ts = np.asarray(ts, dtype=float)
        if np.any((ts < 0) | (ts > 1)) or not np.all(np.isfinite(ts)):
            raise DomainError('expected times in [0, 1]')
        x = ts * self.N
        j = np.minimum(np.floor(x).astype(np.int64), self.N - 1)
        frac = x - j
        lo = self.partial_sums[j]
        hi = self.partial_sums[j + 1]
        return (lo + frac * (hi - lo)) / self.scale

    def __len__(self):
        return self.N

    def __eq__(self, other):
        return type(self) is type(other) and self.word == other.word

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((type(self), self.word))

    def __repr__(self):
        cn = self.__class__.__name__
        return '<%s N=%r end=%r>' % (cn, self.N, int(self.partial_sums[-1]))


def decode_code(word):
    return WalkPath(word)


def encode_path(path):
    return steps_to_word(np.diff(path.partial_sums))


def walk_value(path, t):
    """S(t) by linear interpolation between grid values. Exactly
    P(j)/sqrt(N) at t = j/N.
    """
    t = float(t)
    if not 0 <= t <= 1:
        raise DomainError('expected t in [0, 1], not %r' % (t,))
    x = t * path.N
    j = min(int(math.floor(x)), path.N - 1)
    frac = x - j
    lo = int(path.partial_sums[j])
    if not frac:
        return lo / path.scale
    hi = int(path.partial_sums[j + 1])
    return (lo + frac * (hi - lo)) / path.scale


def sample_word(N, seed, *key):
    """N fair coin flips from the counter-based Philox generator keyed
    by *seed* (and an optional stream *key*).
    """
    N = int(N)
    if N < 1:
        raise DomainError('expected positive word length, not %r' % (N,))
    rng = make_rng(seed, 'word', *key)
    bits = rng.integers(0, 2, size=N, dtype=np.uint8)
    return (bits + ord('0')).tobytes().decode('ascii')


def constant_word(N, bit='1'):
    return bit * int(N)


def alternating_word(N):
    return ('01' * (int(N) // 2 + 1))[:int(N)]


DeficiencyReport = namedtuple('DeficiencyReport', ('length compressed_bits'
                                                   ' deficiency slack verdict'
                                                   ' passed'))


def deficiency_slack(N):
    return 64 + 2 * ceil_log2(N)


def deficiency_proxy(word):
    """Compresses *word* and reports N - L_c.

    Words whose compressed length stays within the slack of N are
    called incompressible-like. The proxy can only refute randomness:
    a compressible word certainly has low complexity, a passing one
    merely was not caught.
    """
    word = check_word(word)
    N = len(word)
    compressed = compressed_length(word)
    slack = deficiency_slack(N)
    passed = compressed >= N - slack
    verdict = 'incompressible-like' if passed else 'compressible'
    return DeficiencyReport(N, compressed, N - compressed, slack, verdict,
                            passed)


def word_to_hex(word):
    word = check_word(word)
    padded = word + '0' * (-len(word) % 4)
    digits = '%x' % int(padded, 2)
    return 'len=%d\n%s\n' % (len(word), digits.zfill(len(padded) // 4))


def word_from_hex(text):
    lines = text.split()
    if len(lines) != 2 or not lines[0].startswith('len='):
        raise InvalidSpecError('expected "len=<N>" header and hex digits')
    N = int(lines[0][4:])
    bits = bin(int(lines[1], 16))[2:].zfill(4 * len(lines[1]))
    return bits[:N]


class RefinementLadder(object):
    """Walks at levels n_min..n_max, each refining the previous one,
    together with the sup distances between consecutive levels.
    """
    def __init__(self, seed, n_min, levels, distances,
                 coupling=COUPLING_RULE):
        self.seed = seed
        self.n_min = n_min
        self.levels = list(levels)
        self.distances = list(distances)
        self.coupling = coupling
        if len(self.distances) != len(self.levels) - 1:
            raise InvalidSpecError('expected one distance per refinement')

    @property
    def n_max(self):
        return self.n_min + len(self.levels) - 1

    @property
    def finest(self):
        return self.levels[-1]

    def level(self, n):
        if not self.n_min <= n <= self.n_max:
            raise DomainError('expected level in [%d, %d], not %r'
                              % (self.n_min, self.n_max, n))
        return self.levels[n - self.n_min]

    def to_dict(self):
        return {'seed': self.seed,
                'n_min': self.n_min,
                'n_max': self.n_max,
                'coupling': self.coupling,
                'distances': self.distances}

    def __repr__(self):
        cn = self.__class__.__name__
        return ('<%s seed=%r levels=%d..%d>'
                % (cn, self.seed, self.n_min, self.n_max))


def refine(path, rng):
    """The next level of a ladder.

    Each parent step splits into a pair of child steps. Among the four
    sign pairs, those that keep the child walk within one parent step
    (1/sqrt(N)) of the parent at the parent's grid points are allowed,
    and one of them is drawn uniformly.
    """
    sums = path.partial_sums.tolist()
    draws = rng.random(path.N).tolist()
    out = []
    fine = 0
    for j in range(path.N):
        target = SQRT2 * sums[j + 1]
        options = [(pair, s) for pair, s in _PAIRS
                   if abs(fine + s - target) <= SQRT2 + 1e-12]
        pair, s = options[int(draws[j] * len(options))]
        out.append(pair)
        fine += s
    return WalkPath(''.join(out))


def sup_distance(coarse, fine):
    """||x_fine - x_coarse|| over [0, 1]. Both walks are linear between
    fine grid points, so the sup is reached on the fine grid.
    """
    if fine.N != 2 * coarse.N:
        raise DomainError('expected fine walk of length %d, not %d'
                          % (2 * coarse.N, fine.N))
    sums = coarse.partial_sums.astype(float)
    interp = np.empty(fine.N + 1)
    interp[0::2] = sums
    interp[1::2] = (sums[:-1] + sums[1:]) / 2
    diff = fine.partial_sums / fine.scale - interp / coarse.scale
    return float(np.max(np.abs(diff)))


def build_ladder(seed, n_min, n_max, max_level=MAX_WALK_LEVEL):
    n_min, n_max = int(n_min), int(n_max)
    if not 0 <= n_min < n_max:
        raise InvalidSpecError('expected 0 <= n_min < n_max, not %r, %r'
                               % (n_min, n_max))
    if n_max > max_level:
        raise ResourceLimitError('ladder level', n_max, max_level)
    with lab_log.debug('build_ladder', seed=seed, n_min=n_min,
                       n_max=n_max) as act:
        base = WalkPath(sample_word(2 ** n_min, seed, 'ladder', n_min))
        levels, distances = [base], []
        for n in range(n_min, n_max):
            nxt = refine(levels[-1], make_rng(seed, 'ladder', n + 1))
            distances.append(sup_distance(levels[-1], nxt))
            levels.append(nxt)
        act['max_distance'] = max(distances)
        act.success('ladder up to level {n_max}, max step distance'
                    ' {max_distance}')
    return RefinementLadder(seed, n_min, levels, distances)


def brownian_rate(ladder):
    """Smallest C with ||x_(n+1) - x_n|| <= C log(N) / sqrt(N) on every
    recorded refinement, N = 2^n being the coarser length.
    """
    worst = 0.0
    for offset, dist in enumerate(ladder.distances):
        N = 2 ** (ladder.n_min + offset)
        if N < 2:
            continue
        worst = max(worst, dist * math.sqrt(N) / math.log(N))
    return worst


ModulusReport = namedtuple('ModulusReport', 'max_ratio C rows')


def modulus_ratio(path, C, h_grid):
    """The worst ratio of sup_t |S(t+h) - S(t)| to sqrt(2 C h log(1/h))
    over *h_grid*. Each h is rounded to the nearest positive multiple of
    1/N and the sup is taken over the grid.
    """
    C = float(C)
    if C <= 1:
        raise DomainError('expected C > 1, not %r' % (C,))
    rows = []
    sums = path.partial_sums
    for h in h_grid:
        if not 0 < h <= 0.5:
            raise DomainError('expected h in (0, 1/2], not %r' % (h,))
        lag = max(1, int(round(h * path.N)))
        h_eff = lag / float(path.N)
        if h_eff >= 1:
            raise DomainError('h %r is too coarse for N=%d' % (h, path.N))
        sup = int(np.max(np.abs(sums[lag:] - sums[:-lag]))) / path.scale
        ratio = sup / math.sqrt(2 * C * h_eff * math.log(1 / h_eff))
        rows.append((h_eff, lag, sup, ratio))
    max_ratio = max(r[-1] for r in rows) if rows else 0.0
    return ModulusReport(max_ratio, C, rows)


def write_ladder(ladder, directory):
    "A directory of hex word files plus a JSON manifest."
    try:
        mkdir_p(directory)
    except OSError as ose:
        raise ArtifactError(directory, ose)
    files = []
    for offset, path in enumerate(ladder.levels):
        name = 'level-%02d.hex' % (ladder.n_min + offset)
        with atomic_save(os.path.join(directory, name), text_mode=True) as f:
            f.write(word_to_hex(path.word))
        files.append(name)
    manifest = ladder.to_dict()
    manifest['files'] = files
    manifest_path = os.path.join(directory, 'manifest.json')
    with atomic_save(manifest_path, text_mode=True) as f:
        f.write(json.dumps(manifest, sort_keys=True, indent=2) + '\n')
    return manifest_path


def read_ladder(directory):
    manifest_path = os.path.join(directory, 'manifest.json')
    try:
        with open(manifest_path) as f:
            manifest = json.load(f)
        levels = []
        for name in manifest['files']:
            with open(os.path.join(directory, name)) as f:
                levels.append(WalkPath(word_from_hex(f.read())))
    except (IOError, OSError, KeyError, ValueError) as e:
        raise ArtifactError(manifest_path, e)
    return RefinementLadder(manifest['seed'], manifest['n_min'], levels,
                            manifest['distances'], manifest['coupling'])
