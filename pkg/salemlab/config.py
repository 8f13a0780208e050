# -*- coding: utf-8 -*-
"""Run configuration for the command line.

A RunConfig is immutable and fully validated on construction, so a
bad flag fails before any computation starts. Only the reproducible
part of a config (to_dict()) is embedded in artifacts and hashed into
file names; where files go, how many threads run and how chatty the
console is never change a result.
"""

from __future__ import absolute_import

import math
from collections import namedtuple

from salemlab.common import (InvalidSpecError,
                             MAX_WALK_LEVEL,
                             check_kwargs)
from salemlab.dyadic import CantorSpec
from salemlab.emitters import FORMATS
from salemlab.spectral import MIN_TRIALS, parse_grid
from salemlab.dimension import WORD_KINDS
from salemlab.workers import make_seed_sequence, resolve_threads


COMMANDS = ('cantor', 'walk', 'spectrum', 'moments', 'tail', 'lemma',
            'salem-report', 'dims', 'verify')

_FIELDS = ('command seed ratio n q u eps alpha grid u_lo u_max trials word'
           ' strict full formats out threads verbosity timings')

# fields that say how a run executes, not what it computes
EXECUTION_FIELDS = ('out', 'threads', 'verbosity', 'timings')

_DEFAULT_N = {'cantor': 14, 'walk': 16, 'spectrum': 18, 'moments': 3,
              'tail': 12, 'lemma': 0, 'salem-report': 18, 'dims': 12,
              'verify': 0}
_DEFAULT_U = {'moments': 2.0, 'tail': 12.0}
_DEFAULT_TRIALS = {'moments': 100000, 'tail': 10000, 'lemma': 50}
_TRIAL_MINIMUM = {'moments': MIN_TRIALS, 'tail': MIN_TRIALS, 'lemma': 1}


class RunConfig(namedtuple('RunConfig', _FIELDS)):
    __slots__ = ()

    @property
    def spec(self):
        return CantorSpec(self.ratio)

    @property
    def effective_alpha(self):
        "The Frostman exponent used in bounds: alpha, else beta - 0.01."
        if self.alpha is not None:
            return self.alpha
        return round(self.spec.beta - 0.01, 12)

    @property
    def frequency_grid(self):
        if self.grid is None:
            return None
        return parse_grid(self.grid)

    def to_dict(self):
        ret = self._asdict()
        for name in EXECUTION_FIELDS:
            ret.pop(name)
        ret['formats'] = list(self.formats)
        return ret


def make_config(command, **kwargs):
    """Fills the per-command defaults and validates every numeric
    parameter. Raises InvalidSpecError naming the violated
    precondition.
    """
    if command not in COMMANDS:
        raise InvalidSpecError('expected command in %r, not %r'
                               % (COMMANDS, command))
    values = {'command': command,
              'seed': kwargs.pop('seed', None),
              'ratio': kwargs.pop('ratio', None) or '1/4',
              'n': kwargs.pop('n', None),
              'q': kwargs.pop('q', None),
              'u': kwargs.pop('u', None),
              'eps': kwargs.pop('eps', None) or 1.0,
              'alpha': kwargs.pop('alpha', None),
              'grid': kwargs.pop('grid', None),
              'u_lo': kwargs.pop('u_lo', None) or 8.0,
              'u_max': kwargs.pop('u_max', None) or 2000.0,
              'trials': kwargs.pop('trials', None),
              'word': kwargs.pop('word', None) or 'random',
              'strict': bool(kwargs.pop('strict', False)),
              'full': bool(kwargs.pop('full', False)),
              'formats': tuple(kwargs.pop('formats', None) or FORMATS),
              'out': kwargs.pop('out', None) or '.',
              'threads': kwargs.pop('threads', None),
              'verbosity': kwargs.pop('verbosity', 0),
              'timings': bool(kwargs.pop('timings', False))}
    check_kwargs(kwargs)
    # verify suites keep their own seeds unless one is given
    if values['seed'] is None and command != 'verify':
        values['seed'] = 0
    if values['n'] is None:
        values['n'] = _DEFAULT_N[command]
    if values['u'] is None:
        values['u'] = _DEFAULT_U.get(command, 0.0)
    if values['trials'] is None:
        values['trials'] = _DEFAULT_TRIALS.get(command, 0)
    if values['q'] is None and command != 'tail':
        values['q'] = 1
    return _validate(RunConfig(**values))


def _validate(config):
    if config.seed is not None:
        try:
            make_seed_sequence(config.seed)
        except InvalidSpecError:
            raise InvalidSpecError('expected --seed in [0, 2^64), not %r'
                                   % (config.seed,))
        config = config._replace(seed=int(config.seed))
    spec = CantorSpec(config.ratio)
    config = config._replace(ratio=str(spec.ratio))
    if not 0 <= config.n <= MAX_WALK_LEVEL:
        raise InvalidSpecError('expected --n in [0, %d], not %r'
                               % (MAX_WALK_LEVEL, config.n))
    if config.command in ('walk', 'spectrum', 'salem-report', 'tail',
                          'moments') and config.n < 1:
        raise InvalidSpecError('expected --n >= 1, not %r' % (config.n,))
    if config.q is not None and config.q < 1:
        raise InvalidSpecError('expected --q >= 1, not %r' % (config.q,))
    if not config.eps > 0:
        raise InvalidSpecError('expected --eps > 0, not %r' % (config.eps,))
    if config.alpha is not None and not 0 < config.alpha <= 1:
        raise InvalidSpecError('expected --alpha in (0, 1], not %r'
                               % (config.alpha,))
    if not (math.isfinite(config.u) and config.u >= 0):
        raise InvalidSpecError('expected finite --u >= 0, not %r'
                               % (config.u,))
    if not 0 < config.u_lo < config.u_max:
        raise InvalidSpecError('expected 0 < --u-lo < --u-max, not %r, %r'
                               % (config.u_lo, config.u_max))
    minimum = _TRIAL_MINIMUM.get(config.command)
    if minimum is not None and config.trials < minimum:
        raise InvalidSpecError('expected --trials >= %d, not %r'
                               % (minimum, config.trials))
    if config.word not in WORD_KINDS:
        raise InvalidSpecError('expected --word in %r, not %r'
                               % (WORD_KINDS, config.word))
    unknown = [f for f in config.formats if f not in FORMATS]
    if unknown:
        raise InvalidSpecError('expected --formats among %s, not %r'
                               % (','.join(FORMATS), unknown))
    if config.grid is not None:
        parse_grid(config.grid)
    if config.threads is not None:
        resolve_threads(config.threads)
    return config
