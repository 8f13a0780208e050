# -*- coding: utf-8 -*-

from __future__ import absolute_import

import pytest

from salemlab.common import InvalidSpecError, MAX_WALK_LEVEL
from salemlab.config import make_config, EXECUTION_FIELDS


def test_defaults():
    config = make_config('moments')
    assert config.seed == 0
    assert config.ratio == '1/4'
    assert config.n == 3
    assert config.q == 1
    assert config.u == 2.0
    assert config.trials == 100000
    assert config.formats == ('csv', 'json', 'svg')
    assert config.effective_alpha == pytest.approx(0.49)

    tail = make_config('tail')
    assert tail.q is None
    assert tail.u == 12.0


def test_ratio_normalized():
    config = make_config('cantor', ratio='2/8')
    assert config.ratio == '1/4'
    assert config.spec.beta == 0.5
    assert make_config('cantor', alpha=0.3).effective_alpha == 0.3


def test_to_dict_skips_execution_fields():
    config = make_config('walk', out='/tmp/x', threads=3, verbosity=2)
    data = config.to_dict()
    for name in EXECUTION_FIELDS:
        assert name not in data
    assert data['command'] == 'walk'
    assert data['formats'] == ['csv', 'json', 'svg']
    assert make_config('walk').to_dict() == data


def test_frequency_grid():
    assert make_config('spectrum').frequency_grid is None
    grid = make_config('spectrum', grid='thm42:4').frequency_grid
    assert grid.tolist() == [4.0, 4.25, 4.5, 4.75, 5.0]


@pytest.mark.parametrize('command, kwargs, flag', [
    ('moments', {'seed': -1}, '--seed'),
    ('walk', {'n': MAX_WALK_LEVEL + 1}, '--n'),
    ('walk', {'n': 0}, '--n'),
    ('moments', {'q': 0}, '--q'),
    ('tail', {'eps': -1.0}, '--eps'),
    ('moments', {'alpha': 1.5}, '--alpha'),
    ('moments', {'u': float('inf')}, '--u'),
    ('spectrum', {'u_lo': 50.0, 'u_max': 10.0}, '--u-lo'),
    ('moments', {'trials': 5}, '--trials'),
    ('salem-report', {'word': 'zeros'}, '--word'),
    ('cantor', {'formats': ('csv', 'png')}, '--formats'),
])
def test_invalid_flags(command, kwargs, flag):
    with pytest.raises(InvalidSpecError) as exc_info:
        make_config(command, **kwargs)
    assert flag in str(exc_info.value)


def test_other_invalid_input():
    with pytest.raises(InvalidSpecError):
        make_config('frobnicate')
    with pytest.raises(InvalidSpecError):
        make_config('cantor', ratio='1/2')
    with pytest.raises(InvalidSpecError):
        make_config('spectrum', grid='bogus:1')
    with pytest.raises(TypeError):
        make_config('cantor', colour='blue')


def test_verify_seed_left_to_suites():
    assert make_config('verify').seed is None
    assert make_config('verify', seed=7).seed == 7
    assert make_config('spectrum').seed == 0
