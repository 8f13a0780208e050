# -*- coding: utf-8 -*-

from __future__ import absolute_import

import json
from fractions import Fraction

import numpy as np
import pytest

from salemlab.common import InvalidSpecError, SCHEMA_VERSION
from salemlab.config import make_config
from salemlab.emitters import (Artifact,
                               Table,
                               Panel,
                               JSONEmitter,
                               format_float,
                               to_jsonable,
                               dump_json,
                               config_hash,
                               build_stamp,
                               parse_formats,
                               emit)


def _artifact(table=True, panel=True):
    config = make_config('cantor', n=4).to_dict()
    record = {'masses': [Fraction(1, 2), 0.25], 'ok': np.bool_(True)}
    return Artifact('cantor', config, 0, record,
                    table=Table(['j', 'mass'], [[1, 0.5], [4, 0.5]])
                    if table else None,
                    panel=Panel('masses', 'j', 'mass', ([1, 4], [0.5, 0.5]))
                    if panel else None)


def test_format_float():
    assert format_float(0.1) == '0.10000000000000001'
    assert format_float(1.0) == '1'


def test_to_jsonable():
    data = to_jsonable({'a': np.arange(3), 'b': Fraction(1, 3),
                        'c': float('inf'), 'd': (1, 2j)})
    assert data == {'a': [0, 1, 2], 'b': '1/3', 'c': 'inf',
                    'd': [1, [0.0, 2.0]]}
    assert dump_json({'b': 1, 'a': 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'


def test_config_hash_ignores_execution():
    first = make_config('walk', threads=1, out='a').to_dict()
    second = make_config('walk', threads=8, out='b').to_dict()
    assert config_hash(first) == config_hash(second)
    assert config_hash(first) != config_hash(make_config('walk',
                                                         seed=1).to_dict())
    assert len(config_hash(first)) == 12


def test_table_columns():
    with pytest.raises(InvalidSpecError):
        Table(['a', 'b'], [[1]])


def test_parse_formats():
    assert parse_formats('svg,csv') == ('csv', 'svg')
    assert parse_formats('json, json') == ('json',)
    for bad in ('', 'png', 'csv,pdf'):
        with pytest.raises(InvalidSpecError):
            parse_formats(bad)


def test_build_stamp_without_git(tmpdir):
    assert build_stamp(str(tmpdir)).startswith('salemlab ')
    assert '-g' not in build_stamp(str(tmpdir))

    git = tmpdir.mkdir('.git')
    git.join('HEAD').write('ref: refs/heads/main\n')
    git.mkdir('refs').mkdir('heads').join('main').write('0123456789abcdef\n')
    assert build_stamp(str(tmpdir)).endswith('-g0123456789ab')


def test_emit(tmpdir):
    art = _artifact()
    out_dir = str(tmpdir.join('out'))
    paths = emit(art, ('csv', 'json', 'svg'), out_dir)
    prefix = 'cantor-0-%s' % art.config_hash
    assert [p.rsplit('/', 1)[-1] for p in paths] == [prefix + '.csv',
                                                     prefix + '.json',
                                                     prefix + '.svg']
    with open(paths[0]) as f:
        lines = f.read().splitlines()
    assert lines[0].startswith('# config: ')
    assert json.loads(lines[0][len('# config: '):]) == {
        'config': to_jsonable(art.config), 'seed': 0}
    assert lines[1:] == ['j,mass', '1,0.5', '4,0.5']
    with open(paths[1]) as f:
        doc = json.load(f)
    assert doc['schema'] == SCHEMA_VERSION
    assert doc['result'] == {'masses': ['1/2', 0.25], 'ok': True}
    assert doc['config']['n'] == 4

    first = [open(p, 'rb').read() for p in paths]
    again = emit(art, ('csv', 'json', 'svg'), out_dir)
    assert [open(p, 'rb').read() for p in again] == first


def test_emit_skips_missing_content(tmpdir):
    art = _artifact(table=False, panel=False)
    paths = emit(art, ('csv', 'json', 'svg'), str(tmpdir))
    assert len(paths) == 1
    assert paths[0].endswith('.json')

    with pytest.raises(InvalidSpecError):
        emit(art, ('png',), str(tmpdir))


def test_fixed_stamp():
    data = JSONEmitter(stamp='salemlab test').render(_artifact())
    assert json.loads(data.decode('utf-8'))['build'] == 'salemlab test'


def test_default_seed_basename():
    config = make_config('verify').to_dict()
    art = Artifact('verify', config, None, {'ok': True})
    assert art.basename() == 'verify-default-%s' % config_hash(config)
