# -*- coding: utf-8 -*-

from __future__ import absolute_import

import os
import json

import pytest

from salemlab.common import InvalidSpecError
from salemlab.cli import main, parse_config
from salemlab.log import CHECK_SINK


def _read_all(paths):
    ret = {}
    for path in paths:
        with open(path, 'rb') as f:
            ret[os.path.basename(path)] = f.read()
    return ret


def test_parse_config():
    config = parse_config(['spectrum', '--xi', '1/16', '--n', '10',
                           '--formats', 'json', '--strict-validity', '-v'])
    assert config.command == 'spectrum'
    assert config.ratio == '1/16'
    assert config.n == 10
    assert config.formats == ('json',)
    assert config.strict
    assert config.verbosity == 1
    assert parse_config(['lemma', '--quiet']).verbosity == -1

    with pytest.raises(InvalidSpecError):
        parse_config(['spectrum', '--n', 'ten'])
    with pytest.raises(InvalidSpecError):
        parse_config([])


def test_usage_errors(capsys):
    assert main(['frobnicate']) == 1
    assert main(['moments', '--q', '0']) == 1
    assert main(['cantor', '--xi', '1/2']) == 1
    err = capsys.readouterr().err
    assert 'salem-lab: error:' in err
    assert '--q' in err


def test_lemma(tmpdir, capsys):
    out_dir = str(tmpdir)
    assert main(['lemma', '--trials', '3', '--out', out_dir]) == 0
    printed = capsys.readouterr().out.split()
    assert len(printed) == 2
    assert printed[0].endswith('.csv') and printed[1].endswith('.json')
    with open(printed[1]) as f:
        doc = json.load(f)
    assert doc['command'] == 'lemma'
    assert doc['result']['measures'] == 3
    assert doc['result']['cases'] == 3 * 7
    assert not CHECK_SINK.failed


def test_cantor(tmpdir, capsys):
    assert main(['cantor', '--n', '6', '--formats', 'csv,svg',
                 '--out', str(tmpdir)]) == 0
    printed = capsys.readouterr().out.split()
    assert [p.rsplit('.', 1)[-1] for p in printed] == ['csv', 'svg']
    with open(printed[0]) as f:
        lines = f.read().splitlines()
    assert json.loads(lines[0].split(': ', 1)[1])['seed'] == 0
    assert lines[1] == 'j,left,right,mass'
    # 2^3 survivors of length 1/64 at depth 6
    assert len(lines) == 2 + 8


def test_walk_writes_ladder(tmpdir, capsys):
    assert main(['walk', '--n', '6', '--seed', '4', '--formats', 'json',
                 '--out', str(tmpdir)]) == 0
    printed = capsys.readouterr().out.split()
    assert printed[-1].endswith('manifest.json')
    assert os.path.isfile(printed[-1])


def test_thread_count_does_not_change_output(tmpdir, capsys):
    argv = ['moments', '--n', '3', '--trials', '4000', '--u', '3',
            '--formats', 'csv,json']
    one = str(tmpdir.join('one'))
    two = str(tmpdir.join('two'))
    first = main(argv + ['--threads', '1', '--out', one])
    second = main(argv + ['--threads', '2', '--out', two])
    assert first == second
    assert first in (0, 2)
    capsys.readouterr()
    one_files = _read_all([os.path.join(one, p) for p in os.listdir(one)])
    two_files = _read_all([os.path.join(two, p) for p in os.listdir(two)])
    assert one_files == two_files
    assert len(one_files) == 2


def test_timings(tmpdir, capsys):
    assert main(['cantor', '--n', '4', '--formats', 'json',
                 '--timings', '--out', str(tmpdir)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert any(line.startswith('cantor_flow ') for line in lines)


@pytest.mark.parametrize('argv', [
    ['spectrum', '--n', '14', '--u-lo', '2', '--u-max', '128'],
    ['salem-report', '--n', '14', '--u-lo', '2', '--u-max', '128'],
])
def test_thread_count_does_not_change_spectra(tmpdir, capsys, argv):
    argv = argv + ['--seed', '3', '--formats', 'csv,json,svg']
    one = str(tmpdir.join('one'))
    two = str(tmpdir.join('two'))
    first = main(argv + ['--threads', '1', '--out', one])
    second = main(argv + ['--threads', '2', '--out', two])
    assert first == second
    assert first in (0, 2)
    capsys.readouterr()
    one_files = _read_all([os.path.join(one, p) for p in os.listdir(one)])
    two_files = _read_all([os.path.join(two, p) for p in os.listdir(two)])
    assert one_files == two_files
    assert len(one_files) == 3


def test_spectrum_output(tmpdir, capsys):
    assert main(['spectrum', '--xi', '1/3', '--n', '12', '--u-lo', '2',
                 '--u-max', '16', '--formats', 'csv,json',
                 '--out', str(tmpdir)]) == 0
    captured = capsys.readouterr()
    printed = captured.out.split()
    with open(printed[0]) as f:
        lines = f.read().splitlines()
    assert lines[1] == 'u,re,im,abs'
    with open(printed[1]) as f:
        doc = json.load(f)
    result = doc['result']
    # too few octaves below 16 for a fit
    assert result['fit'] is None
    assert result['beyond_validity']
    assert result['uncertainty_per_u'] > 0
    # warnings reach the console
    assert 'saturates at 1' in captured.err
    assert 'beyond valid_u_max' in captured.err
