# -*- coding: utf-8 -*-

from __future__ import absolute_import

import math

import pytest

from salemlab.common import DomainError, InvalidSpecError, ResourceLimitError
from salemlab.walks import (WalkPath,
                            decode_code,
                            encode_path,
                            walk_value,
                            sample_word,
                            constant_word,
                            alternating_word,
                            deficiency_proxy,
                            deficiency_slack,
                            word_to_hex,
                            word_from_hex,
                            build_ladder,
                            brownian_rate,
                            sup_distance,
                            modulus_ratio,
                            write_ladder,
                            read_ladder)


def test_walk_path_basic():
    path = WalkPath('1101')
    assert path.N == 4
    assert path.level == 2
    assert path.partial_sums.tolist() == [0, 1, 2, 1, 2]
    assert path.grid_values().tolist() == [0.0, 0.5, 1.0, 0.5, 1.0]
    assert WalkPath('110').level is None

    with pytest.raises(DomainError):
        WalkPath('')
    with pytest.raises(DomainError):
        WalkPath('0120')


def test_walk_value():
    path = WalkPath('1101')
    assert walk_value(path, 0) == 0.0
    assert walk_value(path, 0.125) == 0.25
    assert walk_value(path, 0.5) == 1.0
    assert walk_value(path, 1) == 1.0
    assert path.values_at([0.125, 0.5]).tolist() == [0.25, 1.0]

    with pytest.raises(DomainError):
        walk_value(path, 1.5)
    with pytest.raises(DomainError):
        path.values_at([-0.1])


def test_encode_decode():
    for word in ('1', '0110', sample_word(256, 11)):
        assert encode_path(decode_code(word)) == word


def test_sample_word_seeded():
    word = sample_word(64, 7)
    assert len(word) == 64
    assert not word.strip('01')
    assert word == sample_word(64, 7)
    assert word != sample_word(64, 8)
    assert word != sample_word(64, 7, 'other')

    with pytest.raises(DomainError):
        sample_word(0, 7)


def test_control_words():
    assert constant_word(4) == '1111'
    assert constant_word(3, '0') == '000'
    assert alternating_word(5) == '01010'


def test_deficiency_proxy():
    N = 2 ** 14
    ones = deficiency_proxy(constant_word(N))
    assert not ones.passed
    assert ones.verdict == 'compressible'
    assert ones.deficiency > N // 2
    assert ones.slack == deficiency_slack(N) == 64 + 2 * 14

    for seed in range(3):
        report = deficiency_proxy(sample_word(N, seed))
        assert report.passed
        assert report.verdict == 'incompressible-like'


def test_hex_words():
    assert word_to_hex('101') == 'len=3\na\n'
    word = sample_word(77, 2)
    assert word_from_hex(word_to_hex(word)) == word

    with pytest.raises(InvalidSpecError):
        word_from_hex('101')


def test_build_ladder():
    ladder = build_ladder(3, 4, 8)
    assert ladder.n_min == 4
    assert ladder.n_max == 8
    assert ladder.finest.level == 8
    assert ladder.level(6).N == 64
    assert len(ladder.distances) == 4

    for offset, dist in enumerate(ladder.distances):
        coarse, fine = ladder.levels[offset], ladder.levels[offset + 1]
        assert sup_distance(coarse, fine) == dist
        assert dist <= 3 / math.sqrt(coarse.N)

    rate = brownian_rate(ladder)
    for offset, dist in enumerate(ladder.distances):
        N = 2 ** (4 + offset)
        assert dist <= rate * math.log(N) / math.sqrt(N) + 1e-12

    again = build_ladder(3, 4, 8)
    assert again.finest == ladder.finest
    assert again.distances == ladder.distances

    with pytest.raises(DomainError):
        ladder.level(9)
    with pytest.raises(InvalidSpecError):
        build_ladder(3, 8, 4)
    with pytest.raises(ResourceLimitError):
        build_ladder(3, 4, 8, max_level=6)


def test_sup_distance_lengths():
    with pytest.raises(DomainError):
        sup_distance(WalkPath('10'), WalkPath('10'))
    assert sup_distance(WalkPath('1'), WalkPath('11')) == pytest.approx(
        math.sqrt(2) - 1)


def test_modulus_ratio():
    path = WalkPath(sample_word(1024, 5))
    report = modulus_ratio(path, 2.0, [0.25, 0.5, 1 / 1024.0])
    assert len(report.rows) == 3
    assert report.rows[-1][1] == 1
    assert report.max_ratio == max(r[-1] for r in report.rows)

    with pytest.raises(DomainError):
        modulus_ratio(path, 1.0, [0.25])
    with pytest.raises(DomainError):
        modulus_ratio(path, 2.0, [0.75])


def test_ladder_files(tmpdir):
    ladder = build_ladder(9, 2, 6)
    manifest_path = write_ladder(ladder, str(tmpdir.join('ladder')))
    assert manifest_path.endswith('manifest.json')
    loaded = read_ladder(str(tmpdir.join('ladder')))
    assert loaded.levels == ladder.levels
    assert loaded.distances == ladder.distances
    assert loaded.n_min == 2
    assert loaded.coupling == ladder.coupling


def test_deficiency_rejects_periodic_words():
    N = 2 ** 16
    for word in (alternating_word(N), ('0011' * (N // 4)),
                 (sample_word(64, 9) * (N // 64))):
        report = deficiency_proxy(word)
        assert not report.passed
        assert report.verdict == 'compressible'
        assert report.deficiency > report.slack
