# -*- coding: utf-8 -*-

from __future__ import absolute_import

import random

import numpy as np
import pytest

from boltons import statsutils

from salemlab.moment import MomentAccumulator
from salemlab.accumulators import DyadicBlockEnvelope


_rng = random.Random(8675309)
test_sets = {'bytes 0-255': [_rng.randint(0, 255) for i in range(16000)],
             'random.random 0.0-1.0': [_rng.random() for i in range(100000)]}


def _assert_round_cmp(a, b, mag=3, name=None):
    thresh = 1.0 / (10 ** mag)
    abs_diff = round(abs(a - b), mag + 1)
    tmpl = 'round-compare failed at %d digits (%f - %f = %f > %f)'
    rel_diff = (2 * abs_diff) / (a + b)
    err_msg = tmpl % (mag, a, b, abs_diff, thresh)
    if name:
        err_msg = '%r %s' % (name, err_msg)
    assert rel_diff < thresh, err_msg
    return True


def test_momentacc_basic():
    for name, data in test_sets.items():
        ma = MomentAccumulator()

        # empty state
        assert ma.count == 0
        assert ma.mean == 0.0
        assert ma.variance == 0.0
        assert ma.std_error == 0.0

        for i, v in enumerate(data):
            ma.add(v)
            if i == 0:
                assert ma.variance == 0.0

        n = len(data)
        _assert_round_cmp(statsutils.mean(data), ma.mean, mag=6, name=name)
        # statsutils reports the population variance
        sample_var = statsutils.variance(data) * n / (n - 1)
        _assert_round_cmp(sample_var, ma.variance, mag=6, name=name)
        assert ma.count == n
        assert ma.min == min(data)
        assert ma.max == max(data)


def test_momentacc_chunks_match_stream():
    data = test_sets['random.random 0.0-1.0']
    streamed = MomentAccumulator()
    for v in data:
        streamed.add(v)
    chunked = MomentAccumulator()
    for start in range(0, len(data), 7001):
        chunked.add_array(data[start:start + 7001])
    assert chunked.count == streamed.count
    assert chunked.mean == pytest.approx(streamed.mean, rel=1e-12)
    assert chunked.variance == pytest.approx(streamed.variance, rel=1e-9)
    assert chunked.std_error == pytest.approx(
        (streamed.variance / len(data)) ** 0.5, rel=1e-9)


def test_momentacc_merge():
    left, right, whole = (MomentAccumulator(), MomentAccumulator(),
                          MomentAccumulator())
    values = np.arange(10, dtype=float)
    left.add_array(values[:3])
    right.add_array(values[3:])
    whole.add_array(values)
    merged = MomentAccumulator().merge(left).merge(right)
    assert merged.mean == pytest.approx(4.5)
    assert merged.variance == pytest.approx(whole.variance)
    assert merged.min == 0.0 and merged.max == 9.0
    assert MomentAccumulator().merge(MomentAccumulator()).count == 0
    assert sorted(merged.to_dict()) == ['count', 'max', 'mean', 'min',
                                        'std_dev', 'std_error']


def test_dyadic_envelope():
    env = DyadicBlockEnvelope()
    assert env.block_of(1.0) == 0
    assert env.block_of(3.0) == 1
    assert env.block_of(0.75) == -1
    assert env.block_of(0) is None

    for u, val in [(0, 1.0), (2.0, 0.5), (3.5, 0.75), (3.9, 0.25),
                   (8.0, 0.125)]:
        env.add(u, val)
    res = env.get_results()
    assert [r[:5] for r in res] == [(0.0, 0.0, 1.0, 0.0, 1),
                                    (2.0, 4.0, 0.75, 3.5, 3),
                                    (8.0, 16.0, 0.125, 8.0, 1)]
    assert [r[5] for r in res] == pytest.approx([1.0, 0.875 / 3, 0.015625])

    with pytest.raises(ValueError):
        env.add(-1.0, 0.5)
    with pytest.raises(ValueError):
        env.add(float('inf'), 0.5)


def test_dyadic_envelope_arrays():
    samples = [(0, 1.0), (2.0, 0.5), (3.5, 0.75), (3.9, 0.75), (8.0, 0.125),
               (1.5, 0.25)]
    one_by_one = DyadicBlockEnvelope()
    for u, val in samples:
        one_by_one.add(u, val)
    batched = DyadicBlockEnvelope()
    us, vals = zip(*samples)
    batched.add_array(us[:3], vals[:3])
    batched.add_array(us[3:], vals[3:])
    flat = [[x for r in env.get_results() for x in r]
            for env in (batched, one_by_one)]
    assert flat[0] == pytest.approx(flat[1])
    # ties keep the first frequency
    assert batched.get_results()[2][3] == 3.5

    with pytest.raises(ValueError):
        batched.add_array([1.0, -2.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        batched.add_array([1.0], [0.5, 0.5])
