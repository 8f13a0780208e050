# -*- coding: utf-8 -*-

from __future__ import absolute_import

from lithoxyl import Logger

from salemlab.sinks import CheckSink, StageTimingSink
from salemlab.log import check, check_log, CHECK_SINK


def test_check_sink_counts():
    csink = CheckSink()
    log = Logger('check_test', [csink])
    log.critical('check', label='first').success('ok')
    log.critical('check', label='second').failure('bound violated')
    log.critical('other', label='ignored').failure('not a check')

    assert csink.failed
    assert csink.failures == [('second', 'failure', 'bound violated')]
    cdict = csink.to_dict()
    assert cdict['__all__'] == 2
    assert cdict['failed_labels'] == ['second']

    csink.clear()
    assert not csink.failed
    assert csink.to_dict()['__all__'] == 0


def test_check_helper():
    CHECK_SINK.clear()
    assert check('helper_pass', True, 'value {value}', value=1)
    assert not CHECK_SINK.failed
    assert check('helper_fail', False, 'value {value}', value=2) is False
    assert CHECK_SINK.failed
    assert [f[0] for f in CHECK_SINK.failures] == ['helper_fail']
    assert CHECK_SINK in check_log.sinks
    CHECK_SINK.clear()


def test_stage_timing_sink():
    tsink = StageTimingSink()
    log = Logger('timing_test', [tsink])
    for i in range(5):
        with log.info('stage') as act:
            act.success()
    log.info('other').success()

    tdict = tsink.to_dict()
    assert sorted(tdict) == ['other', 'stage']
    assert tdict['stage']['count'] == 5
    assert tdict['stage']['max_s'] >= tdict['stage']['mean_s'] >= 0

    tsink.clear()
    assert tsink.to_dict() == {}
