# -*- coding: utf-8 -*-
"""Loggers for salemlab.

``lab_log`` carries pipeline stages (flows, walks, transforms, fits)
and ``check_log`` carries bound and identity checks. Nothing is
printed until a console sink is installed, which the command line does
through configure_console().
"""

from __future__ import absolute_import

from lithoxyl import (Logger,
                      SensibleSink,
                      SensibleFilter,
                      SensibleFormatter,
                      StreamEmitter)

from salemlab.sinks import CheckSink, StageTimingSink, CHECK_ACTION


CONSOLE_FORMAT = ('{status_char}{iso_end_local_noms_notz} {logger_name}'
                  ' {action_name} ({duration_auto}) - {end_message}')
WARN_FORMAT = ('{status_char}{iso_begin_local_noms_notz} {logger_name}'
               ' {action_name} - {event_message}')

CHECK_SINK = CheckSink()
TIMING_SINK = StageTimingSink()

lab_log = Logger('salemlab', sinks=[TIMING_SINK])
check_log = Logger('salemlab.check', sinks=[CHECK_SINK])

_VERBOSITY_FILTERS = {-1: {'success': 'critical', 'failure': 'critical',
                           'exception': 'info', 'warn': 'critical'},
                      0: {'success': 'info', 'failure': 'debug',
                          'exception': 'debug', 'warn': 'debug'},
                      1: {'success': 'debug', 'failure': 'debug',
                          'exception': 'debug', 'warn': 'debug'}}

_console_sinks = []


def configure_console(verbosity=0, stream='stderr'):
    "Installs (or replaces) the console sink on both loggers."
    verbosity = max(-1, min(1, verbosity))
    fltr = SensibleFilter(**_VERBOSITY_FILTERS[verbosity])
    fmtr = SensibleFormatter(CONSOLE_FORMAT, warn=WARN_FORMAT)
    sink = SensibleSink(formatter=fmtr,
                        emitter=StreamEmitter(stream),
                        filters=[fltr],
                        on=['warn', 'end'])
    for logger in (lab_log, check_log):
        kept = [s for s in logger.sinks if s not in _console_sinks]
        logger.set_sinks(kept + [sink])
    _console_sinks[:] = [sink]
    return sink


def check(label, passed, message=None, **data):
    """Logs the outcome of one bound or identity check.

    *message* is a format string over *data*; it is logged on success
    and failure alike. Returns *passed* so callers can chain.
    """
    data['label'] = label
    message = message or label
    with check_log.critical(CHECK_ACTION, **data) as act:
        if passed:
            act.success(message)
        else:
            act.failure(message)
    return passed
