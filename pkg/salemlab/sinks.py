# -*- coding: utf-8 -*-
"""lithoxyl sinks that turn logged actions into run outcomes.

The compute modules log every bound check as an action named
``check``. CheckSink watches those actions end and remembers the ones
that failed, which is how the command line decides between exit
status 0 and 2. StageTimingSink keeps duration statistics per action
name for the ``--timings`` summary.
"""

from __future__ import absolute_import

from boltons.cacheutils import ThresholdCounter as TCounter

from salemlab.moment import MomentAccumulator


CHECK_ACTION = 'check'


class CheckSink(object):
    def __init__(self, action_name=CHECK_ACTION, threshold=0.001):
        self.action_name = action_name
        self.threshold = threshold
        self.status_counter = TCounter(threshold)
        self.failures = []

    def on_end(self, end_event):
        ev = end_event
        if ev.action.name != self.action_name:
            return
        self.status_counter.add(ev.status)
        if ev.status != 'success':
            self.failures.append((ev.action.data_map.get('label'),
                                  ev.status, ev.message))
        return

    @property
    def failed(self):
        return bool(self.failures)

    def clear(self):
        self.status_counter = TCounter(self.threshold)
        self.failures = []

    def to_dict(self):
        ret = dict(self.status_counter)
        ret['__all__'] = sum(ret.values())
        ret['failed_labels'] = [label for label, _, _ in self.failures]
        return ret

    def __repr__(self):
        cn = self.__class__.__name__
        return ('<%s checks=%r failures=%r>'
                % (cn, sum(dict(self.status_counter).values()),
                   len(self.failures)))


class StageTimingSink(object):
    def __init__(self, getter=None):
        if getter is None:
            getter = lambda end_event: end_event.action.duration
        if not callable(getter):
            raise TypeError('expected callable getter, not %r' % (getter,))
        self.getter = getter
        self.acc_map = {}

    def on_end(self, end_event):
        try:
            acc = self.acc_map[end_event.action.name]
        except KeyError:
            acc = self.acc_map[end_event.action.name] = MomentAccumulator()
        acc.add(self.getter(end_event))

    def clear(self):
        self.acc_map = {}

    def to_dict(self):
        ret = {}
        for name, acc in sorted(self.acc_map.items()):
            ret[name] = {'count': acc.count,
                         'mean_s': acc.mean,
                         'max_s': acc.max}
        return ret

    def __repr__(self):
        cn = self.__class__.__name__
        return '<%s stages=%r>' % (cn, sorted(self.acc_map))
