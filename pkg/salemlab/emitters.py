# -*- coding: utf-8 -*-
"""Emitters take a finished Artifact and persist it in one format:
CSV tables, JSON records or a single-panel SVG plot.

Every write goes through boltons' atomic_save, so a file either holds
a complete artifact or does not exist. Output is byte-deterministic:
floats are written with 17 significant digits, JSON keys are sorted,
and SVGs carry a fixed hash salt and no date.
"""

from __future__ import absolute_import

import io
import os
import json
import math
import hashlib
from fractions import Fraction

import numpy as np
from boltons.fileutils import atomic_save, mkdir_p

import matplotlib
matplotlib.use('Agg')
matplotlib.rcParams.update({'svg.hashsalt': 'salemlab',
                            'font.family': 'DejaVu Sans',
                            'axes.unicode_minus': False})
import matplotlib.pyplot as plt

from salemlab.common import (__version__,
                             SCHEMA_VERSION,
                             InvalidSpecError,
                             ArtifactError)


FORMATS = ('csv', 'json', 'svg')
HASH_LENGTH = 12


class Table(object):
    def __init__(self, header, rows):
        self.header = list(header)
        self.rows = [list(r) for r in rows]
        for row in self.rows:
            if len(row) != len(self.header):
                raise InvalidSpecError('expected %d columns, not %d'
                                       % (len(self.header), len(row)))


class Panel(object):
    """One log-log panel: measured points, an optional fitted line and
    an annotation in the upper right corner.
    """
    def __init__(self, title, xlabel, ylabel, points, line=None,
                 annotation=None, logscale=True):
        self.title = title
        self.xlabel = xlabel
        self.ylabel = ylabel
        self.points = points
        self.line = line
        self.annotation = annotation
        self.logscale = logscale


class Artifact(object):
    """The outcome of one command. *config* is the reproducible part of
    the run configuration and *record* the JSON-ready results.
    """
    def __init__(self, command, config, seed, record, table=None, panel=None):
        self.command = command
        self.config = config
        self.seed = seed
        self.record = record
        self.table = table
        self.panel = panel

    @property
    def config_hash(self):
        return config_hash(self.config)

    def basename(self):
        seed = 'default' if self.seed is None else self.seed
        return '%s-%s-%s' % (self.command, seed, self.config_hash)

    def available_formats(self):
        ret = ['json']
        if self.table is not None:
            ret.append('csv')
        if self.panel is not None:
            ret.append('svg')
        return ret


def format_float(val):
    return '%.17g' % val


def to_jsonable(obj):
    """Plain JSON values from numpy scalars and arrays, tuples,
    Fractions and non-finite floats (written as strings).
    """
    if isinstance(obj, dict):
        return dict((str(k), to_jsonable(v)) for k, v in obj.items())
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        if not math.isfinite(obj):
            return repr(obj)
        return obj
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, 'to_dict'):
        return to_jsonable(obj.to_dict())
    if hasattr(obj, '_asdict'):
        return to_jsonable(obj._asdict())
    return obj


def dump_json(obj):
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + '\n'


def config_json(artifact):
    doc = {'config': artifact.config, 'seed': artifact.seed}
    return json.dumps(to_jsonable(doc), sort_keys=True)


def config_hash(config):
    text = json.dumps(to_jsonable(config), sort_keys=True)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()[:HASH_LENGTH]


def build_stamp(root=None):
    """'salemlab <version>', plus the commit when the package lives in
    a git checkout. Reads .git directly; no git binary is needed.
    """
    if root is None:
        root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    stamp = 'salemlab %s' % __version__
    head_path = os.path.join(root, '.git', 'HEAD')
    try:
        with open(head_path) as f:
            head = f.read().strip()
        if head.startswith('ref:'):
            with open(os.path.join(root, '.git', head[4:].strip())) as f:
                head = f.read().strip()
    except (IOError, OSError):
        return stamp
    return '%s-g%s' % (stamp, head[:HASH_LENGTH])


class CSVEmitter(object):
    """One header row and one row per table row, after a leading
    comment line carrying the config and seed as compact JSON.
    """
    ext = 'csv'

    def render(self, artifact):
        table = artifact.table
        buf = io.StringIO()
        buf.write(u'# config: ' + config_json(artifact) + u'\n')
        buf.write(u','.join(table.header) + u'\n')
        for row in table.rows:
            buf.write(u','.join([_csv_cell(v) for v in row]) + u'\n')
        return buf.getvalue().encode('utf-8')


def _csv_cell(val):
    if isinstance(val, (bool, np.bool_)):
        return u'true' if val else u'false'
    if isinstance(val, (int, np.integer)):
        return u'%d' % val
    if isinstance(val, (float, np.floating)):
        return format_float(val)
    if val is None:
        return u''
    return u'%s' % (val,)


class JSONEmitter(object):
    ext = 'json'

    def __init__(self, stamp=None):
        self.stamp = stamp

    def render(self, artifact):
        stamp = self.stamp if self.stamp is not None else build_stamp()
        doc = {'schema': SCHEMA_VERSION,
               'command': artifact.command,
               'seed': artifact.seed,
               'config': artifact.config,
               'config_hash': artifact.config_hash,
               'build': stamp,
               'result': artifact.record}
        return dump_json(doc).encode('utf-8')


class SVGEmitter(object):
    ext = 'svg'

    def render(self, artifact):
        panel = artifact.panel
        fig, ax = plt.subplots(figsize=(6, 4.5))
        try:
            xs, ys = panel.points
            ax.plot(xs, ys, 'o', markersize=4, label='measured')
            if panel.line is not None:
                lx, ly = panel.line
                ax.plot(lx, ly, '-', label='fit')
            if panel.logscale:
                ax.set_xscale('log')
                ax.set_yscale('log')
            ax.set_title(panel.title)
            ax.set_xlabel(panel.xlabel)
            ax.set_ylabel(panel.ylabel)
            ax.grid(True, alpha=0.3)
            if panel.annotation:
                ax.text(0.97, 0.95, panel.annotation, ha='right', va='top',
                        transform=ax.transAxes)
            ax.legend(loc='lower left')
            buf = io.BytesIO()
            fig.savefig(buf, format='svg', metadata={'Date': None})
        finally:
            plt.close(fig)
        return buf.getvalue()


EMITTERS = {'csv': CSVEmitter(),
            'json': JSONEmitter(),
            'svg': SVGEmitter()}


def parse_formats(text):
    formats = [f.strip() for f in text.split(',') if f.strip()]
    unknown = [f for f in formats if f not in FORMATS]
    if unknown or not formats:
        raise InvalidSpecError('expected formats among %s, not %r'
                               % (','.join(FORMATS), text))
    return tuple(sorted(set(formats), key=FORMATS.index))


def emit(artifact, formats, out_dir, emitters=None):
    """Writes *artifact* in each requested format it supports and
    returns the written paths. Formats an artifact has no content for
    (a CSV without a table) are skipped.
    """
    emitters = EMITTERS if emitters is None else emitters
    for fmt in formats:
        if fmt not in emitters:
            raise InvalidSpecError('unknown output format %r' % (fmt,))
    try:
        mkdir_p(out_dir)
    except OSError as ose:
        raise ArtifactError(out_dir, ose)
    paths = []
    available = artifact.available_formats()
    for fmt in formats:
        if fmt not in available:
            continue
        emitter = emitters[fmt]
        path = os.path.join(out_dir, '%s.%s' % (artifact.basename(),
                                                emitter.ext))
        data = emitter.render(artifact)
        try:
            with atomic_save(path) as f:
                f.write(data)
        except (IOError, OSError) as e:
            raise ArtifactError(path, e)
        paths.append(path)
    return paths
