# -*- coding: utf-8 -*-
"""The ``salem-lab`` command.

Each subcommand builds one Artifact from a validated RunConfig and
writes it in the requested formats. Written paths go to stdout, logs
go to stderr. The exit status is 0 on success, 1 on a usage or
library error, and 2 when a bound or identity check failed.
"""

from __future__ import absolute_import, print_function

import os
import sys
import argparse

import numpy as np

from salemlab.common import (__version__,
                             SQRT2,
                             MAX_EXACT_WORD_LENGTH,
                             SalemLabError,
                             InvalidSpecError)
from salemlab.config import COMMANDS, make_config
from salemlab.dyadic import cantor_flow, flow_check, n_approximation
from salemlab.dimension import (DimensionReport,
                                cantor_dims,
                                report_ladder,
                                salem_run)
from salemlab.emitters import Artifact, Panel, Table, emit, parse_formats
from salemlab.log import (lab_log,
                          check,
                          configure_console,
                          CHECK_SINK,
                          TIMING_SINK)
from salemlab.spectral import (decay_pipeline,
                               error_chain,
                               fit_window,
                               moment_mc,
                               tail_mc,
                               tail_exact_small)
from salemlab.verify import check_cantor_flow, lemma_rows, run_verify
from salemlab.walks import (brownian_rate,
                            deficiency_proxy,
                            modulus_ratio,
                            write_ladder)


MODULUS_CONSTANT = 2.0
LEMMA_TOLERANCE = 1e-9


class UsageParser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidSpecError(message)


def _add_flags(parser):
    add = parser.add_argument
    add('--seed', type=int, help='default 0; verify suites keep their own')
    add('--xi', dest='ratio', help='Cantor ratio as p/q, default 1/4')
    add('--n', type=int, help='level: walk length and flow depth are 2^n')
    add('--q', type=int, help='moment order')
    add('--u', type=float, help='frequency')
    add('--eps', type=float)
    add('--alpha', type=float, help='Frostman exponent, default beta - 0.01')
    add('--grid', help='linear:LO:HI:STEP, geom:LO:HI:PER_OCT, thm42:N'
                       ' or a comma-separated list')
    add('--u-lo', type=float)
    add('--u-max', type=float)
    add('--trials', type=int)
    add('--word', help='random, ones or alt')
    add('--strict-validity', dest='strict', action='store_true')
    add('--full', action='store_true', help='run the long verify tier')
    add('--formats', type=parse_formats, help='subset of csv,json,svg')
    add('--out', help='output directory, default .')
    add('--threads', type=int)
    add('--verbose', '-v', dest='verbosity', action='store_const', const=1,
        default=0)
    add('--quiet', '-q', dest='verbosity', action='store_const', const=-1)
    add('--timings', action='store_true')
    return parser


def create_parser():
    prs = UsageParser(prog='salem-lab',
                      description='Fourier decay and dimension of Cantor'
                      ' set images under random walks.')
    prs.add_argument('--version', action='version',
                     version='%(prog)s ' + __version__)
    subprs = prs.add_subparsers(dest='command', metavar='COMMAND')
    subprs.required = True
    for command in COMMANDS:
        _add_flags(subprs.add_parser(command))
    return prs


def parse_config(argv=None):
    kwargs = vars(create_parser().parse_args(argv))
    return make_config(kwargs.pop('command'), **kwargs)


def _artifact(config, record, table=None, panel=None):
    return Artifact(config.command, config.to_dict(), config.seed, record,
                    table=table, panel=panel)


def _warn_saturation(spec):
    if not spec.saturates:
        return
    with lab_log.info('ratio_check', ratio=str(spec.ratio),
                      beta=spec.beta) as act:
        act.warn('2 beta > 1 for ratio {ratio}, image dimension saturates at 1')
        act.success('ratio {ratio} saturates')


def _decay_panel(title, run):
    fit = run.fit
    if fit is None:
        blocks = [b for b in run.spectrum.envelope if b.sup > 0]
        return Panel(title, 'u', 'envelope sup |transform|',
                     ([b.lo * SQRT2 for b in blocks], [b.sup for b in blocks]))
    lo, hi = fit.u_range
    lx = np.geomspace(lo, hi, 32)
    ly = np.exp(fit.intercept) * lx ** -fit.exponent
    note = 'exponent %.4f, r^2 %.3f' % (fit.exponent, fit.r_squared)
    return Panel(title, 'u', 'normalized envelope',
                 (list(fit.centers), list(fit.levels)), line=(lx, ly),
                 annotation=note)


def run_cantor(config):
    spec = config.spec.with_depth(config.n)
    flow = cantor_flow(spec)
    summary, _ = check_cantor_flow(flow, spec, seed=config.seed)
    report = flow_check(flow)
    check('flow_consistency', report.passed,
          '{flow}: worst violation {worst}', flow=flow.label,
          worst=report.max_violation)
    rows = []
    for j, mass in flow.level(config.n):
        rows.append((j, (j - 1) / 2.0 ** config.n, j / 2.0 ** config.n,
                     float(mass)))
    xs, ys = [], []
    for k in range(config.n + 1):
        xs.append(2.0 ** -k)
        ys.append(max(float(m) for _, m in flow.level(k)))
    line = (xs, [x ** spec.beta for x in xs])
    panel = Panel('heaviest cell per level, ratio %s' % spec.ratio,
                  '|I|', 'mass(I)', (xs, ys), line=line,
                  annotation='beta %.4f' % spec.beta)
    record = dict(summary, beta=spec.beta, gamma=spec.gamma, depth=config.n,
                  root_mass=float(flow.root_mass),
                  max_violation=report.max_violation)
    table = Table(('j', 'left', 'right', 'mass'), rows)
    return _artifact(config, record, table, panel), []


def run_walk(config):
    ladder = report_ladder(config.word, config.seed, config.n)
    path = ladder.finest
    deficiency = deficiency_proxy(path.word)
    rate = brownian_rate(ladder)
    h_grid = [2.0 ** -k for k in range(1, config.n)]
    modulus = modulus_ratio(path, MODULUS_CONSTANT, h_grid)
    rows, xs, ys = [], [], []
    for offset, dist in enumerate(ladder.distances):
        N = 2 ** (ladder.n_min + offset)
        rows.append((ladder.n_min + offset, N, dist,
                     rate * np.log(N) / np.sqrt(N)))
        xs.append(N)
        ys.append(dist)
    record = {'word': config.word,
              'ladder': ladder.to_dict(),
              'deficiency': deficiency._asdict(),
              'brownian_rate': rate,
              'modulus': {'C': modulus.C, 'max_ratio': modulus.max_ratio,
                          'rows': modulus.rows}}
    panel = None
    if len([y for y in ys if y > 0]) == len(ys) and len(ys) >= 2:
        line = (xs, [r[-1] for r in rows])
        panel = Panel('refinement distances, seed %s' % config.seed,
                      'N', 'sup distance', (xs, ys), line=line,
                      annotation='C %.4f' % rate)
    table = Table(('level', 'N', 'distance', 'rate_bound'), rows)
    artifact = _artifact(config, record, table, panel)
    ladder_dir = os.path.join(config.out, artifact.basename() + '-ladder')
    return artifact, [write_ladder(ladder, ladder_dir)]


def run_spectrum(config):
    spec = config.spec.with_depth(config.n)
    _warn_saturation(spec)
    grid = config.frequency_grid
    u_max = config.u_max if grid is None else float(grid[-1])
    lo, hi = fit_window(config.n, config.u_lo, u_max)
    if grid is not None:
        usable = grid[(grid >= lo) & (grid <= hi)]
        lo, hi = (usable[0], usable[-1]) if usable.size else (lo, 0.0)
    # at least four dyadic envelope blocks
    do_fit = hi >= 16 * lo
    run = decay_pipeline(report_ladder(config.word, config.seed, config.n),
                         cantor_flow(spec), u_max, u_lo=config.u_lo,
                         grid=grid, strict=config.strict,
                         threads=config.threads, fit=do_fit)
    C1, C2 = run.constants
    record = {'spectrum': run.spectrum.to_dict(),
              'fit': run.fit.to_dict() if run.fit else None,
              'n': run.n,
              'constants': [C1, C2],
              'uncertainty_per_u': error_chain(run.n, 1.0, C1, C2),
              'valid_u_max': run.valid_u_max,
              'beyond_validity': run.beyond_validity}
    table = Table(('u', 're', 'im', 'abs'), run.spectrum.to_rows())
    panel = _decay_panel('transform envelope, ratio %s, n=%d'
                         % (spec.ratio, run.n), run)
    return _artifact(config, record, table, panel), []


def _theta(config):
    flow = cantor_flow(config.spec.with_depth(config.n))
    return n_approximation(flow, config.n)


def run_moments(config):
    est = moment_mc(config.n, config.q, config.u, _theta(config),
                    config.trials, config.seed, config.effective_alpha,
                    threads=config.threads)
    check('moment_bound', est.within_bound,
          '{mean} - 3 * {std_error} against {bound}', mean=est.mean,
          std_error=est.std_error, bound=est.bound)
    if est.exact is not None:
        check('moment_oracle', est.agrees_with_exact,
              '{mean} +/- {std_error} against {exact}', mean=est.mean,
              std_error=est.std_error, exact=est.exact)
    record = est.to_dict()
    table = Table(sorted(record), [[record[k] for k in sorted(record)]])
    return _artifact(config, record, table), []


def run_tail(config):
    theta = _theta(config)
    est = tail_mc(config.n, config.u, config.eps, theta, config.trials,
                  config.seed, config.effective_alpha, q=config.q,
                  threads=config.threads)
    record = est.to_dict()
    if 2 ** config.n <= MAX_EXACT_WORD_LENGTH:
        prob, chain = tail_exact_small(config.n, config.u, config.eps, theta,
                                       config.effective_alpha, q=config.q)
        record['exact_p'], record['exact_chain'] = prob, chain
    table = Table(sorted(record), [[record[k] for k in sorted(record)]])
    return _artifact(config, record, table), []


def run_lemma(config):
    rows = lemma_rows(config.seed, config.trials)
    worst = max(row[-1] for row in rows)
    check('parts_lemma', worst <= LEMMA_TOLERANCE,
          'worst relative error {worst} over {measures} measures',
          worst=worst, measures=config.trials)
    record = {'measures': config.trials, 'cases': len(rows),
              'worst_rel_error': worst}
    table = Table(('measure', 'function', 'atoms', 'lhs', 'rhs', 'rel_error'),
                  rows)
    return _artifact(config, record, table), []


def run_salem_report(config):
    spec = config.spec
    _warn_saturation(spec)
    res = salem_run(spec, config.seed, config.n, config.u_max,
                    u_lo=config.u_lo, word=config.word, strict=config.strict,
                    threads=config.threads)
    record = {'report': res.report.to_dict(),
              'fit': res.decay.fit.to_dict(),
              'box': {'scales': res.box.scales, 'counts': res.box.counts},
              'capacity': res.capacity._asdict()}
    table = Table(DimensionReport._fields, [list(res.report)])
    panel = _decay_panel('image transform, ratio %s, n=%d'
                         % (spec.ratio, config.n), res.decay)
    return _artifact(config, record, table, panel), []


def run_dims(config):
    dims = cantor_dims(config.spec, m=config.n)
    box = dims.box
    record = {'ratio': dims.ratio, 'beta': dims.beta,
              'box': box._asdict(), 'capacity': dims.capacity._asdict()}
    xs = [1 / s for s in box.scales]
    line = (xs, [box.counts[0] * (x / xs[0]) ** box.dimension for x in xs])
    panel = Panel('box counts, ratio %s' % dims.ratio, '1/delta',
                  'occupied boxes', (xs, box.counts), line=line,
                  annotation='box %.4f, capacity %.4f'
                  % (box.dimension, dims.capacity.dimension))
    table = Table(('scale', 'count'), zip(box.scales, box.counts))
    return _artifact(config, record, table, panel), []


def run_verify_command(config):
    results, _ = run_verify(full=config.full, seed=config.seed,
                            threads=config.threads)
    table = Table(('suite', 'passed'),
                  [(name, res['passed']) for name, res in results.items()])
    return _artifact(config, results, table), []


COMMAND_HANDLERS = {'cantor': run_cantor,
                    'walk': run_walk,
                    'spectrum': run_spectrum,
                    'moments': run_moments,
                    'tail': run_tail,
                    'lemma': run_lemma,
                    'salem-report': run_salem_report,
                    'dims': run_dims,
                    'verify': run_verify_command}


def run(config):
    "Runs one command and returns the paths of everything it wrote."
    artifact, extra_paths = COMMAND_HANDLERS[config.command](config)
    return emit(artifact, config.formats, config.out) + extra_paths


def _print_timings(stream):
    for name, stats in sorted(TIMING_SINK.to_dict().items()):
        print('%-24s %6d  mean %.4fs  max %.4fs'
              % (name, stats['count'], stats['mean_s'], stats['max_s']),
              file=stream)


def main(argv=None):
    try:
        config = parse_config(argv)
    except SalemLabError as sle:
        print('salem-lab: error: %s' % (sle,), file=sys.stderr)
        return 1
    configure_console(config.verbosity)
    CHECK_SINK.clear()
    TIMING_SINK.clear()
    try:
        paths = run(config)
    except SalemLabError as sle:
        print('salem-lab: error: %s' % (sle,), file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    if config.timings:
        _print_timings(sys.stdout)
    if CHECK_SINK.failed:
        labels = sorted(set(label for label, _, _ in CHECK_SINK.failures))
        print('salem-lab: failed checks: %s' % ', '.join(labels),
              file=sys.stderr)
        return 2
    return 0
