# -*- coding: utf-8 -*-
"""The bundled verification suite.

The fast tier checks exact identities and exhaustive small-instance
oracles and finishes in seconds. The full tier adds the empirical
desk-scale checks: moment and tail bounds at n = 12..14, the
geometric sum estimate, decay fits at n = 18, the all-ones negative
control and the Salem consistency runs (1/16 at n = 22, 1/3 at
n = 18).

Every individual comparison is logged through salemlab.log.check, so
a failure anywhere shows up on the CheckSink and in the summary.
"""

from __future__ import absolute_import

import math
from collections import OrderedDict

import numpy as np

from salemlab.common import FROSTMAN_COVER_FACTOR, is_power_of_two
from salemlab.dyadic import (AtomicMeasure,
                             CantorSpec,
                             cantor_flow,
                             lebesgue_flow,
                             flow_check,
                             frostman_check,
                             survivor_hull_check,
                             n_approximation)
from salemlab.dimension import salem_report, cantor_capacity, report_ladder
from salemlab.log import lab_log, check
from salemlab.spectral import (char_exact,
                               char_enumerated,
                               moment_exact_small,
                               q1_double_sum,
                               moment_mc,
                               tail_mc,
                               parts_lemma_eval,
                               geometric_sum_bound,
                               decay_pipeline)
from salemlab.walks import deficiency_proxy, sample_word, constant_word
from salemlab.workers import make_rng


LEMMA_FUNCTIONS = ([('t^%d' % k, (lambda k: lambda t: t ** k)(k),
                     (lambda k: lambda t: k * t ** (k - 1) if k else 0 * t)(k))
                    for k in range(6)]
                   + [('sin(7t)', lambda t: np.sin(7 * t),
                       lambda t: 7 * np.cos(7 * t))])

MOMENT_U_VALUES = (0.5, 1.0, 2.0, 3.0, 5.0)
DECAY_SEEDS = (1, 2, 3, 4, 5)


def lemma_rows(seed=0, measures=50):
    """(measure, function, atoms, lhs, rhs, rel_error) for every seeded
    atomic measure and every test function.
    """
    rng = make_rng(seed, 'verify', 'lemma')
    rows = []
    for i in range(measures):
        count = int(rng.integers(1, 65))
        mu = AtomicMeasure(rng.random(count), rng.random(count))
        for name, f, fprime in LEMMA_FUNCTIONS:
            res = parts_lemma_eval(mu, f, fprime)
            rows.append((i, name, len(mu), res.lhs, res.rhs, res.rel_error))
    return rows


def suite_parts_lemma(seed=0, measures=50, **kw):
    worst = max(row[-1] for row in lemma_rows(seed, measures))
    ok = check('parts_lemma', worst <= 1e-9,
               'worst relative error {worst} over {measures} measures',
               worst=worst, measures=measures)
    return {'measures': measures, 'worst_rel_error': worst}, ok


def suite_char_exact(**kw):
    worst, count = 0.0, 0
    for N in (4, 16, 64):
        for h in range(1, min(N, 16) + 1):
            for u in (0.5, 1.0, 2.0, 5.0):
                diff = abs(char_enumerated(u, N, h) - char_exact(u, N, h))
                worst = max(worst, diff)
                count += 1
    ok = check('char_exact', worst <= 1e-12,
               'worst absolute error {worst} over {count} cases',
               worst=worst, count=count)
    return {'cases': count, 'worst_abs_error': worst}, ok


def suite_moment_oracle(seed=0, trials=100000, threads=None, **kw):
    rows, ok = [], True
    for n in (3, 4):
        theta = n_approximation(cantor_flow(CantorSpec('1/4', n)), n)
        for u in MOMENT_U_VALUES:
            double_sum = q1_double_sum(theta, n, u)
            exact_q1 = moment_exact_small(n, 1, u, theta)
            ok &= check('moment_q1_closed_form',
                        abs(double_sum - exact_q1) <= 1e-10,
                        'n={n} u={u}: double sum {double_sum} against'
                        ' {exact_q1}', n=n, u=u, double_sum=double_sum,
                        exact_q1=exact_q1)
            for q in (1, 2):
                est = moment_mc(n, q, u, theta, trials, seed, alpha=0.49,
                                threads=threads)
                ok &= check('moment_oracle', est.agrees_with_exact,
                            'n={n} q={q} u={u}: {mean} +/- {std_error}'
                            ' against {exact}', n=n, q=q, u=u,
                            mean=est.mean, std_error=est.std_error,
                            exact=est.exact)
                rows.append(est.to_dict())
    return {'estimates': rows}, ok


def check_cantor_flow(flow, spec, seed=0, samples=10000):
    """Survivor hulls and seeded general intervals of a Cantor flow.

    Hull masses must match exactly when 1/ratio is a power of two, and
    stay within the cover factor otherwise.
    """
    ratio = str(spec.ratio)
    hull = survivor_hull_check(flow, spec)
    if spec.ratio.numerator == 1 and is_power_of_two(spec.ratio.denominator):
        ok = check('survivor_hulls', hull.passed,
                   '{ratio}: {exact} of {checked} hulls exact', ratio=ratio,
                   exact=hull.exact_mass_matches, checked=hull.checked)
    else:
        ok = check('survivor_hulls', hull.worst_ratio <= FROSTMAN_COVER_FACTOR,
                   '{ratio}: worst hull ratio {worst}', ratio=ratio,
                   worst=hull.worst_ratio)
    report = frostman_check(flow, spec.beta, C=1, samples=samples, seed=seed)
    ok &= check('frostman_general', report.general_worst_ratio <= 1 + 1e-9,
                '{ratio}: worst ratio to 3|I|^beta {worst}', ratio=ratio,
                worst=report.general_worst_ratio)
    summary = {'ratio': ratio, 'hulls': hull._asdict(),
               'dyadic_worst_ratio': report.dyadic_worst_ratio,
               'general_worst_ratio': report.general_worst_ratio}
    return summary, ok


def suite_frostman(seed=0, depth=14, samples=10000, **kw):
    rows, ok = [], True
    for ratio in ('1/3', '1/4', '1/16'):
        spec = CantorSpec(ratio, depth)
        row, row_ok = check_cantor_flow(cantor_flow(spec), spec, seed, samples)
        rows.append(row)
        ok = ok and row_ok
    return {'flows': rows}, ok


def suite_flows(**kw):
    ok = True
    rows = []
    flows = [cantor_flow(CantorSpec(r, 12)) for r in ('1/3', '1/4', '2/5')]
    flows.append(lebesgue_flow(12))
    for flow in flows:
        report = flow_check(flow)
        ok &= check('flow_consistency', report.passed,
                    '{flow}: worst violation {worst}', flow=flow.label,
                    worst=report.max_violation)
        rows.append({'label': flow.label, 'checked': report.checked,
                     'max_violation': report.max_violation})
    return {'flows': rows}, ok


def suite_moment_bound(seed=0, trials=2000, threads=None, **kw):
    rows, ok = [], True
    alpha = 0.49
    for n in (12, 14):
        theta = n_approximation(cantor_flow(CantorSpec('1/4', n)), n)
        for q in (2, 3):
            for u in (n, n + 0.5, n + 1):
                est = moment_mc(n, q, u, theta, trials, seed, alpha,
                                threads=threads)
                ok &= check('moment_bound', est.within_bound,
                            'n={n} q={q} u={u}: {mean} - 3 * {std_error}'
                            ' against {bound}', n=n, q=q, u=u, mean=est.mean,
                            std_error=est.std_error, bound=est.bound)
                rows.append(est.to_dict())
    return {'estimates': rows}, ok


def suite_tail(seed=0, trials=10000, threads=None, **kw):
    n = 12
    theta = n_approximation(cantor_flow(CantorSpec('1/4', n)), n)
    est = tail_mc(n, 12.0, 1.0, theta, trials, seed, 0.49, q=6,
                  threads=threads)
    return est.to_dict(), est.passed


def suite_geometric_sum(seed=0, tuples=100, **kw):
    rng = make_rng(seed, 'verify', 'geometric')
    thetas = dict((n, n_approximation(cantor_flow(CantorSpec('1/4', n)), n))
                  for n in (12, 14))
    worst, ok = 0.0, True
    for i in range(tuples):
        n = (12, 14)[i % 2]
        N = 2 ** n
        r = int(rng.integers(0, N + 1))
        # u strictly inside (0, sqrt(N) pi/2)
        u = float(rng.uniform(0.05, 0.95)) * math.sqrt(N) * math.pi / 2
        res = geometric_sum_bound(thetas[n], r, u, 0.49)
        worst = max(worst, res.lhs / res.rhs)
    ok &= check('geometric_sum', worst <= 1.0,
                'worst lhs/rhs {worst} over {tuples} tuples', worst=worst,
                tuples=tuples)
    lebesgue = n_approximation(lebesgue_flow(14), 14)
    res = geometric_sum_bound(lebesgue, 0, 14.0, 1.0)
    ok &= check('geometric_sum_simplified', res.lhs <= res.simplified,
                'lebesgue n=14 u=14: {lhs} against {simplified}',
                lhs=res.lhs, simplified=res.simplified)
    return {'tuples': tuples, 'worst_ratio': worst,
            'lebesgue': res._asdict()}, ok


def suite_decay(n=18, u_lo=8.0, u_max=2000.0, threads=None, **kw):
    rows, ok = [], True
    flow = cantor_flow(CantorSpec('1/4', n))
    for seed in DECAY_SEEDS:
        run = decay_pipeline(report_ladder('random', seed, n), flow, u_max,
                             u_lo=u_lo, threads=threads)
        ok &= check('decay_exponent',
                    run.fit.exponent >= 0.40 and run.fit.r_squared >= 0.8,
                    'seed {seed}: exponent {exponent}, r^2 {r_squared}',
                    seed=seed, exponent=run.fit.exponent,
                    r_squared=run.fit.r_squared)
        rows.append(dict(run.fit.to_dict(), seed=seed))
    return {'fits': rows}, ok


def suite_negative_control(n=18, u_lo=8.0, u_max=2000.0, threads=None, **kw):
    flow = cantor_flow(CantorSpec('1/3', n))
    run = decay_pipeline(report_ladder('ones', 0, n), flow, u_max,
                         u_lo=u_lo, threads=threads)
    ok = check('negative_control_decay', run.fit.exponent <= 0.05,
               'all-ones exponent {exponent}', exponent=run.fit.exponent)
    N = 2 ** 16
    ones = deficiency_proxy(constant_word(N))
    ok &= check('negative_control_deficiency', not ones.passed,
                'all-ones deficiency {deficiency}',
                deficiency=ones.deficiency)
    verdicts = []
    for seed in DECAY_SEEDS:
        report = deficiency_proxy(sample_word(N, seed))
        ok &= check('random_word_deficiency', report.passed,
                    'seed {seed}: deficiency {deficiency}', seed=seed,
                    deficiency=report.deficiency)
        verdicts.append(report.verdict)
    return {'fit': run.fit.to_dict(), 'ones_verdict': ones.verdict,
            'random_verdicts': verdicts}, ok


def suite_salem(seed=42, n=18, sparse_n=22, u_lo=8.0, u_max=2000.0,
                threads=None, **kw):
    """Salem runs for a sparse ratio (1/16) and a saturated one (1/3).

    The sparse run uses the deeper walk level *sparse_n*: at 1/16 a
    level-n walk only resolves about n/4 construction levels, and box
    counting needs enough image points to mean anything.
    """
    sparse = salem_report(CantorSpec('1/16'), seed, sparse_n, u_max,
                          u_lo=u_lo, threads=threads)
    ok = check('salem_sparse_box', 0.35 <= sparse.box_dim <= 0.65,
               'box dimension {box_dim}', box_dim=sparse.box_dim)
    ok &= check('salem_sparse_fourier',
                0.15 <= sparse.fourier_exponent <= 0.35,
                'fourier exponent {exponent}',
                exponent=sparse.fourier_exponent)
    capacity = cantor_capacity(CantorSpec('1/16')).dimension
    ok &= check('salem_sparse_capacity', abs(capacity - 0.25) <= 0.05,
                'capacity dimension {capacity}', capacity=capacity)
    ok &= check('salem_sparse_order',
                sparse.fourier_dim <= sparse.box_dim + 0.1,
                'fourier {fourier_dim} against box {box_dim}',
                fourier_dim=sparse.fourier_dim, box_dim=sparse.box_dim)
    saturated = salem_report(CantorSpec('1/3'), seed, n, u_max, u_lo=u_lo,
                             threads=threads)
    ok &= check('salem_saturated_box', 0.85 <= saturated.box_dim <= 1.0,
                'box dimension {box_dim}', box_dim=saturated.box_dim)
    return {'sparse': sparse.to_dict(), 'sparse_capacity': capacity,
            'saturated': saturated.to_dict()}, ok


FAST_SUITES = (('parts_lemma', suite_parts_lemma),
               ('char_exact', suite_char_exact),
               ('moment_oracle', suite_moment_oracle),
               ('frostman', suite_frostman),
               ('flows', suite_flows))

FULL_SUITES = (('moment_bound', suite_moment_bound),
               ('tail_chain', suite_tail),
               ('geometric_sum', suite_geometric_sum),
               ('decay', suite_decay),
               ('negative_control', suite_negative_control),
               ('salem', suite_salem))


def run_verify(full=False, seed=None, threads=None):
    """Runs the fast tier, and the full tier when *full*. Returns an
    ordered mapping of suite name to summary, and whether every check
    passed.

    Without a *seed* each suite uses its own default.
    """
    suites = FAST_SUITES + (FULL_SUITES if full else ())
    kwargs = {'threads': threads}
    if seed is not None:
        kwargs['seed'] = seed
    results, all_ok = OrderedDict(), True
    for name, suite in suites:
        with lab_log.info('verify_suite', suite=name) as act:
            summary, ok = suite(**kwargs)
            act['passed'] = ok
            if ok:
                act.success('{suite} passed')
            else:
                act.failure('{suite} failed')
        results[name] = dict(summary, passed=ok)
        all_ok = all_ok and ok
    return results, all_ok
