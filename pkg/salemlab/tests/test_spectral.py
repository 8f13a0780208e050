# -*- coding: utf-8 -*-

from __future__ import absolute_import

import math
from fractions import Fraction

import numpy as np
import pytest

from salemlab.common import (InvalidSpecError,
                             DomainError,
                             ResourceLimitError,
                             RegimeError,
                             ValidityError)
from salemlab.dyadic import (AtomicMeasure,
                             CantorSpec,
                             cantor_flow,
                             lebesgue_flow,
                             n_approximation)
from salemlab.walks import WalkPath, RefinementLadder, build_ladder
from salemlab.spectral import (SpectrumSample,
                               pushout_measure,
                               transform_at,
                               transform_grid,
                               char_exact,
                               char_enumerated,
                               moment_exact_small,
                               q1_double_sum,
                               moment_bound,
                               moment_intermediate_bound,
                               moment_mc,
                               default_tail_q,
                               tail_mc,
                               tail_exact_small,
                               parts_lemma_eval,
                               geometric_sum_bound,
                               energy_offdiag,
                               energy_fourier_crosscheck,
                               decay_fit,
                               error_chain,
                               valid_u_max,
                               ladder_constants,
                               thm42_grid,
                               parse_grid,
                               decay_pipeline,
                               lattice_transform,
                               effective_atoms,
                               peak_factor,
                               NORMALIZED_METHOD)


def _cantor_theta(n, ratio='1/4'):
    return n_approximation(cantor_flow(CantorSpec(ratio, n)), n)


def test_char_exact_matches_enumeration():
    for N in (4, 16):
        for h in range(1, min(N, 10) + 1):
            for u in (0.5, 2.0, 5.0):
                assert abs(char_enumerated(u, N, h)
                           - char_exact(u, N, h)) <= 1e-12

    with pytest.raises(DomainError):
        char_exact(1.0, 4, 0)
    with pytest.raises(DomainError):
        char_enumerated(1.0, 4, 5)
    with pytest.raises(ResourceLimitError):
        char_enumerated(1.0, 64, 17)


def test_pushout_merges_atoms():
    path = WalkPath('1100')
    theta = n_approximation(lebesgue_flow(2), 2)
    nu = pushout_measure(path, theta)
    assert nu.positions.tolist() == [0.0, 0.5, 1.0]
    assert nu.weights.tolist() == [0.25, 0.5, 0.25]
    assert nu.total_mass == pytest.approx(1.0)

    with pytest.raises(DomainError):
        pushout_measure(path, AtomicMeasure([0.3], [1.0]))


def test_transform_grid():
    nu = pushout_measure(WalkPath('11010010'),
                         n_approximation(lebesgue_flow(3), 3))
    assert transform_at(nu, 0) == pytest.approx(1.0)
    grid = np.linspace(0, 50, 201)
    single = transform_grid(nu, grid, threads=1)
    multi = transform_grid(nu, grid, threads=3)
    assert np.array_equal(single.values, multi.values)
    assert single.values[37] == pytest.approx(transform_at(nu, grid[37]))
    assert len(single) == 201
    assert single.to_rows()[0] == (0.0, pytest.approx(1.0), 0.0,
                                   pytest.approx(1.0))

    with pytest.raises(DomainError):
        transform_at(nu, float('nan'))
    with pytest.raises(DomainError):
        transform_grid(nu, [2.0, 1.0])
    with pytest.raises(DomainError):
        transform_grid(nu, [-1.0, 1.0])


def test_spectrum_envelope():
    grid = np.array([0.0, 1.0, 1.5, 2.0, 3.0])
    values = np.array([1.0, 0.5, 0.75, 0.25, 0.5 + 0.5j])
    spec = SpectrumSample(grid, values)
    assert [(b.lo, b.hi) for b in spec.envelope] == [(0.0, 0.0), (1.0, 2.0),
                                                    (2.0, 4.0)]
    assert spec.envelope[1].sup == 0.75
    assert spec.envelope[1].argmax == 1.5
    assert spec.envelope[2].sup == pytest.approx(math.sqrt(0.5))
    assert spec.u_range == (0.0, 3.0)

    with pytest.raises(DomainError):
        SpectrumSample(grid, values[:3])


def test_second_moment_closed_form():
    theta = _cantor_theta(3)
    for u in (0.5, 1.5, 4.0):
        assert q1_double_sum(theta, 3, u) == pytest.approx(
            moment_exact_small(3, 1, u, theta), abs=1e-12)


def test_moment_mc_agrees_with_enumeration():
    theta = _cantor_theta(3)
    est = moment_mc(3, 1, 2.0, theta, 20000, 1, 0.49)
    assert est.exact is not None
    assert est.std_error > 0
    assert abs(est.mean - est.exact) <= 5 * est.std_error
    assert est.to_dict()['trials'] == 20000

    again = moment_mc(3, 1, 2.0, theta, 20000, 1, 0.49, threads=4)
    assert again.mean == est.mean
    assert again.std_error == est.std_error

    with pytest.raises(InvalidSpecError):
        moment_mc(3, 1, 2.0, theta, 10, 1, 0.49)
    with pytest.raises(InvalidSpecError):
        moment_mc(3, 0, 2.0, theta, 1000, 1, 0.49)


def test_moment_bounds():
    assert moment_bound(1, 1.0, 0.5) == pytest.approx(22.0)
    assert moment_intermediate_bound(1, 1.0, 0.5) == pytest.approx(22.0)
    for q in (2, 3, 5):
        for u in (2.0, 12.0):
            assert (moment_intermediate_bound(q, u, 0.49)
                    <= moment_bound(q, u, 0.49))


def test_tail_estimates():
    assert default_tail_q(1) == 6
    assert default_tail_q(0.5) == 12

    theta = _cantor_theta(2)
    prob, chain = tail_exact_small(2, 2.0, 1.0, theta, 0.49)
    assert isinstance(prob, Fraction)
    assert 0 <= prob <= 1
    assert prob <= chain

    theta = _cantor_theta(6)
    est = tail_mc(6, 6.0, 1.0, theta, 2000, 3, 0.49)
    assert est.q == 6
    assert est.passed
    assert est.threshold == pytest.approx(6.0 ** (-0.98 + 1.0))

    with pytest.raises(InvalidSpecError):
        tail_mc(6, 6.0, 0.0, theta, 2000, 3, 0.49)


def test_parts_lemma():
    mu = AtomicMeasure([0.2, 0.7], [0.5, 0.25])
    res = parts_lemma_eval(mu, lambda t: t ** 2, lambda t: 2 * t)
    assert res.lhs == pytest.approx(0.1425)
    assert res.rel_error <= 1e-12
    assert res.quadrature_rhs == pytest.approx(res.lhs, abs=1e-3)

    res = parts_lemma_eval(mu, np.sin)
    assert res.quadrature_rhs is None
    assert res.abs_error <= 1e-12

    empty = parts_lemma_eval(AtomicMeasure([], []), np.cos)
    assert empty.lhs == empty.rhs == 0.0

    with pytest.raises(DomainError):
        parts_lemma_eval(AtomicMeasure([1.5], [1.0]), np.cos)
    with pytest.raises(InvalidSpecError):
        parts_lemma_eval(mu, np.cos, quad_step=0.1)


def test_geometric_sum_lebesgue():
    theta = n_approximation(lebesgue_flow(10), 10)
    res = geometric_sum_bound(theta, 0, 10.0, 1.0)
    assert res.a == pytest.approx(math.cos(10.0 / 32))
    assert res.lhs <= res.rhs
    assert res.lhs <= res.simplified

    top = geometric_sum_bound(theta, 1024, 10.0, 1.0)
    # only h = 0 survives at r = N
    assert top.lhs == pytest.approx(1 / 1024.0)

    with pytest.raises(RegimeError):
        geometric_sum_bound(theta, 0, 0.0, 1.0)
    with pytest.raises(RegimeError):
        geometric_sum_bound(theta, 0, 32 * math.pi / 2 + 1, 1.0)
    with pytest.raises(DomainError):
        geometric_sum_bound(theta, 2000, 10.0, 1.0)


def test_energy():
    mu = AtomicMeasure([0.0, 1.0, 0.5], [1.0, 1.0, 0.0])
    assert energy_offdiag(mu, 0.5) == pytest.approx(2.0)
    assert energy_offdiag(AtomicMeasure([0.5], [1.0]), 0.5) == 0.0

    with pytest.raises(DomainError):
        energy_offdiag(mu, 1.0)

    theta = _cantor_theta(6)
    grid = np.linspace(1, 100, 400)
    assert energy_fourier_crosscheck(theta, 0.4, grid) > 0
    with pytest.raises(DomainError):
        energy_fourier_crosscheck(theta, 0.4, [0.0, 1.0])


def test_decay_fit_power_law():
    grid = parse_grid('geom:1:4096:8')
    exact = SpectrumSample(grid, grid ** -0.5)
    fit = decay_fit(exact)
    assert fit.exponent == pytest.approx(0.5, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.blocks == 13

    flat = decay_fit(SpectrumSample(grid, np.ones(grid.size)))
    assert abs(flat.exponent) <= 1e-9

    ranged = decay_fit(exact, u_lo=16, u_hi=1024)
    assert ranged.u_range == (16.0, 1024.0)
    assert ranged.blocks == 7

    with pytest.raises(DomainError):
        decay_fit(exact, u_lo=8, u_hi=20)


def test_decay_fit_oscillating():
    grid = parse_grid('geom:1:1099511627776:8')
    values = grid ** -0.25 * np.cos(grid) ** 2
    fit = decay_fit(SpectrumSample(grid, values), u_lo=2, u_hi=2 ** 40 - 1)
    assert fit.blocks == 39
    assert fit.exponent == pytest.approx(0.25, abs=0.05)


def test_validity_and_error_chain():
    assert error_chain(10, 0.0, 1.0, 1.0) == 0.0
    assert error_chain(10, 2.0, 1.0, 0.0) == pytest.approx(
        10 * 11 * 2.0 / 32)
    assert valid_u_max(18) == pytest.approx(0.1 * 512 / (18 * 19))
    with pytest.raises(DomainError):
        valid_u_max(0)


def test_grids():
    assert thm42_grid(4).tolist() == [4.0, 4.25, 4.5, 4.75, 5.0]
    assert parse_grid('thm42:4').tolist() == thm42_grid(4).tolist()
    assert parse_grid('linear:1:2:0.25').tolist() == [1.0, 1.25, 1.5, 1.75,
                                                      2.0]
    assert parse_grid('geom:1:8:2') == pytest.approx(
        [1, 2 ** 0.5, 2, 2 ** 1.5, 4, 2 ** 2.5, 8])
    assert parse_grid('3,1,2').tolist() == [1.0, 2.0, 3.0]

    for bad in ('linear:2:1:1', 'geom:0:8:2', 'bogus:1', 'thm42:0', ''):
        with pytest.raises(InvalidSpecError):
            parse_grid(bad)


def test_ladder_constants():
    single = RefinementLadder(0, 4, [WalkPath('1' * 16)], [])
    assert ladder_constants(single) == (0.0, 0.0)
    C1, C2 = ladder_constants(build_ladder(2, 3, 7))
    assert C1 > 0 and C2 > 0


def test_decay_pipeline():
    ladder = build_ladder(1, 8, 14)
    flow = cantor_flow(CantorSpec('1/4', 14))
    run = decay_pipeline(ladder, flow, 200.0, u_lo=2.0)
    assert run.n == 14
    assert run.beyond_validity
    assert run.valid_u_max == pytest.approx(valid_u_max(14))
    assert run.spectrum.total_mass == pytest.approx(1.0)
    lo, hi = run.spectrum.u_range
    assert 2.0 <= lo and hi <= 200.0 and hi - lo > 190.0
    # 2^7 equal atoms
    assert run.spectrum.floor == pytest.approx(1 / 128.0)
    assert run.fit.u_range == (2.0, 128.0)
    assert run.fit.method == NORMALIZED_METHOD
    assert run.fit.blocks >= 4
    assert len(run.fit.centers) == len(run.fit.levels) == run.fit.blocks
    assert np.all(run.spectrum.uncertainty > 0)

    bare = decay_pipeline(ladder, flow, 200.0, u_lo=2.0, fit=False)
    assert bare.fit is None
    assert np.array_equal(bare.spectrum.values, run.spectrum.values)

    with pytest.raises(ValidityError):
        decay_pipeline(ladder, flow, 200.0, strict=True)


def test_lattice_transform_matches_direct_sum():
    path = build_ladder(3, 4, 10).finest
    theta = _cantor_theta(10)
    spec = lattice_transform(path, theta, 1.0, 40.0)
    nu = pushout_measure(path, theta)
    assert spec.u_range[0] >= 1.0 and spec.u_range[1] <= 40.0
    for i in (0, len(spec) // 2, len(spec) - 1):
        assert spec.values[i] == pytest.approx(transform_at(nu, spec.grid[i]),
                                               abs=1e-9)
    assert spec.total_mass == pytest.approx(1.0)
    assert spec.spread == pytest.approx(nu.positions[-1] - nu.positions[0])
    assert spec.effective_atoms == pytest.approx(effective_atoms(nu))
    # at most pi / (4 spread) between samples
    assert np.max(np.diff(spec.grid)) <= math.pi / (4 * spec.spread) + 1e-12

    with pytest.raises(DomainError):
        lattice_transform(path, theta, 40.0, 1.0)
    with pytest.raises(InvalidSpecError):
        lattice_transform(path, theta, 1.0, 40.0, oversample=0)


def test_effective_atoms():
    assert effective_atoms(AtomicMeasure([0.1, 0.2, 0.3, 0.4], [1.0] * 4)) \
        == pytest.approx(4.0)
    assert effective_atoms(AtomicMeasure([0.1, 0.2], [3.0, 1.0])) \
        == pytest.approx(1.6)
    assert effective_atoms(AtomicMeasure([0.5], [0.0])) == 0.0


def test_peak_factor():
    assert peak_factor(0.5) == 1.0
    assert peak_factor(1) == 1.0
    # harmonic numbers
    assert peak_factor(4) == pytest.approx(25 / 12.0, abs=1e-3)
    assert peak_factor(100) == pytest.approx(5.18738, abs=1e-4)


def _wobbly_power_law():
    grid = parse_grid('geom:1:4096:8')
    return grid, grid ** -0.4 * (1.0 + 0.3 * np.cos(grid))


def test_decay_fit_scale_equivariance():
    grid, values = _wobbly_power_law()
    base = decay_fit(SpectrumSample(grid, values))
    scaled = decay_fit(SpectrumSample(grid, 7.0 * values))
    assert scaled.exponent == pytest.approx(base.exponent, rel=1e-9)
    assert scaled.intercept == pytest.approx(base.intercept + math.log(7.0))
    assert scaled.r_squared == pytest.approx(base.r_squared)

    kw = {'spread': 3.0, 'effective_atoms': 1000.0}
    base = decay_fit(SpectrumSample(grid, values, total_mass=1.0, **kw),
                     normalized=True)
    scaled = decay_fit(SpectrumSample(grid, 7.0 * values, total_mass=7.0,
                                      **kw), normalized=True)
    assert base.method == NORMALIZED_METHOD
    assert scaled.blocks == base.blocks
    assert scaled.exponent == pytest.approx(base.exponent, rel=1e-9)
    assert scaled.intercept == pytest.approx(base.intercept + math.log(7.0))


def test_normalized_fit_stops_at_atom_floor():
    grid = parse_grid('geom:1:4096:8')
    # a power law sitting on a floor of 0.01
    values = np.sqrt(grid ** -1.0 + 0.01)
    spec = SpectrumSample(grid, values, total_mass=1.0, spread=0.5,
                          effective_atoms=100.0)
    assert spec.floor == pytest.approx(0.01)
    fit = decay_fit(spec, normalized=True)
    # levels stay above 1.5 floors only while 1/u > 0.005
    assert fit.levels[-1] ** 2 > 0.015
    assert all(c < 256 for c in fit.centers)
    assert fit.exponent > 0.2

    plain = decay_fit(SpectrumSample(grid, values))
    assert plain.blocks == 13
    assert plain.exponent < fit.exponent
