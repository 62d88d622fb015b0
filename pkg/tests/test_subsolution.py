"""Constructive subsolution: bump source, shift, margins, feasibility probe."""

import numpy as np
import pytest

from mcsvortex import (
    VortexSet,
    build_bump,
    build_subsolution,
    default_delta,
    integrate,
    make_grid,
    probe_parameters,
    verify_subsolution,
)
from helpers import single_vortex_problem

L = 2.0 * np.pi


@pytest.fixture(scope="module")
def prob():
    # parameters known to admit a verified subsolution (probed in-config)
    return single_vortex_problem(n=64, model_name="u1", lam=40.0, eps=1e-3)


def test_default_delta():
    assert default_delta(make_grid(64, L)) == pytest.approx(L / 8.0)


def test_bump_zero_mean_and_levels(prob):
    delta = L / 8.0
    phi = build_bump(prob.grid, prob.background.vortices, delta)
    assert abs(integrate(phi)) <= 1e-12 * prob.grid.area
    dist = prob.background.vortices.min_distance(prob.grid)
    inner = dist <= delta
    outer = dist >= 2.0 * delta
    a_const = prob.A
    np.testing.assert_allclose(phi.values[inner], -a_const - 1.0, rtol=1e-12)
    far = phi.values[outer]
    assert far.min() == pytest.approx(far.max(), rel=1e-12)  # constant plateau
    assert far.min() > 0.0


def test_bump_radius_validation():
    grid = make_grid(16, L)
    vs = VortexSet.from_triples([[L / 2, L / 2, 1]])
    with pytest.raises(ValueError, match="under-resolved"):
        build_bump(grid, vs, 0.3 * grid.spacing)
    with pytest.raises(ValueError, match="too large"):
        build_bump(grid, vs, L / 4.0)


def test_bump_rejects_overlapping_disks():
    grid = make_grid(64, L)
    vs = VortexSet.from_triples([[L / 2, L / 2, 1], [L / 2 + 1.0, L / 2, 1]])
    with pytest.raises(ValueError, match="overlap"):
        build_bump(grid, vs, 0.45)


def test_subsolution_linear_solve_and_shift(prob):
    r = build_subsolution(prob)
    # u~ solves eps^2 lap^2 u~ - lap u~ = phi with zero mean
    from mcsvortex import bilaplacian, laplacian, mean

    resid = (
        prob.eps**2 * bilaplacian(r.u_tilde).values
        - laplacian(r.u_tilde).values
        - r.phi.values
    )
    assert np.abs(resid).max() <= 1e-9 * (1.0 + np.abs(r.phi.values).max())
    assert abs(mean(r.u_tilde)) <= 1e-12
    assert r.k > 0.0
    np.testing.assert_allclose(r.u_lower.values, r.u_tilde.values - r.k, rtol=0, atol=0)


def test_sign_condition_holds_by_construction(prob):
    r = build_subsolution(prob)
    # s - f(e^{sigma+u_}) >= (s - f(0))/2 pointwise, with strict slack
    assert r.sign_margin >= 0.0
    e = prob.background.w.values * np.exp(r.u_lower.values)
    worst = (prob.model.s - prob.model.f(e)).min()
    assert worst >= 0.5 * (prob.model.s - prob.model.f_at_zero)


def test_verify_subsolution_sets_margins(prob):
    r = verify_subsolution(prob, build_subsolution(prob))
    assert r.verified is True
    assert r.inner_max <= 0.0
    assert r.outer_max <= 0.0
    assert r.margin is not None
    # reported maxima actually bound the margin field
    assert r.margin.values.max() == pytest.approx(max(r.inner_max, r.outer_max))


def test_subsolution_fails_gracefully_at_tiny_lambda(prob):
    # far below the feasibility threshold the margin goes positive
    weak = prob.with_params(lam=0.5)
    r = verify_subsolution(weak, build_subsolution(weak))
    assert r.verified is False
    assert max(r.inner_max, r.outer_max) > 0.0


def test_probe_parameters_table(prob):
    res = probe_parameters(prob, None, [0.5, 5.0, 40.0], [1e-3, 1e-2])
    assert res.lam_grid == (0.5, 5.0, 40.0)
    assert len(res.table) == 3 and len(res.table[0]) == 2
    assert res.table[0][0] is False  # lam = 0.5 infeasible
    assert res.table[2][0] is True  # lam = 40 feasible
    assert res.lam0 is not None and res.lam0 <= 40.0
    assert res.eps_lam is not None
    lines = res.csv_lines()
    assert lines[0].startswith("lambda,")
    assert len(lines) == 4


def test_probe_parameters_requires_increasing_grids(prob):
    with pytest.raises(ValueError, match="increasing"):
        probe_parameters(prob, None, [10.0, 5.0], [1e-3])
