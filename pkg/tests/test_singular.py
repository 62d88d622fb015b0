"""Singular vortex background: construction and the defining identities."""

import numpy as np
import pytest

from mcsvortex import (
    VortexSet,
    build_sigma,
    default_core_scale,
    integrate,
    make_grid,
    verify_singular_identities,
)

L = 2.0 * np.pi


@pytest.fixture(scope="module")
def single_128():
    grid = make_grid(128, L)
    vs = VortexSet.from_triples([[L / 2, L / 2, 1]])
    return build_sigma(grid, vs)


def test_vortex_set_basics():
    vs = VortexSet.from_triples([[1.0, 2.0, 1], [4.0, 5.0, 2]])
    assert vs.count == 3
    assert vs.points == ((1.0, 2.0), (4.0, 5.0))
    assert vs.multiplicities == (1, 2)
    assert vs.pairwise_separation(L) == pytest.approx(np.hypot(3.0, 3.0))
    single = VortexSet.from_triples([[1.0, 1.0, 1]])
    assert single.pairwise_separation(L) == np.inf


def test_vortex_set_wrapped_separation():
    # points near opposite edges are close through the boundary
    vs = VortexSet.from_triples([[0.1, 0.0, 1], [L - 0.1, 0.0, 1]])
    assert vs.pairwise_separation(L) == pytest.approx(0.2, abs=1e-12)


@pytest.mark.parametrize(
    "triples, msg",
    [
        ([], "at least one"),
        ([[1.0, 1.0, 0]], "positive integers"),
        ([[1.0, 1.0, -2]], "positive integers"),
        ([[1.0, 1.0]], "triple"),
    ],
)
def test_vortex_set_validation(triples, msg):
    with pytest.raises(ValueError, match=msg):
        VortexSet.from_triples(triples)


def test_sigma_has_zero_mean(single_128):
    assert abs(integrate(single_128.sigma)) <= 1e-8


def test_w_nonnegative_and_vanishing_at_vortices(single_128):
    w = single_128.w.values
    assert w.min() >= 0.0
    assert single_128.vortices_on_nodes
    center = single_128.grid.n // 2
    assert w[center, center] == 0.0
    # w grows ~ dist^2 away from a simple vortex; neighbors remain tiny
    assert w[center + 1, center] <= (3 * single_128.grid.spacing) ** 2


def test_background_constant_matches_vortex_number(single_128):
    assert single_128.A == pytest.approx(4.0 * np.pi * 1 / L**2, rel=1e-14)
    assert single_128.count == 1


def test_source_balance(single_128):
    # the screened source integrates to 4 pi n on the torus
    assert single_128.source_flux_rel <= 1e-8
    assert single_128.solvability_defect <= 1e-8


def test_identity_report_single(single_128):
    rep = verify_singular_identities(single_128)
    assert rep.residual_rel <= 1e-6
    assert abs(rep.sigma_integral) <= 1e-8
    assert rep.w_min >= 0.0
    assert rep.passed
    assert any("passed" in line for line in rep.summary_lines())


def test_identity_report_multi_vortex():
    grid = make_grid(128, L)
    vs = VortexSet.from_triples([[L / 4, L / 4, 1], [3 * L / 4, L / 2, 2]])
    sb = build_sigma(grid, vs)
    assert sb.count == 3
    rep = verify_singular_identities(sb)
    assert rep.passed
    assert abs(rep.sigma_integral) <= 1e-8


def test_q_field_nonnegative(single_128):
    assert single_128.q.values.min() >= 0.0
    rep = verify_singular_identities(single_128)
    assert rep.q_limit_rel <= 1e-2  # near-field limit 4 e^{c} at simple vortices


def test_w_lap_sigma_identity(single_128):
    np.testing.assert_allclose(
        single_128.w_lap_sigma.values, -single_128.A * single_128.w.values, rtol=0, atol=0
    )


def test_core_scale_default_tracks_physical_width():
    g64 = make_grid(64, L)
    g256 = make_grid(256, L)
    # fine grids share one physical width; very coarse grids fall back to 2h
    assert default_core_scale(g256) == pytest.approx(2.0 * L / 128.0)
    assert default_core_scale(g64) == pytest.approx(2.0 * max(g64.spacing, L / 128.0))


def test_off_node_vortex_is_allowed():
    grid = make_grid(64, L)
    shift = 0.37 * grid.spacing
    vs = VortexSet.from_triples([[L / 2 + shift, L / 2, 1]])
    sb = build_sigma(grid, vs)
    assert not sb.vortices_on_nodes
    assert sb.w.values.min() >= 0.0
    assert abs(integrate(sb.sigma)) <= 1e-8
