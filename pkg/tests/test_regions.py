import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from savbc.channels import (AuxiliaryJoint, DimensionMismatch, SavbcSpec, StateFamily,
                            StochasticMatrix, bs_savbc, bsc, identity_channel, random_spec)
from savbc.regions import (Budget, GridTooLarge, RatePair, RateRegion, bounding_triangle,
                           brute_force_region, compute_region, contains, corner_points,
                           inner_polytope, outer_polytope, random_aux, rate_bounds,
                           simplex_grid, verify_corner_triangle, verify_inner_outer,
                           verify_q_absorption)

SMALL = Budget(directions=16, restarts=4, iterations=400)
C01 = 1 - oracles.h2(0.1)      # 0.531004...
C02 = 1 - oracles.h2(0.2)      # 0.278072...


def _spec(w, *states):
    return SavbcSpec(w, StateFamily(tuple(states)))


def _as_set(region):
    return {tuple(np.round(v, 6)) for v in region.vertices}


def test_rate_pair_rejects_negative():
    with pytest.raises(ValueError):
        RatePair(-0.1, 0.0)
    assert tuple(RatePair(0.1, 0.2)) == (0.1, 0.2)


# ---------------------------------------------------------------- polytopes

def test_inner_independent_u_is_a_segment():
    spec = _spec(bsc(0.1), bsc(0.2))
    r = inner_polytope(AuxiliaryJoint.independent([0.5, 0.5], [0.5, 0.5]), spec)
    assert _as_set(r) == {(0.0, 0.0), (0.0, round(C01, 6))}


def test_inner_u_equals_x():
    spec = _spec(bsc(0.1), bsc(0.2))
    r = inner_polytope(AuxiliaryJoint.identity([0.5, 0.5]), spec)
    assert _as_set(r) == {(0.0, 0.0), (round(C02, 6), 0.0)}
    assert round(C02, 6) == 0.278072


def test_inner_deterministic_u():
    spec = _spec(bsc(0.1), bsc(0.2))
    r = inner_polytope(AuxiliaryJoint.constant([0.5, 0.5]), spec)
    assert _as_set(r) == {(0.0, 0.0), (0.0, 0.531004)}


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        inner_polytope(AuxiliaryJoint.identity([1 / 3] * 3), _spec(bsc(0.1), bsc(0.2)))


def test_outer_contains_inner_and_adds_sum_bound():
    spec = _spec(bsc(0.1), bsc(0.2))
    aux = AuxiliaryJoint.identity([0.5, 0.5])
    inner, outer = inner_polytope(aux, spec), outer_polytope(aux, spec)
    assert outer.contains_region(inner, 1e-12)
    # outer sum bound is I(X;Y|U) + min I(U;Z) = C02, attained at (0, C02)
    assert outer.contains((0.0, C02), 1e-9) and not inner.contains((0.0, C02), 1e-6)


def test_outer_point_mass_q_matches_no_q():
    rng = np.random.default_rng(0)
    spec = random_spec(rng, 2, 2, 2, 2)
    t = rng.dirichlet(np.ones(4)).reshape(2, 2)
    a = outer_polytope(AuxiliaryJoint(t), spec)
    b = outer_polytope(AuxiliaryJoint(np.stack([t, np.zeros_like(t)], axis=2)), spec)
    assert a.distance(b) < 1e-12


def test_outer_independent_u_and_q():
    spec = _spec(bsc(0.1), bsc(0.2))
    t = np.einsum("u,xq->uxq", [0.3, 0.7], np.full((2, 2), 0.25))
    r = outer_polytope(AuxiliaryJoint(t), spec)
    assert _as_set(r) == {(0.0, 0.0), (0.0, 0.531004)}


def test_rate_bounds_with_q_is_average():
    rng = np.random.default_rng(1)
    spec = random_spec(rng, 2, 2, 2, 1)
    t = rng.dirichlet(np.ones(8)).reshape(2, 2, 2)
    b = rate_bounds(AuxiliaryJoint(t), spec)
    expect = sum(t[:, :, q].sum() * rate_bounds(AuxiliaryJoint(t[:, :, q] / t[:, :, q].sum()), spec).private
                 for q in range(2))
    assert b.private == pytest.approx(expect, abs=1e-12)


# ---------------------------------------------------------------- corners and triangle

def test_corner_points_examples():
    c1, c2 = corner_points(_spec(bsc(0.1), bsc(0.2)))
    assert (c1.rc, c2.rp) == pytest.approx((0.278072, 0.531004), abs=1e-6)
    c1, c2 = corner_points(_spec(identity_channel(2), bsc(0.5)))
    assert (c1.rc, c2.rp) == pytest.approx((0.0, 1.0), abs=1e-7)
    c1, c2 = corner_points(_spec(bsc(0.2), bsc(0.1)))
    assert (c1.rc, c2.rp) == pytest.approx((0.278072, 0.278072), abs=1e-6)


def test_bounding_triangle_examples():
    assert _as_set(bounding_triangle(_spec(bsc(0.0), bsc(0.0)))) == {(0, 0), (1, 0), (0, 1)}
    assert _as_set(bounding_triangle(_spec(bsc(0.5), bsc(0.0)))) == {(0, 0)}
    assert _as_set(bounding_triangle(_spec(bsc(0.1), bsc(0.0)))) == {(0, 0), (0.531004, 0), (0, 0.531004)}


def test_contains_examples():
    spec = _spec(bsc(0.1), bsc(0.2))
    tri = bounding_triangle(spec)
    c1, c2 = corner_points(spec)
    region = RateRegion.hull([(0, 0), tuple(c1), tuple(c2)])
    assert contains(region, (0, 0))
    assert contains(region, tuple(c1), 1e-9)
    assert not contains(tri, (0.4, 0.4))


# ---------------------------------------------------------------- region search

def test_noiseless_region_is_unit_triangle():
    r = compute_region(_spec(bsc(0.0), bsc(0.0)), SMALL)
    assert _as_set(r) == {(0, 0), (1, 0), (0, 1)}


def test_useless_w_gives_origin():
    w = StochasticMatrix([[0.4, 0.6], [0.4, 0.6]])
    r = compute_region(_spec(w, bsc(0.1)), SMALL)
    assert np.allclose(r.vertices, 0.0, atol=1e-9)


def test_compute_region_is_reproducible_across_threads():
    spec = random_spec(np.random.default_rng(2), 2, 2, 2, 2)
    a = compute_region(spec, Budget(directions=8, restarts=4, iterations=200, seed=3, threads=1))
    b = compute_region(spec, Budget(directions=8, restarts=4, iterations=200, seed=3, threads=3))
    assert np.array_equal(a.vertices, b.vertices)


def test_budget_exhaustion_flags_region():
    spec = random_spec(np.random.default_rng(4), 2, 2, 2, 2)
    r = compute_region(spec, Budget(directions=64, restarts=16, iterations=2000, max_seconds=0.0))
    assert "budget_exhausted" in r.warnings
    # the corner points are always included
    assert len(r) >= 2


def test_budget_validation():
    with pytest.raises(ValueError):
        Budget(directions=0)


@settings(max_examples=4)
@given(st.integers(0, 2**32 - 1))
def test_sampled_inner_polytopes_lie_in_region(seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, 2, 2, 2, 2)
    region = compute_region(spec, SMALL)
    tri = bounding_triangle(spec)
    assert tri.contains_region(region, 1e-6)
    for _ in range(10):
        inner = inner_polytope(random_aux(rng, 3, 2), spec)
        assert region.contains_region(inner, 1e-3)


@settings(max_examples=3)
@given(st.integers(0, 2**32 - 1))
def test_adding_a_state_never_enlarges_the_region(seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, 2, 2, 2, 1)
    extra = StochasticMatrix(rng.dirichlet(np.ones(2), size=2))
    bigger = SavbcSpec(spec.w, spec.family.with_vertex(extra))
    a = compute_region(spec, SMALL)
    b = compute_region(bigger, SMALL)
    assert a.contains_region(b, 1e-2)


# ---------------------------------------------------------------- brute force

def test_simplex_grid_counts():
    pts = list(simplex_grid(3, 4))
    assert len(pts) == 15
    assert all(abs(p.sum() - 1) < 1e-12 for p in pts)


def test_brute_force_guard():
    with pytest.raises(GridTooLarge):
        brute_force_region(random_spec(np.random.default_rng(0), 3, 3, 3, 1), 200, u_size=4)


def test_brute_force_coarsest_grid_is_point_masses():
    spec = _spec(bsc(0.1), bsc(0.2))
    # point-mass auxiliaries put all mass on one input, so every bound is 0
    assert np.allclose(brute_force_region(spec, 1, u_size=2).vertices, 0.0)


def test_brute_force_refinement_is_monotone():
    spec = random_spec(np.random.default_rng(6), 2, 2, 2, 2)
    coarse = brute_force_region(spec, 2, u_size=2)
    fine = brute_force_region(spec, 4, u_size=2)
    finer = brute_force_region(spec, 8, u_size=2)
    assert fine.contains_region(coarse, 1e-9) and finer.contains_region(fine, 1e-9)


@settings(max_examples=3)
@given(st.integers(0, 2**32 - 1))
def test_search_and_brute_force_agree(seed):
    spec = random_spec(np.random.default_rng(seed), 2, 2, 2, 2)
    tol = 1e-2
    bf = brute_force_region(spec, 8, u_size=2)
    cr = compute_region(spec, Budget(directions=16, restarts=4, iterations=400, u_size=2))
    assert cr.contains_region(bf, 2 * tol)
    assert cr.distance(bf) <= 5 * tol


# ---------------------------------------------------------------- equivalence checks

def test_q_absorption_point_mass_q_is_equality():
    spec = random_spec(np.random.default_rng(7), 2, 2, 2, 2)
    r = verify_q_absorption(spec, samples=20, seed=1, q_size=1)
    assert r.passed and r.metrics["max_violation"] <= 1e-9


@pytest.mark.parametrize("q_size", [2, 3])
def test_q_absorption_random(q_size):
    spec = random_spec(np.random.default_rng(8), 2, 2, 2, 2)
    r = verify_q_absorption(spec, samples=50, seed=2, q_size=q_size)
    assert r.passed, r.line()


def test_inner_outer_point_mass_u():
    spec = random_spec(np.random.default_rng(9), 2, 2, 2, 2)
    aux = AuxiliaryJoint.constant([0.4, 0.6])
    a, b = inner_polytope(aux, spec), outer_polytope(aux, spec)
    assert a.distance(b) < 1e-12 and np.allclose(a.vertices[:, 0], 0)


def test_inner_outer_random_specs():
    for seed in range(3):
        spec = random_spec(np.random.default_rng(seed), 2, 2, 2, 2)
        r = verify_inner_outer(spec, samples=100, seed=seed)
        assert r.metrics["containment_violations"] == 0
        assert r.passed, r.line()


def test_corner_triangle_negative_control():
    spec = bs_savbc(0.1, 0.05, 0.2)
    bad = RateRegion.hull([(0, 0), (0.9, 0), (0, 0.1)])
    r = verify_corner_triangle(spec, bad)
    assert not r.passed and r.metrics["vertices_outside_triangle"] == 1
