import cmath
import math

import numpy as np
import pytest

from sectorexp.bie_system import build_meshes
from sectorexp.cornerseries import AnalyticRHS, CornerExpansion, CornerIndex, ZetaPolynomial, build_index_set
from sectorexp.geometry import BoundaryCurve, SectorScene, transform_scene
from sectorexp.twoscale import (TermKey, TwoScaleError, convergence_study, errors_decreasing, probe_points,
                                push_traces, solve_unperturbed, two_scale_coeffs)


def _bare_expansion(coeffs):
    idx = build_index_set("pi/2", gamma_max=6)
    return CornerExpansion(idx, coeffs, {}, ZetaPolynomial({}), None, 1.0, 0.5)


def test_zero_rhs_gives_zero_unperturbed_solution(quarter_scene):
    u0 = solve_unperturbed(quarter_scene, AnalyticRHS(real={}))
    assert not np.any(u0.evaluate([0.3 + 0.3j, 0.1 + 0.6j]))


def test_unperturbed_residuals(quarter_two_scale):
    u0 = quarter_two_scale.u0
    assert u0.boundary_residual() < 1e-7
    pts = np.array([0.4 + 0.3j, 0.2 + 0.5j, 0.5 + 0.5j])
    np.testing.assert_allclose(u0.laplacian(pts, h=1e-2), 1.0, atol=1e-3)


def test_arc_trace_is_zero_at_the_sides(quarter_two_scale):
    trace = quarter_two_scale.u0.arc_trace(0.5)
    assert trace(np.array([0.0, math.pi / 2])).tolist() == [0.0, 0.0]


def test_first_power_profile_pulls_back_to_second_coordinate(quarter_scene):
    meshes = build_meshes(transform_scene(quarter_scene))
    fam = push_traces(_bare_expansion({CornerIndex.power(1, 2.0): 1.0 + 0j}), meshes)
    X = meshes.holes.points[meshes.holes.primary]
    np.testing.assert_allclose(fam.values[:, 0], X.imag, atol=1e-14)
    full = meshes.holes.odd_expand(fam.values[:, 0])
    np.testing.assert_array_equal(full[meshes.holes.pairing], -full)


def test_zero_expansion_gives_unperturbed_solution(quarter_scene, quarter_two_scale):
    meshes = build_meshes(transform_scene(quarter_scene))
    ts = two_scale_coeffs(quarter_scene, meshes, _bare_expansion({}), quarter_two_scale.u0, 2)
    assert ts.traces.indices == []
    t = np.array([0.4 + 0.3j, 0.3 + 0.6j])
    np.testing.assert_array_equal(ts.correction(0.1, t), 0.0)
    np.testing.assert_allclose(ts.evaluate(0.1, t), quarter_two_scale.u0.evaluate(t))


def test_outer_expansion_starts_at_first_order(quarter_two_scale):
    t = np.array([0.5 + 0.3j, 0.2 + 0.6j])
    for key in quarter_two_scale.terms:
        if key.n == 0:
            np.testing.assert_allclose(quarter_two_scale.outer_coefficient(key, t), 0.0, atol=1e-14)


def test_coefficient_growth_fit_is_finite(quarter_two_scale):
    C, M = quarter_two_scale.growth
    assert np.isfinite(C) and np.isfinite(M) and M > 0


def test_zero_eps_is_unperturbed(quarter_two_scale):
    t = np.array([0.5 + 0.3j, 0.2 + 0.6j])
    np.testing.assert_array_equal(quarter_two_scale.evaluate(0.0, t), quarter_two_scale.u0.evaluate(t))


def test_vanishing_rhs_has_only_power_terms(step_two_scale):
    assert step_two_scale.terms
    assert all(k.gamma.is_power for k in step_two_scale.terms)
    exp = step_two_scale.expansion
    assert all(abs(exp.coefficient(g)) < 1e-12 for g in exp.idx.entries if not g.is_power)


def test_rational_kappa_exponent_lattice():
    idx = build_index_set("2*pi/3", gamma_max=7)
    assert all((2 * g.magnitude).is_integer() for g in idx.entries)
    logs = [g.alpha[0] for g in idx.entries if idx.term_kind(g) == "log"]
    assert logs == [3, 6]
    assert idx.exceptional == {3: 2, 6: 4}


def test_frames_agree(quarter_two_scale):
    eps = 0.1
    T = np.array([1.2 * cmath.exp(0.3j), 2.0 * cmath.exp(1.0j), 3.0 * cmath.exp(0.7j)])
    tol = quarter_two_scale.tail_estimate(eps, quarter_two_scale.max_cutoff) + 1e-9
    glob = quarter_two_scale.evaluate(eps, eps * T, "global")
    np.testing.assert_allclose(quarter_two_scale.evaluate(eps, T, "inner"), glob, atol=tol)
    t = np.array([0.5 * cmath.exp(0.3j), 0.4 * cmath.exp(1.2j)])
    np.testing.assert_allclose(quarter_two_scale.evaluate(eps, t, "outer"),
                               quarter_two_scale.evaluate(eps, t, "global"), atol=tol)


def test_inner_frame_rejects_points_outside_validity(quarter_two_scale):
    with pytest.raises(TwoScaleError):
        quarter_two_scale.evaluate(0.1, [40.0 + 40j], "inner")


def test_solution_vanishes_on_scaled_hole(quarter_two_scale):
    eps = 0.15
    c = 0.5 * cmath.exp(1j * math.pi / 4)
    nu = np.exp(1j * np.linspace(0.0, 2 * math.pi, 12, endpoint=False))
    h = 4e-3
    vals = [quarter_two_scale.evaluate(eps, eps * (c + (0.1 + j * h) * nu), "global") for j in (1, 2, 3)]
    limit = 3 * vals[0] - 3 * vals[1] + vals[2]
    np.testing.assert_allclose(limit, 0.0, atol=1e-6)


def test_cutoff_beyond_computed_range(quarter_two_scale):
    with pytest.raises(TwoScaleError):
        quarter_two_scale.selected(50.0)


def test_terms_are_ordered_by_exponent_then_order(quarter_two_scale):
    keys = [(k.exponent, k.n) for k in quarter_two_scale.terms]
    assert keys == sorted(keys)
    assert isinstance(quarter_two_scale.terms[0], TermKey)


def test_probe_points_are_deterministic(quarter_scene):
    a = probe_points(quarter_scene, 0.1, 30)
    b = probe_points(quarter_scene, 0.1, 30)
    np.testing.assert_array_equal(a, b)
    assert np.all(np.abs(a) >= 1.5 * 0.1 * quarter_scene.hole_hull())
    assert np.all((np.angle(a) > 0) & (np.angle(a) < math.pi / 2))


def test_zero_data_study_has_zero_errors(quarter_scene, quarter_two_scale):
    meshes = quarter_two_scale.meshes
    ts = two_scale_coeffs(quarter_scene, meshes, _bare_expansion({}), quarter_two_scale.u0, 1)
    rows = convergence_study(ts, [0.1, 0.2], [2.0, 4.0])
    assert [r.sup_error for r in rows] == [0.0] * 4


def test_convergence_study_errors_decrease(quarter_two_scale):
    rows = convergence_study(quarter_two_scale, [0.1, 0.15, 0.2], [2.0, 4.0, 6.0, 8.0])
    assert all(errors_decreasing(rows).values())
    slopes = {r.cutoff: r.slope for r in rows}
    # slope of the error after the lowest cutoff, reported next to the next omitted exponent
    assert slopes[2.0] > 2.0
