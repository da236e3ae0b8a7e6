import numpy as np
import pytest

from sectorexp.bie_system import (BlockSystemError, assemble_M, build_meshes, chebyshev_coefficients, data_vector,
                                  neumann_series, solve_direct, taylor_blocks)
from sectorexp.geometry import BoundaryCurve, symmetric_scene
from sectorexp.potential import interior_trace

ETAS = (0.05, 0.1, 0.2, 0.3)


def annulus_value(r, theta, eta):
    # u = A r sin + B sin / r with A + B = 1 on r = 1 and eta A + B / eta = 0 on r = eta
    A = 1 / (1 - eta**2)
    B = -(eta**2) / (1 - eta**2)
    return (A * r + B / r) * np.sin(theta)


@pytest.fixture(scope="module")
def annulus():
    return build_meshes(symmetric_scene(BoundaryCurve.circle(0, 1.0), crossing=[BoundaryCurve.circle(0, 1.0)]))


@pytest.fixture(scope="module")
def two_hole():
    return build_meshes(symmetric_scene(BoundaryCurve.circle(0, 1.0), pairs=[BoundaryCurve.circle(0.5j, 0.25)]))


def test_annulus_has_no_pair_unknowns(annulus):
    assert annulus.n_pairs == 0
    assert annulus.size == annulus.n_outer + annulus.n_holes


def test_two_hole_has_one_pair_unknown(two_hole):
    assert two_hole.n_pairs == 1
    M = assemble_M(two_hole, 0.2).matrix
    assert M.shape == (two_hole.size, two_hole.size)
    assert np.count_nonzero(M[-1, :two_hole.n_outer]) == 0


def test_zero_eta_decouples(two_hole):
    sys0 = assemble_M(two_hole, 0.0)
    for key in ("M12", "M13", "M21"):
        assert not np.any(sys0.blocks[key])


def test_annulus_separation_of_variables(annulus):
    sol = solve_direct(assemble_M(annulus, 0.3), lambda z: z.imag, None)
    assert sol.evaluate([0.6j])[0] == pytest.approx(0.494506, abs=1e-6)
    assert sol.evaluate([0.6j])[0] == pytest.approx(annulus_value(0.6, np.pi / 2, 0.3), abs=1e-10)
    fast = sol.evaluate([2.0j], frame="fast")[0]
    assert fast == pytest.approx(annulus_value(0.6, np.pi / 2, 0.3), abs=1e-10)


def test_zero_data_gives_zero_solution(two_hole):
    sol = solve_direct(assemble_M(two_hole, 0.2), None, None)
    assert not np.any(sol.vector)


def test_solution_is_odd(two_hole):
    sol = solve_direct(assemble_M(two_hole, 0.2), lambda z: z.imag + z.real * z.imag, lambda z: z.imag)
    p = np.array([0.5 + 0.3j, -0.2 + 0.6j, 0.7 + 0.1j])
    np.testing.assert_allclose(sol.evaluate(np.conj(p)), -sol.evaluate(p), atol=1e-9)
    np.testing.assert_allclose(sol.evaluate(p / 0.2 * 0.2, "slow"), sol.evaluate(p / 0.2, "fast"), atol=1e-12)


def test_outer_boundary_condition(annulus):
    sol = solve_direct(assemble_M(annulus, 0.3), lambda z: z.imag, None)
    B = annulus.outer
    # trace of w plus the hole field W(x / eta) on the outer boundary
    trace = interior_trace(B, sol.phi_full) + sol.fast_part(B.points / 0.3)
    np.testing.assert_allclose(trace, B.points.imag, atol=1e-7)


def test_inadmissible_eta(two_hole):
    with pytest.raises(BlockSystemError):
        assemble_M(two_hole, 1.5)


def test_taylor_blocks_vanish_at_order_zero(two_hole):
    tb = taylor_blocks(two_hole, 4)
    M0 = tb.matrices[0]
    nB, nQ = two_hole.n_outer, two_hole.n_holes
    assert not np.any(M0[:nB, nB:])
    assert not np.any(M0[nB:nB + nQ, :nB])


def test_taylor_reassembly_converges(two_hole):
    tb = taylor_blocks(two_hole, 8)
    exact = assemble_M(two_hole, 0.2).matrix
    errs = [np.max(np.abs(tb.matrix(0.2, n) - exact)) for n in (2, 4, 6, 8)]
    assert all(b < a for a, b in zip(errs[:-1], errs[1:]))
    assert errs[-1] < 1e-5


def test_annulus_block_decay_ratio(annulus):
    tb = taylor_blocks(annulus, 8)
    # hole hull and outer radius are both 1
    assert tb.decay_ratio == pytest.approx(1.0, abs=0.1)


def test_annulus_eta_series(annulus):
    series = neumann_series(taylor_blocks(annulus, 5), data_vector(annulus, lambda z: z.imag, None))
    x = np.array([0.6j, 0.3 + 0.2j])
    np.testing.assert_allclose(series.outer_coefficient(0, x), x.imag, atol=1e-8)
    assert series.outer_coefficient(2, [0.6j])[0] == pytest.approx(-1.06667, abs=1e-5)
    for n in (1, 3, 5):
        assert np.max(np.abs(series.outer_coefficient(n, x))) < 1e-8


def test_annulus_order_zero_has_no_hole_field(annulus):
    series = neumann_series(taylor_blocks(annulus, 1), data_vector(annulus, lambda z: z.imag, None))
    X = np.array([2.0j, 1.5 + 1.5j])
    np.testing.assert_allclose(series.term(0).fast_part(X), 0.0, atol=1e-12)


@pytest.mark.parametrize("geometry", ["annulus", "two_hole"])
def test_truncation_order(geometry, request):
    # hole data X2 excites every power of eta (with Psi = 0 the annulus series is even)
    meshes = request.getfixturevalue(geometry)
    psi = Psi = lambda z: z.imag
    series = neumann_series(taylor_blocks(meshes, 3), data_vector(meshes, psi, Psi))
    direct = {eta: solve_direct(assemble_M(meshes, eta), psi, Psi).vector for eta in ETAS}
    for N in (0, 1, 2):
        errs = [np.max(np.abs(direct[eta] - series.partial_vector(eta, N))) for eta in ETAS]
        slope = np.polyfit(np.log(ETAS), np.log(errs), 1)[0]
        assert abs(slope - (N + 1)) <= 0.3, (N, slope)


def test_chebyshev_cross_check(two_hole):
    rhs = data_vector(two_hole, lambda z: z.imag, lambda z: z.imag)
    series = neumann_series(taylor_blocks(two_hole, 3), rhs)
    cheb = chebyshev_coefficients(two_hole, rhs, 3, 0.3)
    for n in range(4):
        assert np.max(np.abs(cheb[n] - series.coefficients[n])) < 1e-8
