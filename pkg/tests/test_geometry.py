import cmath
import math

import numpy as np
import pytest

from sectorexp.geometry import (BoundaryCurve, GeometryError, Opening, PlanePoint, SectorScene,
                                conformal_power_map, odd_extend_domain, parse_opening, transform_scene,
                                validate_pattern)


def test_power_map_fixes_one():
    assert conformal_power_map(1.0 + 0j, 3.7) == pytest.approx(1.0)


def test_power_map_squares_i():
    assert conformal_power_map(1j, 2.0) == pytest.approx(-1.0)


def test_power_map_square_root_in_polar_form():
    w = conformal_power_map(PlanePoint.from_polar(4.0, math.pi / 3), 0.5)
    assert w.rho == pytest.approx(2.0)
    assert w.theta == pytest.approx(math.pi / 6)


def test_power_map_rejects_angle_overflow():
    with pytest.raises(GeometryError):
        conformal_power_map(cmath.exp(3j), 2.5)


def test_half_disk_extends_to_full_disk():
    half = BoundaryCurve.half_disk(0.5 + 0j, 0.2, 0.0)
    ext = odd_extend_domain(half)
    pts = ext.curve.sample(64)
    assert ext.crossing
    np.testing.assert_allclose(np.abs(pts - 0.5), 0.2, atol=1e-12)


def test_unit_square_extends_to_rectangle():
    sq = BoundaryCurve.polygon([0, 1, 1 + 1j, 1j])
    pts = odd_extend_domain(sq).curve.sample(32)
    assert pts.real.min() == pytest.approx(0.0, abs=1e-12)
    assert pts.real.max() == pytest.approx(1.0)
    assert pts.imag.min() == pytest.approx(-1.0)
    assert pts.imag.max() == pytest.approx(1.0)


def test_triangle_touching_axis_at_a_vertex_is_rejected():
    tri = BoundaryCurve.polygon([0.5, 0.7 + 0.3j, 0.3 + 0.3j])
    with pytest.raises(GeometryError):
        odd_extend_domain(tri)


def test_interior_disk_passes_validation():
    scene = SectorScene("pi/2", 1.0, [BoundaryCurve.circle(0.5 * cmath.exp(1j * math.pi / 4), 0.1)])
    assert validate_pattern(scene).ok


def test_disk_tangent_to_side_fails_validation():
    scene = SectorScene("pi/2", 1.0, [BoundaryCurve.circle(0.5 + 0.1j, 0.1)])
    report = validate_pattern(scene)
    assert not report.ok
    assert not report.checks["lipschitz_complement"]


def test_half_disk_on_side_passes_validation():
    scene = SectorScene("pi/2", 1.0, [BoundaryCurve.half_disk(0.5 + 0j, 0.1, 0.0)])
    assert validate_pattern(scene).ok


def test_half_plane_opening_keeps_holes_and_adds_mirrors():
    hole = BoundaryCurve.circle(0.4 + 0.3j, 0.1)
    ts = transform_scene(SectorScene("pi", 1.0, [hole]))
    assert ts.kappa == 1.0
    assert ts.m_pair == 1
    upper, lower = ts.holes[0].curves()
    np.testing.assert_allclose(upper.sample(16), hole.sample(16), atol=1e-14)
    # the mirror runs in the opposite direction; compare as point sets
    dist = np.abs(lower.sample(16)[:, None] - np.conj(hole.sample(16))[None, :]).min(axis=1)
    assert dist.max() < 1e-14


def test_quarter_disk_hole_image_centroid():
    # mean of (c + r e^{it})^2 over a full period is c^2 = 0.25i
    ts = transform_scene(SectorScene("pi/2", 1.0, [BoundaryCurve.circle(0.5 * cmath.exp(1j * math.pi / 4), 0.1)]))
    upper, lower = ts.holes[0].curves()
    assert np.mean(upper.sample(256)) == pytest.approx(0.25j, abs=1e-3)
    assert np.mean(lower.sample(256)) == pytest.approx(-0.25j, abs=1e-3)


def test_eta_parameter_map():
    ts = transform_scene(SectorScene("pi/2", 1.0, [BoundaryCurve.circle(0.5 * cmath.exp(1j * math.pi / 4), 0.1)]))
    assert ts.eta(0.25) == pytest.approx(0.0625)
    assert ts.eps(0.0625) == pytest.approx(0.25)


def test_opening_parsing_keeps_exact_ratio():
    assert parse_opening("pi/2").pi_ratio == 1 / 2 or parse_opening("pi/2").pi_ratio.denominator == 2
    assert parse_opening("3*pi/4").kappa == pytest.approx(4 / 3)
    assert Opening.coerce(1.0).pi_ratio is None
    with pytest.raises(GeometryError):
        Opening(7.0)
