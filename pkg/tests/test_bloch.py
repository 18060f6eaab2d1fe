import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ghzw_roof.bloch import (
    BlochPoint,
    InteriorPoint,
    arc_offset,
    arc_offset_small_angle,
    axis_crossing,
    chord_endpoints_cartesian,
    chord_endpoints_Pplusminus,
    crossing_weights,
    fit_plane,
    inclined_chord,
    plane_through_points,
    rotate_z,
    weight_ratio,
    wrap_angle,
)
from ghzw_roof.errors import DegeneratePlaneError, DomainError, NoCrossingError
from ghzw_roof.tangle import P0

inner_p = st.floats(0.01, 0.99)
angles = st.floats(-math.pi, math.pi)


@given(st.floats(0.0, 1.0), angles)
def test_bloch_point_is_unit(p, phi):
    b = BlochPoint(p, phi)
    assert np.linalg.norm(b.cartesian) == pytest.approx(1.0, abs=1e-12)
    back = BlochPoint.from_cartesian(b.cartesian)
    assert back.p == pytest.approx(p, abs=1e-12)


@given(st.floats(-50, 50))
def test_wrap_angle_range(a):
    w = wrap_angle(a)
    assert -math.pi < w <= math.pi
    assert math.cos(w) == pytest.approx(math.cos(a), abs=1e-9)


def test_poles_and_interior_validation():
    assert BlochPoint(1.0).cartesian == pytest.approx([0, 0, 1])
    assert BlochPoint(0.0).cartesian == pytest.approx([0, 0, -1])
    assert BlochPoint.from_angles(math.pi, 0).p == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        BlochPoint(1.2)
    with pytest.raises(DomainError):
        InteriorPoint([1.0, 1.0, 0.0])
    with pytest.raises(DomainError):
        InteriorPoint.from_spherical(0.5, 0.0, 1.5)
    assert InteriorPoint.on_axis(0.75).v == pytest.approx([0, 0, 0.5])


@pytest.mark.parametrize("p, phi", [(0.3, 0.4), (0.8, -1.0), (P0, math.pi / 3)])
def test_axis_crossing_examples(p, phi):
    assert axis_crossing(p, phi, p, phi) == pytest.approx(p)
    assert axis_crossing(p, phi, p, -phi) == pytest.approx(p)
    assert weight_ratio(p, phi, p, -phi) == pytest.approx(1.0)


def test_axis_crossing_pole_pair_rejected():
    with pytest.raises(NoCrossingError):
        axis_crossing(1.0, 0.0, 0.0, 0.0)


def test_weight_ratio_quarter_product():
    p1 = 0.5
    p2 = (1 - math.sqrt(1 - 4 * p1 * (1 - p1) / 4)) / 2
    assert p1 * (1 - p1) == pytest.approx(4 * p2 * (1 - p2))
    assert weight_ratio(p1, 0.0, p2, 0.0) == pytest.approx(2.0)


@given(inner_p, angles, inner_p, angles)
def test_crossing_weights_balance_on_axis(p0, phi0, p1, phi1):
    assume(abs(math.cos(phi0)) > 1e-3 and abs(math.cos(phi1)) > 1e-3)
    m0, m1 = crossing_weights(p0, phi0, p1, phi1)
    lam = weight_ratio(p0, phi0, p1, phi1)
    assert m1 / m0 == pytest.approx(lam, rel=1e-12)
    # place the states on opposite sides of the real-plane axis projection
    a = np.array([math.sqrt(p0 * (1 - p0)) * abs(math.cos(phi0)), 2 * p0 - 1])
    b = np.array([-math.sqrt(p1 * (1 - p1)) * abs(math.cos(phi1)), 2 * p1 - 1])
    mix = m0 * a + m1 * b
    assert mix[0] == pytest.approx(0.0, abs=1e-12)
    assert (mix[1] + 1) / 2 == pytest.approx(axis_crossing(p0, phi0, p1, phi1), abs=1e-12)


def test_chord_endpoints_examples():
    assert chord_endpoints_Pplusminus(P0, 0.0, P0)[1] == pytest.approx(P0, abs=1e-12)
    assert chord_endpoints_Pplusminus(1.0, 0.3, 0.4) == pytest.approx((1.0, 0.0))


@given(inner_p, st.floats(-1.4, 1.4), inner_p)
def test_chord_endpoints_collinear_and_on_circle(p0, phi0, p):
    assume(abs(p - p0) > 1e-3)
    far, near = chord_endpoints_cartesian(p0, phi0, p)
    s = np.array([2 * math.sqrt(p0 * (1 - p0)) * abs(math.cos(phi0)), 0.0, 2 * p0 - 1])
    a = np.array([0.0, 0.0, 2 * p - 1])
    d = a - s
    for e in (far, near):
        assert e[0] ** 2 + e[2] ** 2 == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.norm(np.cross(e - s, d)) <= 1e-10 * max(1.0, np.linalg.norm(d))
    hi, lo = chord_endpoints_Pplusminus(p0, phi0, p)
    assert sorted([(far[2] + 1) / 2, (near[2] + 1) / 2]) == pytest.approx([lo, hi], abs=1e-10)


@pytest.mark.parametrize(
    "r0, ta, td, dp, dm",
    [
        (0.0, 0.3, 1.0, 1.0, -1.0),
        (0.4, 0.0, math.pi / 2, math.sqrt(1 - 0.16), -math.sqrt(1 - 0.16)),
        (0.4, 0.7, 0.7, 0.6, -1.4),
    ],
)
def test_inclined_chord_examples(r0, ta, td, dp, dm):
    c = inclined_chord(r0, ta, td)
    assert (c.d_plus, c.d_minus) == pytest.approx((dp, dm))


@given(st.floats(0, 1), angles, angles)
def test_inclined_chord_outer_identity(r0, ta, td):
    c = inclined_chord(r0, ta, td)
    assert c.d_plus - c.d_minus == pytest.approx(2 * c.outer_radius, abs=1e-12)
    z0 = r0 * np.array([math.sin(ta), math.cos(ta)])
    n = np.array([math.sin(td), math.cos(td)])
    for d in (c.d_plus, c.d_minus):
        assert np.linalg.norm(z0 + d * n) == pytest.approx(1.0, abs=1e-9)


def test_arc_offsets():
    assert arc_offset(0.7, 0.0) == (0.0, 0.0)
    assert arc_offset(1.0, math.pi / 2) == pytest.approx((1.0, 1.0))
    for d in (1e-2, 1e-3):
        x, y = arc_offset(0.7, d)
        sx, sy = arc_offset_small_angle(0.7, d)
        assert x / d**2 == pytest.approx(0.35, rel=1e-4)
        assert (sx, sy) == pytest.approx((x, y), rel=1e-4)


def test_plane_examples():
    z = 2 * P0 - 1
    n, d = plane_through_points([1, 0, z], [0, 1, z], [-1, 0, z])
    assert np.allclose(n, [0, 0, 1]) or np.allclose(n, [0, 0, -1])
    assert abs(d) == pytest.approx(abs(z))
    n, d = plane_through_points(np.eye(3)[0], np.eye(3)[1], np.eye(3)[2])
    assert np.abs(n) == pytest.approx(np.ones(3) / math.sqrt(3))
    assert abs(d) == pytest.approx(1 / math.sqrt(3))
    with pytest.raises(DegeneratePlaneError):
        plane_through_points([0, 0, 0], [1, 0, 0], [2, 0, 0])


def test_fit_plane_recovers_plane(rng):
    n = np.array([0.3, -0.4, 0.5])
    n /= np.linalg.norm(n)
    u = np.cross(n, [1, 0, 0])
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    pts = 0.2 * n + rng.normal(size=(30, 1)) * u + rng.normal(size=(30, 1)) * v
    normal, offset, res = fit_plane(pts)
    assert abs(normal @ n) == pytest.approx(1.0, abs=1e-12)
    assert abs(offset) == pytest.approx(0.2, abs=1e-12)
    assert res < 1e-12


@given(angles)
def test_rotate_z_matches_bloch_rotation(a):
    b = BlochPoint(0.4, 0.2)
    assert rotate_z(b.cartesian, a) == pytest.approx(b.rotated(a).cartesian, abs=1e-12)
