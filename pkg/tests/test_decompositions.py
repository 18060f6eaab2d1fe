import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ghzw_roof.bloch import BlochPoint, InteriorPoint, fit_plane
from ghzw_roof.classifier import Region, structure
from ghzw_roof.decompositions import (
    CharacteristicCurve,
    Decomposition,
    avg_tangle,
    chord_lengths,
    circle_tangent_residual,
    compare_02_vs_21,
    convexify,
    decide_02_vs_21,
    find_M_states,
    find_N_states,
    golden_minimize,
    inequality_at_p0,
    locking_perturbation,
    lower_circle,
    mix_height,
    oneone_partner,
    scan_21_line,
    search_M,
    search_N,
    split_11_to_12,
    tetra_decomposition,
    twoone_partner,
    twotwo_weights,
    zero_state_vectors,
)
from ghzw_roof.errors import ConvexificationNotNeeded, DomainError, InvalidInputError
from ghzw_roof.tangle import P0

W, Z1, Z2, Z3 = (BlochPoint.from_cartesian(v) for v in zero_state_vectors())
GHZ = BlochPoint(1.0)
inner = st.floats(0.02, 0.98)


# --- decomposition objects -------------------------------------------------


def test_avg_tangle_examples():
    assert avg_tangle(Decomposition(((1.0, GHZ),))) == 1.0
    assert avg_tangle(Decomposition(((0.5, Z1), (0.5, Z2)))) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("p", [0.65, 0.8, 0.95])
def test_axis_ghz_z3_interpolation(p):
    w = (p - P0) / (1 - P0)
    d = Decomposition.from_vectors([w, (1 - w) / 3, (1 - w) / 3, (1 - w) / 3], [GHZ.cartesian, Z1.cartesian, Z2.cartesian, Z3.cartesian], target=InteriorPoint.on_axis(p).v)
    assert avg_tangle(d) == pytest.approx(w, abs=1e-12)
    assert d.tag == (3, 1)


def test_decomposition_validation():
    with pytest.raises(InvalidInputError):
        Decomposition(((0.5, GHZ), (0.4, W)))
    with pytest.raises(InvalidInputError):
        Decomposition(((1.0, GHZ),), target=np.zeros(3))
    with pytest.raises(InvalidInputError):
        Decomposition(tuple((0.2, GHZ) for _ in range(5)))
    with pytest.raises(InvalidInputError):
        Decomposition(())


def test_from_vectors_prunes_and_merges():
    d = Decomposition.from_vectors([0.5, 0.5, 1e-14], [GHZ.cartesian, GHZ.cartesian, W.cartesian])
    assert len(d.members) == 1 and d.weights[0] == 1.0


@given(st.integers(0, 2), st.booleans())
def test_transformed_keeps_value(rotation, conj):
    d = Decomposition(((0.3, BlochPoint(0.7, 0.4)), (0.7, BlochPoint(0.2, -2.0))))
    t = d.transformed(rotation, conj)
    assert avg_tangle(t) == pytest.approx(avg_tangle(d), abs=1e-12)


# --- chord formulas --------------------------------------------------------


def test_oneone_partner_examples():
    assert oneone_partner(1.0, 0.4)[0] == pytest.approx(0.0, abs=1e-15)
    p2, m2 = oneone_partner(0.5, 0.5)
    assert (p2, m2) == pytest.approx((0.5, 0.5))


@given(inner, inner)
def test_chord_length_power_of_point(p1, p):
    assume(abs(p1 - p) > 1e-3)
    l1, l2 = chord_lengths(p1, p)
    assert l1 * l2 == pytest.approx(4 * p * (1 - p), rel=1e-12)


@given(inner, inner)
def test_oneone_round_trip(p1, p):
    assume(abs(p1 - p) > 1e-3)
    p2, m2 = oneone_partner(p1, p)
    assert mix_height(p1, p2) == pytest.approx(p, abs=1e-12)
    # weights reproduce the axis point
    x1, x2 = math.sqrt(p1 * (1 - p1)), math.sqrt(p2 * (1 - p2))
    assert (1 - m2) * x1 == pytest.approx(m2 * x2, abs=1e-12)


@given(inner, inner)
def test_split_reductions(p1, p):
    assume(abs(p1 - p) > 1e-3)
    assert split_11_to_12(p1, p, 0.0) == pytest.approx(oneone_partner(p1, p)[0], abs=1e-12)
    assert split_11_to_12(p1, p, math.pi / 2) == pytest.approx(p, abs=1e-12)
    assert twoone_partner(p1, 0.0, p) == pytest.approx(oneone_partner(p1, p)[0], abs=1e-12)


@given(inner, st.floats(-1.4, 1.4), inner)
def test_split_partner_on_the_line(p1, phi2, p):
    assume(abs(p1 - p) > 1e-3)
    p2 = split_11_to_12(p1, p, phi2)
    a = np.array([2 * math.sqrt(p1 * (1 - p1)), 0.0, 2 * p1 - 1])
    b = BlochPoint(p2, math.pi - phi2).cartesian
    axis = np.array([0.0, 0.0, 2 * p - 1])
    # projected onto the real plane the partner stays on the chord through the axis point
    proj = np.array([b[0], 0.0, b[2]])
    cross = np.cross(proj - a, axis - a)
    assert np.linalg.norm(cross) < 1e-9


@given(inner, st.floats(-1.4, 1.4), inner)
def test_twoone_partner_on_sphere_and_chord(p1, phi1, p):
    assume(abs(p1 - p) > 1e-3)
    p2 = twoone_partner(p1, phi1, p)
    v = BlochPoint(p2, math.pi).cartesian
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-10)


def test_twotwo_examples():
    m1, m2, pm = twotwo_weights(0.3, 0.0, 0.3, 0.0)
    assert (m2, pm) == pytest.approx((0.5, 0.3))


@given(inner, st.floats(-1.4, 1.4), inner, st.floats(-1.4, 1.4))
def test_twotwo_identities(p1, phi1, p2, phi2):
    m1, m2, pm = twotwo_weights(p1, phi1, p2, phi2)
    assert pm == pytest.approx(m1 * p1 + m2 * p2, abs=1e-12)
    assert twotwo_weights(1 - p1, phi1, 1 - p2, phi2)[1] == pytest.approx(m2, abs=1e-12)


def test_chord_domain_errors():
    with pytest.raises(DomainError):
        oneone_partner(1.2, 0.5)


# --- convexification -------------------------------------------------------


def test_convexify_on_synthetic_curve():
    ps = np.linspace(0.0, 1.0, 401)
    # value / p has its interior minimum 0.1 at p = 1/2, so the tangent from 0 touches there
    pc, slope = convexify(CharacteristicCurve(ps, ps * ((ps - 0.5) ** 2 + 0.1)))
    assert pc == pytest.approx(0.5, abs=1e-9)
    assert slope == pytest.approx(0.1, abs=1e-9)
    # the same curve anchored at its right end
    qs = 1.0 - ps[::-1]
    pc, slope = convexify(CharacteristicCurve(qs, (1 - qs) * ((0.5 - qs) ** 2 + 0.1)))
    assert pc == pytest.approx(0.5, abs=1e-9)
    assert abs(slope) == pytest.approx(0.1, abs=1e-9)


def test_straight_curve_needs_no_convexification():
    ps = np.linspace(0.0, 1.0, 101)
    with pytest.raises(ConvexificationNotNeeded):
        convexify(CharacteristicCurve(ps, 2 * ps))


def test_characteristic_curve_validation():
    with pytest.raises(InvalidInputError):
        CharacteristicCurve(np.array([0, 1, 1, 2.0]), np.zeros(4))
    with pytest.raises(InvalidInputError):
        CharacteristicCurve(np.arange(3.0), np.zeros(3))


def test_golden_minimize_vectorized():
    xs = golden_minimize(lambda x: (x - np.array([0.2, 0.7])) ** 2, [0, 0], [1, 1])
    x = xs[0] if isinstance(xs, tuple) else xs
    assert np.asarray(x) == pytest.approx([0.2, 0.7], abs=1e-7)


# --- N and M states --------------------------------------------------------


def test_n_search_values():
    s = search_N()
    assert s.p_c == pytest.approx(0.0964142, abs=5e-5)
    assert s.partner_p == pytest.approx(0.00673174, abs=5e-5)
    assert s.theta1 == pytest.approx(0.164279, abs=1e-4)
    assert s.theta0 == pytest.approx(1.8273, abs=1e-3)
    assert s.theta == pytest.approx(1.99158, abs=1e-3)


def test_m_search_values():
    s = search_M()
    assert s.p_c == pytest.approx(0.962243, abs=5e-5)
    assert s.partner_p == pytest.approx(0.989858, abs=5e-5)
    assert s.theta == pytest.approx(2.25566, abs=1e-3)


@pytest.mark.parametrize("finder", [find_N_states, find_M_states])
def test_states_are_threefold(finder):
    a, b, c = finder()
    assert a.rotated(-2 * math.pi / 3).cartesian == pytest.approx(b.cartesian, abs=1e-12)
    assert a.rotated(2 * math.pi / 3).cartesian == pytest.approx(c.cartesian, abs=1e-12)


def test_coplanarity():
    n1, _, n3 = (s.cartesian for s in find_N_states())
    ghz, w, z1, z2 = GHZ.cartesian, W.cartesian, Z1.cartesian, Z2.cartesian
    assert fit_plane([ghz, z1, z2, n1])[2] < 1e-6
    assert fit_plane([z1, n1, w, n3])[2] < 1e-6


# --- lower circle ----------------------------------------------------------


def test_lower_circle_plane():
    c = lower_circle()
    assert c.distance == pytest.approx(0.0711148, abs=5e-4)
    assert np.abs(c.normal) == pytest.approx([0.57589, 0.0, 0.81753], abs=5e-3)
    assert c.plane_residual < 1e-6
    assert c.three_point_distance == pytest.approx(c.distance, abs=1e-4)
    ns, ms = find_N_states(), find_M_states()
    assert c.points[0] == pytest.approx(ns[2].cartesian, abs=1e-9)
    assert c.points[len(c.scan.lam) - 1] == pytest.approx(ms[2].cartesian, abs=1e-6)


def test_lower_line_beats_oneone():
    scan = scan_21_line(find_N_states()[2], find_M_states()[2], grid=21)
    gap = scan.value_11 - scan.value_21
    assert np.all(gap >= -1e-9)
    assert np.all(gap[1:-1] > 0)
    assert abs(gap[0]) < 1e-6 and abs(gap[-1]) < 1e-6


def test_circle_tangent_residual_shrinks():
    coarse = lower_circle(grid=41)
    fine = lower_circle(grid=81)
    r1 = circle_tangent_residual(coarse.points, coarse.center)
    r2 = circle_tangent_residual(fine.points, fine.center)
    assert 3.0 < r1 / r2 < 5.0


# --- inequality and locking ------------------------------------------------


def test_inequality_at_p0():
    chk = inequality_at_p0()
    assert chk.curvature_ratio == pytest.approx(9 / 8, abs=1e-4)
    assert chk.threshold == pytest.approx(2.0, abs=1e-9)
    assert not chk.favors_02


@pytest.mark.parametrize(
    "tau0, tau_dd, rho, d1, expected",
    [(1.0, 0.0, 1.0, 0.5, False), (1.0, 3.0 * 1.0 / 0.5, 1.0, 0.5, True), (1.0, 2.0, 1.0, 0.5, False)],
)
def test_decide_02_vs_21(tau0, tau_dd, rho, d1, expected):
    assert decide_02_vs_21(tau0, tau_dd, rho, d1) is expected


def test_inequality_tie_is_marginal():
    favors, marginal, margin = compare_02_vs_21(1.0, 2.0, 1.0, 0.5)
    assert not favors and marginal and margin == 0.0


@pytest.mark.parametrize("region", [Region.TETRA_GHZ, Region.TETRA_N1, Region.TETRA_N2, Region.TETRA_N3])
def test_locking_exponent(region):
    tetra = structure().tetras[region]
    d = tetra_decomposition(tetra, tetra.mean(axis=0))
    for k in range(4):
        if d.tangles[k] > 1e-10 or d.states[k].p == 0.0:
            continue
        rep = locking_perturbation(d, k)
        assert rep.fitted_exponent == pytest.approx(0.5, abs=0.05)
        assert np.all(rep.T_values > rep.T0)
        small = locking_perturbation(d, k, eps_list=[1e-9, 1e-10])
        assert small.T_values[-1] == pytest.approx(rep.T0, abs=1e-4)


def test_locking_rejects_entangled_member():
    d = Decomposition(((1.0, GHZ),))
    with pytest.raises(InvalidInputError):
        locking_perturbation(d, 0)


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_linear_inside_tetra(a, b, c):
    tetra = structure().tetras[Region.TETRA_GHZ]
    w = np.array([a, b, c, 1.0])
    w /= w.sum()
    d = tetra_decomposition(tetra, w @ tetra)
    assert avg_tangle(d) == pytest.approx(w[0], abs=1e-10)
