import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ghzw_roof.bloch import InteriorPoint
from ghzw_roof.classifier import Region, structure
from ghzw_roof.errors import DegeneratePolynomialError, InsideObstacleError
from ghzw_roof.tangle import P0, Amplitudes3Q, sqrt_tau3_vectors, sqrt_threetangle
from ghzw_roof.zero_polytope import (
    INFINITY,
    TanglePolynomial,
    build_polynomial,
    contains,
    ghz_w_polytope,
    segment_hits_interior,
    solve_zero_states,
    visible_vertices,
    z_to_bloch,
    zero_polytope,
)

GHZ, W = Amplitudes3Q.ghz(), Amplitudes3Q.w()


def test_ghz_w_polynomial_shape():
    poly = build_polynomial(W, GHZ)
    c = poly.coeffs
    assert c[0] == 0 and c[2] == 0 and c[3] == 0
    assert c[1] / c[4] == pytest.approx(16 / (3 * math.sqrt(6)), rel=1e-12)
    assert poly.degree == 4


def test_ghz_w_roots():
    roots = solve_zero_states(build_polynomial(W, GHZ))
    assert [m for _, m in roots] == [1, 1, 1, 1]
    assert abs(roots[0][0]) == 0
    mod = (16 / (3 * math.sqrt(6))) ** (1 / 3)
    phases = sorted(cmath.phase(z) % (2 * math.pi) for z, _ in roots[1:])
    assert phases == pytest.approx([math.pi / 3, math.pi, 5 * math.pi / 3], abs=1e-10)
    for z, _ in roots[1:]:
        assert abs(z) == pytest.approx(mod, rel=1e-12)
        assert sqrt_threetangle((W.psi + z * GHZ.psi) / math.sqrt(1 + abs(z) ** 2)) < 1e-10


def test_product_pair_gives_double_roots_at_poles():
    poly = build_polynomial(Amplitudes3Q.basis("000"), Amplitudes3Q.basis("111"))
    assert poly.degree == 2
    assert np.count_nonzero(poly.coeffs) == 1
    assert solve_zero_states(poly) == [(0j, 2), (INFINITY, 2)]


def test_vanishing_polynomial_is_flagged():
    poly = build_polynomial(Amplitudes3Q.basis("000"), Amplitudes3Q.basis("001"))
    assert poly.is_zero
    with pytest.raises(DegeneratePolynomialError):
        solve_zero_states(poly)
    with pytest.raises(DegeneratePolynomialError):
        build_polynomial(GHZ, 2 * GHZ)


@pytest.mark.parametrize("roots, expected", [([1, 1, 1, 1], [(1, 4)]), ([2, 2, -1j, 1j], [(-1j, 1), (1j, 1), (2, 2)])])
def test_multiplicity_clustering(roots, expected):
    out = solve_zero_states(TanglePolynomial.from_roots(roots))
    assert len(out) == len(expected)
    for (z, m), (ze, me) in zip(sorted(out, key=lambda t: (t[1], t[0].imag)), sorted(expected, key=lambda t: (t[1], complex(t[0]).imag))):
        assert m == me
        assert z == pytest.approx(ze, abs=1e-6)


@pytest.mark.parametrize(
    "z, p, phi",
    [(0, 0.0, 0.0), (INFINITY, 1.0, 0.0), (-(16 / (3 * math.sqrt(6))) ** (1 / 3), P0, math.pi)],
)
def test_z_to_bloch(z, p, phi):
    b = z_to_bloch(z)
    assert b.p == pytest.approx(p, abs=1e-12)
    assert abs(math.remainder(b.phi - phi, 2 * math.pi)) < 1e-12


def test_polytope_vertices():
    poly = ghz_w_polytope()
    assert not poly.degenerate and len(poly.faces) == 4
    expected = [(0.0, 0.0), (P0, math.pi / 3), (P0, -math.pi / 3), (P0, math.pi)]
    for v, (p, phi) in zip(poly.vertices, expected):
        assert v.p == pytest.approx(p, abs=1e-12)
        if p > 0:
            assert abs(math.remainder(v.phi - phi, 2 * math.pi)) < 1e-10
    assert np.all(sqrt_tau3_vectors(poly.points) < 1e-10)
    assert poly.volume > 0


def random_real_state(rng):
    v = rng.normal(size=8)
    return Amplitudes3Q(v / np.linalg.norm(v))


def test_random_real_pairs(rng):
    for _ in range(300):
        a, b = random_real_state(rng), random_real_state(rng)
        roots = [z for z, _ in solve_zero_states(build_polynomial(a, b)) if z is not INFINITY]
        for z in roots:
            s = a.psi + z * b.psi
            assert sqrt_threetangle(s / np.linalg.norm(s)) < 1e-10
        conj = np.conj(roots)
        for u in roots:
            assert np.min(np.abs(conj - u)) <= 1e-8 * (1 + abs(u))


@pytest.mark.parametrize(
    "point, inside",
    [
        (InteriorPoint.on_axis(P0 / 2).v, True),
        (np.array([0.0, 0.0, 1.0]), False),
        (ghz_w_polytope().points.mean(axis=0), True),
        (InteriorPoint.on_axis(P0 + 1e-3).v, False),
    ],
)
def test_contains(point, inside):
    assert contains(ghz_w_polytope(), point) is inside


@given(st.floats(0.0, 1.0), st.floats(-math.pi, math.pi), st.floats(0.0, 1.0))
def test_contains_matches_barycentric(p, phi, r):
    pt = InteriorPoint.from_spherical(p, phi, r)
    poly = ghz_w_polytope()
    assert contains(poly, pt) == bool(poly.barycentric(pt.v).min() >= -1e-10)


def test_segment_test():
    tetra = ghz_w_polytope().points
    assert segment_hits_interior([0, 0, 1], [0, 0, -1], tetra)
    assert not segment_hits_interior([1, 0, 0.9], [0.9, 0.1, 0.95], tetra)


def test_visibility_from_above_the_upper_face():
    poly = ghz_w_polytope()
    point = InteriorPoint.on_axis(P0 + 0.01)
    assert visible_vertices(point, [poly]) == [1, 2, 3]


def test_visibility_without_obstacles():
    assert visible_vertices(np.array([0.99, 0.0, 0.0])) == [0, 1, 2, 3]


def test_visibility_rejects_inside_point():
    with pytest.raises(InsideObstacleError):
        visible_vertices(InteriorPoint.on_axis(0.3), [ghz_w_polytope()])


def test_visibility_near_w_contains_chosen_member(rng):
    from ghzw_roof.classifier import classify

    st_ = structure()
    blockers = [st_.polytope.points] + list(st_.tetras.values())
    zeros = st_.zero_vectors
    checked = 0
    for _ in range(400):
        v = rng.normal(size=3)
        v *= rng.uniform(0.3, 1.0) / np.linalg.norm(v)
        res = classify(v)
        if res.region is not Region.ONE_ONE:
            continue
        zero_members = [s.cartesian for s, t in zip(res.decomposition.states, res.decomposition.tangles) if t < 1e-10]
        vis = visible_vertices(v, blockers)
        assert 1 <= len(vis) <= 3
        for m in zero_members:
            k = int(np.argmin(np.linalg.norm(zeros - m, axis=1)))
            assert k in vis
        checked += 1
    assert checked > 10
