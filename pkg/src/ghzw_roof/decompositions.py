"""Decompositions of GHZ-W mixtures and the searches that fix the roof structure.

Conventions: a point of the Bloch ball is a 3-vector; pure states on the
surface are :class:`BlochPoint` objects. ``(n_z, n_e)`` counts zero-tangle
and entangled members of a decomposition.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .bloch import (
    AxisFrame,
    BlochPoint,
    axis_crossing,
    fit_plane,
    plane_through_points,
    polar_angle,
    ray_exit,
    rotate_z,
)
from .errors import (
    ConvexificationNotNeeded,
    DomainError,
    GeometryError,
    InvalidInputError,
    NoCrossingError,
)
from .tangle import P0, phi_second_derivative, sqrt_tau3_analytic, sqrt_tau3_vectors
from .zero_polytope import ghz_w_polytope

#: Members whose threetangle is below this count as zero states.
ZERO_TANGLE = 1e-10

TWO_PI_3 = 2.0 * math.pi / 3.0
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# --------------------------------------------------------------------------
# decomposition container


@dataclass(frozen=True)
class Decomposition:
    """Convex decomposition of a Bloch-ball point into pure states.

    Parameters
    ----------
    members : sequence of (weight, BlochPoint)
        Positive weights summing to one within 1e-12; at most four members.
    target : array_like, optional
        Bloch vector that the weighted members must reproduce to 1e-10.
    """

    members: tuple[tuple[float, BlochPoint], ...]
    target: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        members = tuple((float(w), s) for w, s in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise InvalidInputError("a decomposition needs at least one member")
        if len(members) > 4:
            raise InvalidInputError("at most four members are needed for a rank-two state")
        w = self.weights
        if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
            raise InvalidInputError("weights must be positive")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise InvalidInputError(f"weights sum to {w.sum()!r}, not 1")
        if self.target is not None:
            t = np.asarray(self.target, dtype=float)
            object.__setattr__(self, "target", t)
            err = float(np.max(np.abs(self.barycenter - t)))
            if err > 1e-10:
                raise InvalidInputError(f"barycenter misses the target by {err:.3g}")

    @classmethod
    def from_vectors(cls, weights, vectors, target=None, prune: float = 1e-12) -> "Decomposition":
        """Build from raw weights and surface vectors, dropping tiny weights.

        Duplicated states are merged and the remaining weights renormalized.
        """
        weights = np.asarray(weights, dtype=float)
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        keep = weights > prune
        w, vs = weights[keep], vectors[keep]
        merged_w: list[float] = []
        merged_v: list[np.ndarray] = []
        for wi, vi in zip(w, vs):
            for k, u in enumerate(merged_v):
                if np.max(np.abs(u - vi)) <= 1e-13:
                    merged_w[k] += wi
                    break
            else:
                merged_w.append(float(wi))
                merged_v.append(vi)
        total = sum(merged_w)
        members = tuple(
            (wi / total, BlochPoint.from_cartesian(vi)) for wi, vi in zip(merged_w, merged_v)
        )
        return cls(members, target)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.members])

    @property
    def states(self) -> list[BlochPoint]:
        return [s for _, s in self.members]

    @property
    def vectors(self) -> np.ndarray:
        return np.array([s.cartesian for s in self.states])

    @property
    def barycenter(self) -> np.ndarray:
        return self.weights @ self.vectors

    @property
    def tangles(self) -> np.ndarray:
        """Square-root tangle of each member."""
        return np.array([sqrt_tau3_analytic(s.p, s.phi) for s in self.states])

    @property
    def tag(self) -> tuple[int, int]:
        nz = int(np.sum(self.tangles**2 < ZERO_TANGLE))
        return nz, len(self.members) - nz

    def transformed(self, rotation: int = 0, conjugate: bool = False) -> "Decomposition":
        """Image under conjugation (applied first) and ``rotation`` steps of 2pi/3."""
        out = []
        for w, s in self.members:
            if conjugate:
                s = s.conjugated()
            out.append((w, s.rotated(rotation * TWO_PI_3)))
        target = None
        if self.target is not None:
            t = self.target * np.array([1.0, -1.0, 1.0]) if conjugate else self.target
            target = rotate_z(t, rotation * TWO_PI_3)
        return Decomposition(tuple(out), target)


def avg_tangle(d: Decomposition) -> float:
    """Weighted average square-root tangle of the members."""
    return float(d.weights @ d.tangles)


# --------------------------------------------------------------------------
# closed-form chord formulas in the real plane


def _prob(p: float, name: str = "p") -> float:
    p = float(p)
    if not math.isfinite(p) or p < -1e-12 or p > 1.0 + 1e-12:
        raise DomainError(f"{name} outside [0, 1]: {p}")
    return min(max(p, 0.0), 1.0)


def chord_lengths(p1: float, p: float) -> tuple[float, float]:
    """Lengths ``(l1, l2)`` from the axis point to both ends of the chord.

    ``l1 = 2 sqrt((p - p1)^2 + p1 (1 - p1))`` and ``l1 l2 = 4 p (1 - p)``.
    """
    p1, p = _prob(p1, "p1"), _prob(p)
    l1 = 2.0 * math.sqrt((p - p1) ** 2 + p1 * (1.0 - p1))
    if l1 <= 1e-15:
        raise GeometryError("surface point and axis point coincide; the chord is undefined")
    return l1, 4.0 * p * (1.0 - p) / l1


def oneone_partner(p1: float, p: float) -> tuple[float, float]:
    """Partner of a real-plane pure state across the axis point ``p``.

    Parameters
    ----------
    p1 : float
        Height of the first pure state (azimuth 0 or pi).
    p : float
        Height of the axis point being decomposed.

    Returns
    -------
    p2, m2 : float
        Height of the state on the far side of the chord and its weight.
    """
    l1, l2 = chord_lengths(p1, p)
    p2 = 4.0 * p * p * (1.0 - p1) / (l1 * l1)
    return min(max(p2, 0.0), 1.0), l1 / (l1 + l2)


def mix_height(p1: float, p2: float) -> float:
    """Axis height of the (1,1) mixture of two real-plane states on opposite sides."""
    x1, x2 = math.sqrt(p1 * (1.0 - p1)), math.sqrt(p2 * (1.0 - p2))
    if x1 + x2 == 0.0:
        raise NoCrossingError("both states lie on the axis")
    return p1 + (p2 - p1) * x1 / (x1 + x2)


def split_11_to_12(p1: float, p: float, phi2: float) -> float:
    """Height of the partner after tilting it to azimuth ``phi2``.

    The projected chord through ``p1`` and the axis point is kept; the partner
    moves off the real plane to ``phi2`` (and its conjugate) where that line
    meets the sphere. ``phi2 = 0`` reproduces :func:`oneone_partner` and
    ``phi2 = pi/2`` gives the height ``p`` itself.
    """
    p1, p = _prob(p1, "p1"), _prob(p)
    q1 = p1 * (1.0 - p1)
    c = math.cos(phi2)
    dp = p - p1
    den = 2.0 * (q1 + dp * dp * c * c)
    if den <= 1e-300:
        raise GeometryError("degenerate chord")
    num = 2.0 * q1 - dp * (2.0 * p1 - 1.0) * c * c + c * math.sqrt(4.0 * p * (1.0 - p) * q1 + dp * dp * c * c)
    return min(max(p1 + dp * num / den, 0.0), 1.0)


def twotwo_weights(p1: float, phi1: float, p2: float, phi2: float) -> tuple[float, float, float]:
    """Weights of two conjugate pairs balanced on the axis.

    Returns
    -------
    m1, m2 : float
        Total weight of each pair; ``m1 + m2 = 1``.
    p_mix : float
        Axis height of the mixture, ``m1 p1 + m2 p2``.

    Raises
    ------
    NoCrossingError
        If neither pair is displaced from the axis in the real plane.
    """
    p1, p2 = _prob(p1, "p1"), _prob(p2, "p2")
    x1 = math.sqrt(p1 * (1.0 - p1) * math.cos(phi1) ** 2)
    x2 = math.sqrt(p2 * (1.0 - p2) * math.cos(phi2) ** 2)
    if x1 + x2 <= 1e-15:
        raise NoCrossingError("zero denominator: both pairs project onto the axis")
    m2 = x1 / (x1 + x2)
    m1 = 1.0 - m2
    return m1, m2, m1 * p1 + m2 * p2


def twoone_partner(p1: float, phi1: float, p: float) -> float:
    """Height of the real partner of the pair ``(p1, +-phi1)`` through axis point ``p``.

    At ``phi1 = 0`` this is the partner of :func:`oneone_partner`.
    """
    p1, p = _prob(p1, "p1"), _prob(p)
    q = p1 * (1.0 - p1) * math.cos(phi1) ** 2
    d = p1 - p
    den = 2.0 * (d * d + q)
    if den <= 1e-300:
        raise GeometryError("degenerate chord: the pair sits on the axis point")
    root = math.sqrt(max(d * d + 4.0 * p * (1.0 - p) * q, 0.0))
    num = d * (2.0 * p1 - 1.0) + 2.0 * q + root
    return min(max(p1 + (p - p1) * num / den, 0.0), 1.0)


# --------------------------------------------------------------------------
# characteristic curves and convexification


@dataclass(frozen=True)
class CharacteristicCurve:
    """Average tangle of a one-parameter decomposition family over axis heights."""

    p: np.ndarray
    value: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=float)
        v = np.asarray(self.value, dtype=float)
        if p.ndim != 1 or p.shape != v.shape or p.size < 4:
            raise InvalidInputError("a curve needs at least four matching samples")
        if np.any(np.diff(p) <= 0):
            raise InvalidInputError("curve heights must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("curve values must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "value", v)

    @classmethod
    def sample(cls, f: Callable[[float], float], lo: float, hi: float, n: int, name: str = "") -> "CharacteristicCurve":
        ps = np.linspace(lo, hi, n)
        return cls(ps, np.array([f(x) for x in ps]), name)


@dataclass(frozen=True)
class Convexification:
    p_c: float
    slope: float
    anchor: float
    value_c: float


def convexify_detail(curve: CharacteristicCurve, zero_tol: float = 1e-12) -> Convexification:
    """Tangent line from the zero end of a curve; see :func:`convexify`."""
    p, v = curve.p, curve.value
    if abs(v[0]) <= zero_tol:
        a = p[0]
        xs, vs = p, v
    elif abs(v[-1]) <= zero_tol:
        a = p[-1]
        xs, vs = p, v
    else:
        raise InvalidInputError("the curve must vanish at one of its endpoints")
    spline = CubicSpline(xs, vs, bc_type="natural")
    dist = np.abs(xs - a)
    interior = dist > 0
    slopes = np.full_like(xs, np.inf)
    slopes[interior] = vs[interior] / dist[interior]
    k = int(np.argmin(slopes))
    spread = np.ptp(slopes[interior])
    far_end = len(xs) - 1 if a == xs[0] else 0
    near_end = 1 if a == xs[0] else len(xs) - 2
    if spread <= 1e-9 * max(abs(float(np.max(slopes[interior]))), 1e-300) or k in (far_end, near_end):
        raise ConvexificationNotNeeded("no interior tangent point; the curve is already convex")

    def g(x: float) -> float:
        # tangency: s'(x) (x - a) - s(x) = 0
        return float(spline(x, 1) * (x - a) - spline(x))

    lo, hi = sorted((xs[k - 1], xs[k + 1]))
    if g(lo) * g(hi) > 0:
        # widen to the neighbouring sign change
        step = xs[1] - xs[0]
        while g(lo) * g(hi) > 0 and lo > xs[0] and hi < xs[-1]:
            lo, hi = max(lo - step, xs[0]), min(hi + step, xs[-1])
        if g(lo) * g(hi) > 0:
            raise ConvexificationNotNeeded("tangency condition has no sign change")
    pc = brentq(g, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)
    vc = float(spline(pc))
    return Convexification(p_c=float(pc), slope=vc / (pc - a), anchor=float(a), value_c=vc)


def convexify(curve: CharacteristicCurve) -> tuple[float, float]:
    """Tangent point of the line from the curve's zero endpoint.

    The curve is interpolated by a natural cubic spline; the tangent point
    solves ``s'(p) (p - a) = s(p)`` with ``a`` the zero endpoint.

    Returns
    -------
    p_c, slope : float

    Raises
    ------
    ConvexificationNotNeeded
        If no interior tangent exists (e.g. a straight or convex curve).
    """
    c = convexify_detail(curve)
    return c.p_c, c.slope


# --------------------------------------------------------------------------
# zero states of the GHZ-W family


@functools.lru_cache(maxsize=None)
def zero_state_vectors() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Bloch vectors of ``W, Z1, Z2, Z3``."""
    return tuple(v.cartesian for v in ghz_w_polytope().vertices)  # type: ignore[return-value]


GHZ_VECTOR = np.array([0.0, 0.0, 1.0])


def _tau_vec(v) -> float:
    return float(sqrt_tau3_vectors(np.asarray(v, dtype=float)))


def _aux_partner_azimuth(phi: float) -> float:
    # the partner sits on the opposite side of the auxiliary axis
    return math.pi if math.cos(phi) > 0 else 0.0


@dataclass(frozen=True)
class StateSearch:
    """Outcome of one convexification search.

    Attributes
    ----------
    p_c : float
        Tangent height on the auxiliary axis.
    partner_p : float
        Auxiliary height of the pure state paired with the tangent point.
    theta0, theta1, theta : float
        Polar angle of the auxiliary reference pole, the offset of the state
        from it, and their sum (the state's polar angle from GHZ).
    anchor : float
        Auxiliary height where the curve starts at zero.
    states : tuple of BlochPoint
        The three symmetric images, ordered by index.
    curve : CharacteristicCurve
    slope : float
    north : ndarray
        Auxiliary pole in the GHZ-W frame.
    """

    p_c: float
    partner_p: float
    theta0: float
    theta1: float
    theta: float
    anchor: float
    states: tuple[BlochPoint, ...]
    curve: CharacteristicCurve = field(repr=False)
    slope: float = 0.0
    north: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]


@functools.lru_cache(maxsize=None)
def _n_frame():
    w, z1, z2, z3 = zero_state_vectors()
    frame = AxisFrame(z3)
    a1 = frame.local_point(z1)
    aw = frame.local_point(w)
    side = _aux_partner_azimuth(a1.phi)
    anchor = axis_crossing(a1.p, a1.phi, aw.p, aw.phi)
    return frame, a1, side, anchor


def n_curve_value(p: float) -> float:
    """Average tangle of the (2,1) family with the ``Z1, Z2`` pair, axis along ``Z3``."""
    frame, a1, side, anchor = _n_frame()
    if p == anchor:
        # the partner is W itself; rounding would leave ~1e-9
        return 0.0
    p2 = twoone_partner(a1.p, a1.phi, p)
    _, m2, _ = twotwo_weights(a1.p, a1.phi, p2, 0.0)
    return m2 * _tau_vec(frame.global_vector(BlochPoint(p2, side)))


@functools.lru_cache(maxsize=None)
def _m_frame():
    w, z1, z2, z3 = zero_state_vectors()
    q = 0.5 * (z1 + z2)
    frame = AxisFrame(-q)
    a3 = frame.local_point(z3)
    aw = frame.local_point(w)
    side = _aux_partner_azimuth(a3.phi)
    anchor = axis_crossing(a3.p, a3.phi, aw.p, aw.phi)
    return frame, a3, side, anchor


def m_curve_value(p: float) -> float:
    """Average tangle of the (1,1) family with ``Z3``, axis along ``-(Z1 + Z2)``."""
    frame, a3, side, anchor = _m_frame()
    if p == anchor:
        return 0.0
    p2, m2 = oneone_partner(a3.p, p)
    return m2 * _tau_vec(frame.global_vector(BlochPoint(p2, side)))


def _images(v: np.ndarray) -> list[np.ndarray]:
    return [v, rotate_z(v, -TWO_PI_3), rotate_z(v, TWO_PI_3)]


@functools.lru_cache(maxsize=4)
def search_N(samples: int = 4001) -> StateSearch:
    """Locate the tips ``N_i`` of the lower tetrahedra.

    The curve is sampled on the auxiliary axis through ``Z3`` between its
    south pole and the height where the partner reaches W.
    """
    frame, a1, side, anchor = _n_frame()
    curve = CharacteristicCurve.sample(n_curve_value, 1e-6, anchor, samples, "N: (2,1) with Z1,Z2")
    c = convexify_detail(curve)
    p2 = twoone_partner(a1.p, a1.phi, c.p_c)
    vec = frame.global_vector(BlochPoint(p2, side))
    theta0 = polar_angle(-frame.north)
    theta1 = math.pi - math.acos(2.0 * p2 - 1.0)
    # N1 faces Z3, then N2 at -2pi/3 and N3 at +2pi/3
    states = tuple(BlochPoint.from_cartesian(u) for u in _images(vec))
    return StateSearch(c.p_c, p2, theta0, theta1, theta0 + theta1, anchor, states, curve, c.slope, frame.north)


@functools.lru_cache(maxsize=4)
def search_M(samples: int = 4001) -> StateSearch:
    """Locate the states ``M_i`` between neighbouring lower tetrahedra."""
    frame, a3, side, anchor = _m_frame()
    curve = CharacteristicCurve.sample(m_curve_value, anchor, 1.0 - 1e-9, samples, "M: (1,1) with Z3")
    c = convexify_detail(curve)
    p2, _ = oneone_partner(a3.p, c.p_c)
    vec = frame.global_vector(BlochPoint(p2, side))
    theta0 = polar_angle(frame.north)
    theta1 = math.acos(2.0 * p2 - 1.0)
    m3 = vec
    states = tuple(BlochPoint.from_cartesian(u) for u in (rotate_z(m3, -TWO_PI_3), rotate_z(m3, TWO_PI_3), m3))
    return StateSearch(c.p_c, p2, theta0, theta1, theta0 + theta1, anchor, states, curve, c.slope, frame.north)


def find_N_states() -> list[BlochPoint]:
    """``[N1, N2, N3]`` at azimuths ``0, -2pi/3, 2pi/3``."""
    return list(search_N().states)


def find_M_states() -> list[BlochPoint]:
    """``[M1, M2, M3]`` at azimuths ``pi/3, -pi/3, pi``."""
    return list(search_M().states)


def companion_curves(samples: int = 801) -> dict[str, CharacteristicCurve]:
    """The competing decomposition families of both searches.

    Keys are ``N_21`` and ``M_11`` for the convexified curves and
    ``N_11_W``, ``N_11_Z3``, ``M_11_W``, ``M_21_pair`` for the others.
    """
    out: dict[str, CharacteristicCurve] = {}
    nframe, a1, nside, nanchor = _n_frame()
    mframe, a3, mside, manchor = _m_frame()
    w = zero_state_vectors()[0]
    out["N_21"] = CharacteristicCurve.sample(n_curve_value, 1e-6, nanchor, samples, "N: (2,1) with Z1,Z2")
    out["M_11"] = CharacteristicCurve.sample(m_curve_value, manchor, 1.0 - 1e-9, samples, "M: (1,1) with Z3")

    def with_w(frame):
        aw = frame.local_point(w)
        other = _aux_partner_azimuth(aw.phi)

        def f(p: float) -> float:
            p2, m2 = oneone_partner(aw.p, p)
            return m2 * _tau_vec(frame.global_vector(BlochPoint(p2, other)))

        return f

    lo, hi = 1e-6, 1.0 - 1e-6
    out["N_11_W"] = CharacteristicCurve.sample(with_w(nframe), lo, hi, samples, "N: (1,1) with W")
    south = _tau_vec(-nframe.north)
    out["N_11_Z3"] = CharacteristicCurve.sample(lambda p: (1.0 - p) * south, lo, hi, samples, "N: (1,1) with Z3")
    out["M_11_W"] = CharacteristicCurve.sample(with_w(mframe), lo, hi, samples, "M: (1,1) with W")
    z1, z2 = zero_state_vectors()[1:3]
    pq = 0.5 * (1.0 - float(np.linalg.norm(0.5 * (z1 + z2))))
    msouth = _tau_vec(-mframe.north)
    out["M_21_pair"] = CharacteristicCurve.sample(
        lambda p: (pq - p) / pq * msouth, lo, pq, samples, "M: (2,1) with Z1,Z2"
    )
    return out


# --------------------------------------------------------------------------
# the lower (2,1) circle


def golden_minimize(f: Callable[[np.ndarray], np.ndarray], lo, hi, tol: float = 1e-9, max_iter: int = 200):
    """Vectorized golden-section search on brackets ``[lo, hi]``.

    ``f`` maps an array of abscissae to values of the same shape.
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if np.all(np.abs(b - a) <= tol):
            break
        left = fc < fd
        # keep [a, d] when the left probe is lower, else [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        fresh = np.where(left, b - GOLDEN * (b - a), a + GOLDEN * (b - a))
        ff = f(fresh)
        c, d, fc, fd = (
            np.where(left, fresh, d),
            np.where(left, c, fresh),
            np.where(left, ff, fd),
            np.where(left, fc, ff),
        )
    x = 0.5 * (a + b)
    return x, f(x)


def edge_21_value(start_a, start_b, target, lam2):
    """(2,1) average tangle with zero member ``lam2 a + (1 - lam2) b``.

    Returns the value and the exit point of the ray through ``target``.
    Broadcasts over ``lam2`` and ``target``.
    """
    lam2 = np.asarray(lam2, dtype=float)
    s = lam2[..., None] * np.asarray(start_a) + (1.0 - lam2[..., None]) * np.asarray(start_b)
    exit_, w = ray_exit(s, np.broadcast_to(target, s.shape))
    return w * sqrt_tau3_vectors(exit_), exit_


def _best_lambda2(a, b, r, grid: int = 33, tol: float = 1e-9, rng: np.random.Generator | None = None) -> float:
    lams = np.linspace(0.0, 1.0, grid)
    vals, _ = edge_21_value(a, b, r, lams)
    k = int(np.argmin(vals))
    lo, hi = lams[max(k - 1, 0)], lams[min(k + 1, grid - 1)]
    x, fx = golden_minimize(lambda l: edge_21_value(a, b, r, l)[0], lo, hi, tol)
    best_x, best_f = float(x), float(fx)
    # guard against flat stretches with a few random probes
    rng = rng or np.random.default_rng(0)
    for probe in rng.uniform(0.0, 1.0, 3):
        step = 1.0 / (grid - 1)
        plo, phi = max(probe - step, 0.0), min(probe + step, 1.0)
        px, pf = golden_minimize(lambda l: edge_21_value(a, b, r, l)[0], plo, phi, tol)
        if float(pf) < best_f - 1e-15:
            best_x, best_f = float(px), float(pf)
    if vals[k] < best_f:
        best_x, best_f = float(lams[k]), float(vals[k])
    return best_x


@dataclass(frozen=True)
class LineScan:
    """(2,1) optimization along the chord from N to M.

    Arrays are indexed by the grid parameter ``lam`` (1 at N, 0 at M).
    """

    lam: np.ndarray
    lam2: np.ndarray
    value_21: np.ndarray
    value_11: np.ndarray
    states: np.ndarray
    edge: tuple[int, int]


def _lateral_edge_for(m: BlochPoint) -> int:
    """Index of the zero state ``Z_k`` whose azimuth matches ``M``."""
    zs = ghz_w_polytope().vertices[1:]
    return 1 + int(np.argmin([abs(math.remainder(m.phi - z.phi, 2 * math.pi)) for z in zs]))


def scan_21_line(n: BlochPoint, m: BlochPoint, grid: int = 41) -> LineScan:
    """Optimize the (2,1) decomposition with the ``W - Z_k`` edge between ``n`` and ``m``."""
    if grid < 2:
        raise InvalidInputError("grid needs at least two points")
    verts = zero_state_vectors()
    k = _lateral_edge_for(m)
    a, b = verts[0], verts[k]
    nv, mv = n.cartesian, m.cartesian
    lam = np.linspace(1.0, 0.0, grid)
    lam2 = np.empty(grid)
    v21 = np.empty(grid)
    v11 = np.empty(grid)
    states = np.empty((grid, 3))
    rng = np.random.default_rng(12345)
    for i, t in enumerate(lam):
        r = t * nv + (1.0 - t) * mv
        x = _best_lambda2(a, b, r, rng=rng)
        val, ex = edge_21_value(a, b, r, x)
        lam2[i], v21[i], states[i] = x, float(val), ex
        ends, _ = edge_21_value(a, b, r, np.array([0.0, 1.0]))
        v11[i] = float(np.min(ends))
    return LineScan(lam, lam2, v21, v11, states, (0, k))


def optimize_21_line(n: BlochPoint, m: BlochPoint, grid: int = 41) -> list[BlochPoint]:
    """Entangled members of the optimal (2,1) decompositions on the chord ``n -> m``.

    Parameters
    ----------
    n, m : BlochPoint
        End states, e.g. ``N3`` and ``M3``.
    grid : int
        Number of equally spaced chord points, endpoints included.
    """
    return [BlochPoint.from_cartesian(s) for s in scan_21_line(n, m, grid).states]


@dataclass(frozen=True)
class LowerCircle:
    """Circle through the surface states of one lateral (2,1) family.

    ``normal`` is oriented to positive x; ``distance`` is unsigned.
    """

    normal: np.ndarray
    distance: float
    center: np.ndarray
    radius: float
    plane_residual: float
    radial_residual: float
    three_point_normal: np.ndarray
    three_point_distance: float
    points: np.ndarray = field(repr=False)
    scan: LineScan = field(repr=False)


def fit_circle(points) -> tuple[np.ndarray, float, np.ndarray, float, float, float]:
    """Plane fit, then centre = projection of the origin, radius = mean distance."""
    pts = np.asarray(points, dtype=float)
    normal, offset, plane_res = fit_plane(pts)
    center = offset * normal
    d = np.linalg.norm(pts - center, axis=1)
    return normal, abs(offset), center, float(d.mean()), plane_res, float(np.max(np.abs(d - d.mean())))


@functools.lru_cache(maxsize=8)
def lower_circle(grid: int = 41, index: int = 3) -> LowerCircle:
    """Fit the lower circle through ``N_{k}``, ``M_k`` and ``N_{k-1}``.

    Only ``index = 3`` is computed directly; the scan runs from ``N3`` to
    ``M3`` and is mirrored to ``N2`` by conjugation.
    """
    ns, ms = find_N_states(), find_M_states()
    scan = scan_21_line(ns[2], ms[2], grid)
    mirror = scan.states[::-1][1:] * np.array([1.0, -1.0, 1.0])
    pts = np.vstack([scan.states, mirror])
    rot = {3: 0.0, 1: TWO_PI_3, 2: -TWO_PI_3}[index]
    pts = rotate_z(pts, rot)
    normal, dist, center, radius, pres, rres = fit_circle(pts)
    n3, m3, n2 = (rotate_z(s.cartesian, rot) for s in (ns[2], ms[2], ns[1]))
    tn, td = plane_through_points(n3, m3, n2)
    return LowerCircle(normal, dist, center, radius, pres, rres, tn, td, pts, scan)


def circle_tangent_residual(points, center) -> float:
    """Largest cosine between the chord-wise derivative and the radius vector.

    Central differences of the point sequence approximate the tangent; for
    points on a circle the cosine vanishes up to the discretization error.
    """
    pts = np.asarray(points, dtype=float)
    t = pts[2:] - pts[:-2]
    r = pts[1:-1] - np.asarray(center)
    cos = np.abs(np.sum(t * r, axis=1)) / (np.linalg.norm(t, axis=1) * np.linalg.norm(r, axis=1))
    return float(np.max(cos))


# --------------------------------------------------------------------------
# (2,1) against (0,2)


@dataclass(frozen=True)
class InequalityCheck:
    """Curvature test at the midpoint between two conjugate zero states."""

    tau0: float
    tau_dd: float
    outer_radius: float
    inner_radius: float
    d1: float
    threshold: float
    margin: float
    favors_02: bool
    marginal: bool

    @property
    def curvature_ratio(self) -> float:
        return abs(self.tau_dd) / self.tau0


def inequality_margin(tau0: float, tau_dd: float, outer_radius: float, d1: float) -> float:
    """``|tau''| - tau0 rho / d1``; positive values favour the (0,2) decomposition."""
    if d1 <= 0.0:
        raise DomainError("d1 must be positive")
    return abs(tau_dd) - tau0 * outer_radius / d1


def decide_02_vs_21(tau0: float, tau_dd: float, outer_radius: float, d1: float) -> bool:
    """True iff the (0,2) decomposition beats (2,1): ``|tau''| > tau0 rho / d1``.

    A margin within 1e-12 counts as a tie and returns False; use
    :func:`compare_02_vs_21` to see the marginal flag.
    """
    return inequality_margin(tau0, tau_dd, outer_radius, d1) > 1e-12


def compare_02_vs_21(tau0: float, tau_dd: float, outer_radius: float, d1: float) -> tuple[bool, bool, float]:
    """``(favors_02, marginal, margin)``."""
    margin = inequality_margin(tau0, tau_dd, outer_radius, d1)
    return margin > 1e-12, abs(margin) <= 1e-12, margin


def inequality_at_p0() -> InequalityCheck:
    """Evaluate the inequality for the pair ``Z1, Z2`` along the horizontal plane at ``p0``."""
    from .bloch import inclined_chord

    z1, z2 = zero_state_vectors()[1:3]
    q = 0.5 * (z1 + z2)
    r0 = float(np.linalg.norm(q))
    anchor = math.atan2(q[0], q[2])
    chord = inclined_chord(r0, anchor, math.pi / 2.0)
    tau0 = float(sqrt_tau3_analytic(P0, 0.0))
    tau_dd = phi_second_derivative(P0, 0.0)
    d1 = chord.outer_radius - chord.inner_radius
    favors, marginal, margin = compare_02_vs_21(tau0, tau_dd, chord.outer_radius, d1)
    return InequalityCheck(
        tau0, tau_dd, chord.outer_radius, chord.inner_radius, d1, chord.outer_radius / d1, margin, favors, marginal
    )


# --------------------------------------------------------------------------
# zero-state locking


@dataclass(frozen=True)
class LockingReport:
    """Average tangle after moving one zero state by arc length ``eps``."""

    eps_values: np.ndarray
    T_values: np.ndarray
    T0: float
    fitted_exponent: float
    skipped: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if np.any(np.diff(self.eps_values) >= 0):
            raise InvalidInputError("eps values must decrease strictly")


def _tangent_step(v: np.ndarray, eps: float) -> np.ndarray:
    """Move a unit vector by arc length ``eps`` along increasing azimuth.

    At a pole, where the azimuth is undefined, move along increasing polar
    angle in the x-z plane.
    """
    s = math.hypot(v[0], v[1])
    if s >= 1e-12:
        # a rotation about z by eps / sin(theta) covers arc length eps
        return rotate_z(v, eps / s)
    return np.array([math.sin(eps), 0.0, math.copysign(math.cos(eps), v[2])])


def locking_perturbation(
    decomp: Decomposition,
    vertex_index: int,
    eps_list: Sequence[float] | None = None,
    fit_points: int = 5,
) -> LockingReport:
    """Scaling of the average tangle when one zero member is displaced.

    Each ``eps`` moves the zero state by that arc length along increasing
    azimuth. The weights are re-solved so that the barycenter stays put; if
    that is impossible (residual above 1e-10 or a negative weight) the ``eps``
    is skipped. The exponent is a least-squares fit of
    ``log(T(eps) - T(0))`` against ``log eps`` on the smallest values.
    """
    states = decomp.states
    if not 0 <= vertex_index < len(states):
        raise InvalidInputError("vertex index out of range")
    if decomp.tangles[vertex_index] ** 2 >= ZERO_TANGLE:
        raise InvalidInputError("the displaced member must be a zero state")
    eps = np.sort(np.asarray(eps_list if eps_list is not None else np.geomspace(1e-2, 1e-4, 9), float))[::-1]
    target = decomp.barycenter
    vecs = decomp.vectors
    t0 = avg_tangle(decomp)
    kept_e, kept_t, skipped = [], [], []
    for e in eps:
        moved = vecs.copy()
        moved[vertex_index] = _tangent_step(vecs[vertex_index], float(e))
        a = np.vstack([moved.T, np.ones(len(moved))])
        w, *_ = np.linalg.lstsq(a, np.append(target, 1.0), rcond=None)
        if np.max(np.abs(a @ w - np.append(target, 1.0))) > 1e-10 or np.any(w < 0):
            skipped.append(float(e))
            continue
        kept_e.append(float(e))
        kept_t.append(float(w @ sqrt_tau3_vectors(moved)))
    kept_e_arr, kept_t_arr = np.array(kept_e), np.array(kept_t)
    exponent = math.nan
    if len(kept_e) >= 2:
        sel = slice(-min(fit_points, len(kept_e)), None)
        diff = kept_t_arr[sel] - t0
        if np.all(diff > 0):
            exponent = float(np.polyfit(np.log(kept_e_arr[sel]), np.log(diff), 1)[0])
    return LockingReport(kept_e_arr, kept_t_arr, t0, exponent, tuple(skipped))


def tetra_decomposition(tetra, point) -> Decomposition:
    """Barycentric decomposition of ``point`` over four surface vertices."""
    from .zero_polytope import barycentric

    b = barycentric(tetra, point)
    if np.min(b) < -1e-10:
        raise GeometryError("point lies outside the tetrahedron")
    return Decomposition.from_vectors(np.clip(b, 0.0, None), tetra, target=np.asarray(point, float))
