"""Geometry of the rank-two Bloch ball spanned by GHZ (north pole) and W.

A pure state ``sqrt(p) |GHZ> + exp(i phi) sqrt(1-p) |W>`` sits at
``(2 sqrt(p(1-p)) cos phi, 2 sqrt(p(1-p)) sin phi, 2p - 1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePlaneError, DomainError, GeometryError, NoCrossingError

_TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Reduce an angle to the interval (-pi, pi]."""
    r = math.remainder(float(a), _TWO_PI)
    return math.pi if r == -math.pi else r


def _prob(p: float) -> float:
    p = float(p)
    if not math.isfinite(p) or p < -1e-12 or p > 1.0 + 1e-12:
        raise DomainError(f"probability outside [0, 1]: {p}")
    return min(max(p, 0.0), 1.0)


@dataclass(frozen=True)
class BlochPoint:
    """Pure state of the GHZ-W family given by ``(p, phi)``.

    ``phi`` is stored reduced to (-pi, pi]. At the poles it is kept as given
    but carries no geometric meaning.
    """

    p: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", _prob(self.p))
        object.__setattr__(self, "phi", wrap_angle(self.phi))

    @property
    def cartesian(self) -> np.ndarray:
        s = 2.0 * math.sqrt(self.p * (1.0 - self.p))
        return np.array([s * math.cos(self.phi), s * math.sin(self.phi), 2.0 * self.p - 1.0])

    @property
    def theta(self) -> float:
        """Polar angle measured from the GHZ pole."""
        return 2.0 * math.asin(math.sqrt(1.0 - self.p))

    @property
    def amplitudes(self) -> np.ndarray:
        """Coefficients on ``(|GHZ>, |W>)``."""
        return np.array([math.sqrt(self.p), np.exp(1j * self.phi) * math.sqrt(1.0 - self.p)])

    def rotated(self, dphi: float) -> "BlochPoint":
        return BlochPoint(self.p, self.phi + dphi)

    def conjugated(self) -> "BlochPoint":
        return BlochPoint(self.p, -self.phi)

    @classmethod
    def from_cartesian(cls, v) -> "BlochPoint":
        """Pure state along the direction of ``v`` (need not be unit length)."""
        v = np.asarray(v, dtype=float)
        n = float(np.linalg.norm(v))
        if n == 0.0:
            raise DomainError("the zero vector has no direction")
        x, y, z = v / n
        s2 = x * x + y * y
        p = 0.5 * (1.0 + z) if z >= 0 else s2 / (2.0 * (1.0 - z))
        phi = math.atan2(y, x) if s2 > 0 else 0.0
        return cls(p, phi)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "BlochPoint":
        """Pure state at polar angle ``theta`` from GHZ and azimuth ``phi``."""
        return cls(math.cos(0.5 * theta) ** 2, phi)


@dataclass(frozen=True)
class InteriorPoint:
    """Arbitrary point of the Bloch ball (a rank-two mixed state)."""

    v: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = np.array(self.v, dtype=float).reshape(-1)
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise DomainError("an interior point needs three finite coordinates")
        if np.linalg.norm(v) > 1.0 + 1e-12:
            raise DomainError(f"point outside the Bloch ball: |v| = {np.linalg.norm(v)}")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    def __repr__(self) -> str:
        return "InteriorPoint({:.9g}, {:.9g}, {:.9g})".format(*self.v)

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.v))

    @classmethod
    def from_spherical(cls, p: float, phi: float, radius: float) -> "InteriorPoint":
        """``radius`` times the Bloch vector of the pure state ``(p, phi)``."""
        radius = float(radius)
        if not math.isfinite(radius) or radius < 0.0 or radius > 1.0 + 1e-12:
            raise DomainError(f"radius outside [0, 1]: {radius}")
        return cls(min(radius, 1.0) * BlochPoint(p, phi).cartesian)

    @classmethod
    def on_axis(cls, p: float) -> "InteriorPoint":
        """Mixture ``p |GHZ><GHZ| + (1-p) |W><W|``."""
        return cls(np.array([0.0, 0.0, 2.0 * _prob(p) - 1.0]))


@dataclass(frozen=True)
class ChordGeometry:
    """Line through an anchor in the real plane and its intersection circles.

    ``outer_radius`` is the radius of the circle cut from the unit sphere by
    the plane that contains the line and the y axis; ``inner_radius`` is the
    radius cut from the sphere of radius ``r0``.
    """

    r0: float
    theta_anchor: float
    theta_dir: float
    d_plus: float
    d_minus: float
    inner_radius: float
    outer_radius: float


def _real_plane_offset(p: float, phi: float) -> float:
    return math.sqrt(p * (1.0 - p)) * abs(math.cos(phi))


def crossing_weights(p0: float, phi0: float, p1: float, phi1: float) -> tuple[float, float]:
    """Weights ``(m0, m1)`` that balance two states across the symmetry axis.

    The states are taken on opposite sides of the axis in the real-plane
    projection, at horizontal offsets ``sqrt(p(1-p)) |cos phi|``.
    """
    x0 = _real_plane_offset(_prob(p0), phi0)
    x1 = _real_plane_offset(_prob(p1), phi1)
    den = x0 + x1
    if den <= 1e-15:
        raise NoCrossingError("both states lie on the axis; the chord does not cross it")
    return x1 / den, x0 / den


def axis_crossing(p0: float, phi0: float, p1: float, phi1: float) -> float:
    """Height ``P`` at which the projected chord of two states meets the axis.

    Returns the probability ``P`` of the axis point ``(0, 0, 2P - 1)``:
    ``P = (p0 x1 + p1 x0) / (x0 + x1)`` with ``x = sqrt(p(1-p)) |cos phi|``.

    Raises
    ------
    NoCrossingError
        If both offsets vanish (both states at a pole).
    """
    m0, m1 = crossing_weights(p0, phi0, p1, phi1)
    return m0 * _prob(p0) + m1 * _prob(p1)


def weight_ratio(p0: float, phi0: float, p1: float, phi1: float) -> float:
    """Ratio ``m1 / m0 = x0 / x1`` of the axis-crossing weights."""
    x0 = _real_plane_offset(_prob(p0), phi0)
    x1 = _real_plane_offset(_prob(p1), phi1)
    if x1 <= 1e-15:
        raise NoCrossingError("second state lies on the axis; weight ratio undefined")
    return x0 / x1


def _chord_roots(p0: float, phi0: float, p: float) -> tuple[float, float, float, float]:
    q = p0 * (1.0 - p0)
    c2 = math.cos(phi0) ** 2
    dp = p - p0
    den = dp * dp + q * c2
    if den <= 1e-300:
        raise GeometryError("surface point coincides with the axis point")
    disc = dp * dp + 4.0 * q * c2 * p * (1.0 - p)
    if disc < -1e-12:
        raise GeometryError(f"negative discriminant {disc}")
    root = math.sqrt(max(disc, 0.0))
    lin = dp * (1.0 - 2.0 * p0) + 2.0 * q * c2
    t_far = (lin + root) / (2.0 * den)
    t_near = (lin - root) / (2.0 * den)
    return t_far, t_near, dp, q * c2


def chord_endpoints_Pplusminus(p0: float, phi0: float, p: float) -> tuple[float, float]:
    """Heights where the projected chord through ``(p0, phi0)`` and the axis
    point ``p`` pierces the real-plane great circle.

    Returns
    -------
    (P_plus, P_minus) : tuple of float
        Sorted so that ``P_plus >= P_minus``.
    """
    p0, p = _prob(p0), _prob(p)
    t_far, t_near, dp, _ = _chord_roots(p0, phi0, p)
    a, b = p0 + t_far * dp, p0 + t_near * dp
    a, b = min(max(a, 0.0), 1.0), min(max(b, 0.0), 1.0)
    return (a, b) if a >= b else (b, a)


def chord_endpoints_cartesian(p0: float, phi0: float, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Both real-plane intersection points as ``(x, 0, z)`` vectors.

    The first point lies beyond the axis point, the second on the side of
    the surface point. ``x`` is measured positive on the surface point's side.
    """
    p0, p = _prob(p0), _prob(p)
    t_far, t_near, dp, _ = _chord_roots(p0, phi0, p)
    x0 = 2.0 * math.sqrt(p0 * (1.0 - p0)) * abs(math.cos(phi0))
    out = []
    for t in (t_far, t_near):
        out.append(np.array([x0 * (1.0 - t), 0.0, 2.0 * (p0 + t * dp) - 1.0]))
    return out[0], out[1]


def inclined_chord(r0: float, theta_anchor: float, theta_dir: float) -> ChordGeometry:
    """Intersections of the line ``z0 + d n`` with the unit sphere.

    Parameters
    ----------
    r0 : float
        Distance of the anchor ``z0`` from the origin.
    theta_anchor, theta_dir : float
        Angles of the anchor and of the line direction, measured in the real
        plane from the same reference axis.
    """
    r0 = float(r0)
    if r0 < 0.0 or r0 > 1.0:
        raise DomainError(f"anchor distance outside [0, 1]: {r0}")
    delta = theta_anchor - theta_dir
    along = r0 * math.cos(delta)
    inner = abs(along)
    outer = math.sqrt(max(1.0 - (r0 * math.sin(delta)) ** 2, 0.0))
    return ChordGeometry(
        r0=r0,
        theta_anchor=theta_anchor,
        theta_dir=theta_dir,
        d_plus=-along + outer,
        d_minus=-along - outer,
        inner_radius=inner,
        outer_radius=outer,
    )


def arc_offset(outer_radius: float, dphi: float) -> tuple[float, float]:
    """Offset ``rho (1 - cos dphi, sin dphi)`` of a point moved along a circle."""
    return outer_radius * (1.0 - math.cos(dphi)), outer_radius * math.sin(dphi)


def arc_offset_small_angle(outer_radius: float, dphi: float) -> tuple[float, float]:
    """Quadratic small-angle form ``(rho dphi^2 / 2, rho dphi)`` of :func:`arc_offset`."""
    return 0.5 * outer_radius * dphi * dphi, outer_radius * dphi


def _orient(n: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    for k in (0, 2, 1):
        if abs(n[k]) > tol:
            return n if n[k] > 0 else -n
    return n


def plane_through_points(a, b, c) -> tuple[np.ndarray, float]:
    """Unit normal and origin distance of the plane through three points.

    The normal is oriented to a positive x component (ties: positive z, then
    positive y).

    Raises
    ------
    DegeneratePlaneError
        If the points are collinear.
    """
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    n = np.cross(b - a, c - a)
    scale = max(np.linalg.norm(b - a) * np.linalg.norm(c - a), 1e-300)
    if np.linalg.norm(n) <= 1e-12 * scale:
        raise DegeneratePlaneError("points are collinear")
    n = _orient(n / np.linalg.norm(n))
    return n, abs(float(n @ a))


def fit_plane(points) -> tuple[np.ndarray, float, float]:
    """Least-squares plane through a point cloud.

    Returns
    -------
    normal : ndarray
        Oriented unit normal.
    offset : float
        Signed offset ``normal . x`` of the plane.
    residual : float
        Largest distance of a point from the plane.
    """
    pts = np.asarray(points, dtype=float)
    centroid = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - centroid)
    n = _orient(vt[-1])
    offset = float(n @ centroid)
    return n, offset, float(np.max(np.abs(pts @ n - offset)))


def ray_exit(start, through) -> tuple[np.ndarray, np.ndarray]:
    """Second intersection of the ray ``start -> through`` with the unit sphere.

    Parameters
    ----------
    start, through : array_like, shape (..., 3)
        ``start`` inside or on the sphere.

    Returns
    -------
    exit : ndarray, shape (..., 3)
        Point on the sphere beyond ``through``.
    weight : ndarray, shape (...)
        Fraction ``|through - start| / |exit - start|``, i.e. the weight of
        ``exit`` in ``through = (1 - w) start + w exit``.
    """
    a = np.asarray(start, dtype=float)
    r = np.asarray(through, dtype=float)
    d = r - a
    length = np.linalg.norm(d, axis=-1)
    safe = np.where(length > 1e-15, length, 1.0)
    u = d / safe[..., None]
    b = np.sum(a * u, axis=-1)
    c = np.sum(a * a, axis=-1) - 1.0
    t = -b + np.sqrt(np.maximum(b * b - c, 0.0))
    t = np.maximum(t, length)
    exit_ = a + t[..., None] * u
    exit_ = exit_ / np.linalg.norm(exit_, axis=-1, keepdims=True)
    weight = np.where(length > 1e-15, length / np.where(t > 0, t, 1.0), 0.0)
    exit_ = np.where((length > 1e-15)[..., None], exit_, r)
    return exit_, weight


class AxisFrame:
    """Rotated Bloch frame whose north pole is a chosen unit vector.

    The rotation is about the y axis, so the real plane (y = 0) and the
    conjugation symmetry are preserved. Coordinates in this frame are called
    auxiliary; ``(p, phi)`` there refer to the auxiliary pole.
    """

    def __init__(self, north) -> None:
        n = np.asarray(north, dtype=float)
        n = n / np.linalg.norm(n)
        if abs(n[1]) > 1e-12:
            raise GeometryError("auxiliary pole must lie in the real plane")
        self.north = n
        self.ex = np.array([n[2], 0.0, -n[0]])
        self.ey = np.array([0.0, 1.0, 0.0])
        self._basis = np.vstack([self.ex, self.ey, self.north])

    def to_local(self, v) -> np.ndarray:
        return np.asarray(v, dtype=float) @ self._basis.T

    def to_global(self, v) -> np.ndarray:
        return np.asarray(v, dtype=float) @ self._basis

    def local_point(self, v) -> BlochPoint:
        return BlochPoint.from_cartesian(self.to_local(v))

    def global_vector(self, point: BlochPoint) -> np.ndarray:
        return self.to_global(point.cartesian)

    def axis_vector(self, p: float) -> np.ndarray:
        """Global position of the auxiliary axis point at height ``p``."""
        return (2.0 * _prob(p) - 1.0) * self.north


def rotate_z(v, angle: float) -> np.ndarray:
    """Rotate vectors about the z axis by ``angle``."""
    v = np.asarray(v, dtype=float)
    c, s = math.cos(angle), math.sin(angle)
    out = v.copy()
    out[..., 0] = c * v[..., 0] - s * v[..., 1]
    out[..., 1] = s * v[..., 0] + c * v[..., 1]
    return out


def polar_angle(v) -> float:
    """Angle between ``v`` and the GHZ pole."""
    v = np.asarray(v, dtype=float)
    return math.atan2(math.hypot(v[0], v[1]), v[2])
