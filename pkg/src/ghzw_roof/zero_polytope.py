"""Zero states of a two-state superposition family and their convex hull.

For a family ``|Psi(z)> = |Psi0> + z |Psi1>`` the hyperdeterminant is a
polynomial of degree four in ``z``. Its roots are the superpositions with
vanishing tangle; their Bloch vectors span the zero-polytope inside which the
convex roof vanishes identically.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bloch import BlochPoint, InteriorPoint
from .errors import DegeneratePolynomialError, InsideObstacleError
from .tangle import Amplitudes3Q, hyperdeterminant

INFINITY = complex(math.inf, 0.0)

# Five interpolation nodes on a circle keep the Vandermonde system well
# conditioned; the sixth checks the fit.
_NODES = np.exp(2j * np.pi * np.arange(5) / 5)
_CHECK_NODE = 0.5 + 0.25j


@dataclass(frozen=True)
class TanglePolynomial:
    """Coefficients ``c[k]`` of ``P(z) = sum_k c[k] z^k`` (ascending powers).

    ``basis`` optionally keeps the two amplitude vectors the polynomial was
    built from, so roots can be refined against the hyperdeterminant itself.
    """

    coeffs: np.ndarray = field(repr=False)
    basis: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size > 5:
            raise ValueError("degree must not exceed 4")
        c = np.concatenate([c, np.zeros(5 - c.size, dtype=complex)])
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def __repr__(self) -> str:
        return "TanglePolynomial(" + ", ".join(f"{c:.6g}" for c in self.coeffs) + ")"

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    @property
    def is_zero(self) -> bool:
        return self.scale == 0.0

    @property
    def degree(self) -> int:
        """Degree after dropping leading coefficients below 1e-12 of the scale."""
        if self.is_zero:
            return -1
        big = np.nonzero(np.abs(self.coeffs) > 1e-12 * self.scale)[0]
        return int(big[-1])

    def derivative(self, order: int = 1) -> "TanglePolynomial":
        return TanglePolynomial(np.polynomial.polynomial.polyder(self.coeffs, order))

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: complex = 1.0) -> "TanglePolynomial":
        return cls(lead * np.polynomial.polynomial.polyfromroots(roots))


def build_polynomial(basis0: Amplitudes3Q, basis1: Amplitudes3Q) -> TanglePolynomial:
    """Hyperdeterminant of ``basis0 + z basis1`` as a quartic in ``z``.

    The polynomial is interpolated from five evaluations and checked on a
    sixth point.

    Raises
    ------
    DegeneratePolynomialError
        If the basis states are linearly dependent or the interpolation
        residual exceeds 1e-10.
    """
    a0, a1 = np.asarray(basis0.psi), np.asarray(basis1.psi)
    gram = np.array([[np.vdot(a0, a0), np.vdot(a0, a1)], [np.vdot(a1, a0), np.vdot(a1, a1)]])
    if abs(np.linalg.det(gram)) <= 1e-12 * max(float(np.real(np.trace(gram))) ** 2, 1e-300):
        raise DegeneratePolynomialError("basis states are linearly dependent")
    vals = np.array([hyperdeterminant(a0 + z * a1) for z in _NODES])
    coeffs = np.linalg.solve(np.vander(_NODES, 5, increasing=True), vals)
    # interpolation leaves ~1e-16 noise in coefficients that vanish exactly
    cut = 1e-13 * float(np.max(np.abs(coeffs)))
    coeffs = np.where(np.abs(coeffs.real) <= cut, 0.0, coeffs.real) + 1j * np.where(
        np.abs(coeffs.imag) <= cut, 0.0, coeffs.imag
    )
    poly = TanglePolynomial(coeffs, basis=(a0, a1))
    check = hyperdeterminant(a0 + _CHECK_NODE * a1)
    size = max(abs(check), poly.scale, 1e-300)
    if abs(poly(_CHECK_NODE) - check) > 1e-10 * size:
        raise DegeneratePolynomialError("interpolation residual exceeds 1e-10")
    return poly


def _cluster(roots: np.ndarray, poly: TanglePolynomial) -> list[tuple[complex, int]]:
    """Group numerically split multiple roots.

    Companion-matrix eigenvalues of an m-fold root scatter by about
    eps^(1/m), so candidate clusters are formed generously and kept only if
    the lower derivatives vanish at their centroid.
    """
    remaining = list(roots)
    out: list[tuple[complex, int]] = []
    while remaining:
        z = remaining.pop(0)
        radius = 1e-3 * (1.0 + abs(z))
        group = [z] + [w for w in remaining if abs(w - z) <= radius]
        if len(group) > 1:
            centre = complex(np.mean(group))
            m = len(group)
            confirmed = all(
                abs(poly.derivative(k)(centre)) <= 1e-6 * poly.derivative(k).scale * (1.0 + abs(centre)) ** (4 - k)
                for k in range(1, m)
            )
            if confirmed:
                for w in group[1:]:
                    remaining.remove(w)
                out.append((centre, m))
                continue
        out.append((complex(z), 1))
    # clusters tighter than 1e-8 always merge
    merged: list[tuple[complex, int]] = []
    for z, m in out:
        for i, (w, k) in enumerate(merged):
            if abs(z - w) <= 1e-8 * (1.0 + abs(z)):
                merged[i] = ((w * k + z * m) / (k + m), k + m)
                break
        else:
            merged.append((z, m))
    return merged


def _refine(poly: TanglePolynomial, z: complex, steps: int = 8) -> complex:
    """Newton steps on the hyperdeterminant of the actual superposition.

    The interpolated coefficients carry rounding of the largest one, which
    can leave ``Det(a0 + z a1)`` at 1e-13 of its monomial scale. Iterating on
    the exact function with the polynomial slope removes that. For ``|z| > 1``
    the reversed family ``a1 + w a0`` with ``w = 1/z`` is used.
    """
    a0, a1 = poly.basis
    flip = abs(z) > 1.0
    if flip:
        a0, a1 = a1, a0
        rev = TanglePolynomial(poly.coeffs[::-1]).derivative()
        x = 1.0 / z
    else:
        rev = poly.derivative()
        x = z
    best, best_val = x, abs(hyperdeterminant(a0 + x * a1))
    for _ in range(steps):
        slope = rev(x)
        if slope == 0 or best_val == 0.0:
            break
        x_new = x - hyperdeterminant(a0 + x * a1) / slope
        val = abs(hyperdeterminant(a0 + x_new * a1))
        if not val < best_val:
            break
        best, best_val, x = x_new, val, x_new
    return complex(1.0 / best) if flip else complex(best)


def solve_zero_states(poly: TanglePolynomial) -> list[tuple[complex, int]]:
    """Roots of a tangle polynomial with multiplicities.

    Returns
    -------
    list of (complex, int)
        Finite roots sorted by modulus then phase, followed by the root at
        infinity (``INFINITY``) when the degree is below four. Multiplicities
        sum to four.

    Raises
    ------
    DegeneratePolynomialError
        For the zero polynomial.
    """
    if poly.is_zero:
        raise DegeneratePolynomialError("the tangle polynomial vanishes identically")
    deg = poly.degree
    c = poly.coeffs[: deg + 1]
    if deg == 0:
        roots = np.array([], dtype=complex)
    else:
        # numpy.roots diagonalizes the companion matrix
        roots = np.roots(c[::-1])
        dpoly = poly.derivative()
        polished = []
        for z in roots:
            d = dpoly(z)
            if d != 0:
                step = poly(z) / d
                if abs(step) < 1e-6 * (1.0 + abs(z)):
                    z = z - step
            polished.append(z)
        roots = np.array(polished)
    out = _cluster(roots, poly) if roots.size else []
    if poly.basis is not None:
        out = [(_refine(poly, z), m) if m == 1 else (z, m) for z, m in out]
    out.sort(key=lambda zm: (round(abs(zm[0]), 9), cmath.phase(zm[0]) % (2 * math.pi)))
    if deg < 4:
        out.append((INFINITY, 4 - deg))
    return out


def z_to_bloch(z: complex) -> BlochPoint:
    """Bloch point of ``|W> + z |GHZ>``; ``z = inf`` is GHZ.

    The relative phase of W against GHZ is ``-arg z``, so ``phi = -arg z``
    in the ``sqrt(p)|GHZ> + exp(i phi) sqrt(1-p)|W>`` convention. Roots of
    the GHZ-W family come in conjugate pairs, so the set of azimuths is
    unchanged by this sign.
    """
    z = complex(z)
    if not cmath.isfinite(z):
        return BlochPoint(1.0, 0.0)
    if abs(z) <= 1e-12:
        return BlochPoint(0.0, 0.0)
    r2 = abs(z) ** 2
    return BlochPoint(r2 / (1.0 + r2), -cmath.phase(z))


@dataclass(frozen=True)
class ZeroPolytope:
    """Convex hull of the zero states.

    Attributes
    ----------
    vertices : tuple of BlochPoint
    multiplicities : tuple of int
        Sum to four.
    faces : tuple of (int, int, int)
        All vertex triples of the tetrahedron.
    degenerate : bool
        True when the vertices do not span a tetrahedron of positive volume.
    """

    vertices: tuple[BlochPoint, ...]
    multiplicities: tuple[int, ...]
    faces: tuple[tuple[int, int, int], ...]
    degenerate: bool

    @property
    def points(self) -> np.ndarray:
        return np.array([v.cartesian for v in self.vertices])

    @property
    def volume(self) -> float:
        if len(self.vertices) < 4:
            return 0.0
        a, b, c, d = self.points
        return abs(float(np.linalg.det(np.array([b - a, c - a, d - a])))) / 6.0

    def barycentric(self, point) -> np.ndarray:
        """Barycentric coordinates of a point with respect to the tetrahedron."""
        if self.degenerate:
            raise DegeneratePolynomialError("degenerate zero-polytope has no barycentric frame")
        return barycentric(self.points, point)


def barycentric(tetra, point) -> np.ndarray:
    """Barycentric coordinates of ``point`` (shape (..., 3)) in a tetrahedron."""
    t = np.asarray(tetra, dtype=float)
    a = np.vstack([t.T, np.ones(4)])
    pts = np.asarray(point, dtype=float)
    rhs = np.concatenate([pts, np.ones(pts.shape[:-1] + (1,))], axis=-1)
    return np.linalg.solve(a, rhs.reshape(-1, 4).T).T.reshape(pts.shape[:-1] + (4,))


def polytope_from_roots(roots: list[tuple[complex, int]]) -> ZeroPolytope:
    vertices = tuple(z_to_bloch(z) for z, _ in roots)
    mults = tuple(m for _, m in roots)
    faces = tuple(itertools.combinations(range(len(vertices)), 3)) if len(vertices) == 4 else ()
    poly = ZeroPolytope(vertices, mults, faces, degenerate=False)
    degenerate = len(vertices) < 4 or poly.volume <= 1e-12
    return ZeroPolytope(vertices, mults, faces, degenerate)


def zero_polytope(basis0: Amplitudes3Q, basis1: Amplitudes3Q) -> ZeroPolytope:
    """Zero-polytope of the family ``basis0 + z basis1`` (``basis0`` = W side)."""
    return polytope_from_roots(solve_zero_states(build_polynomial(basis0, basis1)))


def ghz_w_polytope() -> ZeroPolytope:
    """Zero-polytope of the GHZ-W family, vertices ordered ``W, Z1, Z2, Z3``.

    ``Z1, Z2, Z3`` sit at ``p0`` with azimuths ``pi/3, -pi/3, pi``.
    """
    poly = zero_polytope(Amplitudes3Q.w(), Amplitudes3Q.ghz())
    order = {0: 0, 1: 1, -1: 2, 3: 3}

    def key(v: BlochPoint) -> int:
        if v.p <= 1e-12:
            return 0
        k = round(v.phi / (math.pi / 3))
        return order[3 if abs(k) == 3 else k]

    idx = sorted(range(4), key=lambda i: key(poly.vertices[i]))
    return ZeroPolytope(
        tuple(poly.vertices[i] for i in idx),
        tuple(poly.multiplicities[i] for i in idx),
        poly.faces,
        poly.degenerate,
    )


def contains(polytope: ZeroPolytope, point, tol: float = 1e-10) -> bool:
    """True iff the point lies in the closed zero-polytope (tolerance ``tol``)."""
    v = point.v if isinstance(point, InteriorPoint) else np.asarray(point, dtype=float)
    return bool(np.min(polytope.barycentric(v)) >= -tol)


def _halfspaces(tetra: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inward normals ``n`` and offsets ``c`` with interior ``n . x > c``."""
    normals, offsets = [], []
    for i in range(4):
        face = [tetra[j] for j in range(4) if j != i]
        n = np.cross(face[1] - face[0], face[2] - face[0])
        n /= np.linalg.norm(n)
        if n @ (tetra[i] - face[0]) < 0:
            n = -n
        normals.append(n)
        offsets.append(n @ face[0])
    return np.array(normals), np.array(offsets)


def segment_hits_interior(a, b, tetra, tol: float = 1e-10) -> bool:
    """Whether the open segment ``(a, b)`` passes through the tetrahedron's interior."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    normals, offsets = _halfspaces(np.asarray(tetra, dtype=float))
    lo, hi = 0.0, 1.0
    d = b - a
    for n, c in zip(normals, offsets):
        # require n . (a + t d) > c + tol
        num = c + tol - n @ a
        den = n @ d
        if abs(den) < 1e-15:
            if num >= 0:
                return False
            continue
        t = num / den
        if den > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
        if lo >= hi:
            return False
    return hi - lo > 1e-12


def _inside(tetra: np.ndarray, v: np.ndarray, tol: float) -> bool:
    return bool(np.min(barycentric(tetra, v)) > tol)


def visible_vertices(
    point,
    opaque: Sequence[np.ndarray] | None = None,
    polytope: ZeroPolytope | None = None,
    tol: float = 1e-10,
) -> list[int]:
    """Indices of zero-polytope vertices visible from a point.

    Parameters
    ----------
    point : InteriorPoint or array_like
    opaque : sequence of (4, 3) arrays or ZeroPolytope, optional
        Tetrahedra that block the line of sight. ``None`` means no obstacles.
    polytope : ZeroPolytope, optional
        Polytope whose vertices are tested; defaults to the GHZ-W one.

    Raises
    ------
    InsideObstacleError
        If the point lies strictly inside an opaque tetrahedron.
    """
    v = point.v if isinstance(point, InteriorPoint) else np.asarray(point, dtype=float)
    polytope = polytope if polytope is not None else ghz_w_polytope()
    opaque = [
        t.points if isinstance(t, ZeroPolytope) else np.asarray(t, dtype=float) for t in (opaque or [])
    ]
    for tetra in opaque:
        if _inside(tetra, v, tol):
            raise InsideObstacleError("point lies inside an opaque polytope")
    return [
        i
        for i, vert in enumerate(polytope.points)
        if not any(segment_hits_interior(v, vert, tetra, tol) for tetra in opaque)
    ]
