"""Region map and exact roof values for the GHZ-W Bloch ball.

Every candidate decomposition family of the solved structure is evaluated
in the canonical wedge ``0 <= phi <= pi/3``:

* the zero-polytope (value 0),
* the four (3,1) tetrahedra (barycentric interpolation),
* (2,1) decompositions whose zero member slides along a polytope edge,
* (1,1) decompositions with a single zero vertex.

Each candidate is the average tangle of an explicit decomposition, so the
smallest one is an upper bound on the roof; the solved structure states that
it is the roof. The oracle module checks this independently.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .bloch import BlochPoint, InteriorPoint, ray_exit, rotate_z
from .decompositions import (
    GHZ_VECTOR,
    TWO_PI_3,
    Decomposition,
    LowerCircle,
    StateSearch,
    golden_minimize,
    lower_circle,
    search_M,
    search_N,
    zero_state_vectors,
)
from .errors import DomainError
from .tangle import sqrt_tau3_vectors
from .zero_polytope import ZeroPolytope, barycentric, ghz_w_polytope

INSIDE_TOL = 1e-10
TIE_TOL = 1e-12
BOUNDARY_TOL = 1e-8
EDGE_GRID = 33
PURE_DEPTH = 1e-9


class Region(enum.IntEnum):
    """Region tags in tie-breaking order (lower wins on shared boundaries)."""

    ZERO_POLYTOPE = 0
    TETRA_GHZ = 1
    TETRA_N1 = 2
    TETRA_N2 = 3
    TETRA_N3 = 4
    GRAND_CIRCLE_21 = 5
    LOWER_CIRCLE_21 = 6
    ONE_ONE = 7


_TETRA_N = (Region.TETRA_N1, Region.TETRA_N2, Region.TETRA_N3)
# rotation by +2pi/3 sends N1 -> N3 -> N2 -> N1; conjugation swaps N2 and N3
_ROTATE = {Region.TETRA_N1: Region.TETRA_N3, Region.TETRA_N3: Region.TETRA_N2, Region.TETRA_N2: Region.TETRA_N1}
_CONJ = {Region.TETRA_N1: Region.TETRA_N1, Region.TETRA_N2: Region.TETRA_N3, Region.TETRA_N3: Region.TETRA_N2}


def map_region(region: Region, rotation: int, conjugate: bool) -> Region:
    """Image of a region tag under conjugation followed by ``rotation`` turns of 2pi/3."""
    region = Region(region)
    if region not in _CONJ:
        return region
    if conjugate:
        region = _CONJ[region]
    for _ in range(rotation % 3):
        region = _ROTATE[region]
    return region


@dataclass(frozen=True)
class CircleData:
    """A (2,1) circle on the surface: plane ``normal . x = distance``."""

    name: str
    center: np.ndarray
    normal: np.ndarray
    radius: float
    distance: float
    arc: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class RoofStructure:
    """All distinguished states and surfaces of the solved GHZ-W roof."""

    polytope: ZeroPolytope
    zero_vectors: np.ndarray
    n_states: tuple[BlochPoint, ...]
    m_states: tuple[BlochPoint, ...]
    tetras: dict[Region, np.ndarray] = field(repr=False)
    grand_circles: tuple[CircleData, ...] = field(repr=False)
    lower_circles: tuple[CircleData, ...] = field(repr=False)
    n_search: StateSearch = field(repr=False)
    m_search: StateSearch = field(repr=False)
    lower_fit: LowerCircle = field(repr=False)

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Polytope edges as index pairs into ``W, Z1, Z2, Z3``."""
        return [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (1, 3)]


def _arc(a: np.ndarray, b: np.ndarray, n: int, via: np.ndarray | None = None, center=None, normal=None) -> np.ndarray:
    """Points along a circle from ``a`` to ``b`` (through ``via`` when given)."""
    c = np.zeros(3) if center is None else np.asarray(center)
    u = a - c
    rad = np.linalg.norm(u)
    u = u / rad
    nrm = np.cross(a - c, b - c) if normal is None else np.asarray(normal, float)
    nrm = nrm / np.linalg.norm(nrm)
    v = np.cross(nrm, u)

    def angle(x):
        d = x - c
        return math.atan2(d @ v, d @ u) % (2 * math.pi)

    end = angle(b)
    if via is not None and angle(via) > end:
        v, end = -v, 2 * math.pi - end
    t = np.linspace(0.0, end, n)
    pts = c + rad * (np.cos(t)[:, None] * u + np.sin(t)[:, None] * v)
    return pts


@functools.lru_cache(maxsize=1)
def structure() -> RoofStructure:
    """Compute (once) the zero states, tetrahedron tips and (2,1) circles."""
    poly = ghz_w_polytope()
    w, z1, z2, z3 = zero_state_vectors()
    ns = search_N()
    ms = search_M()
    nv = [s.cartesian for s in ns.states]
    tetras = {
        Region.TETRA_GHZ: np.array([GHZ_VECTOR, z1, z2, z3]),
        Region.TETRA_N1: np.array([nv[0], w, z1, z2]),
        Region.TETRA_N2: np.array([nv[1], w, z2, z3]),
        Region.TETRA_N3: np.array([nv[2], w, z3, z1]),
    }
    grand = []
    for k, tip in enumerate(nv):
        nrm = np.cross(GHZ_VECTOR, tip)
        nrm /= np.linalg.norm(nrm)
        grand.append(CircleData(f"grand_{k + 1}", np.zeros(3), nrm, 1.0, 0.0, _arc(GHZ_VECTOR, tip, 721)))
    fit = lower_circle()
    lower = []
    # lower circle k runs N_k' -> M_k -> N_k'' with M_k at the azimuth of Z_k
    mv = [s.cartesian for s in ms.states]
    neighbours = {0: (0, 2), 1: (1, 0), 2: (2, 1)}  # (N index, N index) around M1, M2, M3
    for k in range(3):
        rot = {0: -TWO_PI_3, 1: TWO_PI_3, 2: 0.0}[k]
        center = rotate_z(fit.center, rot)
        normal = rotate_z(fit.normal, rot)
        a, b = (nv[i] for i in neighbours[k])
        arc = _arc(a, b, 721, via=mv[k], center=center, normal=normal)
        lower.append(CircleData(f"lower_{k + 1}", center, normal, fit.radius, fit.distance, arc))
    return RoofStructure(
        polytope=poly,
        zero_vectors=np.array([w, z1, z2, z3]),
        n_states=ns.states,
        m_states=ms.states,
        tetras=tetras,
        grand_circles=tuple(grand),
        lower_circles=tuple(lower),
        n_search=ns,
        m_search=ms,
        lower_fit=fit,
    )


# --------------------------------------------------------------------------
# symmetry folding


def fold(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Map points to the wedge ``0 <= phi <= pi/3``.

    Returns
    -------
    canonical : ndarray, shape (n, 3)
    rotation : ndarray of int
        Turns of 2pi/3 that carry the canonical point back.
    conjugate : ndarray of bool
        Whether conjugation (y -> -y) is applied before the rotation.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    k = np.rint(phi / TWO_PI_3).astype(int) % 3
    c, s = np.cos(-k * TWO_PI_3), np.sin(-k * TWO_PI_3)
    x = c * pts[:, 0] - s * pts[:, 1]
    y = s * pts[:, 0] + c * pts[:, 1]
    conj = y < 0
    canon = np.column_stack([x, np.where(conj, -y, y), pts[:, 2]])
    return canon, k, conj


def unfold_vectors(v: np.ndarray, rotation: int, conjugate: bool) -> np.ndarray:
    v = np.array(v, dtype=float)
    if conjugate:
        v[..., 1] = -v[..., 1]
    return rotate_z(v, rotation * TWO_PI_3)


# --------------------------------------------------------------------------
# candidate evaluation


_GRAND_EDGES = ((1, 2), (2, 3), (3, 1))
_LOWER_EDGES = ((0, 1), (0, 2), (0, 3))
_TETRA_ORDER = (Region.TETRA_GHZ, Region.TETRA_N1, Region.TETRA_N2, Region.TETRA_N3)


@dataclass
class _Candidates:
    values: np.ndarray  # (n, C)
    regions: np.ndarray  # (C,)
    kinds: list[tuple[str, object]]
    lam2: np.ndarray  # (n, 6) optimal edge parameter


def _edge_values(a: np.ndarray, b: np.ndarray, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Best (2,1) value over the edge ``a-b`` for every point, and its parameter."""
    lams = np.linspace(0.0, 1.0, EDGE_GRID)
    starts = lams[:, None] * a + (1.0 - lams[:, None]) * b  # (G, 3)
    ex, w = ray_exit(starts[None, :, :], pts[:, None, :])
    vals = w * sqrt_tau3_vectors(ex)
    k = np.argmin(vals, axis=1)
    lo = lams[np.maximum(k - 1, 0)]
    hi = lams[np.minimum(k + 1, EDGE_GRID - 1)]

    def f(lam):
        s = lam[:, None] * a + (1.0 - lam[:, None]) * b
        e, ww = ray_exit(s, pts)
        return ww * sqrt_tau3_vectors(e)

    x, fx = golden_minimize(f, lo, hi, tol=1e-10, max_iter=80)
    grid_best = vals[np.arange(len(pts)), k]
    better = grid_best < fx
    return np.where(better, grid_best, fx), np.where(better, lams[k], x)


def _candidates(canon: np.ndarray) -> _Candidates:
    st = structure()
    zv = st.zero_vectors
    n = len(canon)
    cols: list[np.ndarray] = []
    regions: list[Region] = []
    kinds: list[tuple[str, object]] = []

    b = barycentric(zv, canon)
    cols.append(np.where(b.min(axis=1) >= -INSIDE_TOL, 0.0, np.inf))
    regions.append(Region.ZERO_POLYTOPE)
    kinds.append(("zero", None))

    for reg in _TETRA_ORDER:
        t = st.tetras[reg]
        bt = barycentric(t, canon)
        tip_tau = float(sqrt_tau3_vectors(t[0]))
        cols.append(np.where(bt.min(axis=1) >= -INSIDE_TOL, np.maximum(bt[:, 0], 0.0) * tip_tau, np.inf))
        regions.append(reg)
        kinds.append(("tetra", reg))

    lam2 = np.zeros((n, 6))
    for e, (i, j) in enumerate(_GRAND_EDGES + _LOWER_EDGES):
        vals, lam = _edge_values(zv[i], zv[j], canon)
        interior = (lam > 1e-7) & (lam < 1.0 - 1e-7)
        cols.append(np.where(interior, vals, np.inf))
        regions.append(Region.GRAND_CIRCLE_21 if e < 3 else Region.LOWER_CIRCLE_21)
        kinds.append(("edge", (i, j)))
        lam2[:, e] = lam

    for i in range(4):
        ex, w = ray_exit(np.broadcast_to(zv[i], canon.shape), canon)
        cols.append(w * sqrt_tau3_vectors(ex))
        regions.append(Region.ONE_ONE)
        kinds.append(("vertex", i))

    return _Candidates(np.column_stack(cols), np.array(regions, dtype=int), kinds, lam2)


def _select(values: np.ndarray, regions: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    best = values.min(axis=1)
    eligible = values <= (best + TIE_TOL)[:, None]
    # columns are already in region order; the first eligible one wins
    choice = np.argmax(eligible, axis=1)
    chosen_region = regions[choice]
    other = regions[None, :] != chosen_region[:, None]
    near = (values <= (best + BOUNDARY_TOL)[:, None]) & other & np.isfinite(values)
    return choice, best, near.any(axis=1)


# --------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class RoofResult:
    """Roof value, region and an optimal decomposition of one point.

    ``rotation`` and ``conjugate`` describe the symmetry element that maps
    the canonical wedge point ``canonical`` back to the input point.
    """

    value: float
    region: Region
    decomposition: Decomposition
    numeric_boundary: bool = False
    canonical: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]
    rotation: int = 0
    conjugate: bool = False

    @property
    def wedge_phi(self) -> float:
        return float(math.atan2(self.canonical[1], self.canonical[0]))


@dataclass
class BatchClassification:
    """Vectorized classification of many points; see :func:`classify_many`."""

    points: np.ndarray
    values: np.ndarray
    regions: np.ndarray
    numeric_boundary: np.ndarray
    canonical: np.ndarray
    rotation: np.ndarray
    conjugate: np.ndarray
    pure: np.ndarray
    _choice: np.ndarray = field(repr=False)
    _lam2: np.ndarray = field(repr=False)
    _kinds: list = field(repr=False)

    def __len__(self) -> int:
        return len(self.points)

    def region_tags(self) -> list[Region]:
        return [Region(r) for r in self.regions]

    def canonical_decomposition(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Weights and surface vectors of the optimal decomposition in the wedge."""
        st = structure()
        r = self.canonical[i]
        if self.pure[i]:
            return np.array([1.0]), (r / np.linalg.norm(r))[None, :]
        kind, arg = self._kinds[self._choice[i]]
        zv = st.zero_vectors
        if kind == "zero":
            b = np.clip(barycentric(zv, r), 0.0, None)
            return b, zv
        if kind == "tetra":
            t = st.tetras[arg]
            return np.clip(barycentric(t, r), 0.0, None), t
        if kind == "edge":
            a, bb = arg
            e = (_GRAND_EDGES + _LOWER_EDGES).index(arg)
            lam = self._lam2[i, e]
            s = lam * zv[a] + (1.0 - lam) * zv[bb]
            ex, w = ray_exit(s, r)
            w = float(w)
            return np.array([(1 - w) * lam, (1 - w) * (1 - lam), w]), np.array([zv[a], zv[bb], ex])
        ex, w = ray_exit(zv[arg], r)
        w = float(w)
        return np.array([1 - w, w]), np.array([zv[arg], ex])

    def result(self, i: int) -> RoofResult:
        weights, vecs = self.canonical_decomposition(i)
        rot, conj = int(self.rotation[i]), bool(self.conjugate[i])
        vecs = unfold_vectors(vecs, rot, conj)
        decomp = Decomposition.from_vectors(weights, vecs, target=self.points[i], prune=1e-14)
        return RoofResult(
            value=float(self.values[i]),
            region=Region(self.regions[i]),
            decomposition=decomp,
            numeric_boundary=bool(self.numeric_boundary[i]),
            canonical=self.canonical[i],
            rotation=rot,
            conjugate=conj,
        )


def _as_points(points) -> np.ndarray:
    if isinstance(points, InteriorPoint):
        return points.v[None, :]
    if isinstance(points, Sequence) and points and isinstance(points[0], InteriorPoint):
        return np.array([p.v for p in points])
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != 3 or not np.all(np.isfinite(pts)):
        raise DomainError("points need three finite coordinates")
    radius = np.linalg.norm(pts, axis=1)
    if np.any(radius > 1.0 + 1e-12):
        raise DomainError(f"point outside the Bloch ball: |v| = {radius.max()}")
    return pts


def classify_many(points) -> BatchClassification:
    """Classify an ``(n, 3)`` array of Bloch-ball points.

    Pure states (``|v| >= 1 - 1e-12``) get their own tangle as value and the
    region of the ball just beneath them.
    """
    pts = _as_points(points)
    canon, rot, conj = fold(pts)
    radius = np.linalg.norm(pts, axis=1)
    pure = radius >= 1.0 - 1e-12
    probe = np.where(pure[:, None], canon * ((1.0 - PURE_DEPTH) / np.where(pure, radius, 1.0))[:, None], canon)
    cand = _candidates(probe)
    choice, best, near = _select(cand.values, cand.regions)
    if np.any(pure):
        unit = canon[pure] / radius[pure][:, None]
        best = best.copy()
        best[pure] = sqrt_tau3_vectors(unit)
    canon_regions = cand.regions[choice]
    best = np.where(canon_regions == Region.ZERO_POLYTOPE, 0.0, np.maximum(best, 0.0))
    regions = np.array([map_region(Region(r), int(k), bool(c)) for r, k, c in zip(canon_regions, rot, conj)], dtype=int)
    return BatchClassification(pts, best, regions, near, canon, rot, conj, pure, choice, cand.lam2, cand.kinds)


def classify(point) -> RoofResult:
    """Region, roof value and optimal decomposition of one ball point.

    Raises
    ------
    DomainError
        If the point lies outside the unit ball.
    """
    return classify_many(point).result(0)


def roof_values(points) -> np.ndarray:
    """Roof values of many points."""
    return classify_many(points).values


def roof_value(p: float, phi: float, radius: float = 1.0) -> float:
    """Roof value at ``radius`` times the Bloch vector of the pure state ``(p, phi)``."""
    return float(roof_values(InteriorPoint.from_spherical(p, phi, radius).v)[0])


# --------------------------------------------------------------------------
# surface pattern


SURFACE_COLUMNS = (
    "theta",
    "phi",
    "region",
    "roof_value",
    "on_21_line",
    "wedge_phi",
    "sym_rotation",
    "sym_conjugate",
    "numeric_boundary",
)

SURFACE_DEPTH = 1e-6


@dataclass(frozen=True)
class SurfacePattern:
    """Per-grid-point region data of the sphere surface, theta-major order."""

    n_theta: int
    n_phi: int
    theta: np.ndarray
    phi: np.ndarray
    region: np.ndarray
    roof_value: np.ndarray
    on_21_line: np.ndarray
    wedge_phi: np.ndarray
    sym_rotation: np.ndarray
    sym_conjugate: np.ndarray
    numeric_boundary: np.ndarray

    def grid(self, name: str) -> np.ndarray:
        return np.asarray(getattr(self, name)).reshape(self.n_theta, self.n_phi)

    def rows(self) -> Iterable[tuple]:
        for k in range(len(self.theta)):
            yield (
                float(self.theta[k]),
                float(self.phi[k]),
                Region(self.region[k]).name,
                float(self.roof_value[k]),
                int(self.on_21_line[k]),
                float(self.wedge_phi[k]),
                int(self.sym_rotation[k]),
                int(self.sym_conjugate[k]),
                int(self.numeric_boundary[k]),
            )


def _canonical_columns(n_phi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integer folding of azimuth columns when ``n_phi`` is a multiple of six."""
    j = np.arange(n_phi)
    third = n_phi // 3
    k = ((j + n_phi // 6) // third) % 3
    jj = j - k * third
    jj = np.where(jj > n_phi // 2, jj - n_phi, jj)
    conj = jj < 0
    return np.abs(jj), k, conj


def _line_cells(n_theta: int, n_phi: int) -> np.ndarray:
    """Grid cells crossed by the grand arcs and the lower circle arcs."""
    st = structure()
    dth, dph = math.pi / n_theta, 2 * math.pi / n_phi
    flags = np.zeros((n_theta, n_phi), dtype=bool)
    samples = max(20 * max(n_theta, n_phi), 2000)
    for circle in st.grand_circles + st.lower_circles:
        a = circle.arc
        # resample densely along the stored arc
        t = np.linspace(0, len(a) - 1, samples)
        i0 = np.minimum(np.floor(t).astype(int), len(a) - 2)
        f = (t - i0)[:, None]
        pts = (1 - f) * a[i0] + f * a[i0 + 1]
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        th = np.arccos(np.clip(pts[:, 2], -1, 1))
        ph = np.arctan2(pts[:, 1], pts[:, 0]) % (2 * math.pi)
        ii = np.minimum((th / dth).astype(int), n_theta - 1)
        jj = np.rint(ph / dph).astype(int) % n_phi
        flags[ii, jj] = True
    return flags


def surface_pattern(n_theta: int, n_phi: int) -> SurfacePattern:
    """Region map of the sphere surface, evaluated just beneath each grid point.

    Grid: ``theta_i = pi (i + 1/2) / n_theta`` and ``phi_j = 2 pi j / n_phi``.
    When ``n_phi`` is a multiple of six, only the canonical wedge is computed
    and unfolded, so the pattern is exactly symmetric.
    """
    if n_theta < 8 or n_phi < 8:
        raise DomainError("grid sizes must be at least 8")
    theta = math.pi * (np.arange(n_theta) + 0.5) / n_theta
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    lines = _line_cells(n_theta, n_phi)
    r = 1.0 - SURFACE_DEPTH

    def vec(th, ph):
        return r * np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)

    th_g, ph_g = np.meshgrid(theta, phi, indexing="ij")
    if n_phi % 6 == 0:
        cj, k, conj = _canonical_columns(n_phi)
        cols = np.unique(cj)
        sub_th, sub_ph = np.meshgrid(theta, phi[cols], indexing="ij")
        batch = classify_many(vec(sub_th, sub_ph).reshape(-1, 3))
        col_index = np.searchsorted(cols, cj)
        base_region = batch.regions.reshape(n_theta, len(cols))[:, col_index]
        values = batch.values.reshape(n_theta, len(cols))[:, col_index]
        near = batch.numeric_boundary.reshape(n_theta, len(cols))[:, col_index]
        rot = np.broadcast_to(k, (n_theta, n_phi))
        cjg = np.broadcast_to(conj, (n_theta, n_phi))
        region = np.vectorize(lambda g, kk, cc: int(map_region(Region(g), int(kk), bool(cc))))(base_region, rot, cjg)
        wedge = np.broadcast_to(phi[cj], (n_theta, n_phi))
        line = lines[:, cj]
    else:
        batch = classify_many(vec(th_g, ph_g).reshape(-1, 3))
        region = batch.regions.reshape(n_theta, n_phi)
        values = batch.values.reshape(n_theta, n_phi)
        near = batch.numeric_boundary.reshape(n_theta, n_phi)
        rot = batch.rotation.reshape(n_theta, n_phi)
        cjg = batch.conjugate.reshape(n_theta, n_phi)
        c = batch.canonical
        wedge = np.arctan2(c[:, 1], c[:, 0]).reshape(n_theta, n_phi)
        line = lines
    return SurfacePattern(
        n_theta=n_theta,
        n_phi=n_phi,
        theta=th_g.ravel(),
        phi=ph_g.ravel(),
        region=np.asarray(region, dtype=int).ravel(),
        roof_value=np.asarray(values, dtype=float).ravel(),
        on_21_line=np.asarray(line, dtype=bool).ravel(),
        wedge_phi=np.asarray(wedge, dtype=float).ravel(),
        sym_rotation=np.asarray(rot, dtype=int).ravel(),
        sym_conjugate=np.asarray(cjg, dtype=bool).ravel(),
        numeric_boundary=np.asarray(near, dtype=bool).ravel(),
    )
