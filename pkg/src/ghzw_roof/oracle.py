"""Brute-force convex roof: search explicit decompositions of a rank-two state.

Two search strategies share one entry point, :func:`brute_force_roof`.

* ``n_states in (2, 3)``: downhill simplex over isometries ``V`` (``n x 2``,
  orthonormal columns) acting on the spectral decomposition.
* ``n_states >= 4``: a linear program over a cloud of pure states. Any
  feasible LP solution is a decomposition; a basic optimal solution has at
  most four members. The cloud is refined around the current support, so
  the result approaches the roof from above without any knowledge of the
  closed-form structure.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize

from .bloch import BlochPoint, InteriorPoint
from .decompositions import Decomposition, avg_tangle
from .errors import InvalidInputError
from .tangle import sqrt_tau3_vectors


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class IsometryParams:
    """Unconstrained parameters of an ``n x 2`` isometry.

    The ``4 n`` reals fill a complex ``n x 2`` matrix ``A``; the isometry is
    its polar factor ``V = A (A^dagger A)^(-1/2)``. Padding ``A`` with zero
    rows leaves the decomposition unchanged, which nests ``n - 1`` in ``n``.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size % 4 or v.size < 8:
            raise InvalidInputError("need 4 n reals with n >= 2")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size // 4

    @property
    def matrix(self) -> np.ndarray:
        a = self.values[: 2 * self.n] + 1j * self.values[2 * self.n :]
        a = a.reshape(self.n, 2)
        u, _, vh = np.linalg.svd(a, full_matrices=False)
        return u @ vh

    @classmethod
    def identity(cls, n: int = 2) -> "IsometryParams":
        a = np.zeros((n, 2), dtype=complex)
        a[0, 0] = a[1, 1] = 1.0
        return cls.from_matrix(a)

    @classmethod
    def from_matrix(cls, a: np.ndarray) -> "IsometryParams":
        a = np.asarray(a, dtype=complex)
        return cls(np.concatenate([a.real.ravel(), a.imag.ravel()]))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "IsometryParams":
        return cls(rng.normal(size=4 * n))

    def padded(self, n: int) -> "IsometryParams":
        a = self.values[: 2 * self.n] + 1j * self.values[2 * self.n :]
        a = np.vstack([a.reshape(self.n, 2), np.zeros((n - self.n, 2))])
        return IsometryParams.from_matrix(a)


def _spectral(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and amplitude eigenvectors (rows) of the state with Bloch vector ``v``."""
    r = float(np.linalg.norm(v))
    axis = v / r if r > 0 else np.array([0.0, 0.0, 1.0])
    lam = np.array([(1.0 + r) / 2.0, (1.0 - r) / 2.0])
    up = BlochPoint.from_cartesian(axis).amplitudes
    down = BlochPoint.from_cartesian(-axis).amplitudes
    return lam, np.vstack([up, down])


def _amplitudes_to_vectors(psi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Weights and Bloch vectors of unnormalized two-component amplitudes (rows)."""
    weights = np.sum(np.abs(psi) ** 2, axis=1)
    a, b = psi[:, 0], psi[:, 1]
    # Bloch vector of a |GHZ> + b |W>: (2 Re(a* b), 2 Im(a* b), |a|^2 - |b|^2) / norm
    cross = np.conj(a) * b
    safe = np.where(weights > 0, weights, 1.0)
    vec = np.column_stack([2 * cross.real, 2 * cross.imag, np.abs(a) ** 2 - np.abs(b) ** 2]) / safe[:, None]
    return weights, vec


def _isometry_members(v: np.ndarray, params: IsometryParams) -> tuple[np.ndarray, np.ndarray]:
    lam, e = _spectral(v)
    psi = params.matrix @ (np.sqrt(lam)[:, None] * e)
    return _amplitudes_to_vectors(psi)


def decomposition_from_isometry(rho_point: InteriorPoint, params: IsometryParams) -> Decomposition:
    """Decomposition ``psi_i = sum_j V_ij sqrt(lambda_j) |e_j>`` of a ball point.

    Members with weight below 1e-12 are pruned and the rest renormalized. A
    pure input (``|v| = 1``) returns the state itself.
    """
    v = rho_point.v if isinstance(rho_point, InteriorPoint) else np.asarray(rho_point, float)
    if np.linalg.norm(v) >= 1.0 - 1e-12:
        return Decomposition(((1.0, BlochPoint.from_cartesian(v)),), target=None)
    w, vec = _isometry_members(v, params)
    return Decomposition.from_vectors(w, vec, target=v)


def _objective(v: np.ndarray, n: int):
    lam, e = _spectral(v)
    scaled = np.sqrt(lam)[:, None] * e

    def f(x: np.ndarray) -> float:
        a = (x[: 2 * n] + 1j * x[2 * n :]).reshape(n, 2)
        u, _, vh = np.linalg.svd(a, full_matrices=False)
        w, vec = _amplitudes_to_vectors((u @ vh) @ scaled)
        keep = w > 0
        return float(w[keep] @ sqrt_tau3_vectors(vec[keep]))

    return f


# --------------------------------------------------------------------------
# pure-state minima seed the LP cloud with the zero states


def _angles_to_vec(a: np.ndarray) -> np.ndarray:
    return np.array([math.sin(a[0]) * math.cos(a[1]), math.sin(a[0]) * math.sin(a[1]), math.cos(a[0])])


@functools.lru_cache(maxsize=8)
def pure_state_minima(starts: int = 32, seed: int = 0) -> np.ndarray:
    """Local minima of the pure-state tangle on the sphere from seeded starts."""
    rng = np.random.default_rng(seed)
    out = []
    for s in _unit(rng.normal(size=(starts, 3))):
        a0 = [math.acos(max(-1.0, min(1.0, s[2]))), math.atan2(s[1], s[0])]
        res = minimize(
            lambda a: float(sqrt_tau3_vectors(_angles_to_vec(a))),
            a0,
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-16, "maxfev": 4000},
        )
        out.append(_angles_to_vec(res.x))
    m = np.array(out)
    m.setflags(write=False)
    return m


def _lp(cloud: np.ndarray, v: np.ndarray):
    a = np.vstack([cloud.T, np.ones(len(cloud))])
    return linprog(
        sqrt_tau3_vectors(cloud),
        A_eq=a,
        b_eq=np.append(v, 1.0),
        bounds=(0, None),
        method="highs-ds",
    )


def _exact_weights(support: np.ndarray, v: np.ndarray) -> np.ndarray:
    a = np.vstack([support.T, np.ones(len(support))])
    w, *_ = np.linalg.lstsq(a, np.append(v, 1.0), rcond=None)
    return w


def _lp_roof(
    v: np.ndarray,
    rng: np.random.Generator,
    minima: np.ndarray,
    extra: np.ndarray | None,
    cloud: int = 2000,
    rounds: int = 16,
    per: int = 25,
    glob: int = 100,
    rad0: float = 0.1,
    shrink: float = 0.5,
) -> tuple[float, np.ndarray, np.ndarray]:
    r = float(np.linalg.norm(v))
    axis = v / r if r > 0 else np.array([0.0, 0.0, 1.0])
    parts = [axis[None], -axis[None], minima, _unit(rng.normal(size=(cloud, 3)))]
    if extra is not None and len(extra):
        parts.append(_unit(np.asarray(extra, float)))
    pts = np.vstack(parts)
    res = _lp(pts, v)
    rad = rad0
    for _ in range(rounds):
        support = pts[res.x > 1e-14]
        new = [support, minima, _unit(rng.normal(size=(glob, 3)))]
        for s in support:
            for scale in (0.25, 1.0, 4.0):
                new.append(_unit(s + scale * rad * rng.normal(size=(per, 3))))
        cand = np.vstack(new)
        rad *= shrink
        trial = _lp(cand, v)
        if trial.x is None or trial.status != 0 or trial.fun > res.fun:
            continue
        pts, res = cand, trial
    support = pts[res.x > 1e-14]
    w = _exact_weights(support, v)
    keep = w > 1e-12
    support, w = support[keep], w[keep]
    w = w / w.sum()
    return float(w @ sqrt_tau3_vectors(support)), w, support


def _nm_roof(
    v: np.ndarray,
    n: int,
    restarts: int,
    rng: np.random.Generator,
    warm: list[IsometryParams],
) -> tuple[float, IsometryParams]:
    dim = 4 * n
    starts = [p.padded(n) if p.n < n else p for p in warm]
    starts += [IsometryParams.identity(n)] + [IsometryParams.random(n, rng) for _ in range(restarts)]
    best_val, best = math.inf, starts[0]
    f = _objective(v, n)
    for p in starts:
        res = minimize(
            f,
            p.values,
            method="Nelder-Mead",
            options={"maxfev": 200 * dim, "xatol": 1e-10, "fatol": 1e-14, "adaptive": True},
        )
        if res.fun < best_val:
            best_val, best = float(res.fun), IsometryParams(res.x)
    return best_val, best


def brute_force_roof(
    rho_point,
    n_states: int = 4,
    restarts: int = 32,
    seed: int = 0,
    warm_start: Decomposition | None = None,
) -> tuple[float, Decomposition]:
    """Minimum average square-root tangle over decompositions of a ball point.

    Parameters
    ----------
    rho_point : InteriorPoint or array_like
    n_states : int
        Largest number of members. 2 and 3 use a simplex search over
        isometries; 4 and more use the refined linear program.
    restarts : int
        Random simplex starts (``n_states < 4``) or pure-state minimization
        starts that seed the LP cloud (``n_states >= 4``).
    seed : int
        Seed of the numpy generator; equal seeds give equal results.
    warm_start : Decomposition, optional
        A known decomposition whose members join the search, so that the
        result is never worse than it.

    Returns
    -------
    value : float
    best : Decomposition
    """
    v = rho_point.v if isinstance(rho_point, InteriorPoint) else np.asarray(rho_point, dtype=float)
    if n_states < 2:
        raise InvalidInputError("n_states must be at least 2")
    if np.linalg.norm(v) >= 1.0 - 1e-12:
        d = Decomposition(((1.0, BlochPoint.from_cartesian(v)),))
        return float(sqrt_tau3_vectors(v)), d
    rng = np.random.default_rng(seed)
    if n_states >= 4:
        extra = warm_start.vectors if warm_start is not None else None
        value, w, support = _lp_roof(v, rng, pure_state_minima(restarts, seed), extra)
        best = Decomposition.from_vectors(w, support, target=v)
        if warm_start is not None:
            if avg_tangle(warm_start) < value:
                return avg_tangle(warm_start), warm_start
        return value, best
    warm: list[IsometryParams] = []
    if n_states == 3:
        # nest the two-member search so that three members never do worse
        _, p2 = _nm_roof(v, 2, restarts, np.random.default_rng(seed), [])
        warm.append(p2)
    value, params = _nm_roof(v, n_states, restarts, rng, warm)
    best = decomposition_from_isometry(InteriorPoint(v), params)
    value = avg_tangle(best)
    if warm_start is not None and len(warm_start.members) <= n_states and avg_tangle(warm_start) < value:
        return avg_tangle(warm_start), warm_start
    return value, best
