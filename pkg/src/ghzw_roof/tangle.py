"""Threetangle of three-qubit pure states and of the GHZ-W superposition family.

The threetangle is normalized as ``tau3 = 4 |Det|`` where ``Det`` is Cayley's
hyperdeterminant of the amplitude cube, so that the GHZ state has tangle 1.
This is the only place where that factor appears.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidInputError

#: Factor between the modulus of the hyperdeterminant and the threetangle.
TANGLE_SCALE = 4.0

#: Coupling of the W branch in the closed pure-state formula, 2^(7/2) / 3^(3/2).
W_COUPLING = 2.0**3.5 / 3.0**1.5

#: Mixing probability of the GHZ-W superpositions with vanishing tangle.
P0 = 4.0 * 2.0 ** (1.0 / 3.0) / (3.0 + 4.0 * 2.0 ** (1.0 / 3.0))

# Cancellations below this fraction of the summed magnitudes are rounding
# noise; the tangle is reported as exactly zero there.
_NOISE = 64.0 * np.finfo(float).eps

_PROB_TOL = 1e-12


def _index(label: str) -> int:
    return int(label, 2)


@dataclass(frozen=True, eq=False)
class Amplitudes3Q:
    """Amplitudes of a three-qubit pure state.

    Parameters
    ----------
    psi : array_like of complex, shape (8,)
        Coefficient of ``|ijk>`` stored at index ``4 i + 2 j + k``.
    """

    psi: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.array(self.psi, dtype=complex).reshape(-1)
        if arr.shape != (8,):
            raise InvalidInputError(f"expected 8 amplitudes, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("amplitudes must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "psi", arr)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.psi, self.psi).real)

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm2 - 1.0) <= 1e-12

    def normalized(self) -> "Amplitudes3Q":
        n2 = self.norm2
        if n2 == 0.0:
            raise InvalidInputError("the zero vector cannot be normalized")
        return Amplitudes3Q(self.psi / math.sqrt(n2))

    def tensor(self) -> np.ndarray:
        """Amplitudes as a ``(2, 2, 2)`` array indexed ``[i, j, k]``."""
        return self.psi.reshape(2, 2, 2)

    def __getitem__(self, label: str) -> complex:
        return complex(self.psi[_index(label)])

    def __add__(self, other: "Amplitudes3Q") -> "Amplitudes3Q":
        return Amplitudes3Q(self.psi + other.psi)

    def __mul__(self, alpha: complex) -> "Amplitudes3Q":
        return Amplitudes3Q(alpha * self.psi)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        terms = [f"{c:.6g}|{k:03b}>" for k, c in enumerate(self.psi) if c != 0]
        return "Amplitudes3Q(" + " + ".join(terms or ["0"]) + ")"

    @classmethod
    def basis(cls, label: str) -> "Amplitudes3Q":
        """Computational basis state, e.g. ``basis("101")``."""
        psi = np.zeros(8, dtype=complex)
        psi[_index(label)] = 1.0
        return cls(psi)

    @classmethod
    def ghz(cls) -> "Amplitudes3Q":
        """(|000> + |111>)/sqrt(2)."""
        psi = np.zeros(8, dtype=complex)
        psi[0] = psi[7] = 1.0 / math.sqrt(2.0)
        return cls(psi)

    @classmethod
    def w(cls) -> "Amplitudes3Q":
        """(|100> + |010> + |001>)/sqrt(3)."""
        psi = np.zeros(8, dtype=complex)
        psi[4] = psi[2] = psi[1] = 1.0 / math.sqrt(3.0)
        return cls(psi)


def _as_array(a) -> np.ndarray:
    if isinstance(a, Amplitudes3Q):
        return a.psi
    arr = np.asarray(a, dtype=complex)
    if arr.shape[-1] != 8:
        raise InvalidInputError("last axis must hold 8 amplitudes")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("amplitudes must be finite")
    return arr


def _cayley_terms(psi: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return ``d1, d2, d3`` and the summed moduli of all monomials."""
    a000, a001, a010, a011, a100, a101, a110, a111 = (psi[..., k] for k in range(8))
    d1_terms = (a000**2 * a111**2, a001**2 * a110**2, a010**2 * a101**2, a100**2 * a011**2)
    d2_terms = (
        a000 * a111 * a011 * a100,
        a000 * a111 * a101 * a010,
        a000 * a111 * a110 * a001,
        a011 * a100 * a101 * a010,
        a011 * a100 * a110 * a001,
        a101 * a010 * a110 * a001,
    )
    d3_terms = (a000 * a110 * a101 * a011, a111 * a001 * a010 * a100)
    d1 = sum(d1_terms)
    d2 = sum(d2_terms)
    d3 = sum(d3_terms)
    scale = (
        sum(np.abs(t) for t in d1_terms)
        + 2 * sum(np.abs(t) for t in d2_terms)
        + 4 * sum(np.abs(t) for t in d3_terms)
    )
    return d1, d2, d3, scale


def hyperdeterminant(a) -> complex | np.ndarray:
    """Cayley hyperdeterminant ``d1 - 2 d2 + 4 d3`` of the amplitude cube.

    Parameters
    ----------
    a : Amplitudes3Q or array_like, shape (..., 8)
        Amplitudes, not necessarily normalized. Arrays are evaluated along
        the last axis.

    Returns
    -------
    complex or ndarray
        Homogeneous of degree four in the amplitudes.
    """
    psi = _as_array(a)
    d1, d2, d3, _ = _cayley_terms(psi)
    det = d1 - 2 * d2 + 4 * d3
    return complex(det) if np.ndim(det) == 0 else det


def _det_gradient_l1(psi: np.ndarray) -> np.ndarray:
    """Sum over amplitudes of ``|d Det / d psi_k|``."""
    a, b, c, d, e, f, g, h = (psi[..., k] for k in range(8))
    grads = (
        2 * a * h * h - 2 * (h * d * e + h * f * c + h * g * b) + 4 * g * f * d,
        2 * b * g * g - 2 * (a * h * g + d * e * g + f * c * g) + 4 * h * c * e,
        2 * c * f * f - 2 * (a * h * f + d * e * f + f * g * b) + 4 * h * b * e,
        2 * d * e * e - 2 * (a * h * e + e * f * c + e * g * b) + 4 * a * g * f,
        2 * e * d * d - 2 * (a * h * d + d * f * c + d * g * b) + 4 * h * b * c,
        2 * f * c * c - 2 * (a * h * c + d * e * c + c * g * b) + 4 * a * g * d,
        2 * g * b * b - 2 * (a * h * b + d * e * b + f * c * b) + 4 * a * f * d,
        2 * h * a * a - 2 * (a * d * e + a * f * c + a * g * b) + 4 * b * c * e,
    )
    return sum(np.abs(x) for x in grads)


def _threetangle_array(psi: np.ndarray) -> np.ndarray:
    d1, d2, d3, scale = _cayley_terms(psi)
    det = np.abs(d1 - 2 * d2 + 4 * d3)
    # evaluation rounding is bounded by the monomial moduli; representing the
    # amplitudes themselves to eps of the norm adds the first-order term
    norm = np.sqrt(np.sum(np.abs(psi) ** 2, axis=-1))
    floor = _NOISE * np.maximum(scale, norm * _det_gradient_l1(psi))
    det = np.where(det <= floor, 0.0, det)
    return TANGLE_SCALE * det


def threetangle(a) -> float | np.ndarray:
    """Threetangle ``4 |Det|`` of a normalized state (GHZ gives 1).

    Raises
    ------
    InvalidInputError
        If the state is not normalized to within 1e-12.
    """
    psi = _as_array(a)
    norm2 = np.sum(np.abs(psi) ** 2, axis=-1)
    if np.any(np.abs(norm2 - 1.0) > 1e-12):
        raise InvalidInputError("threetangle needs a normalized state")
    out = _threetangle_array(psi)
    return float(out) if np.ndim(out) == 0 else out


def sqrt_threetangle(a) -> float | np.ndarray:
    """Square root of :func:`threetangle`."""
    return np.sqrt(threetangle(a))


def _check_prob(p):
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < -_PROB_TOL) or np.any(arr > 1 + _PROB_TOL):
        raise DomainError(f"probability outside [0, 1]: {p}")
    return np.clip(arr, 0.0, 1.0)


def superpose(p: float, phi: float) -> Amplitudes3Q:
    """The normalized state ``sqrt(p) |GHZ> + exp(i phi) sqrt(1 - p) |W>``."""
    p = float(_check_prob(p))
    psi = math.sqrt(p) * Amplitudes3Q.ghz().psi + np.exp(1j * phi) * math.sqrt(1.0 - p) * Amplitudes3Q.w().psi
    return Amplitudes3Q(psi)


def sqrt_tau3_analytic(p, phi):
    """Closed-form square-root tangle of :func:`superpose` ``(p, phi)``.

    Evaluates ``|p^2 + c sqrt(p (1-p)^3) exp(3 i phi)|^(1/2)`` with
    ``c = 2^(7/2) / 3^(3/2)``. Accepts scalars or broadcastable arrays.
    """
    p = _check_prob(p)
    phi = np.asarray(phi, dtype=float)
    a = p * p
    b = W_COUPLING * np.sqrt(p * (1.0 - p) ** 3)
    s = np.abs(a + b * np.exp(3j * phi))
    s = np.where(s <= _NOISE * (a + b), 0.0, s)
    out = np.sqrt(s)
    return float(out) if out.ndim == 0 else out


def sqrt_tau3_vectors(v) -> np.ndarray:
    """Square-root tangle of the pure states along Bloch directions.

    Parameters
    ----------
    v : array_like, shape (..., 3)
        Nonzero vectors; only their direction matters. The GHZ state is the
        north pole and W the south pole.

    Notes
    -----
    The mixing probability is recovered without cancellation near either
    pole, so states a distance 1e-9 from W still get their tangle of order
    1e-4 instead of a rounded zero.
    """
    v = np.asarray(v, dtype=float)
    u = v / np.linalg.norm(v, axis=-1, keepdims=True)
    x, y, z = u[..., 0], u[..., 1], u[..., 2]
    s2 = x * x + y * y
    north = z >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(north, 0.5 * (1.0 + z), s2 / (2.0 * (1.0 - z)))
        q = np.where(north, s2 / (2.0 * (1.0 + z)), 0.5 * (1.0 - z))
        # sqrt(p q^3) exp(3 i phi) = q s e^(3 i phi) / 2 with s = |(x, y)|
        s = np.hypot(x, y)
        w = np.where(s > 0, 0.5 * q * s * ((x + 1j * y) / np.where(s > 0, s, 1.0)) ** 3, 0.0)
    a = p * p
    b = W_COUPLING * np.abs(w)
    s = np.abs(a + W_COUPLING * w)
    s = np.where(s <= _NOISE * (a + b), 0.0, s)
    return np.sqrt(s)


def phi_second_derivative(p: float, phi: float, h: float = 1e-3) -> float:
    """Second azimuthal derivative of the analytic square-root tangle.

    Central differences with steps ``h`` and ``h / 2`` combined by one
    Richardson step. The default step keeps round-off near 1e-10; a step of
    1e-5 would already lose five digits to cancellation.
    """

    def d2(step: float) -> float:
        f = sqrt_tau3_analytic
        return (f(p, phi + step) - 2.0 * f(p, phi) + f(p, phi - step)) / step**2

    return (4.0 * d2(h / 2.0) - d2(h)) / 3.0
