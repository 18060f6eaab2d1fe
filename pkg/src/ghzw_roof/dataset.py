"""Plot-ready datasets: structure summary, surface pattern and characteristic curves.

Every float is rounded to nine significant digits before it is written, so
that identical inputs give byte-identical files. Angles are in radians.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .bloch import BlochPoint
from .classifier import SURFACE_COLUMNS, Region, RoofStructure, SurfacePattern, structure, surface_pattern
from .decompositions import (
    CharacteristicCurve,
    companion_curves,
    convexify_detail,
    inequality_at_p0,
)
from .tangle import P0, sqrt_tau3_vectors

SIG_DIGITS = 9

# reference numbers quoted for the solved GHZ-W case
REFERENCE = {
    "p0": 4 * 2 ** (1 / 3) / (3 + 4 * 2 ** (1 / 3)),
    "n_p_c": 0.0964142,
    "n_partner_p": 0.00673174,
    "n_theta0": 1.8273,
    "n_theta1": 0.164279,
    "n_theta": 1.99158,
    "m_p_c": 0.962243,
    "m_partner_p": 0.989858,
    "m_theta0": 2.0539,
    "m_theta1": 0.201758,
    "m_theta": 2.25566,
    "lower_distance": 0.0711148,
    "lower_normal": (0.57589, 0.0, -0.81753),
    "curvature_ratio": 9 / 8,
    "threshold": 2.0,
}

VERTEX_NAMES = ("W", "Z1", "Z2", "Z3")


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    """Round to ``digits`` significant digits; non-finite values pass through."""
    x = float(x)
    if not math.isfinite(x) or x == 0.0:
        return 0.0 if x == 0.0 else x
    return float(f"{x:.{digits}g}")


def rounded(obj: Any) -> Any:
    """Recursively round floats and turn arrays and tuples into lists."""
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return rounded(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(obj)
    return obj


def to_json(obj: Any) -> str:
    return json.dumps(rounded(obj), indent=1, allow_nan=False) + "\n"


def compared(computed, reference) -> dict:
    """``{computed, reference, rel_dev}`` with the largest componentwise deviation."""
    c = np.atleast_1d(np.asarray(computed, dtype=float))
    r = np.atleast_1d(np.asarray(reference, dtype=float))
    scale = np.maximum(np.abs(r), 1e-300)
    dev = float(np.max(np.abs(c - r) / np.where(np.abs(r) > 0, scale, 1.0)))
    out_c = computed if np.ndim(computed) else float(computed)
    out_r = reference if np.ndim(reference) else float(reference)
    return {"computed": out_c, "reference": out_r, "rel_dev": dev}


def _point(name: str, v: np.ndarray) -> dict:
    b = BlochPoint.from_cartesian(v / np.linalg.norm(v))
    return {
        "name": name,
        "p": b.p,
        "phi": b.phi,
        "theta": b.theta,
        "xyz": v,
        "sqrt_tangle": float(sqrt_tau3_vectors(v / np.linalg.norm(v))),
    }


def _sign_to(normal: np.ndarray, reference) -> np.ndarray:
    return normal if float(np.dot(normal, reference)) >= 0 else -normal


def _normal_segments(st: RoofStructure, length: float = 0.5) -> list[dict]:
    """Per symmetry sector: the grand-circle and lower-circle normals as segments."""
    out = []
    for k in range(3):
        g = st.grand_circles[k]
        low = st.lower_circles[k]
        out.append(
            {
                "sector": k + 1,
                "grand_normal": {"start": g.center, "end": g.center + length * g.normal},
                "lower_normal": {"start": low.center, "end": low.center + length * low.normal},
            }
        )
    return out


def _circle(c) -> dict:
    return {"name": c.name, "center": c.center, "normal": c.normal, "radius": c.radius, "distance": c.distance}


def structure_dict(st: RoofStructure | None = None) -> dict:
    """Zero polytope, N and M states, circles, normals and reference comparisons."""
    st = st or structure()
    zv = st.zero_vectors
    ns, ms = st.n_search, st.m_search
    fit = st.lower_fit
    ineq = inequality_at_p0()
    normal = _sign_to(fit.normal, REFERENCE["lower_normal"])
    tp_normal = _sign_to(fit.three_point_normal, REFERENCE["lower_normal"])

    def search(s, prefix):
        return {
            "p_c": compared(s.p_c, REFERENCE[f"{prefix}_p_c"]),
            "partner_p": compared(s.partner_p, REFERENCE[f"{prefix}_partner_p"]),
            "theta0": compared(s.theta0, REFERENCE[f"{prefix}_theta0"]),
            "theta1": compared(s.theta1, REFERENCE[f"{prefix}_theta1"]),
            "theta": compared(s.theta, REFERENCE[f"{prefix}_theta"]),
            "anchor": s.anchor,
            "slope": s.slope,
        }

    return {
        "p0": compared(P0, REFERENCE["p0"]),
        "zero_polytope": {
            "vertices": [_point(n, v) for n, v in zip(VERTEX_NAMES, zv)],
            "edges": [[VERTEX_NAMES[a], VERTEX_NAMES[b]] for a, b in st.edges],
            "volume": st.polytope.volume,
        },
        "n_states": [_point(f"N{i + 1}", s.cartesian) for i, s in enumerate(st.n_states)],
        "m_states": [_point(f"M{i + 1}", s.cartesian) for i, s in enumerate(st.m_states)],
        "n_search": search(ns, "n"),
        "m_search": search(ms, "m"),
        "lower_circle": {
            "distance": compared(fit.distance, REFERENCE["lower_distance"]),
            "normal": compared(normal, REFERENCE["lower_normal"]),
            "three_point_distance": compared(fit.three_point_distance, REFERENCE["lower_distance"]),
            "three_point_normal": compared(tp_normal, REFERENCE["lower_normal"]),
            "radius": fit.radius,
            "plane_residual": fit.plane_residual,
            "radial_residual": fit.radial_residual,
        },
        "grand_circles": [_circle(c) for c in st.grand_circles],
        "lower_circles": [_circle(c) for c in st.lower_circles],
        "normal_vectors": _normal_segments(st),
        "inequality": {
            "tau0": ineq.tau0,
            "tau_dd": ineq.tau_dd,
            "curvature_ratio": compared(ineq.curvature_ratio, REFERENCE["curvature_ratio"]),
            "threshold": compared(ineq.threshold, REFERENCE["threshold"]),
            "outer_radius": ineq.outer_radius,
            "d1": ineq.d1,
            "favors_02": ineq.favors_02,
        },
    }


# --------------------------------------------------------------------------
# surface pattern


def surface_features(st: RoofStructure | None = None, arc_points: int = 181) -> dict:
    """Line work for drawing the surface pattern: edges, states, circles, normals."""
    st = st or structure()
    zv = st.zero_vectors

    def thin(arc: np.ndarray) -> np.ndarray:
        idx = np.unique(np.linspace(0, len(arc) - 1, arc_points).round().astype(int))
        return arc[idx]

    return {
        "polytope_edges": [{"from": VERTEX_NAMES[a], "to": VERTEX_NAMES[b], "xyz": [zv[a], zv[b]]} for a, b in st.edges],
        "zero_states": [_point(n, v) for n, v in zip(VERTEX_NAMES, zv)],
        "n_states": [_point(f"N{i + 1}", s.cartesian) for i, s in enumerate(st.n_states)],
        "m_states": [_point(f"M{i + 1}", s.cartesian) for i, s in enumerate(st.m_states)],
        "grand_circles": [dict(_circle(c), arc=thin(c.arc)) for c in st.grand_circles],
        "lower_circles": [dict(_circle(c), arc=thin(c.arc)) for c in st.lower_circles],
        "normal_vectors": _normal_segments(st),
    }


def surface_rows(pattern: SurfacePattern) -> list[list]:
    """Rows of the surface table with floats rounded for serialization."""
    return [rounded(list(r)) for r in pattern.rows()]


def surface_json(pattern: SurfacePattern, features: bool = True) -> str:
    doc: dict[str, Any] = {
        "n_theta": pattern.n_theta,
        "n_phi": pattern.n_phi,
        "columns": list(SURFACE_COLUMNS),
        "regions": [r.name for r in Region],
        "rows": surface_rows(pattern),
    }
    if features:
        doc["features"] = surface_features()
    return to_json(doc)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def surface_csv(pattern: SurfacePattern) -> str:
    return _csv_text(SURFACE_COLUMNS, surface_rows(pattern))


_SURFACE_TYPES = (float, float, str, float, int, float, int, int, int)


def parse_surface_csv(text: str) -> list[list]:
    """Rows of a surface CSV with the column types restored."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != SURFACE_COLUMNS:
        raise ValueError(f"unexpected surface columns {header}")
    return [[t(x) for t, x in zip(_SURFACE_TYPES, row)] for row in reader]


# --------------------------------------------------------------------------
# characteristic curves


def _hull(curve: CharacteristicCurve) -> tuple[dict, np.ndarray]:
    c = convexify_detail(curve)
    p = curve.p
    between = (p - c.anchor) * (p - c.p_c) <= 0
    line = abs(c.slope) * np.abs(p - c.anchor)
    hull = np.where(between, line, curve.value)
    info = {"anchor": c.anchor, "p_c": c.p_c, "value_c": c.value_c, "slope": float(c.slope)}
    return info, hull


def curves_dict(samples: int = 401) -> dict:
    """Both convexification families with tangent lines and difference insets."""
    cc = companion_curves(samples)
    families = {
        "N": ("N_21", ("N_11_W", "N_11_Z3"), REFERENCE["n_p_c"]),
        "M": ("M_11", ("M_11_W", "M_21_pair"), REFERENCE["m_p_c"]),
    }
    out = {}
    for fam, (main, others, ref) in families.items():
        curve = cc[main]
        info, hull = _hull(curve)
        lo, hi = sorted((info["anchor"], info["p_c"]))
        out[fam] = {
            "tangent": dict(info, p_c_reference=ref),
            "tangent_line": {"p": [info["anchor"], info["p_c"]], "value": [0.0, info["value_c"]]},
            "curves": {
                name: {"label": cc[name].name, "p": cc[name].p, "value": cc[name].value} for name in (main, *others)
            },
            "convexified": {"p": curve.p, "value": hull},
            "difference": {"p": curve.p, "value": curve.value - hull},
            "line_range": [lo, hi],
        }
    return out


def curves_json(samples: int = 401) -> str:
    return to_json(curves_dict(samples))


CURVE_COLUMNS = ("family", "series", "p", "value")


def curves_csv(samples: int = 401) -> str:
    """Long-format table: one row per (family, series, p)."""
    data = rounded(curves_dict(samples))
    rows = []
    for fam, block in data.items():
        for name, c in block["curves"].items():
            rows += [[fam, name, p, v] for p, v in zip(c["p"], c["value"])]
        for series in ("convexified", "difference", "tangent_line"):
            c = block[series]
            rows += [[fam, series, p, v] for p, v in zip(c["p"], c["value"])]
    return _csv_text(CURVE_COLUMNS, rows)


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


__all__ = [
    "REFERENCE",
    "compared",
    "curves_csv",
    "curves_dict",
    "curves_json",
    "parse_surface_csv",
    "round_sig",
    "rounded",
    "structure_dict",
    "surface_csv",
    "surface_features",
    "surface_json",
    "surface_pattern",
    "to_json",
    "write_text",
]
