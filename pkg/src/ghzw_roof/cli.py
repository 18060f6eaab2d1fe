"""Command-line front end.

Exit codes: 0 success, 1 a verification criterion failed, 2 usage or bad
coordinates, 3 input/output failure. Output files default to the directory in
``GHZW_ROOF_OUTDIR`` (or the working directory).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import RoofError

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
OUTDIR_ENV = "GHZW_ROOF_OUTDIR"

log = logging.getLogger("ghzw_roof")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated options of one invocation."""

    command: str
    n_theta: int = 90
    n_phi: int = 180
    samples: int = 401
    tol_scale: float = 1.0
    seed: int = 0
    out: Path | None = None
    fmt: str = "json"

    def __post_init__(self) -> None:
        if self.n_theta < 8 or self.n_phi < 8:
            raise UsageError("grid sizes must be at least 8")
        if self.samples < 8:
            raise UsageError("sample count must be at least 8")
        if not self.tol_scale > 0:
            raise UsageError("tolerance scale must be positive")
        if self.fmt not in ("json", "csv"):
            raise UsageError(f"unknown format {self.fmt!r}")


def default_outdir() -> Path:
    return Path(os.environ.get(OUTDIR_ENV, "."))


def _target(cfg: RunConfig, stem: str) -> Path:
    if cfg.out is not None:
        return cfg.out
    return default_outdir() / f"{stem}.{cfg.fmt}"


def _write(path: Path, text: str) -> None:
    from .dataset import write_text

    try:
        write_text(path, text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    log.info("wrote %s", path)


# --------------------------------------------------------------------------
# commands


def cmd_eval(p: float, phi: float, radius: float, axis: bool = False) -> dict:
    """Roof value, region and decomposition of ``radius`` times the pure state ``(p, phi)``.

    With ``axis`` the point is the mixture ``p |GHZ><GHZ| + (1 - p) |W><W|``
    on the symmetry axis instead; ``phi`` and ``radius`` are then ignored.
    """
    from .bloch import InteriorPoint
    from .classifier import classify
    from .dataset import rounded

    for name, v in (("p", p), ("phi", phi), ("r", radius)):
        if not math.isfinite(v):
            raise UsageError(f"{name} must be finite")
    if not 0.0 <= p <= 1.0:
        raise UsageError(f"p must lie in [0, 1], got {p}")
    if not 0.0 <= radius <= 1.0:
        raise UsageError(f"r must lie in [0, 1], got {radius}")
    point = InteriorPoint.on_axis(p) if axis else InteriorPoint.from_spherical(p, phi, radius)
    res = classify(point)
    members = [
        {"weight": w, "p": s.p, "phi": s.phi, "sqrt_tangle": t}
        for w, s, t in zip(res.decomposition.weights, res.decomposition.states, res.decomposition.tangles)
    ]
    return rounded(
        {
            "point": point.v,
            "value": res.value,
            "region": res.region.name,
            "numeric_boundary": res.numeric_boundary,
            "tag": list(res.decomposition.tag),
            "decomposition": members,
        }
    )


def cmd_structure(cfg: RunConfig) -> Path:
    from .dataset import structure_dict, to_json

    if cfg.fmt != "json":
        raise UsageError("structure is written as JSON only")
    path = _target(cfg, "structure")
    _write(path, to_json(structure_dict()))
    return path


def cmd_surface(cfg: RunConfig) -> Path:
    from .dataset import surface_csv, surface_features, surface_json, surface_pattern, to_json

    pattern = surface_pattern(cfg.n_theta, cfg.n_phi)
    path = _target(cfg, "surface")
    if cfg.fmt == "json":
        _write(path, surface_json(pattern))
    else:
        _write(path, surface_csv(pattern))
        _write(path.with_name(path.stem + "_features.json"), to_json(surface_features()))
    return path


def cmd_curves(cfg: RunConfig) -> Path:
    from .dataset import curves_csv, curves_json

    path = _target(cfg, "curves")
    _write(path, curves_json(cfg.samples) if cfg.fmt == "json" else curves_csv(cfg.samples))
    return path


def cmd_verify(cfg: RunConfig, only: list[int] | None = None, report: Path | None = None) -> bool:
    from .dataset import to_json
    from .verify import report_table, run_all

    results = run_all(seed=cfg.seed, only=only, tol_scale=cfg.tol_scale, progress=lambda r: print(r.line(), flush=True))
    print(report_table(results).splitlines()[-1])
    if report is not None:
        doc = {
            "seed": cfg.seed,
            "tol_scale": cfg.tol_scale,
            "criteria": [
                {"id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail, "seconds": r.seconds, "metrics": r.metrics}
                for r in results
            ],
        }
        _write(report, to_json(doc))
    return all(r.passed for r in results)


# --------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 already; keep the message format uniform
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ghzw-roof", description="Convex roof of the square-root threetangle on the GHZ-W Bloch ball.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("eval", help="roof value and optimal decomposition of one point")
    ev.add_argument("--p", type=float, required=True, help="GHZ weight of the surface direction")
    ev.add_argument("--phi", type=float, default=0.0, help="relative phase in radians")
    ev.add_argument("--r", type=float, default=1.0, help="distance from the ball center (1 = pure)")
    ev.add_argument("--axis", action="store_true", help="take p as the GHZ weight of an axis mixture")

    def outputs(sp, fmt=True):
        sp.add_argument("--out", type=Path, help=f"output file (default: ${OUTDIR_ENV} or cwd)")
        if fmt:
            sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    st = sub.add_parser("structure", help="zero polytope, N and M states, circles, reference comparison")
    outputs(st, fmt=False)

    sf = sub.add_parser("surface", help="region pattern of the sphere surface")
    sf.add_argument("--n-theta", type=int, default=90)
    sf.add_argument("--n-phi", type=int, default=180)
    outputs(sf)

    cv = sub.add_parser("curves", help="characteristic curves with their convexifying lines")
    cv.add_argument("--samples", type=int, default=401)
    outputs(cv)

    vf = sub.add_parser("verify", help="run the acceptance criteria")
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--only", type=int, nargs="+", choices=range(1, 10), metavar="N", help="criteria to run (1-9)")
    vf.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance")
    vf.add_argument("--report", type=Path, help="also write the results as JSON")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "eval":
            print(json.dumps(cmd_eval(args.p, args.phi, args.r, args.axis), indent=1))
            return EXIT_OK
        cfg = RunConfig(
            command=args.command,
            n_theta=getattr(args, "n_theta", 90),
            n_phi=getattr(args, "n_phi", 180),
            samples=getattr(args, "samples", 401),
            tol_scale=getattr(args, "tol_scale", 1.0),
            seed=getattr(args, "seed", 0),
            out=getattr(args, "out", None),
            fmt=getattr(args, "fmt", "json"),
        )
        if args.command == "verify":
            return EXIT_OK if cmd_verify(cfg, args.only, args.report) else EXIT_VERIFY
        path = {"structure": cmd_structure, "surface": cmd_surface, "curves": cmd_curves}[args.command](cfg)
        print(path)
        return EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RoofError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
