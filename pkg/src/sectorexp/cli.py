"""Command line front end: ``sectorexp <command> [--scene FILE] [options]``.

Scene files (YAML or JSON)::

    omega: pi/2              # "p/q*pi" forms keep the angle exact; plain floats stay floats
    outer_radius: 1.0
    rho0: 1.0                # optional
    rho0p: 0.7               # optional
    holes:
      - {kind: disk, center: [0.3536, 0.3536], radius: 0.1}
      - {kind: polygon, vertices: [[0.2, 0.1], [0.3, 0.1], [0.25, 0.2]]}
      - {kind: halfdisk, center: [0.5, 0.0], radius: 0.1, direction: 0.0}
    rhs: {kind: constant, value: 1.0}      # or {kind: step, value, radius}
                                           # or {kind: polynomial, real: [[a1, a2, coeff], ...]}
    parameters: {eps: [0.1, 0.15, 0.2], cutoffs: [2, 4, 6, 8], delta: null, ...}

Command-line flags override ``parameters``; unknown keys are rejected.
Exit codes: 0 success, 1 numerical failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .bie_system import BlockSystemError, build_meshes
from .cornerseries import AnalyticRHS, CornerSeriesError, RadialStepRHS
from .diophantine import DiophantineError, LiouvilleCertificate, classify, sin_series_radius
from .geometry import BoundaryCurve, GeometryError, Opening, SectorScene, transform_scene, validate_pattern
from .potential import PotentialError
from .twoscale import (TwoScaleError, build_corner_expansion, build_two_scale, convergence_study,
                       errors_decreasing, probe_points, solve_unperturbed)

COMMANDS = ("validate", "classify-angle", "corner-expand", "solve", "sweep", "xi")

# name -> (default, type, check); documented in the README
PARAMETERS = {
    "eps": ([0.1, 0.15, 0.2], "floats", lambda v: all(0 < e < 1 for e in v)),
    "cutoffs": ([2.0, 4.0, 6.0, 8.0], "floats", lambda v: all(c > 0 for c in v)),
    "gamma_high": (14.0, float, lambda v: v > 0),
    "gamma_max": (8.0, float, lambda v: v > 0),
    "delta": (None, float, lambda v: v >= 0),
    "depth": (30, int, lambda v: 1 <= v <= 10_000),
    "l_max": (100_000, int, lambda v: v >= 10),
    "tail_start": (1000, int, lambda v: v >= 1),
    "probes": (30, int, lambda v: 1 <= v <= 10_000),
    "panels_per_unit": (3.0, float, lambda v: v > 0),
    "u0_panels_per_unit": (6.0, float, lambda v: v > 0),
    "samples": (64, int, lambda v: v >= 4),
}

SCENE_KEYS = {"omega", "outer_radius", "rho0", "rho0p", "holes", "rhs", "parameters"}
HOLE_KEYS = {"disk": {"center", "radius"}, "polygon": {"vertices"},
             "halfdisk": {"center", "radius", "direction"}}
RHS_KEYS = {"constant": {"value"}, "step": {"value", "radius"}, "polynomial": {"real"}}

DEMO_SCENE = {
    "omega": "pi/2",
    "outer_radius": 1.0,
    "holes": [{"kind": "disk", "center": [0.5 * math.cos(math.pi / 4), 0.5 * math.sin(math.pi / 4)],
               "radius": 0.1}],
    "rhs": {"kind": "constant", "value": 1.0},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    scene: dict
    scene_path: str | None
    omega_arg: str | None
    out: Path
    params: dict = field(default_factory=dict)


# --------------------------------------------------------------------------- parsing


def _check_keys(d: dict, allowed: set, where: str) -> None:
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected a mapping")
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")


def _coerce(name: str, value):
    default, kind, check = PARAMETERS[name]
    if value is None:
        return None
    try:
        if kind == "floats":
            if isinstance(value, str):
                value = [v for v in value.split(",") if v.strip()]
            value = [float(v) for v in value]
            if not value:
                raise ValueError
        else:
            value = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {name!r}: cannot read {value!r}") from None
    if not check(value):
        raise ConfigError(f"parameter {name!r}: value {value!r} out of range")
    return value


def load_scene_file(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"scene file not found: {path}")
    try:
        data = yaml.safe_load(p.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed scene file {path}: {exc}") from None
    if data is None:
        data = {}
    _check_keys(data, SCENE_KEYS, "scene")
    return data


def parse_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, scene-file parameters and command-line flags (in that order)."""
    if args.command not in COMMANDS:
        raise ConfigError(f"unknown command {args.command!r}")
    scene = load_scene_file(args.scene) if args.scene else dict(DEMO_SCENE)
    params = {k: v[0] for k, v in PARAMETERS.items()}
    file_params = scene.get("parameters") or {}
    _check_keys(file_params, set(PARAMETERS), "parameters")
    for k, v in file_params.items():
        params[k] = _coerce(k, v)
    for k in PARAMETERS:
        v = getattr(args, k, None)
        if v is not None:
            params[k] = _coerce(k, v)
    return RunConfig(args.command, scene, args.scene, getattr(args, "omega", None), Path(args.out), params)


def _point(v, where: str) -> complex:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ConfigError(f"{where}: expected [x, y]")
    return complex(float(v[0]), float(v[1]))


def build_hole(rec: dict, j: int) -> BoundaryCurve:
    where = f"holes[{j}]"
    if not isinstance(rec, dict) or rec.get("kind") not in HOLE_KEYS:
        raise ConfigError(f"{where}: kind must be one of {sorted(HOLE_KEYS)}")
    kind = rec["kind"]
    body = {k: v for k, v in rec.items() if k != "kind"}
    _check_keys(body, HOLE_KEYS[kind], where)
    missing = HOLE_KEYS[kind] - set(body)
    if missing:
        raise ConfigError(f"{where}: missing {sorted(missing)}")
    if kind == "disk":
        return BoundaryCurve.circle(_point(body["center"], where), float(body["radius"]))
    if kind == "halfdisk":
        return BoundaryCurve.half_disk(_point(body["center"], where), float(body["radius"]),
                                       float(body["direction"]))
    return BoundaryCurve.polygon([_point(v, where) for v in body["vertices"]])


def build_rhs(rec: dict | None):
    if rec is None:
        return AnalyticRHS.constant(1.0)
    if not isinstance(rec, dict) or rec.get("kind") not in RHS_KEYS:
        raise ConfigError(f"rhs: kind must be one of {sorted(RHS_KEYS)}")
    kind = rec["kind"]
    body = {k: v for k, v in rec.items() if k != "kind"}
    _check_keys(body, RHS_KEYS[kind], "rhs")
    if set(body) != RHS_KEYS[kind]:
        raise ConfigError(f"rhs: expected keys {sorted(RHS_KEYS[kind])}")
    if kind == "constant":
        return AnalyticRHS.constant(float(body["value"]))
    if kind == "step":
        return RadialStepRHS(float(body["value"]), float(body["radius"]))
    return AnalyticRHS(real={(int(a), int(b)): float(c) for a, b, c in body["real"]})


def build_scene(rec: dict) -> SectorScene:
    if "omega" not in rec or "outer_radius" not in rec:
        raise ConfigError("scene: omega and outer_radius are required")
    omega = rec["omega"]
    holes = [build_hole(h, j) for j, h in enumerate(rec.get("holes") or [])]
    return SectorScene(Opening.coerce(str(omega) if not isinstance(omega, (int, float)) else float(omega)),
                       float(rec["outer_radius"]), holes, rec.get("rho0"), rec.get("rho0p"))


# --------------------------------------------------------------------------- output


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(data, indent=2, sort_keys=True, default=_json_default, allow_nan=True)
    path.write_text(text + "\n", encoding="utf-8")


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def say(stage: str, message: str) -> None:
    print(f"[{stage}] {message}")


# --------------------------------------------------------------------------- commands


def cmd_validate(cfg: RunConfig) -> int:
    scene = build_scene(cfg.scene)
    report = validate_pattern(scene)
    rec = {"ok": report.ok, "checks": report.checks, "messages": report.messages,
           "omega": scene.omega.describe(), "kappa": scene.kappa, "eps0": scene.eps0}
    if report.ok:
        ts = transform_scene(scene)
        rec.update(m_cross=ts.m_cross, m_pair=ts.m_pair)
    write_json(cfg.out / "validate.json", rec)
    say("validate", f"{'valid' if report.ok else 'invalid'} scene, kappa={scene.kappa:.6g}")
    return 0 if report.ok else 2


def _angle_input(cfg: RunConfig):
    """Certificate file, exact pi multiple, or float; returns (number omega/pi, omega or None)."""
    arg = cfg.omega_arg if cfg.omega_arg is not None else str(cfg.scene.get("omega", "pi/2"))
    if Path(arg).is_file():
        rec = load_certificate(arg)
        cert = LiouvilleCertificate.from_record(rec)
        return cert, None if cert.kind == "rational" else math.pi * _certificate_value(cert)
    try:
        opening = Opening.coerce(arg)
    except (GeometryError, ValueError):
        raise ConfigError(f"cannot read the opening {arg!r}") from None
    if opening.is_rational:
        return opening.pi_ratio, None
    return opening.value / math.pi, opening.value


def load_certificate(path: str) -> dict:
    try:
        rec = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed certificate file {path}: {exc}") from None
    if not isinstance(rec, dict):
        raise ConfigError("certificate file must hold a mapping")
    return rec


def _certificate_value(cert: LiouvilleCertificate) -> float:
    if cert.kind == "bounded":
        p, q = cert.bounded_convergents(40)[-1]
        return p / q
    return float(sum(float(cert.base) ** (-b) for b in cert.exponents() if b < 1100))


def cmd_classify(cfg: RunConfig) -> int:
    x, omega = _angle_input(cfg)
    result = classify(x, cfg.params["depth"])
    rec = {"input": cfg.omega_arg, "classification": result.to_record(),
           "implications_hold": result.implications_hold()}
    if omega is not None:
        rad = sin_series_radius(omega, cfg.params["l_max"], tail_start=cfg.params["tail_start"])
        rec["sin_series_radius"] = rad.to_record()
    else:
        rec["sin_series_radius"] = None
    write_json(cfg.out / "classify.json", rec)
    say("classify-angle", f"verdict {result.verdict} (certified={result.certified})")
    return 0


def cmd_corner(cfg: RunConfig) -> int:
    scene = build_scene(cfg.scene)
    f = build_rhs(cfg.scene.get("rhs"))
    u0 = solve_unperturbed(scene, f, panels_per_unit=cfg.params["u0_panels_per_unit"])
    say("solve", f"unperturbed boundary residual {u0.boundary_residual():.3e}")
    exp = build_corner_expansion(scene, f, u0, gamma_max=cfg.params["gamma_max"], delta=cfg.params["delta"])
    write_json(cfg.out / "corner_expansion.json", exp.to_record())
    radius = 0.5 * exp.validity_radius
    n = cfg.params["samples"]
    theta = scene.omega.value * (np.arange(1, n + 1) / (n + 1))
    pts = radius * np.exp(1j * theta)
    ref = u0.evaluate(pts)
    rows = []
    cut = 1.0
    levels = sorted({g.magnitude for g in exp.idx.entries})
    for c in levels:
        err = float(np.max(np.abs(exp.evaluate(pts, c) - ref)))
        rows.append((c, err, exp.tail_bound(radius, c)))
        cut = c
    write_csv(cfg.out / "corner_check.csv", ["cutoff", "sup_error", "tail_bound"], rows)
    say("corner-expand", f"{len(exp.nonzero())} nonzero coefficients, error {rows[-1][1]:.3e} at cutoff {cut:.4g}")
    return 0


def cmd_solve(cfg: RunConfig) -> int:
    scene = build_scene(cfg.scene)
    f = build_rhs(cfg.scene.get("rhs"))
    cut = max(cfg.params["cutoffs"])
    ts = build_two_scale(scene, f, cutoff=cut, gamma_high=cfg.params["gamma_high"], delta=cfg.params["delta"],
                         panels_per_unit=cfg.params["panels_per_unit"],
                         u0_panels_per_unit=cfg.params["u0_panels_per_unit"])
    say("two-scale", f"order {ts.order}, {len(ts.terms)} terms up to exponent {ts.max_cutoff:.4g}")
    rows = []
    for eps in cfg.params["eps"]:
        pts = probe_points(scene, eps, cfg.params["probes"])
        base = ts.u0.evaluate(pts)
        direct = base + ts.reference(eps, pts, cfg.params["gamma_high"])
        approx = base + ts.correction(eps, pts, cut)
        for t, d, a in zip(pts, direct, approx):
            rows.append((eps, t.real, t.imag, d, a, abs(d - a)))
    write_csv(cfg.out / "solution.csv", ["eps", "x", "y", "direct", "two_scale", "abs_diff"], rows)
    write_json(cfg.out / "manifest.json", ts.manifest())
    say("solve", f"max |direct - two-scale| = {max(r[-1] for r in rows):.3e}")
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    scene = build_scene(cfg.scene)
    f = build_rhs(cfg.scene.get("rhs"))
    cuts = sorted(cfg.params["cutoffs"])
    ts = build_two_scale(scene, f, cutoff=cuts[-1], gamma_high=cfg.params["gamma_high"],
                         delta=cfg.params["delta"], panels_per_unit=cfg.params["panels_per_unit"],
                         u0_panels_per_unit=cfg.params["u0_panels_per_unit"])
    rows = convergence_study(ts, cfg.params["eps"], cuts, probes=cfg.params["probes"],
                             gamma_high=cfg.params["gamma_high"])
    write_csv(cfg.out / "convergence.csv", ["eps", "order", "frame", "sup_error", "slope"],
              [r.as_tuple() for r in rows])
    write_json(cfg.out / "manifest.json", ts.manifest())
    mono = errors_decreasing(rows)
    say("sweep", f"{len(rows)} rows, errors decreasing in cutoff at every eps: {all(mono.values())}")
    return 0


def cmd_xi(cfg: RunConfig) -> int:
    scene = build_scene(cfg.scene)
    tscene = transform_scene(scene)
    if not tscene.m_pair:
        raise ConfigError("the xi command needs a scene with a mirror pair of holes")
    meshes = build_meshes(tscene, cfg.params["panels_per_unit"])
    rows, report = [], []
    far = np.geomspace(2.0, 64.0, 6) * max(tscene.hole_hull(), 1e-3)
    for j, xi in enumerate(meshes.xi):
        z = far * np.exp(0.4j)
        vals = xi.evaluate(z)
        slope = float(np.polyfit(np.log(far), np.log(np.abs(vals)), 1)[0])
        for r, v in zip(far, vals):
            rows.append((j, r, v))
        report.append({"pair": j, "flux_plus": xi.flux_plus, "flux_negative": xi.flux_plus < 0,
                       "max_trace_error": float(np.max(np.abs(xi.trace - np.sign(xi.trace)))),
                       "far_field_slope": slope, "condition": xi.condition})
    write_csv(cfg.out / "xi_samples.csv", ["pair", "radius", "value"], rows)
    write_json(cfg.out / "xi.json", {"pairs": report})
    say("xi", ", ".join(f"pair {r['pair']}: flux {r['flux_plus']:.4g}" for r in report))
    return 0


HANDLERS = {"validate": cmd_validate, "classify-angle": cmd_classify, "corner-expand": cmd_corner,
            "solve": cmd_solve, "sweep": cmd_sweep, "xi": cmd_xi}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sectorexp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scene", help="YAML/JSON scene file (default: quarter-disk demo scene)")
        p.add_argument("--out", default="sectorexp_out", help="output directory")
        if name == "classify-angle":
            p.add_argument("--omega", help="opening (e.g. 1.0, pi/2) or a certificate file")
        for key in PARAMETERS:
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None)
    return parser


NUMERICAL_ERRORS = (BlockSystemError, PotentialError, TwoScaleError, CornerSeriesError, np.linalg.LinAlgError,
                    FloatingPointError, ArithmeticError)
CONFIG_ERRORS = (ConfigError, GeometryError, DiophantineError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = parse_config(args)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return HANDLERS[cfg.command](cfg)
    except CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
