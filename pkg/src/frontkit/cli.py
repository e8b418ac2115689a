"""Command-line front end.

    frontkit analyze CONFIG.json [--out DIR] [--timings]
    frontkit example1 --a 1
    frontkit example2 --k1 1 --k2 2
    frontkit front CONFIG.json --t 2/3,1/2 --format svg --out DIR
    frontkit selftest

Exit codes: 0 success, 1 usage or parse error, 2 pipeline error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .arith import format_rational, parse_rational
from .divisor import (DeformationFamily, directional_derivative_T, discriminant_poly,
                      sigma_matrices, stratum_tangent_check, transversality_verdict)
from .groebner import local_multiplicity
from .linalg import Matrix
from .poly import ParseError, Polynomial, Ring
from .presets import example1, example2
from .wavefront import (InitialFront, build_phase, decompose, extract_iota, jacobian_quotient,
                        phase_at, sample_front, verify_assumptions)


class ConfigError(ValueError):
    pass


def _rat_list(values, what) -> tuple:
    try:
        return tuple(parse_rational(v) for v in values)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{what}: {exc}") from exc


def _parse_field(ring: Ring, text: str, what: str) -> Polynomial:
    try:
        return ring.parse(text)
    except ParseError as exc:
        raise ConfigError(f"{what}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{what}: {exc}") from exc


@dataclass
class AnalysisConfig:
    variables: List[str]
    F: Polynomial
    focal: tuple
    e_list: Optional[List[Polynomial]] = None
    u_constraints: List[Polynomial] = field(default_factory=list)
    nu: Optional[int] = None
    sample_points: List[tuple] = field(default_factory=list)
    minor_selections: Optional[List[List[int]]] = None
    directions: List[tuple] = field(default_factory=list)
    stratum: Optional[dict] = None
    singular_point: Optional[tuple] = None
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def m(self) -> Optional[int]:
        return None if self.e_list is None else len(self.e_list)

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        for key in ("variables", "F", "focal"):
            if key not in d:
                raise ConfigError(f"missing required field {key!r}")
        known = {"variables", "F", "focal", "e_list", "u_constraints", "nu", "sample_points",
                 "minor_selections", "directions", "stratum", "singular_point", "name"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown fields: {sorted(extra)}")
        variables = list(d["variables"])
        if not variables or len(set(variables)) != len(variables):
            raise ConfigError("variables must be distinct names")
        zr = Ring(variables)
        F = _parse_field(zr, d["F"], "F")
        focal = _rat_list(d["focal"], "focal")
        if len(focal) != len(variables) + 2:
            raise ConfigError(f"focal needs {len(variables) + 2} coordinates (x1..x{len(variables) + 1}, t)")
        e_list = None
        if d.get("e_list") is not None:
            e_list = [_parse_field(zr, t, f"e_list[{i}]") for i, t in enumerate(d["e_list"])]
        m = None if e_list is None else len(e_list)
        u = []
        if d.get("u_constraints"):
            if m is None:
                raise ConfigError("u_constraints need an explicit e_list")
            sr = Ring(f"s{j}" for j in range(1, m + 1))
            u = [_parse_field(sr, t, f"u_constraints[{i}]") for i, t in enumerate(d["u_constraints"])]
        nu = d.get("nu")
        if nu is not None and (not isinstance(nu, int) or nu < 1):
            raise ConfigError("nu must be a positive integer")
        samples = [_rat_list(p, f"sample_points[{i}]") for i, p in enumerate(d.get("sample_points") or [])]
        sels = d.get("minor_selections")
        if sels is not None:
            if not all(isinstance(i, int) for s in sels for i in s):
                raise ConfigError("minor_selections must be lists of row numbers")
            sels = [list(s) for s in sels]
        dirs = [_rat_list(p, f"directions[{i}]") for i, p in enumerate(d.get("directions") or [])]
        for dv in dirs:
            if len(dv) != len(focal):
                raise ConfigError(f"directions need {len(focal)} coordinates")
        stratum = d.get("stratum")
        if stratum is not None:
            for key in ("parameters", "product", "point"):
                if key not in stratum:
                    raise ConfigError(f"stratum lacks {key!r}")
            pr = Ring(list(stratum["parameters"]) + variables)
            _parse_field(pr, stratum["product"], "stratum.product")
            if len(stratum["point"]) != len(stratum["parameters"]):
                raise ConfigError("stratum.point arity differs from its parameters")
            stratum = {"parameters": list(stratum["parameters"]), "product": stratum["product"],
                       "point": [format_rational(v) for v in _rat_list(stratum["point"], "stratum.point")]}
        sing = d.get("singular_point")
        if sing is not None:
            sing = _rat_list(sing, "singular_point")
            if len(sing) != len(variables):
                raise ConfigError("singular_point arity differs from variables")
        return cls(variables, F, focal, e_list, u, nu, samples, sels, dirs, stratum, sing,
                   d.get("name", ""))

    def to_dict(self) -> dict:
        out = {}
        if self.name:
            out["name"] = self.name
        out["variables"] = list(self.variables)
        out["F"] = str(self.F)
        out["focal"] = [format_rational(v) for v in self.focal]
        if self.e_list is not None:
            out["e_list"] = [str(e) for e in self.e_list]
        if self.nu is not None:
            out["nu"] = self.nu
        if self.u_constraints:
            out["u_constraints"] = [str(u) for u in self.u_constraints]
        if self.sample_points:
            out["sample_points"] = [[format_rational(v) for v in p] for p in self.sample_points]
        if self.minor_selections is not None:
            out["minor_selections"] = [list(s) for s in self.minor_selections]
        if self.directions:
            out["directions"] = [[format_rational(v) for v in p] for p in self.directions]
        if self.stratum is not None:
            out["stratum"] = dict(self.stratum)
        if self.singular_point is not None:
            out["singular_point"] = [format_rational(v) for v in self.singular_point]
        return out

    def __eq__(self, other):
        if not isinstance(other, AnalysisConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def load_config(path: str) -> AnalysisConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    return AnalysisConfig.from_dict(data)


# -- serialization helpers -------------------------------------------------------------

def _q(x) -> str:
    return format_rational(x)


def _mat(M: Matrix) -> list:
    return [[_q(x) for x in r] for r in M.rows]


def _upoly_text(coeffs, var="s1") -> str:
    r = Ring([var])
    return str(Polynomial(r, {(k,): c for k, c in enumerate(coeffs)}))


# -- the pipeline ----------------------------------------------------------------------

class PipelineError(RuntimeError):
    def __init__(self, stage, exc):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage
        self.exc = exc


def run_analyze(config: AnalysisConfig, timings: bool = False) -> dict:
    """Run the whole pipeline and return the report document.

    Failures are recorded under ``error`` with the stage that raised.
    """
    report = {"config": config.to_dict()}
    clock = {}
    stage = "setup"

    def mark(name, t0):
        clock[name] = round(time.perf_counter() - t0, 6)

    try:
        t0 = time.perf_counter()
        stage = "build_phase"
        front = InitialFront(tuple(config.variables), config.F)
        phase = build_phase(front)
        stage = "phase_at"
        base = phase_at(phase, config.focal)
        report["phase_at_focal"] = str(base)
        stage = "extract_iota"
        frame = extract_iota(phase, config.focal, config.e_list, nu=config.nu,
                             u_constraints=config.u_constraints,
                             singular_point=config.singular_point)
        report.update(mu=frame.mu, m=frame.m, nu=frame.nu)
        report["e_list"] = [str(e) for e in frame.e_list]
        report["iota"] = {f"s{j + 1}": str(s) for j, s in enumerate(frame.iota)}
        report["iota_on_U"] = [str(u.substitute(
            {f"s{j + 1}": s for j, s in enumerate(frame.iota)}, ring=phase.xt_ring))
            for u in frame.u_constraints]
        mark("frame", t0)

        t0 = time.perf_counter()
        stage = "milnor"
        qa = jacobian_quotient(base)
        jac = [base.derivative(z) for z in front.zvars]
        report["milnor"] = {
            "global": qa.dimension,
            "singular_point": [_q(c) for c in frame.singular_point],
            "local": local_multiplicity(jac, frame.singular_point),
        }
        mark("milnor", t0)

        t0 = time.perf_counter()
        stage = "verify_assumptions"
        samples = config.sample_points or [tuple(Fraction(0) for _ in range(frame.m - 1))]
        ar = verify_assumptions(frame, phase, samples)
        report["assumptions"] = {
            "all_passed": ar.all_passed,
            "samples": [{"s_prime": [_q(v) for v in c.s_prime], "on_U": c.on_U,
                         "dimension": c.dim_full, "truncated_dimension": c.dim_truncated,
                         "basis_ok": c.basis_ok, "passed": c.passed(frame.mu),
                         **({"witness": c.witness} if c.witness else {})}
                        for c in ar.samples],
        }
        mark("assumptions", t0)

        t0 = time.perf_counter()
        stage = "sigma_matrices"
        fam = DeformationFamily.from_frame(frame)
        s_focal = frame.iota_at(frame.focal)
        sig = sigma_matrices(fam, s_focal[1:], s1=s_focal[0])
        report["sigma_tilde_at_focal"] = _mat(sig.sigma_tilde)
        report["sigma_at_focal"] = _mat(sig.sigma_full)
        stage = "discriminant_poly"
        report["discriminant_at_focal"] = _upoly_text(discriminant_poly(fam, s_focal[1:]))
        mark("sigma", t0)

        t0 = time.perf_counter()
        stage = "transversality_verdict"
        rep = transversality_verdict(fam, frame, frame.focal, selections=config.minor_selections)
        report["T_at_focal"] = _mat(rep.T.entries)
        report["ranks"] = {"sigma": rep.rank_sigma, "d_iota": rep.rank_diota, "T": rep.rank_T,
                           "T_all_columns": rep.rank_T_ambient, "nu": rep.nu}
        report["verdict"] = rep.verdict
        if rep.isolation is not None:
            iso = rep.isolation
            report["isolation"] = {
                "selections": rep.selections,
                "isolated": iso.isolated,
                "multiplicity_at_origin": iso.multiplicity,
                "method": iso.method,
                "truncated_dimensions": iso.truncated_dims,
                "removed_units": iso.removed_units,
                "stripped_minors": [str(p) for p in iso.stripped],
                **({"witness": iso.witness} if iso.witness else {}),
            }
            report["derivatives_at_focal"] = {k: _mat(M) for k, M in rep.derivatives.items()}
        mark("verdict", t0)

        if config.directions:
            t0 = time.perf_counter()
            stage = "directional_derivative_T"
            report["directional_derivatives"] = [
                {"direction": [_q(v) for v in d],
                 "dT": _mat(directional_derivative_T(fam, frame, frame.focal, d))}
                for d in config.directions]
            mark("directions", t0)

        if config.stratum is not None:
            t0 = time.perf_counter()
            stage = "stratum_tangent_check"
            st = config.stratum
            pr = Ring(list(st["parameters"]) + list(front.zvars))
            product = pr.parse(st["product"])
            comps = decompose(product - base.to_ring(pr), front.zvars, frame.e_list)
            chk = stratum_tangent_check(comps, [parse_rational(v) for v in st["point"]],
                                        frame.diota(frame.focal))
            report["stratum"] = {
                "components": [str(c) for c in comps],
                "tangent_vectors": [[_q(v) for v in r] for r in chk.tangent_vectors],
                "tangent_dimension": chk.tangent_dim,
                "intersection": [[_q(v) for v in r] for r in chk.intersection],
                "transverse_only_at_point": chk.transverse_only_at_point,
            }
            mark("stratum", t0)
    except Exception as exc:  # recorded with its stage, re-raised by the caller if wanted
        report["error"] = {"stage": stage, "type": type(exc).__name__, "message": str(exc)}
    if timings:
        report["timings"] = clock
    return report


# -- fronts -------------------------------------------------------------------------------

def _grid(lo: float, hi: float, count: int) -> List[float]:
    if count < 2:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def front_samples(config: AnalysisConfig, t_values, z_range=(-1.5, 1.5), count=301):
    front = InitialFront(tuple(config.variables), config.F)
    axis = _grid(z_range[0], z_range[1], count)
    if front.n == 1:
        grid = axis
    else:
        from itertools import product
        coarse = _grid(z_range[0], z_range[1], max(2, int(round(count ** (1 / front.n)))))
        grid = list(product(coarse, repeat=front.n))
    return {t: sample_front(front, t, grid) for t in t_values}


def emit_front(config: AnalysisConfig, t_values, fmt: str, out_dir: str,
               z_range=(-1.5, 1.5), count=301) -> List[str]:
    """Write front samples for each t; returns the written paths."""
    n = len(config.variables)
    if fmt == "svg" and n > 2:
        raise ValueError("SVG output supports at most two z-variables")
    os.makedirs(out_dir, exist_ok=True)
    t_values = [float(parse_rational(t)) for t in t_values]
    if fmt == "csv":
        data = front_samples(config, t_values, z_range, count)
        path = os.path.join(out_dir, "front.csv")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "branch"] + [f"z{j + 1}" for j in range(n)] +
                       [f"x{j + 1}" for j in range(n + 1)])
            for t, pts in data.items():
                for p in pts:
                    w.writerow([repr(t), p.branch] + [repr(v) for v in p.z] + [repr(v) for v in p.x])
        return [path]
    if fmt != "svg":
        raise ValueError(f"unknown format {fmt!r}")
    paths = []
    if n == 2:
        # slice z2 = 0 and draw the (x1, x3) plane
        front = InitialFront(tuple(config.variables), config.F)
        grid = [(z, 0.0) for z in _grid(z_range[0], z_range[1], count)]
        data = {t: sample_front(front, t, grid) for t in t_values}
        axes = (0, 2)
    else:
        data = front_samples(config, t_values, z_range, count)
        axes = (0, 1)
    for i, (t, pts) in enumerate(data.items()):
        path = os.path.join(out_dir, f"front_{i}.svg")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(render_svg(pts, t, axes))
        paths.append(path)
    return paths


def render_svg(points, t: float, axes=(0, 1), size=480, clip=4.0) -> str:
    """One polyline per sign branch; viewBox fitted to the sample extents."""
    branches = {}
    for p in points:
        x, y = p.x[axes[0]], p.x[axes[1]]
        if all(math.isfinite(v) and abs(v) <= clip for v in (x, y)):
            branches.setdefault(p.branch, []).append((x, -y))
    pts = [q for b in branches.values() for q in b] or [(0.0, 0.0)]
    xs, ys = [q[0] for q in pts], [q[1] for q in pts]
    w = max(max(xs) - min(xs), 1e-6)
    h = max(max(ys) - min(ys), 1e-6)
    pad = 0.05 * max(w, h)
    vb = (min(xs) - pad, min(ys) - pad, w + 2 * pad, h + 2 * pad)
    stroke = 0.004 * max(vb[2], vb[3])
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="{vb[0]:.6g} {vb[1]:.6g} {vb[2]:.6g} {vb[3]:.6g}">',
             f'<title>wave front at t = {t:g}</title>']
    colors = {1: "#1f5fa8", -1: "#b8452a"}
    for b in sorted(branches, reverse=True):
        coords = " ".join(f"{x:.6g},{y:.6g}" for x, y in branches[b])
        lines.append(f'<polyline fill="none" stroke="{colors[b]}" stroke-width="{stroke:.4g}" '
                     f'points="{coords}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# -- entry point ----------------------------------------------------------------------------

def _write_report(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _analyze(cfg: AnalysisConfig, args) -> int:
    report = run_analyze(cfg, timings=args.timings)
    _write_report(report, args.out)
    if "error" in report:
        print(f"error in {report['error']['stage']}: {report['error']['message']}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="frontkit", description="Exact analysis of wave-front discriminants.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="directory for output files (default: report to stdout)")
        sp.add_argument("--timings", action="store_true", help="include wall-clock stage timings")

    a = sub.add_parser("analyze", help="run the pipeline on a JSON config")
    a.add_argument("config")
    common(a)
    e1 = sub.add_parser("example1", help="planar example, F = a z^2 + z^4")
    e1.add_argument("--a", default="1")
    common(e1)
    e2 = sub.add_parser("example2", help="spatial example, F = -(k1 z1^2 + k2 z2^2)/2")
    e2.add_argument("--k1", default="1")
    e2.add_argument("--k2", default="2")
    common(e2)
    f = sub.add_parser("front", help="sample real wave fronts")
    f.add_argument("config", help="JSON config, or the name of a preset (example1, example2)")
    f.add_argument("--t", required=True, help="comma separated times, e.g. 2/3,1/2")
    f.add_argument("--format", choices=["csv", "svg"], default="csv")
    f.add_argument("--out", default=".")
    f.add_argument("--z-range", default="-1.5,1.5", help="z sampling interval lo,hi")
    f.add_argument("--samples", type=int, default=301)
    sub.add_parser("selftest", help="run the acceptance checks")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        if args.command == "analyze":
            cfg = load_config(args.config)
        elif args.command == "example1":
            cfg = AnalysisConfig.from_dict(example1(args.a))
        elif args.command == "example2":
            cfg = AnalysisConfig.from_dict(example2(args.k1, args.k2))
        elif args.command == "front":
            if args.config == "example1":
                cfg = AnalysisConfig.from_dict(example1())
            elif args.config == "example2":
                cfg = AnalysisConfig.from_dict(example2())
            else:
                cfg = load_config(args.config)
            lo, hi = (float(v) for v in args.z_range.split(","))
            t_values = [t for t in args.t.split(",") if t.strip()]
        else:
            from .acceptance import run_all
            results = run_all(echo=True)
            return 0 if all(r.passed for r in results) else 2
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.command == "front":
        try:
            for path in emit_front(cfg, t_values, args.format, args.out, (lo, hi), args.samples):
                print(path)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        return 0
    return _analyze(cfg, args)


if __name__ == "__main__":
    sys.exit(main())
