"""Command-line orchestration: configs in, meshes and reports out.

Subcommands:
    transform  build the pair, export both R^3 meshes and a JSON report
    flatfront  build the associated front (or one from explicit Gauss
               maps) and export the ball-model mesh plus report
    verify     run the full check suite; nonzero exit on any failure
    periods    loop integrals (and monodromy defects) per configured loop
    classify   end-classification table for all punctures

Exit codes: 0 success, 1 check failure, 2 usage/config error,
3 numerical failure.  Every run writes a manifest (config hash, version,
seed) next to its outputs; reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .mexpr import (
    ExprSyntaxError, LoopSpec, OrderError, PathError, PoleSignal,
    QuadratureError, parse_expr, path_from_points,
)
from .weierstrass import WeierstrassData, immerse_grid
from .riccati import (
    RiccatiIntegrationError, RiccatiSolution, catenoid_closed_form,
    monodromy_defect, period_real, solve_along, trinoid_closed_form,
)
from .ribaucour import INF, classify_end, make_pair
from .hfront import (
    FlatFrontData, form_relations_check, front_ball_vertices,
)
from .meshio import (
    DomainSpec, MeshBuildError, build_mesh_from_values, export_csv,
    export_json, export_obj, sample_domain,
)
from .verify import DEFAULT_SEED, run_all

NUMERICAL_ERRORS = (PoleSignal, QuadratureError, OrderError, PathError,
                    RiccatiIntegrationError, MeshBuildError, ArithmeticError)


class ConfigError(ValueError):
    pass


def _cplx(v, what="value"):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ConfigError(f"{what} must be a number or [re, im] pair, got {v!r}")


class RunConfig:
    def __init__(self, raw, source):
        self.raw = raw
        self.source = source
        try:
            wz = raw["weierstrass"]
            self.f = parse_expr(wz["f"])
            self.g = parse_expr(wz["g"])
            self.punctures = tuple(_cplx(p, "puncture") for p in wz.get("punctures", []))
            self.base_point = _cplx(wz.get("base_point", [1.0, 0.0]), "base_point")
            self.base_value = tuple(float(v) for v in wz.get("base_value", [0, 0, 0]))
            ric = raw["riccati"]
            self.k = float(ric["k"])
            self.mode = ric["mode"]
            dom = raw.get("domain", {})
            self.domain = dom
            self.outputs = raw.get("outputs", {})
            self.loops = [LoopSpec(_cplx(l["center"], "loop center"),
                                   float(l["radius"]),
                                   int(l.get("orientation", 1)))
                          for l in raw.get("loops", [])]
            self.seed = int(raw.get("seed", DEFAULT_SEED))
            self.include_infinity = bool(raw.get("include_infinity", True))
            fc = raw.get("flatness_center")
            self.flatness_center = _cplx(fc, "flatness_center") if fc else None
        except ExprSyntaxError as ex:
            raise ConfigError(f"bad expression in config: {ex}") from ex
        except (KeyError, TypeError, ValueError) as ex:
            raise ConfigError(f"bad config {source}: {ex}") from ex

    def weierstrass(self):
        return WeierstrassData(f=self.f, g=self.g, punctures=self.punctures,
                               base_point=self.base_point,
                               base_value=self.base_value)

    def closed_form(self):
        if "closed_form" not in self.mode:
            raise ConfigError("this command needs riccati.mode.closed_form")
        cf = self.mode["closed_form"]
        name = cf.get("name")
        if name == "catenoid":
            h, k = catenoid_closed_form(float(cf["m"]), _cplx(cf.get("C", 0.0), "C"))
        elif name == "trinoid":
            h, k = trinoid_closed_form()
        else:
            raise ConfigError(f"unknown closed form {name!r}")
        if abs(k - self.k) > 1e-12:
            raise ConfigError(
                f"config k = {self.k} disagrees with the closed form's k = {k}")
        return h, k

    def domain_spec(self, extra_punctures=()):
        dom = dict(self.domain)
        kind = dom.get("kind", "annulus")
        punctures = list(self.punctures)
        for p in extra_punctures:
            if all(abs(p - q) > 1e-9 for q in punctures):
                punctures.append(complex(p))
        return DomainSpec(
            kind=kind,
            nu=int(dom.get("nu", 40)),
            nv=int(dom.get("nv", 80)),
            r_in=float(dom.get("r_in", 0.5)),
            r_out=float(dom.get("r_out", 2.0)),
            z_min=_cplx(dom.get("z_min", [-1.5, -1.5]), "z_min"),
            z_max=_cplx(dom.get("z_max", [1.5, 1.5]), "z_max"),
            punctures=tuple(punctures),
            exclusion_radius=float(dom.get("exclusion_radius", 0.05)),
        )


def load_config(path_or_name) -> RunConfig:
    p = Path(path_or_name)
    if p.exists():
        data = p.read_bytes()
        source = str(p)
    else:
        builtin = resources.files("ribflat").joinpath(
            f"configs/{path_or_name}.json")
        try:
            data = builtin.read_bytes()
        except (FileNotFoundError, ModuleNotFoundError):
            raise ConfigError(
                f"config {path_or_name!r} is neither a file nor a builtin "
                "(builtins: catenoid_c0, catenoid_m3_C2, trinoid_k5)")
        source = f"builtin:{path_or_name}"
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as ex:
        raise ConfigError(f"config {source} is not valid JSON: {ex}") from ex
    cfg = RunConfig(raw, source)
    cfg.sha256 = hashlib.sha256(data).hexdigest()
    return cfg


def _manifest(cfg, command, out_files):
    return {
        "command": command,
        "config": cfg.source,
        "config_sha256": cfg.sha256,
        "outputs": sorted(Path(f).name for f in out_files),
        "seed": cfg.seed,
        "version": __version__,
    }


def _out_path(args, name):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def _build_pair(cfg):
    W = cfg.weierstrass()
    h, k = cfg.closed_form()
    return make_pair(W, h, k)


def _end_table(pair, include_infinity):
    rows = []
    for p in sorted(pair.W_t.punctures, key=lambda c: (abs(c), c.real, c.imag)):
        ec = classify_end(pair, p)
        rows.append({"location": [p.real, p.imag], "tag": ec.tag,
                     "orders": list(ec.orders), "detail": ec.detail})
    if include_infinity:
        ec = classify_end(pair, INF)
        rows.append({"location": "inf", "tag": ec.tag,
                     "orders": list(ec.orders), "detail": ec.detail})
    return rows


def _trace_rows(cfg, W, h, k):
    if "numeric" in cfg.mode:
        num = cfg.mode["numeric"]
        z0 = _cplx(num["z0"], "z0")
        h0 = _cplx(num["h0"], "h0")
        pts = [_cplx(p, "path point") for p in num["path"]]
        path = path_from_points(pts)
        sol = solve_along(W, k, z0, h0, path)
    else:
        from .mexpr import avoiding_path
        target = cfg.base_point + 0.8
        path = avoiding_path(cfg.base_point, target, punctures=W.punctures,
                             exclusion=W.exclusion)
        sol = solve_along(W, k, cfg.base_point, h(cfg.base_point), path)
    return sol.trace_rows()


def cmd_transform(args):
    cfg = load_config(args.config)
    pair = _build_pair(cfg)
    written = []

    grid = sample_domain(cfg.domain_spec())
    vals, ok = immerse_grid(pair.W, grid)
    mesh = build_mesh_from_values(grid, vals, ok)
    f = _out_path(args, cfg.outputs.get("mesh_r3", "surface.obj"))
    export_obj(mesh, f)
    written.append(f)

    grid_t = sample_domain(cfg.domain_spec(pair.W_t.punctures))
    vals_t, ok_t = immerse_grid(pair.W_t, grid_t)
    mesh_t = build_mesh_from_values(grid_t, vals_t, ok_t)
    f = _out_path(args, cfg.outputs.get("mesh_r3_transformed", "transformed.obj"))
    export_obj(mesh_t, f)
    written.append(f)

    if cfg.outputs.get("traces"):
        rows = _trace_rows(cfg, pair.W, pair.h, pair.k)
        f = _out_path(args, cfg.outputs["traces"])
        export_csv(rows, f, header=("z_re", "z_im", "chart", "val_re", "val_im"))
        written.append(f)

    reports = run_all(pair, loops=cfg.loops, seed=args.seed or cfg.seed,
                      tol_scale=args.tol_scale,
                      flatness_center=cfg.flatness_center)
    report = {
        "checks": [r.as_dict() for r in reports],
        "ends": _end_table(pair, cfg.include_infinity),
        "punctures": [[p.real, p.imag] for p in pair.W_t.punctures],
        "transformed_data": {"f": str(pair.W_t.f), "g": str(pair.W_t.g)},
    }
    f = _out_path(args, cfg.outputs.get("report", "report.json"))
    export_json(report, f)
    written.append(f)

    mf = _out_path(args, cfg.outputs.get("report", "report.json") + ".manifest.json")
    export_json(_manifest(cfg, "transform", written), mf)
    for w in written:
        print(w)
    return 0 if all(r.passed for r in reports) else 1


def cmd_flatfront(args):
    cfg = load_config(args.config)
    written = []
    if "gauss_maps" in cfg.raw:
        gm = cfg.raw["gauss_maps"]
        FF = FlatFrontData.from_gauss_maps(
            parse_expr(gm["G_plus"]), parse_expr(gm["G_minus"]),
            cfg.base_point, punctures=cfg.punctures)
        extra = FF.punctures
    else:
        pair = _build_pair(cfg)
        FF = pair.front
        extra = FF.punctures

    grid = sample_domain(cfg.domain_spec(extra))
    vals, ok, singular = front_ball_vertices(FF, grid)
    mesh = build_mesh_from_values(grid, vals, ok, singular_mask=singular)
    f = _out_path(args, cfg.outputs.get("mesh_h3_ball", "front_ball.obj"))
    export_obj(mesh, f)
    written.append(f)

    center = cfg.flatness_center or (FF.base_point + 0.1 + 0.35j)
    rel = form_relations_check(FF, center)
    report = {
        "form_relations": rel,
        "singular_vertices": [i for i, fl in enumerate(mesh.vertex_flags)
                              if fl == "singular"],
        "gauss_maps": {"G_plus": str(FF.Gp), "G_minus": str(FF.Gm)},
        "constants": {"c0": [FF.c0.real, FF.c0.imag],
                      "c1": [FF.c1.real, FF.c1.imag]},
    }
    report_name = cfg.outputs.get("front_report", "front_report.json")
    f = _out_path(args, report_name)
    export_json(report, f)
    written.append(f)

    mf = _out_path(args, report_name + ".manifest.json")
    export_json(_manifest(cfg, "flatfront", written), mf)
    for w in written:
        print(w)
    bad = [k for k, v in rel.items()
           if isinstance(v, dict) and "tolerance" in v
           and not v["max_residual"] < v["tolerance"] * args.tol_scale]
    return 1 if bad else 0


def cmd_verify(args):
    cfg = load_config(args.config)
    pair = _build_pair(cfg)
    loops = cfg.loops + _extra_loops(args)
    reports = run_all(pair, loops=loops, seed=args.seed or cfg.seed,
                      tol_scale=args.tol_scale,
                      flatness_center=cfg.flatness_center)
    for r in reports:
        print(r.line())
    f = _out_path(args, cfg.outputs.get("report", "verify_report.json"))
    export_json({"checks": [r.as_dict() for r in reports]}, f)
    mf = _out_path(args, str(Path(f).name) + ".manifest.json")
    export_json(_manifest(cfg, "verify", [f]), mf)
    return 0 if all(r.passed for r in reports) else 1


def cmd_periods(args):
    cfg = load_config(args.config)
    W = cfg.weierstrass()
    h, k = cfg.closed_form()
    sol = RiccatiSolution.from_expr(h, k)
    loops = cfg.loops + _extra_loops(args)
    if not loops:
        raise ConfigError("no loops configured")
    rows = []
    for loop in loops:
        re_int = period_real(W, sol, loop)
        defect = monodromy_defect(W, sol, loop)
        rows.append({
            "center": [loop.center.real, loop.center.imag],
            "radius": loop.radius,
            "orientation": loop.orientation,
            "re_integral": re_int,
            "monodromy_defect": defect,
        })
        print(f"loop at {loop.center:.6g} r={loop.radius:g}: "
              f"Re = {re_int:.6e}  monodromy defect = {defect:.6e}")
    f = _out_path(args, cfg.outputs.get("report", "periods_report.json"))
    export_json({"loops": rows}, f)
    mf = _out_path(args, str(Path(f).name) + ".manifest.json")
    export_json(_manifest(cfg, "periods", [f]), mf)
    return 0


def cmd_classify(args):
    cfg = load_config(args.config)
    pair = _build_pair(cfg)
    rows = _end_table(pair, cfg.include_infinity)
    for row in rows:
        loc = row["location"]
        loc_s = "inf" if loc == "inf" else f"{loc[0]:.6g}{loc[1]:+.6g}i"
        print(f"{loc_s:>24}  {row['tag']:<20} orders={tuple(row['orders'])}"
              + (f"  [{row['detail']}]" if row["detail"] else ""))
    f = _out_path(args, cfg.outputs.get("report", "classify_report.json"))
    export_json({"ends": rows}, f)
    mf = _out_path(args, str(Path(f).name) + ".manifest.json")
    export_json(_manifest(cfg, "classify", [f]), mf)
    return 0


def _extra_loops(args):
    if not args.loops:
        return []
    try:
        raw = json.loads(Path(args.loops).read_text())
        return [LoopSpec(_cplx(l["center"], "loop center"), float(l["radius"]),
                         int(l.get("orientation", 1))) for l in raw]
    except FileNotFoundError as ex:
        raise ConfigError(f"loops file not found: {args.loops}") from ex
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as ex:
        raise ConfigError(f"bad loops file {args.loops}: {ex}") from ex


def _add_common(sp):
    sp.add_argument("--config", required=True,
                    help="config path or builtin name")
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument("--seed", type=int, default=None,
                    help="override the config's sampling seed")
    sp.add_argument("--tol-scale", type=float, default=1.0,
                    help="multiply all check tolerances")
    sp.add_argument("--loops", default=None,
                    help="JSON file with extra loops")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="ribflat",
        description="Ribaucour transforms of minimal surfaces and their "
                    "flat fronts in hyperbolic 3-space")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("transform", cmd_transform), ("flatfront", cmd_flatfront),
                     ("verify", cmd_verify), ("periods", cmd_periods),
                     ("classify", cmd_classify)):
        sp = sub.add_parser(name)
        _add_common(sp)
        sp.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as ex:
        print(f"config error: {ex}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as ex:
        print(f"numerical failure: {ex}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
