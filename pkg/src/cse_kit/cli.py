"""cse-kit: singularity exponents and Bergman kernel laws for Im w > |F(z)|^2.

Data goes to stdout, diagnostics to stderr.  Exit codes: 0 success, 1 bad
input, 2 Newton formulas inapplicable and no chart data, 3 a verification
comparison failed.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import __version__
from .charts import ChartData, ChartError, cse_from_charts, chart_asymptotic, h_poles
from .exponents import NeedsChartsError, SingularityReport, assemble_report, real_series_data
from .mc_verify import (IllConditionedGridError, UnderResolvedError, default_grid,
                        fit_asymptotics, kernel_bound_check, sublevel_volumes)
from .newton import (UnsupportedDimensionError, diagonal_intersection, frac_str,
                     newton_polyhedron, polyhedron_to_dict)
from .polyparse import (ParseError, ZeroPolynomialError, format_poly, parse_map, parse_point,
                        parse_poly, parse_real_series, recenter)

EXIT_INPUT, EXIT_CHARTS, EXIT_VERIFY = 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    """Everything a run depends on; embedded in every JSON output."""

    command: str
    source: dict
    n: int | None
    base_point: list[str] | None
    taus: list[int]
    samples: int
    seed: int
    rmin: float
    rmax: float
    rsteps: int
    format: str
    tol_power: float
    real: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _infer_n(text: str) -> int:
    idx = [int(k) for k in re.findall(r"z(\d+)", text)]
    return max(idx) if idx else 1


def _config(args) -> RunConfig:
    src = {k: getattr(args, k, None) for k in ("poly", "map", "charts", "series", "report", "file")}
    src = {k: v for k, v in src.items() if v is not None}
    if args.samples < 10**4:
        raise InputError("--samples must be at least 10000")
    if not (0 < args.rmin < args.rmax < 1) or args.rsteps < 2:
        raise InputError("need 0 < --rmin < --rmax < 1 and --rsteps >= 2")
    try:
        taus = [int(t) for t in str(args.tau).split(",") if t.strip()]
    except ValueError:
        raise InputError(f"--tau expects integers, got {args.tau!r}") from None
    if any(t < 0 for t in taus):
        raise InputError("--tau values must be non-negative")
    text = args.poly or args.map or ""
    n = args.n or (_infer_n(text) if text else None)
    return RunConfig(command=args.command, source=src, n=n,
                     base_point=None if args.at is None else [s.strip() for s in args.at.split(",")],
                     taus=taus, samples=args.samples, seed=args.seed, rmin=args.rmin,
                     rmax=args.rmax, rsteps=args.rsteps, format=args.format,
                     tol_power=args.tol_power, real=args.real)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _load_charts(path: str) -> ChartData:
    try:
        return ChartData.from_json(_read(path))
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e.msg})") from None


def _components(cfg: RunConfig, args):
    if args.poly and args.map:
        raise InputError("give either --poly or --map")
    if args.poly:
        return [parse_poly(args.poly, cfg.n)]
    if args.map:
        return parse_map(args.map, cfg.n)
    raise InputError("need --poly or --map")


def _point(cfg: RunConfig, args):
    if args.at is None:
        return None
    return parse_point(args.at, cfg.n)


def _envelope(cfg: RunConfig, key: str, payload) -> dict:
    return {"schema": "cse-kit/1", "version": __version__, "config": cfg.to_dict(), key: payload}


def _emit(obj, fmt: str, text: str | None = None):
    if fmt == "json":
        print(json.dumps(obj, indent=2, ensure_ascii=False))
    else:
        print(text if text is not None else json.dumps(obj, indent=2, ensure_ascii=False))


def _no_csv(cfg: RunConfig):
    if cfg.format == "csv":
        raise InputError(f"csv output is only available for verify, not {cfg.command}")


def _real_payload(rho) -> dict:
    info = real_series_data(rho)
    return {
        "series": rho.to_text(),
        "d0": frac_str(info["d0"]),
        "delta": frac_str(info["delta"]),
        "d0_differs_from_delta": info["differ"],
        "kernel_law": info["kernel_law"].to_dict(),
        "literal_law": info["literal_law"].to_dict(),
        "volume_law": info["volume_law"].to_dict(),
        "vertices": [list(v) for v in info["vertices"]],
    }


def _real_text(p: dict) -> str:
    lines = [f"rho = {p['series']}", f"d0 = {Fraction(p['d0'])}    delta = {Fraction(p['delta'])}"]
    if p["d0_differs_from_delta"]:
        lines.append("note: d0 != delta, so the kernel is not governed by the Newton distance")
    lines.append(f"K ≍ (Im w)^({p['kernel_law']['power']}) (from delta); "
                 f"-2 - 2/d0 = {Fraction(p['literal_law']['power'])} would be the Newton-distance guess")
    return "\n".join(lines)


def _series(args):
    text = args.series or args.poly
    if not text:
        raise InputError("--real needs --series (or --poly) in x, y")
    return parse_real_series(text)


# ---------------------------------------------------------------------------
# commands

def cmd_analyze(cfg: RunConfig, args) -> int:
    _no_csv(cfg)
    if cfg.real:
        p = _real_payload(_series(args))
        _emit(_envelope(cfg, "real", p), cfg.format, _real_text(p))
        return 0
    F = _components(cfg, args)
    charts = _load_charts(args.charts) if args.charts else None
    report = assemble_report(F, _point(cfg, args), charts=charts, seed=cfg.seed)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit(_envelope(cfg, "report", report.to_dict()), cfg.format, report.render_text(include_warnings=False))
    return 0


def cmd_newton(cfg: RunConfig, args) -> int:
    _no_csv(cfg)
    if cfg.real:
        p = _real_payload(_series(args))
        _emit(_envelope(cfg, "real", p), cfg.format, _real_text(p))
        return 0
    (f,) = _components(cfg, args) if not args.map else (None,)
    if f is None:
        raise InputError("newton takes a single --poly")
    if args.at is not None:
        f = recenter([f], _point(cfg, args))[0]
    if f.is_zero() or not f.vanishes_at_origin():
        raise InputError("f must vanish at the base point and be nonzero there")
    N = newton_polyhedron(f)
    data = polyhedron_to_dict(N)
    diag = []
    for j in range(1, N.n + 1):
        for tau in cfg.taus:
            D = diagonal_intersection(N, tau, j)
            diag.append({"j": j, "tau": tau, "d": frac_str(D.d), "Q": [frac_str(q) for q in D.Q],
                         "compact_face_count": D.compact_face_count,
                         "minimal_face_codim": D.minimal_face_codim})
    data["diagonal"] = diag
    lines = [f"f = {format_poly(f)}", "vertices: " + ", ".join(str(tuple(v)) for v in N.vertices)]
    for fc in data["facets"]:
        lines.append(f"facet <({', '.join(str(Fraction(c)) for c in fc['normal'])}), x> >= 1"
                     + ("  [compact]" if fc["compact"] else ""))
    for d in diag:
        q = ", ".join(str(Fraction(x)) for x in d["Q"])
        lines.append(f"j={d['j']} tau={d['tau']}: d = {Fraction(d['d'])}, Q = ({q}), "
                     f"faces = {d['compact_face_count']}, codim = {d['minimal_face_codim']}")
    _emit(_envelope(cfg, "polyhedron", data), cfg.format, "\n".join(lines))
    return 0


def cmd_charts(cfg: RunConfig, args) -> int:
    _no_csv(cfg)
    path = args.file or args.charts
    if not path:
        raise InputError("charts needs a chart file")
    charts = _load_charts(path)
    out = []
    lines = []
    for tau in cfg.taus:
        beta, alpha = cse_from_charts(charts, tau)
        law_r, law_w = chart_asymptotic(charts, tau)
        out.append({"tau": tau, "beta": frac_str(beta), "alpha": alpha,
                    "poles": [[[frac_str(p), m] for p, m in h_poles(c, tau)] for c in charts.charts],
                    "law_r": law_r.to_dict(), "law_imw": law_w.to_dict()})
        lines.append(f"tau={tau}: beta = {beta}, alpha = {alpha}")
        lines.append("  " + law_r.render("I(s)"))
        lines.append("  " + law_w.render("I(Im w)"))
    _emit(_envelope(cfg, "charts", {"charts": json.loads(charts.to_json()), "results": out}),
          cfg.format, "\n".join(lines))
    return 0


def cmd_recenter(cfg: RunConfig, args) -> int:
    _no_csv(cfg)
    F = _components(cfg, args)
    z0 = _point(cfg, args)
    if z0 is None:
        raise InputError("recenter needs --at")
    G = recenter(F, z0)
    comps = [format_poly(g) for g in G]
    _emit(_envelope(cfg, "components", comps), cfg.format, "\n".join(comps))
    return 0


def _verify_table(rows, cfg):
    if cfg.format == "text":
        out = [f"{'quantity':<16}{'target':>12}{'fitted':>14}{'tolerance':>12}  result"]
        for r in rows:
            out.append(f"{r['quantity']:<16}{r['target']:>12}{r['fitted']:>14}{r['tolerance']:>12}  "
                       + ("pass" if r["pass"] else "FAIL"))
        return "\n".join(out)
    return None


def _verify_real(cfg: RunConfig, args) -> int:
    rho = _series(args)
    chk = kernel_bound_check(rho)
    rows = [{"quantity": "kernel_power", "target": str(chk.target.power),
             "fitted": f"{chk.fit.p:.4f}", "tolerance": f"{chk.tolerance:g}",
             "pass": abs(chk.fit.p - float(chk.target.power)) <= chk.tolerance}]
    rows += [{"quantity": f"vol_bound_c={c:.3g}", "target": "bounded", "fitted": "ok" if ok else "grows",
              "tolerance": "-", "pass": ok} for c, ok in chk.bound_checks]
    rows.append({"quantity": "K_ge_1/Vol", "target": "true",
                 "fitted": str(chk.extra["kernel_ge_inverse_volume"]).lower(), "tolerance": "-",
                 "pass": chk.extra["kernel_ge_inverse_volume"]})
    ok = all(r["pass"] for r in rows)
    if cfg.format == "csv":
        print("t,kernel,volume")
        for t, k, v in zip(chk.t_grid, chk.kernel, chk.volumes):
            print(f"{t!r},{k!r},{v!r}")
    else:
        _emit(_envelope(cfg, "verify", {"rows": rows, "check": chk.to_dict(), "passed": ok}),
              cfg.format, _verify_table(rows, cfg))
    return 0 if ok else EXIT_VERIFY


def cmd_verify(cfg: RunConfig, args) -> int:
    if cfg.real:
        return _verify_real(cfg, args)
    if args.report:
        blob = json.loads(_read(args.report))
        rep_d = blob.get("report", blob)
        try:
            report = SingularityReport.from_dict(rep_d)
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"{args.report}: not a report ({e})") from None
        F = [parse_poly(c, report.n) for c in report.components]
        z0 = None
    else:
        F = _components(cfg, args)
        z0 = _point(cfg, args)
        charts = _load_charts(args.charts) if args.charts else None
        report = assemble_report(F, z0, charts=charts, seed=cfg.seed)
        F = [parse_poly(c, report.n) for c in report.components]
    n = report.n
    grid = default_grid(cfg.rmin, cfg.rmax, cfg.rsteps)
    est = sublevel_volumes(F, None, grid, samples=cfg.samples, seed=cfg.seed)
    target_p = 2 * report.c0
    target_q = report.m0 - 1
    rows = []
    try:
        fit = fit_asymptotics(est.radii, est.volume, est.stderr, n=n, seed=cfg.seed)
    except (UnderResolvedError, IllConditionedGridError) as e:
        print(f"error: {e}", file=sys.stderr)
        fit = None
    if fit is None:
        rows.append({"quantity": "volume_fit", "target": "-", "fitted": "unresolved",
                     "tolerance": "-", "pass": False})
    else:
        rows.append({"quantity": "volume_power", "target": str(target_p), "fitted": f"{fit.p:.4f}",
                     "tolerance": f"{cfg.tol_power:g} rel",
                     "pass": abs(fit.p - float(target_p)) <= cfg.tol_power * float(target_p)})
        rows.append({"quantity": "volume_logpow", "target": str(target_q), "fitted": str(fit.q),
                     "tolerance": "exact", "pass": fit.q == target_q})
    consistent = (report.volume_law.power == target_p and report.volume_law.logpow == target_q)
    rows.append({"quantity": "report_consistent", "target": "true", "fitted": str(consistent).lower(),
                 "tolerance": "-", "pass": consistent})
    ok = all(r["pass"] for r in rows)
    if cfg.format == "csv":
        sys.stdout.write(est.to_csv())
    else:
        payload = {"rows": rows, "passed": ok, "volumes": est.to_dict(),
                   "fit": None if fit is None else fit.to_dict()}
        _emit(_envelope(cfg, "verify", payload), cfg.format, _verify_table(rows, cfg))
    if not ok:
        print("verify: comparison failed", file=sys.stderr)
    return 0 if ok else EXIT_VERIFY


COMMANDS = {"analyze": cmd_analyze, "newton": cmd_newton, "charts": cmd_charts,
            "verify": cmd_verify, "recenter": cmd_recenter}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--poly", help="polynomial in z1..zn, e.g. 'z1^4 + z1^2*z2'")
    common.add_argument("--map", help="components separated by ';'")
    common.add_argument("--charts", help="JSON chart file")
    common.add_argument("--series", help="real series rho(x, y) for --real")
    common.add_argument("-n", type=int, help="number of variables (default: largest z index)")
    common.add_argument("--at", help="base point, comma separated, e.g. '1, 1/2+i'")
    common.add_argument("--tau", default="0,1,2", help="comma separated weights (default 0,1,2)")
    common.add_argument("--samples", type=int, default=10**6)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--rmin", type=float, default=2.0**-14)
    common.add_argument("--rmax", type=float, default=2.0**-4)
    common.add_argument("--rsteps", type=int, default=11)
    common.add_argument("--tol-power", type=float, default=0.05, help="relative tolerance on powers")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--real", action="store_true", help="treat input as a real series in x, y")

    p = argparse.ArgumentParser(prog="cse-kit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cse-kit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="exponents and boundary laws")
    sub.add_parser("newton", parents=[common], help="Newton polyhedron and diagonal data")
    ch = sub.add_parser("charts", parents=[common], help="exponents from resolution chart data")
    ch.add_argument("file", nargs="?")
    v = sub.add_parser("verify", parents=[common], help="Monte Carlo check of a report")
    v.add_argument("--report", help="report JSON written by analyze")
    sub.add_parser("recenter", parents=[common], help="expand F(z0 + z) - F(z0)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for k in ("file", "report"):
        if not hasattr(args, k):
            setattr(args, k, None)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](cfg, args)
    except NeedsChartsError as e:
        print(f"error: {e}; supply --charts", file=sys.stderr)
        return EXIT_CHARTS
    except (InputError, ParseError, ZeroPolynomialError, ChartError, UnsupportedDimensionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
