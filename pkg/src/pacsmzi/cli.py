"""Command-line front end: figure data, single-point evaluation, self-verification.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 truncation or numeric failure.
"""

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, analytic, fock, verify, wigner
from .core import DEFAULT_NMAX, DEFAULT_STEP, InputConfig, TruncationError
from .sweep import Axis, SweepSpec, find_landmarks, landmarks_for, run_sweep, worker_count

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
FIGURES = ("fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig3", "fig4")
ROW_FIELDS = ("mean_nd", "var_nd", "slope", "delta_phi", "n_total", "s_sql")
TOLERANCES = {"finite_difference_step": DEFAULT_STEP, "root_xtol": 1e-6,
              "negativity_tol": wigner.NEGATIVITY_TOL, "slope_floor": 1e-12}


class UsageError(ValueError):
    pass


def fmt(value):
    """Locale-independent fixed formatting; non-finite values become empty fields."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    value = float(value)
    if not math.isfinite(value):
        return ""
    return format(value, ".12g")


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_json(path, obj):
    write_text(path, json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def write_table(path, header, rows, fmt_name="csv"):
    if fmt_name == "json":
        write_json(path, [dict(zip(header, r)) for r in rows])
        return
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in r) for r in rows]
    write_text(path, "\n".join(lines) + "\n")


def write_matrix(path, matrix):
    lines = [",".join(fmt(v) for v in row) for row in np.asarray(matrix)]
    write_text(path, "\n".join(lines) + "\n")


def _sweep_rows(result, extra):
    for coords, row in zip(result.coords, result.rows):
        yield list(extra) + list(coords) + [getattr(row, f) for f in ROW_FIELDS] + [row.status, row.path]


class FigureWriter:
    def __init__(self, out_dir, fmt_name):
        self.out_dir = out_dir
        self.fmt = fmt_name
        self.files = []
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name):
        self.files.append(name)
        return os.path.join(self.out_dir, name)

    def table(self, stem, header, rows):
        write_table(self.path(f"{stem}.{self.fmt}"), header, rows, self.fmt)

    def json(self, name, obj):
        write_json(self.path(name), obj)

    def matrix(self, stem, matrix, axes):
        if self.fmt == "json":
            self.json(f"{stem}.json", {"axes": {k: list(v) for k, v in axes.items()},
                                       "values": np.asarray(matrix).tolist()})
            return
        write_matrix(self.path(f"{stem}.csv"), matrix)
        for name, values in axes.items():
            write_matrix(self.path(f"{stem}_{name}.csv"), np.asarray(values)[:, None])


def _curve_figure(writer, stem, series, axis, template_for, phi, path="auto", n_max=DEFAULT_NMAX,
                  landmarks=False):
    header = [series[0]] + [axis.name] + list(ROW_FIELDS) + ["status", "path"]
    rows, marks = [], {}
    for value in series[1]:
        spec = SweepSpec([axis], template_for(value), phi=phi, path=path, n_max=n_max)
        result = run_sweep(spec)
        rows.extend(_sweep_rows(result, [value]))
        if landmarks:
            marks[str(value)] = landmarks_for(result).as_dict()
    writer.table(stem, header, rows)
    if landmarks:
        writer.json(f"{stem}_landmarks.json", marks)
    return {"series": {series[0]: list(series[1])}, "axis": vars(axis), "phi": phi}


def _grid_figure(writer, stem, axes, template, phi, n_max):
    spec = SweepSpec(axes, template, phi=phi, n_max=n_max)
    result = run_sweep(spec)
    shape = (axes[0].points, axes[1].points)
    s = np.array([r.s_sql if r.status == "ok" else math.nan for r in result.rows]).reshape(shape)
    writer.matrix(f"{stem}_s_sql", s, {axes[0].name: axes[0].values, axes[1].name: axes[1].values})
    return {"axes": [vars(a) for a in axes], "phi": phi,
            "rows": axes[0].name, "columns": axes[1].name,
            "region_below_sql": bool(np.nanmin(s) < 1)}


def _fig4(writer, args):
    res = args.grid or 128
    ab = 1.5 if args.alpha_b is None else args.alpha_b
    m1 = InputConfig(1.17 if args.alpha_a is None else args.alpha_a, ab, 1)
    m4 = InputConfig(0.819 if args.alpha_a is None else args.alpha_a, ab, 4 if args.m is None else args.m)
    phases = {"b": 0.0, "c": 5.03, "e": 0.0, "f": 3.77}
    if args.phi is not None:
        phases = dict.fromkeys(phases, args.phi)
    panels = {
        "a": ("input", m1, None), "b": ("output", m1, phases["b"]), "c": ("output", m1, phases["c"]),
        "d": ("input", m4, None), "e": ("output", m4, phases["e"]), "f": ("output", m4, phases["f"]),
        "f_caption": ("output", m1, phases["f"]),
    }
    spec = wigner.GridSpec(res)
    reports, meta = {}, {}
    for name, (kind, cfg, phi) in panels.items():
        if kind == "input":
            grid = wigner.wigner_of_state(fock.pacs_state(cfg.alpha_b, cfg.m, args.nmax).density(), spec)
            rep = wigner.negativity(grid)
        else:
            grid, rep = wigner.output_mode_wigner(cfg, phi, "f", spec, args.nmax)
        writer.matrix(f"fig4{name}_wigner", grid.values, {"x": grid.x, "p": grid.p})
        reports[name] = dict(rep.as_dict(), integral=grid.integral())
        meta[name] = {"kind": kind, "alpha_a": cfg.alpha_a.real, "alpha_b": cfg.alpha_b.real,
                      "m": cfg.m, "phi": phi, "mode": "b" if kind == "input" else "f"}
    writer.json("fig4_negativity.json", reports)
    return {"panels": meta, "note": "panel f uses m=4; f_caption is the same phase at m=1"}


def cmd_figure(args):
    fig = args.id
    if fig != "fig4" and args.grid is not None and fig not in ("fig2a", "fig2b"):
        raise UsageError("--grid applies only to fig2a, fig2b and fig4")
    if args.vacuum_a and fig in ("fig2a", "fig2b", "fig2c", "fig3"):
        raise UsageError(f"{fig} needs a coherent mode a")
    writer = FigureWriter(args.out, args.format)
    n_max = args.nmax
    pts = args.points or 400
    aa = 1.5 if args.alpha_a is None else args.alpha_a
    phi0 = 0.0 if args.phi is None else args.phi
    if fig == "fig1b":
        alphas = [args.alpha_b] if args.alpha_b is not None else [0.1, 1.5]
        m = 1 if args.m is None else args.m
        params = _curve_figure(writer, fig, ("alpha_b", alphas), Axis("phi", 0.0, math.pi, pts),
                               lambda ab: InputConfig.vacuum_pacs(ab, m), 0.0, n_max=n_max)
    elif fig == "fig1c":
        ab = 1.5 if args.alpha_b is None else args.alpha_b
        ms = [args.m] if args.m is not None else [1, 2, 3, 4, 5]
        params = _curve_figure(writer, fig, ("m", ms), Axis("phi", 0.0, math.pi, pts),
                               lambda m: InputConfig.vacuum_pacs(ab, m), 0.0, n_max=n_max)
    elif fig == "fig2a":
        g = args.grid or 101
        params = _grid_figure(writer, fig, [Axis("abs2_a", 0.0, 8.0, g), Axis("abs2_b", 0.0, 8.0, g)],
                              InputConfig(1.0, 1.0, 1 if args.m is None else args.m), phi0, n_max)
    elif fig == "fig2b":
        g = args.grid or 101
        params = _grid_figure(writer, fig, [Axis("n_total", aa**2 + 1.0, 10.0, g), Axis("phi", 0.0, math.pi, g)],
                              InputConfig(aa, 0.0, 1 if args.m is None else args.m), 0.0, n_max)
    elif fig == "fig2c":
        m = 1 if args.m is None else args.m
        params = _curve_figure(writer, fig, ("m", [m]), Axis("n_total", aa**2 + m, 10.0, pts),
                               lambda m_: InputConfig(aa, 0.0, m_), phi0, n_max=n_max, landmarks=True)
    elif fig == "fig3":
        ms = [args.m] if args.m is not None else [0, 1, 2, 3, 4]
        rows_axis = Axis("n_total", aa**2, 10.0, pts)
        header = ["m", "n_total"] + list(ROW_FIELDS) + ["status", "path"]
        rows, marks = [], {}
        for m in ms:
            result = run_sweep(SweepSpec([rows_axis], InputConfig(aa, 0.0, m), phi=phi0, n_max=n_max))
            rows.extend(_sweep_rows(result, [m]))
            marks[str(m)] = landmarks_for(result).as_dict()
        writer.table(fig, header, rows)
        writer.json("fig3_landmarks.json", marks)
        params = {"series": {"m": ms}, "axis": vars(rows_axis), "phi": phi0}
    else:
        params = _fig4(writer, args)
    return writer, params


def _config_from_args(args):
    m = 1 if args.m is None else args.m
    ab = 0.0 if args.alpha_b is None else args.alpha_b
    if args.vacuum_a:
        if args.alpha_a not in (None, 0.0):
            raise UsageError("--vacuum-a conflicts with a nonzero --alpha-a")
        return InputConfig.vacuum_pacs(ab, m)
    return InputConfig(0.0 if args.alpha_a is None else args.alpha_a, ab, m)


def cmd_point(args):
    cfg = _config_from_args(args)
    phi = 0.0 if args.phi is None else args.phi
    out = {"config": {"alpha_a": cfg.alpha_a, "alpha_b": cfg.alpha_b, "m": cfg.m,
                      "mode_a": cfg.mode_a}, "phi": phi}
    try:
        an = analytic.analytic_moments(cfg, phi)
        out["analytic"] = an.as_dict()
    except analytic.NoClosedForm as exc:
        an = None
        out["analytic"] = {"status": "unavailable", "reason": str(exc)}
    orc = fock.delta_phi_numeric(cfg, phi, n_max=args.nmax)
    out["oracle"] = orc.as_dict()
    if an is not None:
        out["delta"] = {f: getattr(an, f) - getattr(orc, f) for f in ROW_FIELDS
                        if math.isfinite(getattr(an, f)) and math.isfinite(getattr(orc, f))}
    return out


def cmd_verify(args):
    os.makedirs(args.out, exist_ok=True)
    checks = verify.run_checks(args.nmax, args.paper_verbatim_variance)
    report = {"version": __version__, "n_max": args.nmax,
              "paper_verbatim_variance": args.paper_verbatim_variance,
              "passed": all(c.passed for c in checks), "checks": [c.as_dict() for c in checks]}
    write_json(os.path.join(args.out, "verify_report.json"), report)
    write_text(os.path.join(args.out, "DISCREPANCIES.md"),
               verify.render_discrepancies(verify.discrepancy_records()))
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}")
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print(f"verification failed: first failure is {failed[0]}", file=sys.stderr)
        return EXIT_VERIFY
    print("PASS")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="pacsmzi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def point_flags(p):
        p.add_argument("--alpha-a", type=float)
        p.add_argument("--alpha-b", type=float)
        p.add_argument("--m", type=int)
        p.add_argument("--phi", type=float)
        p.add_argument("--vacuum-a", action="store_true")
        p.add_argument("--nmax", type=int, default=DEFAULT_NMAX)

    fig = sub.add_parser("figure", help="emit figure data")
    fig.add_argument("id", choices=FIGURES)
    point_flags(fig)
    fig.add_argument("--grid", type=int, help="grid points per axis (density and Wigner figures)")
    fig.add_argument("--points", type=int, help="samples along curve axes")
    fig.add_argument("--out", default="out")
    fig.add_argument("--format", choices=("csv", "json"), default="csv")

    pt = sub.add_parser("point", help="evaluate one parameter point on both paths")
    point_flags(pt)

    ver = sub.add_parser("verify", help="run the self-check suite")
    ver.add_argument("--nmax", type=int, default=DEFAULT_NMAX)
    ver.add_argument("--out", default=".")
    ver.add_argument("--paper-verbatim-variance", action="store_true",
                     help="use the published PACS variance form (expected to fail)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        worker_count()
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "point":
            print(json.dumps(_jsonable(cmd_point(args)), indent=2, sort_keys=True))
            return EXIT_OK
        writer, params = cmd_figure(args)
        manifest = {
            "command": f"figure {args.id}",
            "parameters": dict(params, n_max=args.nmax, format=args.format,
                               overrides={k: v for k, v in vars(args).items()
                                          if k in ("alpha_a", "alpha_b", "m", "phi", "grid", "points")
                                          and v is not None}),
            "version": __version__,
            "tolerances": TOLERANCES,
            "outputs": sorted(writer.files),
            "duration_seconds": round(time.perf_counter() - started, 3),
        }
        write_json(os.path.join(args.out, "manifest.json"), manifest)
        print(f"wrote {len(writer.files)} files to {args.out}")
        return EXIT_OK
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pacsmzi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TruncationError as exc:
        print(f"pacsmzi: truncation failure: {exc}; raise --nmax", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, ArithmeticError) as exc:
        print(f"pacsmzi: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if isinstance(exc, ArithmeticError) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
