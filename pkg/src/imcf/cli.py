"""
Command-line front end: profile checks, simulation runs, decay fits, plots.

Subcommands
-----------
check-profile   build a profile and print/serialize its admissibility report
                (exit 0 when the sign hypotheses pass, 2 when they fail,
                1 on construction failure)
simulate        integrate the flow and write series.csv plus a JSON manifest
                (exit 0 ok, 1 config error, 3 mean-convexity loss,
                4 domain exit before t_end)
fit-decay       least-squares decay fits of a series column (both models)
plot            SVG line charts of series columns with optional round-solution
                envelope overlays

Configuration is a flat key=value file with [profile], [flow] and [output]
sections; every key can be overridden by the CLI flag of the same name.
Floating-point output uses 17 significant digits so a manifest plus config
reproduces series.csv bit-identically on the same build.  The environment
variable IMCF_OUT_DIR sets the default output root.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import itertools
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from . import __version__
from .diagnostics import SERIES_FIELDS, fit_decay, series_from_run
from .errors import DomainExit, FitUndefined, ProfileError
from .flow import FlowConfig, run
from .geometry import barrier
from .profiles import (
    DEFAULT_LAMBDA_GRID,
    ProfileSpec,
    build_profile,
    check_assumptions,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ASSUMPTION_FAIL = 2
EXIT_MEAN_CONVEXITY = 3
EXIT_DOMAIN = 4
EXIT_FIT = 5

_PROFILE_KEYS = {
    "family": str,
    "r0": float,
    "r_max": float,
    "k": float,
    "kappa": float,
    "m": float,
    "q": float,
    "a": float,
    "omega": float,
    "delta0": float,
    "theta0": float,
    "horizon_margin": float,
    "path": str,
}
_FLOW_KEYS = {
    "n": int,
    "grid_n": int,
    "c_cfl": float,
    "t_end": float,
    "output_every": float,
    "h_floor": float,
    "domain_margin": float,
    "initial": str,
}
_OUTPUT_KEYS = {"out_dir": str}
_SECTION_OF = (
    {k: "profile" for k in _PROFILE_KEYS}
    | {k: "flow" for k in _FLOW_KEYS}
    | {k: "output" for k in _OUTPUT_KEYS}
)

_FLOW_DEFAULTS = {
    "n": 2,
    "grid_n": 256,
    "c_cfl": 0.2,
    "t_end": 2.0,
    "output_every": 0.05,
    "h_floor": 1e-10,
    "domain_margin": 0.0,
    "initial": "round(1.0)",
}


class ConfigError(ValueError):
    pass


def _coerce(section: str, key: str, value):
    table = {"profile": _PROFILE_KEYS, "flow": _FLOW_KEYS, "output": _OUTPUT_KEYS}[section]
    if key not in table:
        raise ConfigError(f"unknown key {key!r} in section [{section}]")
    if value is None or isinstance(value, table[key]):
        return value
    try:
        return table[key](value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {value!r}") from exc


def load_config_file(path: str) -> dict:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    out = {"profile": {}, "flow": {}, "output": {}}
    for section in cp.sections():
        if section not in out:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in cp[section].items():
            out[section][key] = _coerce(section, key, value)
    return out


def merge_options(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit CLI flags."""
    merged = {"profile": {}, "flow": dict(_FLOW_DEFAULTS), "output": {}}
    if getattr(args, "config", None):
        fileconf = load_config_file(args.config)
        for section, items in fileconf.items():
            merged[section].update(items)
    for key, section in _SECTION_OF.items():
        value = getattr(args, key, None)
        if value is not None:
            merged[section][key] = _coerce(section, key, value)
    return merged


def spec_from_options(merged: dict) -> ProfileSpec:
    opts = dict(merged["profile"])
    family = opts.pop("family", None)
    if not family:
        raise ConfigError("no profile family given")
    if "r0" not in opts and family != "tabulated":
        opts["r0"] = 0.5 if family in ("euclidean", "hyperbolic") else 0.0
    if "r_max" not in opts and family != "tabulated":
        opts["r_max"] = 20.0
    opts["n"] = merged["flow"].get("n", 2)
    try:
        return ProfileSpec(family=family, **opts)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def flow_from_options(merged: dict) -> FlowConfig:
    return FlowConfig(**merged["flow"])


def resolve_out_dir(merged: dict) -> Path:
    out = merged["output"].get("out_dir") or os.environ.get("IMCF_OUT_DIR") or "imcf_out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def write_series_csv(path: Path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SERIES_FIELDS)
        for rec in records:
            writer.writerow([_fmt(x) for x in rec.as_row()])


def read_csv_columns(path: str) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames:
            raise ConfigError(f"{path} has no header")
        rows = list(reader)
    if not rows:
        raise ConfigError(f"{path} has no data rows")
    return {
        name: np.array([float(row[name]) for row in rows])
        for name in reader.fieldnames
    }


# ---------------------------------------------------------------------------
# check-profile


def _print_report(spec: ProfileSpec, report) -> None:
    print(f"profile: {spec.family}  r=[{spec.r0}, {spec.r_max}]")
    lo, hi = report.sample_grid[0], report.sample_grid[-1]
    print(f"samples: {report.sample_grid.size} log-spaced in r=[{lo:.6g}, {hi:.6g}]")
    verdict = "PASS" if report.a_pass else f"FAIL (first violation at r={report.a_first_violation_r:.6g})"
    print(f"assumption A  (theta'' >= 0 and theta' > 0): {verdict}")
    print(f"const B1      sup theta''theta/theta'^2 = {report.const_b1:.9g}")
    flag = "  [ratio degenerate somewhere: theta''=0]" if report.b2_indeterminate else ""
    print(f"const B2      sup |theta'''/theta'|theta/theta'' = {report.const_b2:.9g}{flag}")
    print(f"sup |theta_bar| = {report.sup_theta_bar:.9g}   sup theta'/theta = {report.sup_slope:.9g}")
    if report.lambda_best is None:
        print(f"assumption C  no lambda in the grid passes (cap {report.cap:g})")
    else:
        print(f"assumption C  holds up to lambda = {report.lambda_best:g} (cap {report.cap:g})")
    for row in report.lambda_rows:
        status = "pass" if row["pass"] else "fail"
        print(
            f"  lambda={row['lambda']:<5g} sup|tb|th^l/th1^2 = {row['sup_tb']:<12.6g}"
            f" sup|tb'|th^(1+l)/th1^3 = {row['sup_tb1']:<12.6g} {status}"
        )


def cmd_check_profile(args: argparse.Namespace) -> int:
    try:
        merged = merge_options(args)
        spec = spec_from_options(merged)
        profile = build_profile(spec)
    except (ConfigError, ProfileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    lam = DEFAULT_LAMBDA_GRID
    if args.lambda_grid:
        lam = tuple(float(x) for x in args.lambda_grid.split(","))
    report = check_assumptions(profile, lambda_grid=lam, cap=args.cap)
    _print_report(spec, report)
    if args.json_out:
        Path(args.json_out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
        print(f"report written to {args.json_out}")
    return EXIT_OK if report.a_pass else EXIT_ASSUMPTION_FAIL


# ---------------------------------------------------------------------------
# simulate


def _execute_run(merged: dict, out_dir: Path, command: str) -> int:
    manifest_path = out_dir / "run_manifest.json"
    series_path = out_dir / "series.csv"
    manifest = {
        "artifact": {"name": "imcf", "version": __version__},
        "command": command,
        "config": merged,
        "start_time": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "end_time": None,
        "termination_reason": None,
        "events": [],
        "outputs": {"series": str(series_path), "manifest": str(manifest_path)},
    }
    code = EXIT_OK
    try:
        spec = spec_from_options(merged)
        profile = build_profile(spec)
        config = flow_from_options(merged)
        result = run(config, profile)
        grid_n = config.grid_n
        from .surface import SphereGrid  # local to avoid an import cycle at module load

        records = series_from_run(SphereGrid(config.n, grid_n), profile, result)
        write_series_csv(series_path, records)
        manifest["termination_reason"] = result.termination_reason
        manifest["events"] = result.events
        for event in result.events:
            print(f"[event] t={event['t']:.6g} {event['kind']}: {event['detail']}", file=sys.stderr)
        if result.termination_reason == "mean_convexity_lost":
            code = EXIT_MEAN_CONVEXITY
        elif result.termination_reason == "domain_exit":
            code = EXIT_DOMAIN
    except (ConfigError, ProfileError, ValueError, TypeError) as exc:
        manifest["termination_reason"] = f"config_error: {exc}"
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_CONFIG
    finally:
        manifest["end_time"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, default=str)
    return code


def _parse_sweep(specs: list[str]) -> list[tuple[str, list[str]]]:
    axes = []
    for item in specs:
        if "=" not in item:
            raise ConfigError(f"bad sweep spec {item!r}, expected KEY=V1,V2,...")
        key, values = item.split("=", 1)
        key = key.strip()
        if key not in _SECTION_OF:
            raise ConfigError(f"unknown sweep key {key!r}")
        vals = [v.strip() for v in values.split(",") if v.strip()]
        if not vals:
            raise ConfigError(f"sweep {key} has no values")
        axes.append((key, vals))
    return axes


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        merged = merge_options(args)
        out_root = resolve_out_dir(merged)
        axes = _parse_sweep(args.sweep or [])
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    command = "simulate " + " ".join(sys.argv[2:]) if sys.argv[1:2] == ["simulate"] else "simulate"
    if not axes:
        return _execute_run(merged, out_root, command)

    combos = list(itertools.product(*(vals for _, vals in axes)))
    jobs = []
    for i, combo in enumerate(combos):
        sub = {sec: dict(items) for sec, items in merged.items()}
        tags = []
        try:
            for (key, _), value in zip(axes, combo):
                sub[_SECTION_OF[key]][key] = _coerce(_SECTION_OF[key], key, value)
                tags.append(f"{key}={value}")
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        sub_dir = out_root / f"sweep_{i:03d}_{'_'.join(tags)}"
        sub_dir.mkdir(parents=True, exist_ok=True)
        jobs.append((sub, sub_dir))
    with ThreadPoolExecutor(max_workers=min(len(jobs), os.cpu_count() or 1)) as pool:
        codes = list(pool.map(lambda job: _execute_run(job[0], job[1], command), jobs))
    return max(codes)


# ---------------------------------------------------------------------------
# fit-decay


def cmd_fit_decay(args: argparse.Namespace) -> int:
    try:
        cols = read_csv_columns(args.series)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if "t" not in cols or args.column not in cols:
        print(f"error: series needs columns 't' and {args.column!r}", file=sys.stderr)
        return EXIT_CONFIG
    records = [
        SimpleNamespace(t=float(t), **{args.column: float(q)})
        for t, q in zip(cols["t"], cols[args.column])
    ]
    window = None
    if args.t1 is not None and args.t2 is not None:
        window = (args.t1, args.t2)
    payload = {"column": args.column, "series": args.series}
    errors = 0
    for model in ("pure_exp", "exp_log"):
        try:
            fit = fit_decay(records, args.column, window=window, model=model)
            payload[model] = {
                "a": fit.a,
                "b": fit.b,
                "c": fit.c,
                "window": list(fit.window),
                "rms": fit.rms,
                "npoints": fit.npoints,
            }
        except FitUndefined as exc:
            payload[model] = {"error": str(exc)}
            errors += 1
    text = json.dumps(payload, indent=2)
    if args.json_out:
        Path(args.json_out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.json_out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_FIT if errors == 2 else EXIT_OK


# ---------------------------------------------------------------------------
# plot


def cmd_plot(args: argparse.Namespace) -> int:
    try:
        cols = read_csv_columns(args.series)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    names = [c.strip() for c in args.columns.split(",") if c.strip()]
    missing = [c for c in names if c not in cols]
    if "t" not in cols or missing:
        print(f"error: missing columns {missing or ['t']}", file=sys.stderr)
        return EXIT_CONFIG

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t = cols["t"]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for name in names:
        q = cols[name]
        mask = q > 0.0
        if not np.any(mask):
            continue
        ax.plot(t[mask], q[mask], label=name)

    overlay_err = None
    if getattr(args, "family", None):
        try:
            merged = merge_options(args)
            profile = build_profile(spec_from_options(merged))
            n = merged["flow"].get("n", 2)
            for r_ref, label in ((cols["min_u"][0], "envelope(min u0)"),
                                 (cols["max_u"][0], "envelope(max u0)")):
                vals = []
                for tk in t:
                    try:
                        vals.append(barrier(profile, float(r_ref), float(tk), n))
                    except DomainExit:
                        vals.append(np.nan)
                ax.plot(t, vals, "--", linewidth=1.0, label=label)
        except (ConfigError, ProfileError, KeyError) as exc:
            overlay_err = str(exc)

    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="svg")
    plt.close(fig)
    print(f"plot written to {out}")
    if overlay_err:
        print(f"warning: no envelope overlay ({overlay_err})", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_profile_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file with [profile]/[flow]/[output] sections")
    p.add_argument("--family", choices=("euclidean", "hyperbolic", "ds_schwarzschild",
                                        "reissner_nordstrom", "oscillator", "tabulated"))
    p.add_argument("--r0", type=float)
    p.add_argument("--r-max", dest="r_max", type=float)
    p.add_argument("--k", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--delta0", type=float)
    p.add_argument("--theta0", type=float)
    p.add_argument("--horizon-margin", dest="horizon_margin", type=float)
    p.add_argument("--path", help="CSV table r,theta,theta1,theta2,theta3 (tabulated family)")


def _add_flow_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int)
    p.add_argument("--grid-n", dest="grid_n", type=int)
    p.add_argument("--c-cfl", dest="c_cfl", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--output-every", dest="output_every", type=float)
    p.add_argument("--h-floor", dest="h_floor", type=float)
    p.add_argument("--domain-margin", dest="domain_margin", type=float)
    p.add_argument("--initial", help="round(r0) | legendre(r0,eps,l) | offcenter_hyp(rho,d) | from_csv(path)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imcf", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check-profile", help="admissibility report for a profile")
    _add_profile_flags(p_check)
    p_check.add_argument("--n", type=int)
    p_check.add_argument("--lambda-grid", dest="lambda_grid",
                         help="comma-separated pinching rates to test")
    p_check.add_argument("--cap", type=float, default=1e4)
    p_check.add_argument("--json-out", dest="json_out")

    p_sim = sub.add_parser("simulate", help="run the flow, write series.csv + manifest")
    _add_profile_flags(p_sim)
    _add_flow_flags(p_sim)
    p_sim.add_argument("--out-dir", dest="out_dir")
    p_sim.add_argument("--sweep", action="append",
                       help="KEY=V1,V2,... fan out runs over values (repeatable)")

    p_fit = sub.add_parser("fit-decay", help="decay-rate fits of a series column")
    p_fit.add_argument("--series", required=True)
    p_fit.add_argument("--column", required=True)
    p_fit.add_argument("--t1", type=float)
    p_fit.add_argument("--t2", type=float)
    p_fit.add_argument("--json-out", dest="json_out")

    p_plot = sub.add_parser("plot", help="SVG chart of series columns (log y)")
    p_plot.add_argument("--series", required=True)
    p_plot.add_argument("--columns", default="min_u,max_u")
    p_plot.add_argument("--out", default="plot.svg")
    _add_profile_flags(p_plot)
    p_plot.add_argument("--n", type=int)

    return parser


_COMMANDS = {
    "check-profile": cmd_check_profile,
    "simulate": cmd_simulate,
    "fit-decay": cmd_fit_decay,
    "plot": cmd_plot,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
