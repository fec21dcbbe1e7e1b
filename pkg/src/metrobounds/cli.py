"""Command-line front end emitting JSON or CSV data for tables and plots.

Exit codes: 0 ok, 2 usage or invalid parameter, 3 solver or optimizer failure, 4 scale limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any

import numpy as np

from . import bounds, interferometer as mz, scenarios
from .channels import NOISE_KINDS, NoiseModel, choi_from_kraus, make_noise_channel
from .errors import ConvergenceFailure, MetroError, OptimizationFailure, ScaleLimit, SolverFailure
from .geometry import cs_bound
from .reports import BoundReport

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_SCALE = 0, 2, 3, 4
SIG_DIGITS = 12
TABLE_MODELS = scenarios.FREQ_MODELS


class UsageError(Exception):
    pass


def _num(x: float) -> float | str | None:
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    # adding 0.0 folds -0.0 into 0.0
    return float(f"{x:.{SIG_DIGITS}g}") + 0.0


def _clean(obj: Any) -> Any:
    """Recursively convert to JSON-ready values with floats cut to SIG_DIGITS significant digits."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, complex):
        return {"re": _num(obj.real), "im": _num(obj.imag)}
    return obj


def to_json(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    fields = list(rows[0].keys())
    for r in rows[1:]:
        fields += [k for k in r if k not in fields]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _csv_cell(v) for k, v in r.items()})
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.{SIG_DIGITS}g}"
    return v


def _report_entry(rep: BoundReport) -> dict:
    return {"value": rep.value, "applicability": rep.applicability, "certificate": rep.certificate()}


def parse_list(text: str, cast=float) -> list:
    try:
        return [cast(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad list {text!r}") from exc


def parse_grid(text: str) -> list[float]:
    """Inclusive grid 'a:b:step'."""
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"grid must be a:b:step, got {text!r}") from exc
    if step <= 0 or b < a:
        return []
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(count)]


def _eta_values(args) -> list[float]:
    if getattr(args, "eta_grid", None):
        vals = parse_grid(args.eta_grid)
    elif getattr(args, "eta", None) is not None:
        vals = parse_list(args.eta)
    else:
        vals = [round(0.1 * i, 12) for i in range(1, 10)]
    if not vals:
        raise UsageError("empty eta grid")
    return vals


def _single_eta(args) -> float:
    vals = parse_list(args.eta) if args.eta is not None else []
    if len(vals) != 1:
        raise UsageError("--eta takes a single value here")
    return vals[0]


def _channel(model: str, eta: float, param: str, eta_b: float | None = None, point: float | None = None):
    return make_noise_channel(NoiseModel(model, eta, eta_b), param, point)


def cmd_bounds(args) -> tuple[dict, list[dict]]:
    eta = _single_eta(args)
    k = _channel(args.model, eta, args.param, args.eta_b, args.point)
    reps = bounds.all_bounds(k)
    report = {
        "command": "bounds",
        "model": args.model,
        "param": args.param,
        "point": {"eta": eta, "eta_b": args.eta_b, "phi": k.point if args.param == "phase" else None},
        "bounds": {name: _report_entry(r) for name, r in reps.items()},
    }
    rows = [{"bound": name, "value": r.value, "applicability": r.applicability} for name, r in reps.items()]
    return report, rows


def _cell(rows: dict, name: str, rep: BoundReport):
    rows[name] = rep.value
    rows[f"{name}_status"] = rep.applicability


def _table_chqfi(etas, args) -> list[dict]:
    out = []
    for model in TABLE_MODELS:
        for eta in etas:
            k = _channel(model, eta, "phase")
            row = {"model": model, "eta": eta}
            row["channel_qfi"] = bounds.channel_qfi(k).value
            row["extended_qfi"] = bounds.extended_channel_qfi(k).value
            _cell(row, "rld", bounds.rld_bound(choi_from_kraus(k)))
            out.append(row)
    return out


def _table_sql(etas, args) -> list[dict]:
    out = []
    for model in TABLE_MODELS:
        for eta in etas:
            k = _channel(model, eta, "phase")
            row = {"model": model, "eta": eta}
            ce = bounds.ce_bound(k)
            _cell(row, "ce", ce)
            _cell(row, "qs", bounds.qs_bound(k))
            c = choi_from_kraus(k)
            _cell(row, "rld", bounds.rld_bound(c))
            _cell(row, "cs", cs_bound(c))
            ch = bounds.channel_qfi(k).value
            row["chi"] = float(np.sqrt(ce.value / ch)) if ce.applicable and ch > 0 else None
            out.append(row)
    return out


def _table_freq(args) -> list[dict]:
    out = []
    for model in TABLE_MODELS:
        fs = scenarios.FrequencySetting(model, args.gamma)
        row = {"model": model, "gamma": args.gamma}
        for which in ("plain", "extended", "ce_asymptotic"):
            row[which] = scenarios.frequency_channel_qfi(fs, which).value
        for n in parse_list(args.n, int) if args.n else []:
            row[f"finite_n_{n}"] = scenarios.frequency_channel_qfi(fs, "finite_n", n).value
        row["chi"] = scenarios.frequency_enhancement(fs)
        out.append(row)
    return out


def _table_dec(etas, args) -> list[dict]:
    out = []
    for model in TABLE_MODELS:
        for eta in etas:
            r = scenarios.dec_strength_report(model, eta)
            out.append(
                {
                    "model": model,
                    "eta": eta,
                    "channel_qfi": r.channel_qfi,
                    "extended_qfi": r.extended_qfi,
                    "bound": r.bound,
                    "bound_method": r.bound_method,
                    "max_rel_dev": r.max_rel_dev,
                }
            )
    return out


def cmd_table(args) -> tuple[dict, list[dict]]:
    if args.name == "freq":
        rows = _table_freq(args)
    else:
        etas = _eta_values(args)
        rows = {"chqfi": _table_chqfi, "sql": _table_sql, "dec": _table_dec}[args.name](etas, args)
    return {"command": "table", "table": args.name, "rows": rows}, rows


def cmd_finite_n(args) -> tuple[dict, list[dict]]:
    eta = _single_eta(args)
    ns = parse_list(args.n, int) if args.n else []
    if not ns:
        raise UsageError("--n needs at least one value")
    k = _channel(args.model, eta, args.param)
    ce = bounds.ce_bound(k)
    rows = []
    for n in ns:
        rep = bounds.finite_n_ce(k, n)
        row = {"n": n, "value": rep.value, "sdp_gap": rep.sdp_gap}
        row["asymptotic_form"] = n * ce.value / (n + ce.value) if ce.applicable else None
        rows.append(row)
    report = {"command": "finite-n", "model": args.model, "param": args.param, "point": {"eta": eta}, "rows": rows}
    return report, rows


def _setting_values(args) -> tuple[float, float, list[int]]:
    if args.eta_a is None or args.eta_b is None:
        raise UsageError("--eta-a and --eta-b are required")
    ns = parse_list(args.n, int) if args.n else []
    return args.eta_a, args.eta_b, ns


def _mz_freq(ea, eb, ns) -> list[dict]:
    rows = []
    for n in ns:
        s = mz.LossSetting(ea, eb, n)
        state, value = mz.optimize_frequentist_input(s)
        rows.append(
            {
                "n": n,
                "optimal_qfi_bound": value,
                "per_photon": value / n,
                "escher_bound": mz.escher_finite_n_bound(s),
                "noon_qfi": mz.noon_qfi_lossy(s),
                "classical_qfi": n / mz.classical_coherent_crb(s),
            }
        )
    return rows


def _mz_bayes(ea, eb, ns, alpha_rows: list) -> list[dict]:
    rows = []
    for n in ns:
        s = mz.LossSetting(ea, eb, n)
        cost, state = mz.bayes_minimal_cost(s)
        tau, cl = mz.optimal_classical_split(s)
        rows.append(
            {
                "n": n,
                "minimal_cost": cost,
                "lower_bound": mz.bayes_lower_bound(s),
                "classical_cost": cl,
                "classical_tau": tau,
            }
        )
        alpha_rows.extend({"n": n, "index": i, "alpha": float(a)} for i, a in enumerate(state.alpha.real))
    return rows


def _mz_bound(ea, eb, ns) -> tuple[dict, list[dict]]:
    s1 = mz.LossSetting(ea, eb, 1)
    value, h = mz.asymptotic_loss_bound(s1)
    summary = {"asymptotic_per_photon": value, "h_opt_diag": np.diag(h).real, "classical_per_photon": 1.0 / mz.classical_coherent_crb(s1)}
    if ea == eb and ea < 1.0:
        summary["enhancement"] = mz.loss_enhancement(ea)
    rows = [{"n": n, "escher_bound": mz.escher_finite_n_bound(mz.LossSetting(ea, eb, n)), "asymptotic": value * n} for n in ns]
    return summary, rows


def cmd_mz(args) -> tuple[dict, list[dict]]:
    ea, eb, ns = _setting_values(args)
    report = {"command": "mz", "sub": args.sub, "point": {"eta_a": ea, "eta_b": eb}}
    if args.sub == "bound":
        summary, rows = _mz_bound(ea, eb, ns)
        report["summary"] = summary
    else:
        if not ns:
            raise UsageError("--n needs at least one value")
        if args.sub == "freq":
            rows = _mz_freq(ea, eb, ns)
        else:
            alpha_rows: list[dict] = []
            rows = _mz_bayes(ea, eb, ns, alpha_rows)
            if args.alpha_out:
                with open(args.alpha_out, "w", newline="") as fh:
                    fh.write(to_csv(alpha_rows))
    report["rows"] = rows
    return report, rows


def cmd_ghz(args) -> tuple[dict, list[dict]]:
    eta = _single_eta(args)
    ns = parse_list(args.n, int) if args.n else [2]
    f_ch = 1.0 / (1.0 - eta * eta)
    rows = []
    for n in ns:
        f = scenarios.ghz_depolarization_qfi(n, eta)
        rows.append({"n": n, "qfi": f, "qfi_per_particle": f / n, "ratio_to_channel": f / n / f_ch})
    chi = scenarios.ghz_enhancement(eta)
    report = {"command": "ghz", "point": {"eta": eta}, "chi": chi, "chi_precision": math.sqrt(chi), "rows": rows}
    return report, rows


def cmd_binomial(args) -> tuple[dict, list[dict]]:
    r = mz.binomial_suite(args.n, args.k, args.phi0)
    rec = dict(vars(r))
    return {"command": "binomial", "record": rec}, [rec]


def _output_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", help="emit JSON")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv", help="emit CSV")
    p.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    out = _output_parent()
    parser = argparse.ArgumentParser(prog="metrobounds", description="Precision bounds for noisy quantum metrology.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[out], help="all single-channel bounds at one point (JSON)")
    p.add_argument("--model", required=True, choices=NOISE_KINDS)
    p.add_argument("--param", default="phase", choices=("phase", "strength"))
    p.add_argument("--eta", required=True, help="noise strength (arm a transmittance for lossy_interferometer)")
    p.add_argument("--eta-b", type=float, default=None, help="arm b transmittance for lossy_interferometer")
    p.add_argument("--point", type=float, default=None, help="phase value at which to differentiate")
    p.set_defaults(func=cmd_bounds, default_fmt="json")

    p = sub.add_parser("table", parents=[out], help="regression tables over an eta grid (CSV)")
    p.add_argument("name", choices=("chqfi", "sql", "freq", "dec"))
    g = p.add_mutually_exclusive_group()
    g.add_argument("--eta", help="comma-separated eta values")
    g.add_argument("--eta-grid", help="inclusive grid a:b:step")
    p.add_argument("--gamma", type=float, default=1.0, help="decay rate for the freq table")
    p.add_argument("--n", help="comma-separated N values for finite-N columns of the freq table")
    p.set_defaults(func=cmd_table, default_fmt="csv")

    p = sub.add_parser("finite-n", parents=[out], help="finite-N channel-extension bound per particle")
    p.add_argument("--model", required=True, choices=TABLE_MODELS)
    p.add_argument("--param", default="phase", choices=("phase", "strength"))
    p.add_argument("--eta", required=True)
    p.add_argument("--n", required=True, help="comma-separated N values")
    p.set_defaults(func=cmd_finite_n, default_fmt="csv")

    p = sub.add_parser("mz", parents=[out], help="lossy Mach-Zehnder interferometer")
    p.add_argument("sub", choices=("freq", "bayes", "bound"))
    p.add_argument("--eta-a", type=float, required=True)
    p.add_argument("--eta-b", type=float, required=True)
    p.add_argument("--n", help="comma-separated photon numbers")
    p.add_argument("--alpha-out", metavar="FILE", help="bayes: write optimal input amplitudes as CSV")
    p.set_defaults(func=cmd_mz, default_fmt="csv")

    p = sub.add_parser("ghz", parents=[out], help="GHZ inputs for depolarization-strength estimation")
    p.add_argument("--eta", required=True)
    p.add_argument("--n", help="comma-separated particle numbers (default 2)")
    p.set_defaults(func=cmd_ghz, default_fmt="json")

    p = sub.add_parser("binomial", parents=[out], help="classical binomial estimation example")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--phi0", type=float, default=None, help="expansion point of the locally efficient estimator")
    p.set_defaults(func=cmd_binomial, default_fmt="json")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, rows = args.func(args)
    except (UsageError, ValueError) as exc:
        code = EXIT_SCALE if isinstance(exc, ScaleLimit) else EXIT_USAGE
        print(f"error: {exc}", file=sys.stderr)
        return code
    except (SolverFailure, ConvergenceFailure, OptimizationFailure) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except MetroError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    fmt = args.fmt or args.default_fmt
    text = to_json(report) if fmt == "json" else to_csv(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
