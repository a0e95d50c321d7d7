"""Command-line front end: Riemann solves, verification suites, front tracking.

Exit codes: 0 all checks passed, 1 validation or check failure, 2 numeric
breakdown.  Scenario files are JSON documents with a top-level
schema_version; inline flags override file values.  Reports are CSV (header
row; TSV on request), trajectories TSV, single-fan dumps JSON.
"""

import argparse
import csv
import json
import sys

import numpy as np

from .errors import ConvergenceError, DomainError, HyperbolicityError
from . import interactions as ia
from . import fronttrack as ft
from . import wavecurves as wc
from .flux import (
    ModelParams,
    check_genuine_nonlinearity,
    check_strict_hyperbolicity,
    in_unit_ball,
)
from .flux import flux as flux_fn
from .riemann import evaluate_fan, solve_riemann

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_NUMERIC = 2

VERIFY_SUITES = (
    "hyperbolicity",
    "gnl",
    "hugoniot",
    "taylor22",
    "pattern22",
    "bounds12",
    "contraction",
)

_TOP_LEVEL_KEYS = {"schema_version", "model", "riemann", "verify", "fronttrack"}
_SECTION_KEYS = {
    "model": {"eta"},
    "riemann": {"ul", "ur", "sample", "xi_min", "xi_max"},
    "verify": {"which", "a", "eps", "samples", "seed", "radius"},
    "fronttrack": {"u_left", "jumps", "delta", "t_end", "max_events"},
}


def _parse_state(value):
    if not isinstance(value, str):
        arr = np.asarray(value, dtype=float)
        if arr.shape != (3,):
            raise DomainError(f"state must have three components, got {value!r}")
        return arr
    parts = [p for p in value.replace(",", " ").split() if p]
    if len(parts) != 3:
        raise DomainError(f"expected three comma-separated components, got {value!r}")
    return np.array([float(p) for p in parts])


def load_scenario(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read scenario file {path!r}: {exc}") from exc
    if not isinstance(doc, dict):
        raise DomainError("scenario file must hold a JSON object")
    unknown = set(doc) - _TOP_LEVEL_KEYS
    if unknown:
        raise DomainError(f"unknown scenario keys: {sorted(unknown)}")
    for section, allowed in _SECTION_KEYS.items():
        sub = doc.get(section)
        if sub is None:
            continue
        if not isinstance(sub, dict):
            raise DomainError(f"scenario section {section!r} must be an object")
        bad = set(sub) - allowed
        if bad:
            raise DomainError(f"unknown keys in scenario section {section!r}: {sorted(bad)}")
    return doc


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def write_records(records, fieldnames, path, fmt):
    """Emit flat report records as CSV, TSV or a JSON document."""
    stream, close = _open_out(path)
    try:
        if fmt == "json":
            json.dump({"schema_version": SCHEMA_VERSION, "records": records}, stream, indent=2)
            stream.write("\n")
        else:
            delimiter = "\t" if fmt == "tsv" else ","
            writer = csv.DictWriter(stream, fieldnames=fieldnames, delimiter=delimiter)
            writer.writeheader()
            for rec in records:
                writer.writerow(rec)
    finally:
        if close:
            stream.close()


def _fmt_num(x):
    return f"{x:.12g}"


# ---------------------------------------------------------------------------
# riemann command


def fan_document(fan):
    def speed_of(w):
        return list(w.speed) if isinstance(w.speed, tuple) else w.speed

    return {
        "schema_version": SCHEMA_VERSION,
        "eta": fan.params.eta,
        "left_state": fan.left_state.tolist(),
        "right_state": fan.right_state.tolist(),
        "strengths": list(fan.strengths),
        "residual": fan.residual,
        "warnings": list(fan.warnings),
        "waves": [
            {
                "family": w.family,
                "kind": w.kind,
                "strength": w.strength,
                "speed": speed_of(w),
                "left": w.left.tolist(),
                "right": w.right.tolist(),
            }
            for w in fan.waves
        ],
    }


def cmd_riemann(args, scenario):
    section = scenario.get("riemann", {})
    ul_src = args.ul if args.ul is not None else section.get("ul")
    ur_src = args.ur if args.ur is not None else section.get("ur")
    if ul_src is None or ur_src is None:
        raise DomainError("riemann needs --ul and --ur (or a scenario file providing both)")
    ul = _parse_state(ul_src)
    ur = _parse_state(ur_src)
    for name, U in (("left", ul), ("right", ur)):
        if not in_unit_ball(U):
            raise DomainError(f"{name} state violates |U| < 1: {U.tolist()}")
    eta = args.eta if args.eta is not None else scenario.get("model", {}).get("eta", 0.0)
    params = ModelParams(eta)

    try:
        fan = solve_riemann(ul, ur, params)
    except ConvergenceError as exc:
        print(f"riemann solve failed: {exc} (residual {exc.residual})", file=sys.stderr)
        return EXIT_NUMERIC

    if not fan.waves:
        print("no waves (states coincide)")
    else:
        print(f"{'family':>6} {'kind':<12} {'strength':>22} speed / states")
        for w in fan.waves:
            speed = (
                f"[{_fmt_num(w.speed[0])}, {_fmt_num(w.speed[1])}]"
                if isinstance(w.speed, tuple)
                else _fmt_num(w.speed)
            )
            print(f"{w.family:>6} {w.kind:<12} {_fmt_num(w.strength):>22} {speed}")
            print(f"       left:  {' '.join(_fmt_num(c) for c in w.left)}")
            print(f"       right: {' '.join(_fmt_num(c) for c in w.right)}")
    print(
        f"strengths: ({', '.join(_fmt_num(s) for s in fan.strengths)})  "
        f"residual: {fan.residual:.3e}"
    )

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(fan_document(fan), fh, indent=2)
            fh.write("\n")

    sample = args.sample or int(section.get("sample", 0))
    if sample:
        xi_min = args.xi_min if args.xi_min is not None else float(section.get("xi_min", -6.0))
        xi_max = args.xi_max if args.xi_max is not None else float(section.get("xi_max", 6.0))
        rows = [
            {
                "xi": _fmt_num(xi),
                "u": _fmt_num(state[0]),
                "v": _fmt_num(state[1]),
                "w": _fmt_num(state[2]),
            }
            for xi in np.linspace(xi_min, xi_max, sample)
            for state in [evaluate_fan(fan, float(xi))]
        ]
        write_records(rows, ["xi", "u", "v", "w"], args.sample_out, args.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify command


def _verify_hyperbolicity(args, params):
    report = check_strict_hyperbolicity(
        params, radius=args.radius, n_samples=args.samples, seed=args.seed
    )
    rec = {
        "scenario_id": 0,
        "radius": report.radius,
        "n_samples": report.n_samples,
        "min_gap_12": report.min_gap_12,
        "min_gap_23": report.min_gap_23,
        "lambda1_min": report.lambda1_range[0],
        "lambda3_max": report.lambda3_range[1],
        "pass": report.passed,
    }
    return [rec], report.passed


def _verify_gnl(args, params):
    report = check_genuine_nonlinearity(
        params, radius=min(args.radius, 0.89), n_samples=args.samples, seed=args.seed
    )
    rec = {
        "scenario_id": 0,
        "radius": report.radius,
        "n_samples": report.n_samples,
        "family1_min": report.family1[0],
        "family1_max": report.family1[1],
        "family2_min": report.family2[0],
        "family2_max": report.family2[1],
        "family3_min": report.family3[0],
        "family3_max": report.family3[1],
        "degenerate_families": ";".join(str(f) for f in report.degenerate_families),
        "pass": report.passed,
    }
    return [rec], report.passed


def _verify_hugoniot(args, params):
    """Closed-form 2-Hugoniot points against the Rankine-Hugoniot residual."""
    p0 = ModelParams(0.0)
    corners = [(-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5),
               (-0.5, 0.0), (0.5, 0.0), (0.0, -0.5), (0.0, 0.5)]
    records = []
    all_ok = True
    sid = 0
    for vbar in np.arange(-0.4, 0.4001, 0.05):
        for s in np.arange(-0.25, -0.0099, 0.01):
            worst = 0.0
            for ub, wb in corners:
                base = np.array([ub, vbar, wb])
                point = wc.hugoniot2_closed_form(base, float(s))
                gamma = 2.0 * vbar + s
                res = float(
                    np.linalg.norm(
                        flux_fn(point.state, p0)
                        - flux_fn(base, p0)
                        - gamma * (point.state - base)
                    )
                )
                worst = max(worst, res)
            ok = worst <= 1e-12
            all_ok = all_ok and ok
            records.append(
                {
                    "scenario_id": sid,
                    "vbar": round(float(vbar), 10),
                    "s": round(float(s), 10),
                    "max_rh_residual": worst,
                    "pass": ok,
                }
            )
            sid += 1
    return records, all_ok


def _verify_taylor22(args, params):
    fit = ia.taylor_fit_22(a=args.a, eta=params.eta)
    rel_s = abs(fit.c_sigma - fit.c_sigma_target) / abs(fit.c_sigma_target)
    rel_t = abs(fit.c_tau - fit.c_tau_target) / abs(fit.c_tau_target)
    g_rel = float(np.max(np.abs(fit.g_cubic - ia.G_CUBIC_TARGET) / np.abs(ia.G_CUBIC_TARGET)))
    ok = rel_s <= 0.02 and rel_t <= 0.02 and g_rel <= 0.02
    rec = {
        "scenario_id": 0,
        "a": fit.a,
        "c_sigma": fit.c_sigma,
        "c_sigma_target": fit.c_sigma_target,
        "c_sigma_rel_err": rel_s,
        "c_tau": fit.c_tau,
        "c_tau_target": fit.c_tau_target,
        "c_tau_rel_err": rel_t,
        "g_max_rel_err": g_rel,
        "axis_max_abs": fit.axis_max_abs,
        "pass": ok,
    }
    return [rec], ok


def _verify_pattern22(args, params):
    """Outgoing-sign certification for sampled 2-2 collisions."""
    records = []
    all_ok = True
    scenarios = ia.sample_scenarios_22(args.samples, a=args.a, eps=args.eps, seed=args.seed)
    for i, sc in enumerate(scenarios):
        rep = ia.interact_22(sc)
        ok = rep.pattern == "SSS"
        all_ok = all_ok and ok
        records.append(
            {
                "scenario_id": i,
                "a": sc.a,
                "eps": sc.eps,
                "scenario_eta": sc.eta,
                "s1": sc.s1,
                "s2": sc.s2,
                "sigma": rep.outgoing[0],
                "tau": rep.outgoing[2],
                "pattern": rep.pattern,
                "pass": ok,
            }
        )
    return records, all_ok


def _verify_bounds12(args, params):
    records = []
    all_ok = True
    for i, row in enumerate(ia.verify_bounds_12(args.samples, eta=params.eta, seed=args.seed)):
        rec = {
            "scenario_id": i,
            "ul_u": row.scenario.Ul[0],
            "ul_v": row.scenario.Ul[1],
            "ul_w": row.scenario.Ul[2],
            "s": row.scenario.s,
            "sigma": row.scenario.sigma,
            "sigma_prime": row.report.outgoing[0],
            "tau_prime": row.report.outgoing[2],
            "pattern": row.report.pattern,
            "oracle_agreement": row.oracle_agreement,
            "contraction_ratio": row.contraction.contraction_ratio,
        }
        for check in row.report.bound_checks:
            rec[f"{check.name}_pass"] = check.passed
        rec["pass"] = row.passed
        all_ok = all_ok and row.passed
        records.append(rec)
    return records, all_ok


def _verify_contraction(args, params):
    records = []
    all_ok = True
    for i, sc in enumerate(ia.sample_scenarios_12(args.samples, eta=params.eta, seed=args.seed)):
        result = ia.contraction_solve_12(sc)
        ok = result.contraction_ratio <= 0.5
        all_ok = all_ok and ok
        records.append(
            {
                "scenario_id": i,
                "s": sc.s,
                "sigma": sc.sigma,
                "sigma_prime": result.x[0],
                "tau_prime": result.x[1],
                "iterations": result.iterations,
                "contraction_ratio": result.contraction_ratio,
                "empirical_k": result.empirical_k,
                "pass": ok,
            }
        )
    return records, all_ok


_VERIFY_RUNNERS = {
    "hyperbolicity": _verify_hyperbolicity,
    "gnl": _verify_gnl,
    "hugoniot": _verify_hugoniot,
    "taylor22": _verify_taylor22,
    "pattern22": _verify_pattern22,
    "bounds12": _verify_bounds12,
    "contraction": _verify_contraction,
}

_VERIFY_DEFAULT_ETA = {"bounds12": 1e-3, "contraction": 1e-3}
_VERIFY_DEFAULT_SAMPLES = {
    "hyperbolicity": 10000,
    "gnl": 2000,
    "pattern22": 1000,
    "bounds12": 1000,
    "contraction": 200,
}


def cmd_verify(args, scenario):
    section = scenario.get("verify", {})
    which = args.which or section.get("which")
    if which not in VERIFY_SUITES:
        raise DomainError(f"verify suite must be one of {VERIFY_SUITES}, got {which!r}")
    eta = args.eta
    if eta is None:
        eta = scenario.get("model", {}).get("eta", _VERIFY_DEFAULT_ETA.get(which, 0.0))
    params = ModelParams(eta)
    if args.samples is None:
        args.samples = int(section.get("samples", _VERIFY_DEFAULT_SAMPLES.get(which, 100)))
    if args.seed is None:
        args.seed = int(section.get("seed", 0))
    if args.a is None:
        args.a = float(section.get("a", 0.25))
    if args.eps is None:
        args.eps = float(section.get("eps", ia.DEFAULT_EPS_22))
    if args.radius is None:
        args.radius = float(section.get("radius", 0.9))

    try:
        records, ok = _VERIFY_RUNNERS[which](args, params)
    except (ConvergenceError, HyperbolicityError) as exc:
        print(f"verify {which}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    # reproducibility: every record carries the fully resolved configuration
    for rec in records:
        rec.setdefault("eta", params.eta)
        rec.setdefault("seed", args.seed)
    fields = list(records[0].keys()) if records else ["scenario_id", "eta", "seed"]
    write_records(records, fields, args.out, args.format)
    n_fail = sum(1 for r in records if not r.get("pass", True))
    print(
        f"verify {which}: {len(records)} records, {n_fail} failures -> "
        f"{'PASS' if ok else 'FAIL'}"
    )
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# fronttrack command


def cmd_fronttrack(args, scenario):
    section = scenario.get("fronttrack")
    if not section:
        raise DomainError("fronttrack needs a scenario file with a 'fronttrack' section")
    u_left = _parse_state(section["u_left"])
    jumps = [(float(x), _parse_state(state)) for x, state in section["jumps"]]
    eta = args.eta if args.eta is not None else scenario.get("model", {}).get("eta", 0.0)
    delta = args.delta if args.delta is not None else float(section.get("delta", ft.DELTA_DEFAULT))
    t_end = args.t_end if args.t_end is not None else float(section.get("t_end", 1.0))
    max_events = (
        args.max_events if args.max_events is not None else int(section.get("max_events", 10000))
    )
    params = ModelParams(eta)

    try:
        st = ft.init_from_piecewise(jumps, u_left, params, delta=delta)
        st, series = ft.run(st, t_end, max_events=max_events)
    except (ConvergenceError, HyperbolicityError) as exc:
        print(f"fronttrack: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    event_rows = [
        {
            "index": ev.index,
            "time": ev.time,
            "position": ev.position,
            "classification": ev.classification,
            "incoming": ";".join(f"{fam}:{_fmt_num(s)}" for fam, s in ev.incoming),
            "outgoing": ";".join(
                f"{fam}:{_fmt_num(s)}:{kind}" for fam, s, kind, _ in ev.outgoing
            ),
        }
        for ev in st.event_log
    ]
    fields = ["index", "time", "position", "classification", "incoming", "outgoing"]
    write_records(event_rows, fields, f"{args.out}_events.csv" if args.out else None, "csv")

    trajectory_lines = ["front_id\tfamily\tt0\tx0\tt1\tx1"]
    for f in st.dead_fronts + st.fronts:
        t1 = f.death_t if f.death_t is not None else st.time
        trajectory_lines.append(
            "\t".join(
                [
                    str(f.uid),
                    str(f.family),
                    _fmt_num(f.birth_t),
                    _fmt_num(f.birth_x),
                    _fmt_num(t1),
                    _fmt_num(f.position(t1)),
                ]
            )
        )
    if args.out:
        with open(f"{args.out}_trajectories.tsv", "w", encoding="utf-8") as fh:
            fh.write("\n".join(trajectory_lines) + "\n")
    else:
        print("\n".join(trajectory_lines))

    last = series[-1]
    print(
        f"fronttrack: {len(st.event_log)} events, {last.n_fronts} fronts at t={st.time:g}"
        + (" (truncated)" if st.truncated else "")
    )
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bjsystem",
        description="Riemann solves, interaction certification and front tracking "
        "for the Baiti-Jenssen 3x3 system.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("riemann", help="solve one Riemann problem and print the wave table")
    pr.add_argument("--ul", help="left state as 'u,v,w'")
    pr.add_argument("--ur", help="right state as 'u,v,w'")
    pr.add_argument("--eta", type=float, default=None, help="perturbation parameter in [0, 1/4)")
    pr.add_argument("--scenario", help="JSON scenario file")
    pr.add_argument("--sample", type=int, default=0, help="emit N self-similar profile samples")
    pr.add_argument("--xi-min", dest="xi_min", type=float, default=None)
    pr.add_argument("--xi-max", dest="xi_max", type=float, default=None)
    pr.add_argument("--out", help="write the fan as JSON to this path")
    pr.add_argument("--sample-out", dest="sample_out", help="write profile samples here")
    pr.add_argument("--format", choices=("csv", "json", "tsv"), default="csv")

    pv = sub.add_parser("verify", help="run a certification suite")
    pv.add_argument("which", nargs="?", choices=VERIFY_SUITES)
    pv.add_argument("--eta", type=float, default=None)
    pv.add_argument("--a", type=float, default=None, help="base-point parameter in (0, 1/2)")
    pv.add_argument("--eps", type=float, default=None, help="2-2 scenario box size")
    pv.add_argument("--samples", type=int, default=None)
    pv.add_argument("--seed", type=int, default=None)
    pv.add_argument("--radius", type=float, default=None)
    pv.add_argument("--scenario", help="JSON scenario file")
    pv.add_argument("--out", help="report path (default stdout)")
    pv.add_argument("--format", choices=("csv", "json", "tsv"), default="csv")

    pf = sub.add_parser("fronttrack", help="run the front tracker on a scenario file")
    pf.add_argument("--scenario", required=True, help="JSON scenario file")
    pf.add_argument("--eta", type=float, default=None)
    pf.add_argument("--delta", type=float, default=None, help="rarefaction discretization")
    pf.add_argument("--t-end", dest="t_end", type=float, default=None)
    pf.add_argument("--max-events", dest="max_events", type=int, default=None)
    pf.add_argument("--out", help="output prefix for _events.csv and _trajectories.tsv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        scenario = load_scenario(args.scenario) if getattr(args, "scenario", None) else {}
        if args.command == "riemann":
            return cmd_riemann(args, scenario)
        if args.command == "verify":
            return cmd_verify(args, scenario)
        return cmd_fronttrack(args, scenario)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (ConvergenceError, HyperbolicityError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
