"""Command-line front end: ``seqdiscrim {optimize,curve,discord,simulate,povm}``.

Exit codes: 0 success, 2 usage error, 3 a numerical cross-check exceeded
its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from contextlib import contextmanager
from decimal import Decimal

import numpy as np

from . import correlations, optimizer
from .montecarlo import empirical_probs, run_trials, verify_unambiguity
from .protocol import (
    ProtocolParams,
    build_bob_unitary,
    povm_elements,
    prepare_pair,
    joint_success_prob,
    success_prob_bob,
    success_prob_charlie,
)

EXIT_TOLERANCE = 3
OPTIMUM_TOL = 1e-5
ORACLE_GAP_TOL = 2e-3
CURVE_COLUMNS = {"2a": ("p_b", "d_delta"), "2b": ("p_c", "d_delta"), "3": ("s", "d_symm")}


class ToleranceBreach(RuntimeError):
    pass


def fmt(x) -> str:
    """Decimal literal with 12 significant digits, no exponent."""
    if x is None:
        return ""
    return format(Decimal(f"{float(x):.11e}"), "f")


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (float, np.floating)):
        return None if not math.isfinite(value) else float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def dump_flat_csv(report: dict) -> str:
    """Non-curve reports as two-column key,value CSV."""
    rows = []

    def walk(prefix, value):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(value, (list, tuple)):
            for i, v in enumerate(value):
                walk(f"{prefix}[{i}]", v)
        else:
            rows.append((prefix, value))

    walk("", report)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in rows:
        if isinstance(value, (float, np.floating)):
            value = fmt(value) if math.isfinite(value) else ""
        elif value is None:
            value = ""
        writer.writerow([key, value])
    return buf.getvalue()


# --- reports -------------------------------------------------------------------


def _params_dict(p: ProtocolParams) -> dict:
    return {"s": p.s, "t": p.t, "q1b": p.q1b, "q2b": p.q2b, "q1c": p.q1c, "q2c": p.q2c}


def optimize_report(s: float) -> dict:
    closed = optimizer.pbc_closed_max(s)
    if s < 1.0:
        numeric = optimizer.pbc_numeric_max(s)
    else:
        numeric = closed
    gap = abs(closed.pbc_max - numeric.pbc_max)
    report = {
        "s": s,
        "regime": closed.regime,
        "pbc_max": closed.pbc_max,
        "pbc_numeric": numeric.pbc_max,
        "abs_difference": gap,
        "argmax": _params_dict(closed.argmax),
        "numeric_argmax": _params_dict(numeric.argmax),
        "numeric_regime": numeric.regime,
    }
    if gap > OPTIMUM_TOL:
        raise ToleranceBreach(f"numeric optimum differs from closed form by {gap:.3e}", report)
    return report


def curve_rows(figure: str, fixed: float | None, exponent: float | None, points: int):
    """Rows for the D_delta (figure 2a/2b) or D_symm (figure 3) curves."""
    if figure in ("2a", "2b"):
        grid = (np.arange(points) + 0.5) / points
        rows = []
        for x in grid:
            if figure == "2a":
                r, t = 1 - x, 1 - fixed
            else:
                r, t = 1 - fixed, 1 - x
            rows.append((x, correlations.relative_difference(r, t)))
        return rows
    if figure == "3":
        s = np.linspace(0.0, 1.0, points)
        t = s**exponent
        r = s ** (1 - exponent)
        d = correlations.symmetrized_discord(r, t)
        return list(zip(s, d))
    raise ValueError(f"unknown figure {figure!r}")


def discord_report(r: float, t: float) -> dict:
    closed = correlations.discord_report(r, t, "closed-form")
    oracle = correlations.discord_report(r, t, "oracle")
    tg = correlations.tangles(r, t)
    gap_right = abs(closed.d_right - oracle.d_right)
    gap_left = abs(closed.d_left - oracle.d_left)
    report = {
        "r": r,
        "t": t,
        "s": r * t,
        "tangles": {"tau_abd": tg.tau_abd, "tau_a": tg.tau_a, "tau_b": tg.tau_b, "tau_d": tg.tau_d},
        "d_right": closed.d_right,
        "d_left": closed.d_left,
        "d_delta": closed.d_delta,
        "d_delta_status": "defined" if closed.d_delta is not None else "undefined",
        "d_symm": closed.d_symm,
        "oracle_d_right": oracle.d_right,
        "oracle_d_left": oracle.d_left,
        "gap_right": gap_right,
        "gap_left": gap_left,
    }
    if max(gap_right, gap_left) > ORACLE_GAP_TOL:
        raise ToleranceBreach("definition-based discord disagrees with the closed form", report)
    return report


def simulate_report(s: float, t: float, trials: int, seed: int, workers: int = 1) -> dict:
    params = ProtocolParams.equal_weights(s, t)
    stats = run_trials(params, trials, seed, workers=workers)
    emp = empirical_probs(stats)
    analytic = (success_prob_bob(params), success_prob_charlie(params), joint_success_prob(params))
    ok, violations = verify_unambiguity(stats)
    report = {"s": s, "t": t, "trials": trials, "seed": seed}
    for name, a, e in zip(("p_b", "p_c", "p_bc"), analytic, emp):
        z = (e.value - a) / e.stderr if e.stderr > 0 else (0.0 if e.value == a else math.inf)
        report[name] = {"analytic": a, "empirical": e.value, "stderr": e.stderr, "z": z}
    report["unambiguous"] = ok
    report["misidentifications"] = violations
    report["counts"] = stats.counts.tolist()
    return report


def povm_report(s: float, t: float) -> dict:
    params = ProtocolParams.equal_weights(s, t)
    povm = povm_elements(build_bob_unitary(params))
    psi1, psi2 = prepare_pair(s)
    return {
        "s": s,
        "t": t,
        "povm": [{"real": e.real.tolist(), "imag": e.imag.tolist()} for e in povm.elements],
        "completeness_defect": povm.completeness_defect(),
        "residual_psi2_pi1": povm.probability(1, psi2),
        "residual_psi1_pi2": povm.probability(2, psi1),
    }


# --- argument handling -----------------------------------------------------------


def _unit(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return value


def _positive_int(minimum):
    def parse(text):
        value = int(text)
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be at least {minimum}")
        return value

    return parse


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="seqdiscrim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, default_format):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", default="-", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=default_format)
        p.add_argument("--config", help="file of `key = value` lines pre-setting flags")
        return p

    p_opt = add("optimize", "maximal joint success probability", "json")
    p_opt.add_argument("--s", type=_unit, required=True)

    p_curve = add("curve", "discord curve data", "csv")
    p_curve.add_argument("--figure", choices=tuple(CURVE_COLUMNS), required=True)
    p_curve.add_argument("--pc", type=_unit, help="fixed P_c for figure 2a")
    p_curve.add_argument("--pb", type=_unit, help="fixed P_b for figure 2b")
    p_curve.add_argument("--exponent", type=float, help="t = s**exponent for figure 3")
    p_curve.add_argument("--points", type=_positive_int(2), default=50)

    p_disc = add("discord", "left/right discord at (r, t)", "json")
    p_disc.add_argument("--r", type=_unit, required=True)
    p_disc.add_argument("--t", type=_unit, required=True)

    p_sim = add("simulate", "Monte Carlo run of the protocol", "json")
    p_sim.add_argument("--s", type=_unit, required=True)
    p_sim.add_argument("--t", type=_unit, required=True)
    p_sim.add_argument("--trials", type=_positive_int(1), default=100_000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--workers", type=_positive_int(1), default=1)

    p_povm = add("povm", "Bob's POVM elements", "json")
    p_povm.add_argument("--s", type=_unit, required=True)
    p_povm.add_argument("--t", type=_unit, required=True)

    subs = {"optimize": p_opt, "curve": p_curve, "discord": p_disc, "simulate": p_sim, "povm": p_povm}
    return parser, subs


def read_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected `key = value`")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.lstrip("-").replace("-", "_")] = value
    return values


def parse_args(argv):
    parser, subs = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in subs), None)
    if known.config and command:
        sub = subs[command]
        try:
            config = read_config(known.config)
        except (OSError, ValueError) as exc:
            sub.error(str(exc))
        actions = {a.dest: a for a in sub._actions}
        for key, raw in config.items():
            if key not in actions or key in ("help", "config"):
                sub.error(f"unknown config key {key!r}")
            action = actions[key]
            try:
                value = action.type(raw) if action.type else raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                sub.error(f"config key {key!r}: {exc}")
            if action.choices and value not in action.choices:
                sub.error(f"config key {key!r}: invalid choice {value!r}")
            # command-line flags still win: these only become defaults
            sub.set_defaults(**{key: value})
            action.required = False
    return parser, subs, parser.parse_args(argv)


@contextmanager
def _output(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def run(args, subs) -> tuple[str, int]:
    cmd = args.command
    status = 0
    try:
        if cmd == "optimize":
            report = optimize_report(args.s)
        elif cmd == "discord":
            report = discord_report(args.r, args.t)
        elif cmd == "povm":
            if args.s > args.t:
                subs[cmd].error("need s <= t")
            report = povm_report(args.s, args.t)
        elif cmd == "simulate":
            if args.s > args.t:
                subs[cmd].error("need s <= t")
            report = simulate_report(args.s, args.t, args.trials, args.seed, args.workers)
        else:
            report = None
    except ToleranceBreach as exc:
        print(f"seqdiscrim: {exc.args[0]}", file=sys.stderr)
        report, status = exc.args[1], EXIT_TOLERANCE

    if cmd == "curve":
        needed = {"2a": "pc", "2b": "pb", "3": "exponent"}[args.figure]
        fixed = getattr(args, needed)
        if fixed is None:
            subs[cmd].error(f"figure {args.figure} needs --{needed}")
        if args.figure == "3" and not 0.0 < fixed < 1.0:
            subs[cmd].error("--exponent must lie in (0, 1)")
        rows = curve_rows(args.figure, fixed, fixed, args.points)
        header = CURVE_COLUMNS[args.figure]
        if args.format == "csv":
            return dump_csv(header, rows), status
        return dump_json({"figure": args.figure, needed: fixed, "columns": list(header),
                          "rows": [list(r) for r in rows]}), status

    text = dump_json(report) if args.format == "json" else dump_flat_csv(report)
    return text, status


def main(argv=None) -> int:
    _, subs, args = parse_args(argv)
    text, status = run(args, subs)
    with _output(args.out) as fh:
        fh.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
