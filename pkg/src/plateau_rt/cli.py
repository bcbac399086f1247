"""Command-line surface: formulas, rate optimizers, verification, simulation.

One subcommand per question:

* ``needle``: exact Needle runtimes, optionally normalized by 2^ell.
* ``blo``: block-leading-ones runtime, exact and/or asymptotic.
* ``optimal``: best static or per-level mutation rates.
* ``verify``: run a cross-validation suite, itemized pass/fail.
* ``simulate``: seeded Monte Carlo with a z-score against the formula.

Every command takes ``--json`` and then emits exactly one record object
on stdout: {command, inputs, payload, version, timestamp} with floats
rendered to 17 significant digits (non-finite values become null, with
the log2 companion still carrying the magnitude).  Human output shows 6
significant digits plus log2 where relevant.

Exit codes: 0 success, 1 validation error, 2 verification failure,
3 capped simulation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from datetime import datetime, timezone

from . import __version__
from .asymptotics import (
    blo_asymptotic_static,
    optimal_adaptive_rate_closed,
    optimal_adaptive_rate_exact,
    optimal_adaptive_runtime,
    optimal_static_rate,
)
from .runtime_formulas import (
    MutationSchedule,
    ProblemKind,
    ProblemSpec,
    RuntimeEstimate,
    blo_total_time,
    needle_normalized_limit,
    needle_time_excluding_optimum,
    needle_time_uniform_start,
    normalized_needle,
)
from .simulator import SimulationConfig, run, write_trials_csv
from .verification import SUITE_NAMES, run_suite

__all__ = ["main", "build_parser", "parse_rate_spec", "dumps_record"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_VERIFY_FAILED = 2
EXIT_CAPPED = 3


# ---------------------------------------------------------------- output

def _float_repr(x: float) -> str:
    # JSON numbers cannot be inf/nan; the log2 companion keeps the info
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _write_json(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True or obj is False:
        out.append("true" if obj else "false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float_repr(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _write_json(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(", ")
            _write_json(value, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} to the output record")


def dumps_record(record: dict) -> str:
    out: list[str] = []
    _write_json(record, out)
    return "".join(out)


def _record(command: str, inputs: dict, payload: dict) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "payload": payload,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def _g6(x: float) -> str:
    return format(x, ".6g")


def _estimate_payload(est: RuntimeEstimate) -> dict:
    return {
        "value": est.value,
        "log2_value": est.log2_value,
        "method": est.method,
        "overflow": est.overflow,
    }


def _estimate_line(label: str, est: RuntimeEstimate) -> str:
    shown = "overflow" if est.overflow else _g6(est.value)
    return f"{label}: {shown} (log2 {_g6(est.log2_value)})"


# ---------------------------------------------------------------- inputs

def _parse_float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"{what} must be a number, got {text!r}") from None


def parse_rate_spec(text: str, n: int) -> MutationSchedule:
    """Rate grammar: static:<p> | c-over-n:<c> | adaptive | file:<path>.

    ``file:`` reads a JSON array with one rate per fitness level.
    """
    if text == "adaptive":
        return MutationSchedule.adaptive_optimal()
    if text.startswith("static:"):
        return MutationSchedule.static(_parse_float(text[len("static:"):], "static rate"))
    if text.startswith("c-over-n:"):
        c = _parse_float(text[len("c-over-n:"):], "c-over-n constant")
        return MutationSchedule.static(c / n)
    if text.startswith("file:"):
        path = text[len("file:"):]
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        ok = isinstance(data, list) and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in data
        )
        if not ok:
            raise ValueError(f"{path}: schedule file must hold a JSON array of rates")
        return MutationSchedule.table([float(v) for v in data])
    raise ValueError(
        f"unrecognized rate spec {text!r}; use static:<p>, c-over-n:<c>, adaptive or file:<path>"
    )


def _schedule_label(schedule: MutationSchedule) -> str:
    return schedule.kind.value


# ---------------------------------------------------------------- handlers

def cmd_needle(args) -> tuple[dict, list[str], int]:
    ell = args.ell
    if args.p_over_ell is not None:
        c = args.p_over_ell
        p = c / ell
    else:
        p = args.p
        c = p * ell
    inputs = {
        "ell": ell,
        "p": p,
        "p_over_ell": c,
        "exclude_optimum": bool(args.exclude_optimum),
        "normalized": bool(args.normalized),
    }
    if args.normalized:
        if args.exclude_optimum:
            raise ValueError("--normalized and --exclude-optimum cannot be combined")
        value = normalized_needle(ell, c)
        limit = needle_normalized_limit(c)
        payload = {"value": value, "log2_value": math.log2(value), "limit": limit}
        human = [
            f"needle: ell={ell}, p={_g6(p)} (c={_g6(c)})",
            f"normalized runtime 2^-ell E[T]: {_g6(value)} (limit {_g6(limit)})",
        ]
        return _record("needle", inputs, payload), human, EXIT_OK

    if args.exclude_optimum:
        est = needle_time_excluding_optimum(ell, p)
        label = "expected runtime (uniform non-optimal start)"
    else:
        est = needle_time_uniform_start(ell, p)
        label = "expected runtime (uniform start)"
    human = [f"needle: ell={ell}, p={_g6(p)}", _estimate_line(label, est)]
    return _record("needle", inputs, _estimate_payload(est)), human, EXIT_OK


def _asymptotic_value(spec: ProblemSpec, schedule: MutationSchedule) -> float:
    if schedule.is_static:
        return blo_asymptotic_static(spec.n, spec.ell, schedule.p * spec.n)
    if schedule.rates is not None:
        raise ValueError("asymptotic mode supports static or adaptive rates, not a table")
    return optimal_adaptive_runtime(spec.n, spec.ell)


def cmd_blo(args) -> tuple[dict, list[str], int]:
    spec = ProblemSpec(ProblemKind.BLO, args.n, args.ell)
    schedule = parse_rate_spec(args.rate, args.n)
    inputs = {"n": args.n, "ell": args.ell, "rate": args.rate, "mode": args.mode}
    human = [f"blo: n={args.n}, ell={args.ell}, rate={args.rate}, mode={args.mode}"]

    payload: dict = {"exact": None, "asymptotic": None, "asymptotic_log2": None, "ratio": None,
                     "per_level_rates": None}
    if args.mode in ("exact", "both"):
        est = blo_total_time(spec, schedule)
        payload["exact"] = _estimate_payload(est)
        human.append(_estimate_line("exact runtime", est))
    if args.mode in ("asymptotic", "both"):
        try:
            asym = _asymptotic_value(spec, schedule)
        except OverflowError:
            asym = math.inf
        payload["asymptotic"] = asym
        payload["asymptotic_log2"] = math.log2(asym) if asym > 0 else -math.inf
        human.append(f"asymptotic runtime: {_g6(asym)} (log2 {_g6(math.log2(asym))})")
    if args.mode == "both":
        # in the log domain so an overflowed exact value still yields a ratio
        if math.isfinite(payload["asymptotic_log2"]):
            try:
                ratio = 2.0 ** (payload["exact"]["log2_value"] - payload["asymptotic_log2"])
            except OverflowError:
                ratio = math.inf
            payload["ratio"] = ratio
            human.append(f"ratio exact/asymptotic: {_g6(ratio)}")
        else:
            human.append("ratio exact/asymptotic: unavailable (asymptotic overflow)")
    if not schedule.is_static:
        rates = schedule.resolve(spec)
        payload["per_level_rates"] = list(rates)
        human.append("per-level rates:")
        human.extend(
            f"  m={m}: p={_g6(p)}" for m, p in enumerate(rates)
        )
    elif args.mode != "asymptotic":
        # exact path still validates table lengths eagerly via resolve
        schedule.resolve(spec)
    return _record("blo", inputs, payload), human, EXIT_OK


def cmd_optimal(args) -> tuple[dict, list[str], int]:
    inputs = {"kind": args.kind, "n": args.n, "ell": args.ell, "m": args.m}
    if args.kind == "static":
        res = optimal_static_rate(args.n)
        ratio = 0.5 * math.e / res.alpha
        payload = {
            "lambda": res.lambda_value,
            "alpha": res.alpha,
            "rate": res.rate,
            "adaptive_to_static_ratio": ratio,
        }
        human = [
            f"optimal static rate: lambda/n with lambda = {_g6(res.lambda_value)}",
            f"normalized runtime constant alpha = {_g6(res.alpha)}",
            f"adaptive/static runtime ratio (e/2)/alpha = {_g6(ratio)}",
        ]
        if res.rate is not None:
            human.insert(1, f"rate at n={args.n}: {_g6(res.rate)}")
        return _record("optimal", inputs, payload), human, EXIT_OK

    if args.ell is None or args.m is None:
        raise ValueError("optimal adaptive needs both --ell and --m")
    exact = optimal_adaptive_rate_exact(args.m, args.ell)
    exact_payload = {
        "rate": exact.rate,
        "objective_log2": exact.objective_log2,
        "predicted_runtime": exact.predicted_runtime,
        "boundary": exact.boundary,
        "warning": exact.warning,
    }
    human = [
        f"optimal adaptive rate: ell={args.ell}, m={args.m} (k={args.m * args.ell} locked bits)",
        f"exact minimizer: p={_g6(exact.rate)}"
        + (" [boundary]" if exact.boundary else "")
        + f", objective log2 {_g6(exact.objective_log2)}",
    ]
    closed_payload = None
    gap = None
    if args.m >= 1:
        closed = optimal_adaptive_rate_closed(args.m, args.ell)
        closed_payload = {
            "rate": closed.rate,
            "objective_log2": closed.objective_log2,
            "predicted_runtime": closed.predicted_runtime,
            "large_ell_rate": closed.large_ell_rate,
            "inverse_k_rate": closed.inverse_k_rate,
            "warning": closed.warning,
        }
        gap = abs(closed.rate - exact.rate) / exact.rate
        human.append(
            f"closed-form model: p={_g6(closed.rate)}, objective log2 {_g6(closed.objective_log2)}"
        )
        human.append(
            f"reference forms: large-ell {_g6(closed.large_ell_rate)}, 1/k {_g6(closed.inverse_k_rate)}"
        )
        human.append(f"relative gap exact vs closed: {_g6(gap)}")
    payload = {"exact": exact_payload, "closed": closed_payload, "relative_gap": gap}
    return _record("optimal", inputs, payload), human, EXIT_OK


def cmd_verify(args) -> tuple[dict, list[str], int]:
    report = run_suite(args.suite)
    payload = {
        "suite": report.suite,
        "passed": report.passed,
        "checks_total": len(report.checks),
        "failures": len(report.failures),
        "checks": [
            {"name": c.name, "instance": c.instance, "ok": c.ok, "detail": c.detail}
            for c in report.checks
        ],
    }
    human = [str(c) for c in report.checks]
    human.append(report.summary())
    code = EXIT_OK if report.passed else EXIT_VERIFY_FAILED
    return _record("verify", {"suite": args.suite}, payload), human, code


def cmd_simulate(args) -> tuple[dict, list[str], int]:
    if args.problem == "needle":
        if args.n is not None and args.n != args.ell:
            raise ValueError(f"a needle instance is one block: --n must equal --ell, got {args.n}")
        spec = ProblemSpec(ProblemKind.NEEDLE, args.ell, args.ell)
    else:
        if args.n is None:
            raise ValueError("simulate --problem blo needs --n")
        spec = ProblemSpec(ProblemKind.BLO, args.n, args.ell)
    schedule = parse_rate_spec(args.rate, spec.n)
    config = SimulationConfig(
        spec=spec,
        schedule=schedule,
        trials=args.trials,
        master_seed=args.seed,
        iteration_cap=args.cap,
    )
    report = run(config)
    exact = blo_total_time(spec, schedule)
    if report.stderr and math.isfinite(report.stderr) and report.stderr > 0:
        z = (report.mean - exact.value) / report.stderr
    else:
        z = math.nan

    if args.out is not None:
        write_trials_csv(report, args.out)

    inputs = {
        "problem": args.problem,
        "n": spec.n,
        "ell": spec.ell,
        "rate": args.rate,
        "trials": args.trials,
        "seed": args.seed,
        "cap": args.cap,
        "out": args.out,
    }
    payload = {
        "mean": report.mean,
        "stderr": report.stderr,
        "trials_completed": report.trials_completed,
        "capped_trials": report.capped_trials,
        "per_level_means": list(report.per_level_means),
        "master_seed": report.master_seed,
        "iteration_cap": report.iteration_cap,
        "kernel": report.kernel,
        "exact_value": exact.value,
        "z_score": z,
        "csv_path": args.out,
    }
    human = [
        f"simulate: {args.problem}, n={spec.n}, ell={spec.ell}, rate={args.rate}, "
        f"trials={args.trials}, seed={args.seed}, kernel={report.kernel}",
        f"mean: {_g6(report.mean)}, stderr: {_g6(report.stderr)} "
        f"(completed {report.trials_completed}, capped {report.capped_trials})",
        f"exact: {_g6(exact.value)}, z-score: {_g6(z)}",
        "per-level means: " + ", ".join(_g6(v) for v in report.per_level_means),
    ]
    if args.out is not None:
        human.append(f"trials csv written to {args.out}")
    code = EXIT_OK
    if report.capped_trials > 0:
        print(
            f"warning: {report.capped_trials} of {args.trials} trials hit the iteration cap "
            f"{report.iteration_cap}; statistics exclude them",
            file=sys.stderr,
        )
        code = EXIT_CAPPED
    return _record("simulate", inputs, payload), human, code


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    """argparse with validation failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _add_json(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="emit one JSON record on stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="plateau-rt",
        description="Expected (1+1) EA runtimes on plateau problems: exact formulas, "
        "asymptotics, optimal mutation rates, chain oracles and Monte Carlo.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    pn = sub.add_parser("needle", help="exact Needle expected runtime")
    pn.add_argument("--ell", type=int, required=True, help="plateau length (bits)")
    group = pn.add_mutually_exclusive_group(required=True)
    group.add_argument("--p", type=float, help="mutation rate")
    group.add_argument("--p-over-ell", dest="p_over_ell", type=float, metavar="C",
                       help="mutation rate C/ell")
    pn.add_argument("--exclude-optimum", action="store_true",
                    help="condition the uniform start on not being the optimum")
    pn.add_argument("--normalized", action="store_true",
                    help="report 2^-ell E[T] next to its large-ell limit")
    _add_json(pn)
    pn.set_defaults(handler=cmd_needle)

    pb = sub.add_parser("blo", help="block-leading-ones expected runtime")
    pb.add_argument("--n", type=int, required=True, help="total bits")
    pb.add_argument("--ell", type=int, required=True, help="block length (divides n)")
    pb.add_argument("--rate", required=True, metavar="SPEC",
                    help="static:<p> | c-over-n:<c> | adaptive | file:<path>")
    pb.add_argument("--mode", choices=("exact", "asymptotic", "both"), default="exact")
    _add_json(pb)
    pb.set_defaults(handler=cmd_blo)

    po = sub.add_parser("optimal", help="optimal mutation rates")
    po.add_argument("kind", choices=("static", "adaptive"))
    po.add_argument("--n", type=int, help="fill in the concrete static rate lambda/n")
    po.add_argument("--ell", type=int, help="block length (adaptive)")
    po.add_argument("--m", type=int, help="current fitness level (adaptive)")
    _add_json(po)
    po.set_defaults(handler=cmd_optimal)

    pv = sub.add_parser("verify", help="run a cross-validation suite")
    pv.add_argument("suite", choices=SUITE_NAMES)
    _add_json(pv)
    pv.set_defaults(handler=cmd_verify)

    ps = sub.add_parser("simulate", help="seeded Monte Carlo of the (1+1) EA")
    ps.add_argument("--problem", choices=("needle", "blo"), required=True)
    ps.add_argument("--ell", type=int, required=True, help="block/plateau length")
    ps.add_argument("--n", type=int, help="total bits (blo)")
    ps.add_argument("--rate", required=True, metavar="SPEC",
                    help="static:<p> | c-over-n:<c> | adaptive | file:<path>")
    ps.add_argument("--trials", type=int, required=True)
    ps.add_argument("--seed", type=int, required=True, help="64-bit master seed")
    ps.add_argument("--cap", type=int, default=None,
                    help="iteration cap per trial (default: 10^4 x the exact expectation)")
    ps.add_argument("--out", metavar="PATH", help="write per-trial counts as CSV")
    _add_json(ps)
    ps.set_defaults(handler=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            record, human, code = args.handler(args)
        record["payload"]["warnings"] = [str(w.message) for w in caught]
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        if args.json:
            print(dumps_record(record))
        else:
            for line in human:
                print(line)
        return code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
