"""Command-line front end: ``gffkit <scenario> --config FILE``.

Exit codes: 0 for PASS (and for pure classifications), 1 for FAIL,
2 for configuration, input or tolerance errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable

from gffkit import config as cfg
from gffkit.errors import ConfigError, GFFKitError, QuadratureError, QueryError

SCHEMA_ID = "gffkit.run-report/1"
EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


# --------------------------------------------------------------------------
# helpers


def _clean(obj):
    """JSON-safe copy: non-finite floats become ``None``, tuples become lists."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _map(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))  # results come back in input order


def _packets(conf: dict, seed: int):
    from gffkit.statelab.packets import GaussianPacket, random_packets

    src = conf.get("packets")
    if src is None:
        return None
    if isinstance(src, dict):
        return random_packets(src["random"], src.get("seed", seed), src.get("real", True), src.get("spread", 1.0))
    return [GaussianPacket.from_json(p) for p in src]


def _state(d: dict):
    from gffkit.statelab.states import state_from_json

    try:
        return state_from_json(d)
    except (ValueError, ArithmeticError) as exc:
        raise ConfigError(f"state: {exc}") from exc


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


# --------------------------------------------------------------------------
# scenarios; each returns (verdict, results, counts)


def run_partitions(conf, seed, tol, jobs):
    from gffkit.corrcomb import DEFAULT_PARTITION_CAP, bell_number, enumerate_partitions

    n = conf["n"]
    cap = conf.get("cap", DEFAULT_PARTITION_CAP)
    parts = enumerate_partitions(n, cap=cap)
    bell = bell_number(n)
    results = {"n": n, "count": len(parts), "bell": bell}
    if conf.get("list_partitions", n <= 6):
        results["partitions"] = [[list(b) for b in p.blocks] for p in parts]
    return _verdict(len(parts) == bell), results, {"partitions": len(parts)}


def run_gff_check(conf, seed, tol, jobs):
    from gffkit.corrcomb import is_generalised_free

    state = _state(conf["state"])
    fns = _packets(conf, seed)
    rep = is_generalised_free(state, conf["n_max"], tol, fns, limit=conf.get("limit", 200), seed=seed)
    results = rep.as_dict()
    return rep.verdict, results, {"swap_checks": rep.checked}


def run_wf_check(conf, seed, tol, jobs):
    from gffkit.microlocal.gamma import WFQuery, cone_properties_suite, gamma_member

    results: dict[str, Any] = {}
    ok = True
    queries = []
    for i, qd in enumerate(conf.get("queries", [])):
        try:
            queries.append((WFQuery.from_json(qd), qd.get("expect")))
        except QueryError as exc:
            raise QueryError(f"queries/{i}: {exc}") from exc

    def decide(item):
        q, expect = item
        w = gamma_member(q)
        member = w is not None
        entry = {"variant": q.variant, "n": q.n, "member": member, "witness": w.to_json() if member else None}
        if expect is not None:
            entry["expected"] = expect
            entry["as_expected"] = member == (expect == "member")
        return entry

    entries = _map(decide, queries, jobs)
    ok = all(e.get("as_expected", True) for e in entries)
    results["queries"] = entries
    counts = {"queries": len(entries)}
    if "suite" in conf:
        s = conf["suite"]
        items = cone_properties_suite(s["n"], s["samples"], seed=seed, variant=s.get("variant", "smooth"))
        results["suite"] = {
            k: {"samples": it.samples, "passed": it.passed, "ok": it.ok, "failures": it.failures}
            for k, it in items.items()
        }
        ok = ok and all(it.ok for it in items.values())
        counts["suite_samples"] = sum(it.samples for it in items.values())
    return _verdict(ok), results, counts


def run_growth(conf, seed, tol, jobs):
    from gffkit.statelab.growth import growth_classify
    from gffkit.statelab.packets import GaussianPacket

    state = _state(conf["state"])
    f = GaussianPacket.from_json(conf.get("packet", {}))
    rep = growth_classify(state, f, conf["n_max"])
    results = rep.as_dict()
    expect = conf.get("expect")
    verdict = rep.verdict.upper()
    if expect in ("analytic", "non-analytic"):
        verdict = _verdict(rep.verdict == expect)
        results["expected"] = expect
    return verdict, results, {"orders": len(rep.orders)}


def run_kg(conf, seed, tol, jobs):
    from gffkit.statelab.checks import kg_residual

    state = _state(conf["state"])
    fns = _packets(conf, seed)
    masses = conf.get("masses") or [conf.get("mass", 1.0)]
    cases = [(m, f) for m in masses for f in fns]
    out = _map(lambda c: kg_residual(state, c[1], c[0]), cases, jobs)
    entries = [dict(r.as_dict(), packet=i % len(fns)) for i, r in enumerate(out)]
    expect = conf.get("expect", "bisolution")
    if expect == "defect":
        ok = any(r.residual > tol for r in out)
    else:
        ok = all(r.residual < tol for r in out)
    return _verdict(ok), {"expect": expect, "tol": tol, "cases": entries}, {"cases": len(entries)}


def run_compare(conf, seed, tol, jobs):
    from gffkit.statelab.checks import compare_states

    a, b = _state(conf["state_a"]), _state(conf["state_b"])
    fns = _packets(conf, seed)
    rep = compare_states(a, b, conf["n"], fns, tol, limit=conf.get("limit", 200), seed=seed)
    verdict = {"pass": "PASS", "fail": "FAIL"}.get(rep.status, rep.status.upper())
    return verdict, rep.as_dict(), {"tuples": rep.checked_tuples}


def run_js_example(conf, seed, tol, jobs):
    from gffkit.statelab.checks import js_counterexample
    from gffkit.statelab.packets import GaussianPacket, random_packets

    mass = conf.get("mass", 1.0)
    if "configurations" in conf:
        configs = [[GaussianPacket.from_json(p) for p in c] for c in conf["configurations"]]
    else:
        fns = _packets(conf, seed) or random_packets(4, seed)
        if len(fns) < 4:
            raise ConfigError("packets: js-example needs at least four packets")
        configs = [fns[i:i + 4] for i in range(0, len(fns) - 3, 4)]
    reps = _map(lambda c: js_counterexample(c, tol, mass), configs, jobs)
    entries = [r.as_dict() for r in reps]
    ok = all(r.gff_fails and r.commutator_identity_holds and r.quasi_free_residual < tol for r in reps)
    results = {
        "configurations": entries,
        "printed_identity_holds": all(r.printed_identity_holds for r in reps),
        "commutator_identity_holds": all(r.commutator_identity_holds for r in reps),
        "mixture_flagged_non_gff": all(r.gff_fails for r in reps),
    }
    return _verdict(ok), results, {"configurations": len(reps)}


RUNNERS = {
    "partitions": run_partitions,
    "gff-check": run_gff_check,
    "wf-check": run_wf_check,
    "growth": run_growth,
    "kg": run_kg,
    "compare": run_compare,
    "js-example": run_js_example,
}

DEFAULT_TOLERANCE = {
    "partitions": 0.0,
    "gff-check": 1e-7,
    "wf-check": 0.0,
    "growth": 0.0,
    "kg": 1e-6,
    "compare": 1e-7,
    "js-example": 1e-6,
}


# --------------------------------------------------------------------------
# reports


def run(conf: dict, scenario: str | None = None, seed: int | None = None, tolerance: float | None = None,
        jobs: int = 1, timing: bool = False) -> tuple[dict, int]:
    """Validate and execute a scenario.  Returns ``(report, exit_code)``."""
    conf = dict(conf)
    if seed is not None:
        conf["seed"] = seed
    if tolerance is not None:
        conf["tolerance"] = tolerance
    cfg.validate(conf, scenario)
    scenario = scenario or conf["scenario"]
    seed = conf.get("seed", 0)
    tol = conf.get("tolerance", DEFAULT_TOLERANCE[scenario])
    started = time.perf_counter()
    verdict, results, counts = RUNNERS[scenario](conf, seed, tol, max(1, jobs))
    report = {
        "schema": SCHEMA_ID,
        "scenario": scenario,
        "config_sha256": cfg.config_hash(conf),
        "config": conf,
        "seed": seed,
        "tolerance": tol,
        "verdict": verdict,
        "results": results,
        "counts": counts,
    }
    if timing:
        report["wall_clock_seconds"] = time.perf_counter() - started
    code = EXIT_FAIL if verdict == "FAIL" else EXIT_PASS
    return _clean(report), code


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _abs(z) -> float | None:
    return None if z is None else math.hypot(*z)


# scenario -> (header, column descriptions, row extractor)
_PLOTS: dict[str, tuple] = {
    "growth": (
        ["n", "log_moment", "log_n_factorial", "fitted_d"],
        "log_moment = log|w_n(f,...,f)| (empty when the moment vanishes), log_n_factorial = log n!, "
        "fitted_d = (|w_n|/n!)^(1/n)",
        lambda r: zip(r["orders"], r["log_moments"], r["log_n_factorial"], r["fitted_d"]),
    ),
    "gff-check": (
        ["order", "worst_relative_residual"],
        "worst relative residual of the adjacent-swap identity per order",
        lambda r: sorted(((int(n), v) for n, v in r["worst_residual"].items())),
    ),
    "kg": (
        ["mass", "packet", "relative_residual"],
        "relative Klein-Gordon residual per (mass, packet)",
        lambda r: ((c["mass"], c["packet"], c["residual"]) for c in r["cases"]),
    ),
    "js-example": (
        ["configuration", "abs_lhs", "abs_printed_rhs", "abs_commutator_rhs", "abs_gff_rhs"],
        "magnitudes of the swap difference and of the three candidate right-hand sides",
        lambda r: ((i, _abs(c["lhs"]), _abs(c["printed_rhs"]), _abs(c["commutator_rhs"]), _abs(c["gff_rhs"]))
                   for i, c in enumerate(r["configurations"])),
    ),
}


def emit_plot_data(report: dict) -> str:
    """CSV text for the sequences in ``report``; column meanings go in a ``#`` comment.

    Reports without sequence data give a header-only CSV.
    """
    scen = report.get("scenario", "")
    header, doc, rows_of = _PLOTS.get(scen, (["index", "value"], "no sequence data in this report", None))
    results = report.get("results") or {}
    rows = list(rows_of(results)) if rows_of and results else []
    out = io.StringIO()
    out.write(f"# scenario: {scen or 'none'}; columns: {', '.join(header)}; {doc}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in row])
    return out.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gffkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="scenario", required=True, metavar="SCENARIO")
    for name in cfg.SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", required=True, help="JSON or TOML scenario file")
        p.add_argument("--out", help="report path (default: the config's 'output', else stdout)")
        p.add_argument("--csv", help="plot-data CSV path (default: the config's 'csv')")
        p.add_argument("--seed", type=int, help="override the config seed (u64)")
        p.add_argument("--jobs", type=int, default=1, help="worker threads for independent checks")
        p.add_argument("--tolerance", type=float, help="override the relative tolerance")
        p.add_argument("--timing", action="store_true", help="record wall-clock time (breaks byte-identity)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        conf = cfg.load(args.config)
        report, code = run(conf, args.scenario, args.seed, args.tolerance, args.jobs, args.timing)
    except (ConfigError, QueryError) as exc:
        print(f"gffkit: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except QuadratureError as exc:
        print(f"gffkit: tolerance not reached: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except GFFKitError as exc:
        print(f"gffkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    text = dumps_report(report)
    out = args.out or conf.get("output")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    csv_path = args.csv or conf.get("csv")
    if csv_path:
        Path(csv_path).write_text(emit_plot_data(report))
    print(f"{report['scenario']}: {report['verdict']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
