"""Command-line interface.

Subcommands::

    check        run the axiom suite(s) on a CSV dataset
    rationalize  construct primitives for a dataset that passes
    welfare      bound the equivalent-variation distribution of a price rise
    simulate     tabulate a synthetic population's exact choice model to CSV
    oracle       Monte Carlo equivalent variation for a synthetic population
    example      recompute the built-in worked example and verify it

All commands print a JSON document to stdout (``example`` prints a table by
default) stamped with the schema tag. Exit status: 0 for a passing verdict,
1 for a negative verdict (failed axioms, dominance violation, inapplicable
model, mismatched example), 2 for unusable input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace

import numpy as np

from .axioms import check_apt, check_qrum
from .config import SCHEMA, RunConfig
from .dataset import CSV_HEADER, load_csv, save_csv, uniform_grid
from .demo import DEMO_STEP, run_demo
from .errors import (
    ConvergenceError,
    CoverageError,
    CsvFormatError,
    DomainError,
    GridLookupError,
    IncomeVarianceError,
    NotApplicableError,
    NotRationalizableError,
    NoZeroPriceError,
    ProvenanceError,
    VerificationError,
    WellDefinednessError,
)
from .rationalize import apt_rationalize, qrum_construct
from .simulate import forward_choice_prob, monte_carlo_ev, population_from_spec
from .welfare import (
    PriceChange,
    ev_distribution_apt,
    ev_distribution_rum,
    fosd_check,
    p10_bounds,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, default=_json_default))


def _build_config(args) -> RunConfig:
    overrides = {
        name: getattr(args, name, None)
        for name in (
            "eq_tol",
            "jump_threshold",
            "continuity_modulus",
            "quantile_mesh",
        )
    }
    path = getattr(args, "config", None)
    if path:
        return RunConfig.from_file(path, **overrides)
    return RunConfig(**{k: v for k, v in overrides.items() if v is not None})


def _load_spec(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        spec = json.load(fh)
    if not isinstance(spec, dict):
        raise DomainError("population spec must be a JSON object")
    return spec


# -- commands --------------------------------------------------------------


def cmd_check(args, cfg: RunConfig) -> int:
    ds = load_csv(args.data)
    apt = check_apt(
        ds,
        eq_tol=cfg.eq_tol,
        jump_threshold=cfg.jump_threshold,
        exact_grid=args.exact_grid,
    )
    payload = {
        "schema": SCHEMA,
        "command": "check",
        "data": args.data,
        "apt": apt.to_dict(),
        "qrum": None,
    }
    ok = apt.passed
    if args.qrum:
        try:
            qrum = check_qrum(
                ds, eq_tol=cfg.eq_tol, continuity_modulus=cfg.continuity_modulus
            )
            payload["qrum"] = {"applicable": True, **qrum.to_dict()}
            ok = ok and qrum.passed
        except IncomeVarianceError as exc:
            payload["qrum"] = {
                "applicable": False,
                "passed": False,
                "reason": str(exc),
            }
            ok = False
    payload["verdict"] = ok
    _emit(payload)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_rationalize(args, cfg: RunConfig) -> int:
    ds = load_csv(args.data)
    payload: dict = {"schema": SCHEMA, "command": "rationalize", "data": args.data}
    if args.qrum:
        payload["model"] = "qrum"
        try:
            prim = qrum_construct(
                ds,
                quantile_mesh=cfg.quantile_mesh,
                eq_tol=cfg.eq_tol,
                continuity_modulus=cfg.continuity_modulus,
            )
        except IncomeVarianceError as exc:
            payload.update(applicable=False, verified=False, reason=str(exc))
            _emit(payload)
            return EXIT_FAIL
        except NotRationalizableError as exc:
            payload.update(
                applicable=True,
                verified=False,
                failed=list(exc.suite.failed_axioms) if exc.suite else [],
                suite=exc.suite.to_dict() if exc.suite else None,
            )
            _emit(payload)
            return EXIT_FAIL
        payload.update(
            applicable=True,
            verified=True,
            f=[[x, v] for x, v in prim.f.knots],
            beta=prim.beta,
            v0=prim.v0,
            quantile_mesh=cfg.quantile_mesh,
        )
    else:
        payload["model"] = "apt"
        try:
            pair, attention = apt_rationalize(
                ds,
                eq_tol=cfg.eq_tol,
                jump_threshold=cfg.jump_threshold,
                exact_grid=args.exact_grid,
            )
        except NotRationalizableError as exc:
            payload.update(
                verified=False,
                failed=list(exc.suite.failed_axioms) if exc.suite else [],
                suite=exc.suite.to_dict() if exc.suite else None,
            )
            _emit(payload)
            return EXIT_FAIL
        payload.update(
            verified=True,
            u0=[[x, v] for x, v in pair.u0.knots],
            u1="identity" if pair.u1.is_identity else [[x, v] for x, v in pair.u1.knots],
            g=[[t, v] for t, v in attention.knots],
            tail_flag=attention.tail_flag,
            tail_mass=attention.tail_mass,
            extension_start=attention.extension_start,
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, default=_json_default)
            fh.write("\n")
    _emit(payload)
    return EXIT_PASS


def cmd_welfare(args, cfg: RunConfig) -> int:
    pc = PriceChange(args.p_old, args.p_new, args.income)
    ds = load_csv(args.data)
    payload: dict = {
        "schema": SCHEMA,
        "command": "welfare",
        "data": args.data,
        "model": args.model,
        "price_change": pc.to_dict(),
    }
    code = EXIT_PASS
    if args.model in ("apt", "both"):
        try:
            bound = p10_bounds(
                ds,
                args.income,
                assume_full_attention=args.assume_full_attention,
                p_initial=args.p_old,
                eq_tol=cfg.eq_tol,
                jump_threshold=cfg.jump_threshold,
            ).to_dict()
        except NotApplicableError as exc:
            bound = {"applicable": False, "reason": str(exc)}
        f_apt = ev_distribution_apt(
            ds,
            pc,
            assume_full_attention=args.assume_full_attention,
            eq_tol=cfg.eq_tol,
            jump_threshold=cfg.jump_threshold,
        )
        payload["reservation"] = bound
        payload["atoms"] = [[v, m] for v, m in f_apt.atoms]
        payload["interval"] = (
            f_apt.interval.to_dict() if f_apt.interval else None
        )
        payload["apt"] = f_apt.to_dict()
    if args.model in ("rum", "both"):
        f_rum = ev_distribution_rum(ds, pc, eq_tol=cfg.eq_tol)
        payload["cdf_segments"] = [
            [z, f_rum.cdf(z)] for z in f_rum.breakpoints()
        ]
        payload["rum"] = f_rum.to_dict()
    if args.model == "both":
        fosd = fosd_check(f_apt, f_rum, eq_tol=cfg.eq_tol)
        payload["fosd"] = {"verdict": fosd.dominates, **fosd.to_dict()}
        payload["verdict"] = fosd.dominates
        code = EXIT_PASS if fosd.dominates else EXIT_FAIL
        if args.emit_cdf:
            zs = sorted(set(f_apt.breakpoints()) | set(f_rum.breakpoints()))
            with open(args.emit_cdf, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(("z", "F_apt_lo", "F_apt_hi", "F_rum"))
                for z in zs:
                    writer.writerow(
                        (
                            repr(float(z)),
                            repr(f_apt.cdf(z, interval_at="lo")),
                            repr(f_apt.cdf(z, interval_at="hi")),
                            repr(f_rum.cdf(z)),
                        )
                    )
            payload["emit_cdf"] = args.emit_cdf
    elif args.emit_cdf:
        raise DomainError("--emit-cdf needs --model both")
    _emit(payload)
    return code


def cmd_simulate(args, cfg: RunConfig) -> int:
    spec = _load_spec(args.spec)
    pop = population_from_spec(spec)
    if args.seed is not None:
        pop = replace(pop, seed=args.seed)
    incomes = spec.get("incomes")
    if not incomes:
        raise DomainError("population spec needs an 'incomes' list to simulate")
    grid = uniform_grid([float(y) for y in incomes], args.grid_step)
    ds = forward_choice_prob(pop, grid, inject_breakpoints=args.inject_breakpoints)
    n_rows = sum(ds.grid.top_price_index(j) + 1 for j in range(ds.grid.n_incomes))
    if args.out:
        save_csv(ds, args.out)
        _emit(
            {
                "schema": SCHEMA,
                "command": "simulate",
                "kind": pop.kind,
                "rows": n_rows,
                "prices": ds.grid.n_prices,
                "incomes": ds.grid.n_incomes,
                "seed": pop.seed,
                "out": args.out,
            }
        )
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(CSV_HEADER)
        for j, y in enumerate(ds.grid.incomes):
            top = ds.grid.top_price_index(j)
            for i in range(top + 1):
                writer.writerow(
                    (
                        repr(float(ds.grid.prices[i])),
                        repr(float(y)),
                        repr(float(ds.q[i, j])),
                    )
                )
    return EXIT_PASS


def cmd_oracle(args, cfg: RunConfig) -> int:
    spec = _load_spec(args.spec)
    pop = population_from_spec(spec)
    pc = PriceChange(args.p_old, args.p_new, args.income)
    dist = monte_carlo_ev(
        pop,
        pc,
        n=args.n,
        seed=args.seed,
        bisection_tol=cfg.bisection_tol,
        max_iter=cfg.max_bisection_iter,
    )
    mean_ev = sum(v * m for v, m in dist.atoms)
    _emit(
        {
            "schema": SCHEMA,
            "command": "oracle",
            "kind": pop.kind,
            "price_change": pc.to_dict(),
            "n": args.n,
            "seed": pop.seed if args.seed is None else args.seed,
            "atoms": [[v, m] for v, m in dist.atoms],
            "mean_ev": mean_ev,
        }
    )
    return EXIT_PASS


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, tuple):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(v)


def cmd_example(args, cfg: RunConfig) -> int:
    payload = run_demo(
        step=args.grid_step, assume_full_attention=args.assume_full_attention
    )
    if args.format == "json":
        _emit({"schema": SCHEMA, "command": "example", **payload})
    else:
        rows = [("quantity", "expected", "actual", "match")]
        for key in payload["expected"]:
            rows.append(
                (
                    key,
                    _fmt(payload["expected"][key]),
                    _fmt(payload["actual"][key]),
                    "ok" if payload["matches"][key] else "MISMATCH",
                )
            )
        widths = [max(len(r[c]) for r in rows) for c in range(4)]
        for r in rows:
            print("  ".join(r[c].ljust(widths[c]) for c in range(4)).rstrip())
        n_ok = sum(payload["matches"].values())
        print(
            f"\n{n_ok}/{len(payload['matches'])} quantities match "
            f"(tolerance {payload['tolerance']:g}); "
            f"axiom suite {'passed' if payload['suite_passed'] else 'FAILED'}"
        )
    return EXIT_PASS if payload["all_match"] else EXIT_FAIL


# -- parser ----------------------------------------------------------------


def _add_tolerance_flags(sp: argparse.ArgumentParser, qrum: bool = False) -> None:
    sp.add_argument("--config", help="JSON file of parameter overrides")
    sp.add_argument(
        "--eq-tol", type=float, dest="eq_tol", help="share equality tolerance"
    )
    sp.add_argument(
        "--jump-threshold",
        type=float,
        dest="jump_threshold",
        help="minimum one-step drop that counts as a jump",
    )
    if qrum:
        sp.add_argument(
            "--continuity-modulus",
            type=float,
            dest="continuity_modulus",
            help="largest admissible share drop per unit of price",
        )
        sp.add_argument(
            "--quantile-mesh",
            type=int,
            dest="quantile_mesh",
            help="cells in the tabulated inverse share curve",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aptwelfare",
        description=(
            "Test binary discrete-choice data for threshold-attention "
            "consistency, construct rationalizing primitives, and bound the "
            "welfare effect of a price increase."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="run the axiom suite(s) on a CSV dataset")
    sp.add_argument("data", help="price,income,share CSV")
    sp.add_argument(
        "--qrum",
        action="store_true",
        help="also run the income-free random-utility suite",
    )
    sp.add_argument(
        "--exact-grid",
        action="store_true",
        help="treat the grid as the full support (zero-tail warnings fail)",
    )
    _add_tolerance_flags(sp, qrum=True)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("rationalize", help="construct primitives for a dataset")
    sp.add_argument("data", help="price,income,share CSV")
    sp.add_argument(
        "--qrum",
        action="store_true",
        help="construct the income-free quantile curve instead",
    )
    sp.add_argument("--exact-grid", action="store_true")
    sp.add_argument("--out", help="also write the JSON document to this path")
    _add_tolerance_flags(sp, qrum=True)
    sp.set_defaults(func=cmd_rationalize)

    sp = sub.add_parser(
        "welfare", help="equivalent-variation bounds for a price increase"
    )
    sp.add_argument("data", help="price,income,share CSV")
    sp.add_argument(
        "--y",
        "--income",
        type=float,
        required=True,
        dest="income",
        help="income level to analyze",
    )
    sp.add_argument("--p-old", type=float, required=True, dest="p_old")
    sp.add_argument("--p-new", type=float, required=True, dest="p_new")
    sp.add_argument(
        "--model",
        choices=("apt", "rum", "both"),
        default="both",
        help="which equivalent-variation identification to report",
    )
    sp.add_argument(
        "--assume-full-attention",
        action="store_true",
        help="treat the smallest zero-share price as the reservation price",
    )
    sp.add_argument(
        "--emit-cdf",
        dest="emit_cdf",
        help="write z,F_apt_lo,F_apt_hi,F_rum rows to this CSV path",
    )
    _add_tolerance_flags(sp)
    sp.set_defaults(func=cmd_welfare)

    sp = sub.add_parser(
        "simulate", help="tabulate a synthetic population's choice model"
    )
    sp.add_argument("--spec", required=True, help="population JSON (see docs)")
    sp.add_argument(
        "--grid-step", type=float, required=True, dest="grid_step", help="price step"
    )
    sp.add_argument("--out", help="CSV path (default: CSV on stdout)")
    sp.add_argument(
        "--inject-breakpoints",
        action="store_true",
        dest="inject_breakpoints",
        help="refine the grid with reservation prices and attention knots",
    )
    sp.add_argument("--seed", type=int, help="override the spec's seed")
    _add_tolerance_flags(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser(
        "oracle", help="Monte Carlo equivalent variation for a population"
    )
    sp.add_argument("--spec", required=True, help="population JSON (see docs)")
    sp.add_argument(
        "--y",
        "--income",
        type=float,
        required=True,
        dest="income",
        help="income level to analyze",
    )
    sp.add_argument("--p-old", type=float, required=True, dest="p_old")
    sp.add_argument("--p-new", type=float, required=True, dest="p_new")
    sp.add_argument("-n", "--n", type=int, default=100_000, help="sample size")
    sp.add_argument("--seed", type=int, help="override the spec's seed")
    _add_tolerance_flags(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("example", help="recompute the built-in worked example")
    sp.add_argument(
        "--format", choices=("table", "json"), default="table", dest="format"
    )
    sp.add_argument(
        "--grid-step",
        type=float,
        default=DEMO_STEP,
        dest="grid_step",
        help="price grid step for the rebuilt dataset (must divide 0.5)",
    )
    sp.add_argument(
        "--assume-full-attention",
        action="store_true",
        help="verify the point-identified variant of the example",
    )
    sp.set_defaults(func=cmd_example)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _build_config(args)
        return args.func(args, cfg)
    except (
        CsvFormatError,
        CoverageError,
        DomainError,
        GridLookupError,
        NoZeroPriceError,
        ProvenanceError,
        VerificationError,
        WellDefinednessError,
        ConvergenceError,
        json.JSONDecodeError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
