"""Batch driver: parse a pair file, run a named experiment, emit reports.

Exit status: 0 when every checked inequality is satisfied, 2 when any check
reports a violation, 1 for usage/configuration errors (including enumeration
caps).  Output is byte-stable for a fixed (config, seed): keys are sorted,
rationals are "p/q" strings, floats carry 12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import lab
from .flags import RESTRICTED, FlagSpec, validate_good_flag
from .lattices import EnumerationBudgetExceeded
from .models import PairSpec, build_section_space
from .reports import fmt_float, frac_str
from .spaces import (DEFAULT_CAP, enumerate_small_sections, run_lemma_suite)

COMMANDS = ("enumerate", "body", "volume", "restricted", "discrepancy",
            "inclusions", "fe", "estimates2", "derivative", "lemmas",
            "homogeneity")

DEFAULT_SEED = 20240817
CAP_ENV = "ARITHVOL_CAP"


class ConfigError(Exception):
    pass


def _load_spec(path: str | None) -> PairSpec:
    if not path:
        raise ConfigError("this command needs --spec <pair file>")
    try:
        with open(path) as fh:
            text = fh.read()
        return PairSpec.from_json(text)
    except OSError as exc:
        raise ConfigError(f"cannot read spec file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed spec JSON at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid pair spec: {exc}") from exc


def _parse_fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"invalid {what} {text!r}: {exc}") from exc


def _emit(payload, rows, args) -> None:
    if args.format == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        import csv
        import io
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in rows:
            writer.writerow(row)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _window(args) -> range:
    if args.m_lo < 1 or args.m_hi < args.m_lo:
        raise ConfigError("need 1 <= m-lo <= m-hi")
    return range(args.m_lo, args.m_hi + 1)


def _flag_for(spec: PairSpec, args, variant: str) -> FlagSpec:
    flag = FlagSpec(spec.marked_point, args.p, variant)
    report = validate_good_flag(flag)
    if not report.ok:
        raise ConfigError(f"flag over p={args.p} at the marked point is not good: {report}")
    return flag


def _estimate_rows(est) -> list:
    rows = [["m", "normalized"]]
    rows += [[m, v] for m, v in est.raw]
    rows.append(["extrapolated", est.extrapolated])
    rows.append(["fit_residual", est.fit_residual])
    return rows


def _discrepancy_rows(reports) -> list:
    rows = [["m", "lhs", "rhs", "bound", "slack", "satisfied"]]
    rows += [[r.m, fmt_float(r.lhs), fmt_float(r.rhs), fmt_float(r.bound),
              fmt_float(r.slack), r.satisfied] for r in reports]
    return rows


def run(args) -> int:
    cap = args.cap
    if args.command == "lemmas":
        if args.instance_file:
            from .spaces import (lemma_instance_from_jsonable,
                                 verify_counting_inequality)
            try:
                with open(args.instance_file) as fh:
                    items = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(
                    f"malformed instance JSON at line {exc.lineno} column "
                    f"{exc.colno}: {exc.msg}") from exc
            results = []
            for idx, item in enumerate(items):
                kind, inst = lemma_instance_from_jsonable(item)
                results.append((kind, idx,
                                verify_counting_inequality(kind, inst, cap)))
            kinds = tuple(sorted({k for k, _, _ in results}))
        else:
            kinds = ("rescale", "combined", "filtration", "quot_exact")
            results = run_lemma_suite(kinds, args.instances, args.seed,
                                      budget=args.budget, cap=cap)
        entries = [{"kind": kind, "index": idx,
                    "satisfied": rep.satisfied, "slack": fmt_float(rep.slack)}
                   for kind, idx, rep in results]
        ok = all(e["satisfied"] for e in entries)
        payload = {"command": "lemmas", "seed": args.seed,
                   "instances": args.instances, "kinds": list(kinds),
                   "entries": entries, "all_satisfied": ok}
        rows = [["kind", "index", "satisfied", "slack"]]
        rows += [[e["kind"], e["index"], e["satisfied"], e["slack"]]
                 for e in entries]
        _emit(payload, rows, args)
        return 0 if ok else 2

    spec = _load_spec(args.spec)

    if args.command == "enumerate":
        space, report = build_section_space(spec, args.m)
        vecs, ci = enumerate_small_sections(space, args.kind, cap)
        payload = {"command": "enumerate", "m": args.m, "kind": args.kind,
                   "rank": report.rank, "count_lo": ci.lo, "count_hi": ci.hi,
                   "vectors": [list(v) for v in vecs]}
        rows = [list(v) for v in vecs]
        _emit(payload, rows, args)
        return 0

    if args.command == "volume":
        est = lab.truncated_avol(spec, _parse_fraction(args.extra_order, "order"),
                                 _window(args), cap)
        if isinstance(est, tuple):
            payload = {"command": "volume", "lower": est[0].to_jsonable(),
                       "upper": est[1].to_jsonable()}
            rows = _estimate_rows(est[0]) + _estimate_rows(est[1])
        else:
            payload = {"command": "volume", "estimate": est.to_jsonable()}
            rows = _estimate_rows(est)
        _emit(payload, rows, args)
        return 0

    if args.command == "restricted":
        est = lab.truncated_restricted_vol(spec, args.variant, _window(args), cap)
        payload = {"command": "restricted", "variant": args.variant,
                   "estimate": est.to_jsonable()}
        _emit(payload, _estimate_rows(est), args)
        return 0

    if args.command == "body":
        flag = _flag_for(spec, args,
                         "full" if args.variant == lab.YM_FULL else RESTRICTED)
        body, stats = lab.build_okounkov_body(
            spec, flag, args.variant, _window(args),
            _parse_fraction(args.extra_order, "order"), cap)
        from .geometry import polytope_volume
        vol = polytope_volume(body) if not body.is_empty else Fraction(0)
        payload = {"command": "body", "variant": args.variant,
                   "body": json.loads(body.to_json()),
                   "volume": frac_str(vol), "volume_float": fmt_float(float(vol)),
                   "stats": stats.to_jsonable()}
        rows = [[frac_str(x) for x in v] for v in body.vertices]
        _emit(payload, rows, args)
        return 0

    if args.command == "discrepancy":
        flag = _flag_for(spec, args, RESTRICTED)
        reports = [lab.count_valuation_discrepancy(
            spec, flag, args.variant, m, cap,
            _parse_fraction(args.margin, "margin")) for m in _window(args)]
        ok = all(r.satisfied for r in reports)
        payload = {"command": "discrepancy", "variant": args.variant,
                   "p": args.p, "reports": [r.to_jsonable() for r in reports],
                   "all_satisfied": ok}
        _emit(payload, _discrepancy_rows(reports), args)
        return 0 if ok else 2

    if args.command == "inclusions":
        eps = _parse_fraction(args.epsilon, "epsilon")
        reports = []
        for m in _window(args):
            nmax = int(spec.slope_budget * m) if args.n is None else args.n
            for n in range(1, nmax + 1) if args.n is None else [args.n]:
                reports.append(lab.check_inclusions(spec, eps, m, n, cap))
        ok = all(r.ok for r in reports)
        payload = {"command": "inclusions", "epsilon": frac_str(eps),
                   "reports": [r.to_jsonable() for r in reports],
                   "all_satisfied": ok}
        rows = [["m", "n", "first", "second"]]
        rows += [[r.m, r.n, r.first_holds, r.second_holds] for r in reports]
        _emit(payload, rows, args)
        return 0 if ok else 2

    if args.command == "fe":
        reports = [lab.check_fe_bounds(spec, n, m, cap)
                   for m in _window(args) for n in range(args.n + 1)]
        ok = all(r.satisfied for r in reports)
        payload = {"command": "fe",
                   "reports": [r.to_jsonable() for r in reports],
                   "all_satisfied": ok}
        _emit(payload, _discrepancy_rows(reports), args)
        return 0 if ok else 2

    if args.command == "estimates2":
        flag = _flag_for(spec, args, "full")
        reports = lab.check_estimates_II(
            spec, flag, _parse_fraction(args.r, "slope"), args.epsilon_float,
            _window(args), cap, _parse_fraction(args.margin, "margin"))
        trend = lab.estimates_slack_trend(reports)
        stable = (trend["lower_slack_slope"] <= args.trend_tol
                  and trend["upper_slack_slope"] <= args.trend_tol)
        payload = {"command": "estimates2",
                   "reports": [r.to_jsonable() for r in reports],
                   "trend": {k: fmt_float(v) for k, v in trend.items()},
                   "slacks_stable": stable,
                   "all_satisfied": all(r.satisfied for r in reports) and stable}
        _emit(payload, _discrepancy_rows(reports), args)
        return 0 if payload["all_satisfied"] else 2

    if args.command == "derivative":
        grid = []
        for tok in args.r_grid.split(","):
            r = _parse_fraction(tok.strip(), "grid entry")
            grid += [r, -r]
        rep = lab.derivative_experiment(spec, sorted(set(grid)), _window(args), cap)
        payload = {"command": "derivative", "report": rep.to_jsonable()}
        payload["concavity"] = _concavity_block(spec, args, cap)
        rows = [["r", "slope"]]
        rows += [[frac_str(r), fmt_float(s)] for r, s in
                 zip([r for r in rep.r_grid if r < 0], rep.left_slopes)]
        rows += [[frac_str(r), fmt_float(s)] for r, s in
                 zip([r for r in rep.r_grid if r > 0], rep.right_slopes)]
        rows.append(["symmetric", fmt_float(rep.symmetric_estimate)])
        rows.append(["oracle", fmt_float(rep.oracle_value)])
        rows.append(["relative_gap", fmt_float(rep.relative_gap)])
        _emit(payload, rows, args)
        return 0

    if args.command == "homogeneity":
        rep = lab.check_homogeneity_bm(spec, args.scale_factor, _window(args),
                                       cap=cap)
        payload = {"command": "homogeneity", "report": rep.to_jsonable()}
        rows = [[k, v] for k, v in sorted(rep.to_jsonable().items())]
        _emit(payload, rows, args)
        return 0 if rep.ok else 2

    raise ConfigError(f"unknown command {args.command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arithvol",
        description="Exact counting and convex-body experiments for divisor "
                    "pairs on the projective line.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--spec", help="path to a pair JSON file")
    parser.add_argument("--out", help="output path (stdout when omitted)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--m-lo", type=int, default=8)
    parser.add_argument("--m-hi", type=int, default=40)
    parser.add_argument("--m", type=int, default=1, help="single level")
    parser.add_argument("--cap", type=int,
                        default=int(os.environ.get(CAP_ENV, DEFAULT_CAP)))
    parser.add_argument("--kind", choices=("ss", "s"), default="ss")
    parser.add_argument("--variant", default="CL",
                        help="CL | quot | YM-full | restricted-CL | restricted-quot")
    parser.add_argument("--p", type=int, default=2, help="flag prime")
    parser.add_argument("--n", type=int, default=None,
                        help="twist order (fe: max order)")
    parser.add_argument("--r", default="1/4", help="twist slope (estimates2)")
    parser.add_argument("--r-grid", default="1/16,1/8",
                        help="comma list of positive slopes, mirrored")
    parser.add_argument("--epsilon", default="1/10",
                        help="rational scale twist (inclusions)")
    parser.add_argument("--epsilon-float", type=float, default=1.0,
                        help="epsilon for the twisted gap rate (estimates2)")
    parser.add_argument("--margin", default="1",
                        help="majorizer scale margin (discrepancy, estimates2)")
    parser.add_argument("--trend-tol", type=float, default=0.05)
    parser.add_argument("--instances", type=int, default=300)
    parser.add_argument("--budget", type=int, default=200_000,
                        help="per-instance candidate budget (lemmas)")
    parser.add_argument("--extra-order", default="0",
                        help="extra marked-point order (volume, body)")
    parser.add_argument("--scale-factor", type=int, default=2,
                        help="integer pair multiple (homogeneity)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "fe" and args.n is None:
        args.n = 2
    try:
        return run(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EnumerationBudgetExceeded as exc:
        print(f"error: enumeration budget exceeded: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
