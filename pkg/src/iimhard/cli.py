"""Command line front end.

Exit status: 0 on success, 1 on bad usage or input, 2 when an exhaustive
search exceeds its cap.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import Optional, Sequence

import yaml

from .bench import METHODS, BenchmarkSpec, BoundViolation, run_benchmark
from .cascade import cascade, kill_set, protection_set
from .estimators import ENH_METHODS, solve_enh, solve_teh
from .exact import DEFAULT_MAX_SUBSETS, EnhInstance, SearchSpaceTooLarge, TehInstance, k_most_vulnerable
from .generators import (gen_interdep_idrs, gen_power_idrs, gen_random, load_assets,
                         load_topology, nine_bus_topology)
from .ilp import encode_enh_ilp, encode_teh_ilp, format_lp
from .instance_io import InstanceSpec, load_instance
from .system import format_system, load_system, natural_key


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def split_labels(text: Optional[str]) -> list[str]:
    if not text:
        return []
    return [t for t in text.replace(",", " ").split() if t]


def _fmt(labels) -> str:
    return "{" + ", ".join(sorted(labels, key=natural_key)) + "}"


def _out(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _scenario(args) -> InstanceSpec:
    """Instance file values, overridden by explicit flags."""
    spec = load_instance(args.instance) if getattr(args, "instance", None) else InstanceSpec()
    if getattr(args, "fail", None) is not None:
        spec.initial_failures = split_labels(args.fail)
    if getattr(args, "k", None) is not None:
        spec.budget = args.k
    if getattr(args, "protect", None) is not None:
        spec.protect = split_labels(args.protect)
    if getattr(args, "harden", None) is not None:
        spec.hardened = split_labels(args.harden)
    return spec


def _add_scenario(p, *, budget=False, protect=False, harden=False):
    p.add_argument("--system", required=True, help="system file")
    p.add_argument("--instance", help="YAML instance file")
    p.add_argument("--fail", help="initial failures, comma separated")
    if budget:
        p.add_argument("--k", type=int, help="hardening budget")
    if protect:
        p.add_argument("--protect", help="entities to keep operational, comma separated")
    if harden:
        p.add_argument("--harden", help="entities to harden, comma separated")


def cmd_cascade(args):
    system = load_system(args.system)
    sc = _scenario(args)
    trace = cascade(system, sc.initial_failures, sc.hardened)
    if args.json:
        data = {
            "fixed_point_time": trace.fixed_point_time,
            "failure_times": dict(sorted(trace.failure_times().items(), key=lambda kv: natural_key(kv[0]))),
            "final": sorted(trace.final, key=natural_key),
        }
        print(json.dumps(data, indent=2))
        return 0
    sys.stdout.write(trace.table())
    print(f"fixed point: t={trace.fixed_point_time}")
    print(f"final failed: {_fmt(trace.final)} ({len(trace.final)})")
    return 0


def cmd_killset(args):
    system = load_system(args.system)
    ks = kill_set(system, _scenario(args).initial_failures)
    print(f"{_fmt(ks)} ({len(ks)})")
    return 0


def cmd_protset(args):
    system = load_system(args.system)
    seed = _scenario(args).initial_failures
    if args.entity:
        targets = split_labels(args.entity)
    else:
        targets = sorted(kill_set(system, seed), key=natural_key)
    for e in targets:
        ps = protection_set(system, e, seed)
        print(f"{e}: {_fmt(ps)} ({len(ps)})")
    return 0


def _print_report(rep, mode, as_json):
    if as_json:
        print(json.dumps(rep.to_dict(), indent=2))
        return
    print(f"method: {rep.method}")
    print(f"hardened: {_fmt(rep.hardened)}")
    if mode == "enh":
        print(f"protected: {rep.protected}")
    else:
        print(f"|H|: {len(rep.hardened)}")
    print(f"failed: {rep.baseline_failed} -> {rep.failed_with_plan}")
    for note in rep.notes:
        print(f"note: {note}")


def cmd_solve_enh(args):
    system = load_system(args.system)
    sc = _scenario(args)
    if sc.budget is None:
        raise UsageError("solve-enh: a budget is required (--k or instance 'budget')")
    inst = EnhInstance(system, sc.initial_failures, sc.budget)
    _print_report(solve_enh(inst, args.method, args.max_subsets), "enh", args.json)
    return 0


def cmd_solve_teh(args):
    system = load_system(args.system)
    sc = _scenario(args)
    inst = TehInstance(system, sc.initial_failures, sc.protect or ())
    _print_report(solve_teh(inst, args.method, args.max_subsets), "teh", args.json)
    return 0


def cmd_export_lp(args):
    system = load_system(args.system)
    sc = _scenario(args)
    if args.problem == "enh":
        if sc.budget is None:
            raise UsageError("export-lp: ENH needs a budget (--k)")
        enc = encode_enh_ilp(EnhInstance(system, sc.initial_failures, sc.budget))
    else:
        enc = encode_teh_ilp(TehInstance(system, sc.initial_failures, sc.protect or ()))
    _out(args, format_lp(enc))
    return 0


def cmd_vulnerable(args):
    system = load_system(args.system)
    vs = k_most_vulnerable(system, args.K, args.max_subsets)
    print(f"entities: {_fmt(vs.entities)}")
    print(f"killed: {_fmt(vs.killed)} ({len(vs.killed)})")
    print(f"method: {vs.method}")
    return 0


def cmd_gen(args):
    if args.kind == "power":
        topo = load_topology(args.topology) if args.topology else nine_bus_topology()
        system = gen_power_idrs(topo)
    elif args.kind == "geo":
        if not args.assets:
            raise UsageError("gen geo: --assets is required")
        system = gen_interdep_idrs(load_assets(args.assets), long_link_quantile=args.quantile)
    else:
        system = gen_random(args.cls, args.n, seed=args.seed)
    _out(args, format_system(system))
    return 0


def cmd_bench(args):
    methods = split_labels(args.methods)
    sweep = [int(v) for v in split_labels(args.sweep)] if args.sweep else None
    fail = split_labels(args.fail) if args.fail is not None else None
    spec = BenchmarkSpec(
        system=args.system, mode=args.mode, methods=methods, initial_failed=fail, K=args.K,
        sweep=sweep, rng_seed=args.rng_seed, max_subsets=args.max_subsets, lp_dir=args.lp_dir,
    )
    report = run_benchmark(spec)
    report.write(args.csv, args.json)
    if not args.csv:
        sys.stdout.write(report.to_csv())
    for r in report.rows:
        if r.skipped:
            print(f"skipped {r.method}@{r.sweep}: {r.skipped}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iimhard", description="Interdependent infrastructure hardening.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cascade", help="simulate a cascade and print the per-step table")
    _add_scenario(p, harden=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cascade)

    p = sub.add_parser("killset", help="entities failed at the fixed point")
    _add_scenario(p)
    p.set_defaults(func=cmd_killset)

    p = sub.add_parser("protset", help="protection sets of failed entities")
    _add_scenario(p)
    p.add_argument("--entity", help="only these entities")
    p.set_defaults(func=cmd_protset)

    for name, func, extra in (("solve-enh", cmd_solve_enh, {"budget": True}),
                              ("solve-teh", cmd_solve_teh, {"protect": True})):
        p = sub.add_parser(name)
        _add_scenario(p, **extra)
        p.add_argument("--method", choices=sorted(ENH_METHODS), default="exact")
        p.add_argument("--max-subsets", type=int, default=DEFAULT_MAX_SUBSETS)
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("export-lp", help="write the ILP in LP format")
    _add_scenario(p, budget=True, protect=True)
    p.add_argument("--problem", choices=("enh", "teh"), default="enh")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("vulnerable", help="K most vulnerable entities")
    p.add_argument("--system", required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--max-subsets", type=int, default=DEFAULT_MAX_SUBSETS)
    p.set_defaults(func=cmd_vulnerable)

    p = sub.add_parser("gen", help="generate a system")
    p.add_argument("kind", choices=("power", "geo", "random"))
    p.add_argument("--topology", help="YAML power topology (default: nine-bus example)")
    p.add_argument("--assets", help="YAML asset list")
    p.add_argument("--quantile", type=float, default=0.75, help="long fiber link quantile")
    p.add_argument("--class", dest="cls", choices=("CaseI", "CaseII", "General"), default="General")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a budget or protect-set sweep")
    p.add_argument("--system", required=True)
    p.add_argument("--mode", choices=("enh", "teh"), default="enh")
    p.add_argument("--methods", default="exact,heuristic",
                   help=f"comma separated subset of {','.join(METHODS)}")
    p.add_argument("--fail", help="explicit initial failures (default: automatic K)")
    p.add_argument("--K", type=int, help="use the K most vulnerable entities")
    p.add_argument("--sweep", help="budgets or protect-set sizes, comma separated")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--max-subsets", type=int, default=DEFAULT_MAX_SUBSETS)
    p.add_argument("--csv")
    p.add_argument("--json")
    p.add_argument("--lp-dir")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            return args.func(args)
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SearchSpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, BoundViolation, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
