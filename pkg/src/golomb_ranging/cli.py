"""Command-line entry point: ``golomb-ranging <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path

import numpy as np

from . import harness
from .crlb import default_sigma_grid
from .ga import Exhausted, GaConfig, synthesize_group, synthesize_ruler
from .rulers import (OPTIMAL_LENGTHS, MarkConstraint, check_group, is_golomb,
                     iter_ruler_file, measure_set, read_groups, ruler_record,
                     write_rulers)
from .tables import erq_group, fra_group


def _orders(text: str) -> list[int]:
    """``"5..15"``, ``"9,9,10"`` or a single order."""
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise argparse.ArgumentTypeError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad order list {text!r}") from None


def _read_forbidden(path) -> set[int]:
    """Marks to exclude: a ruler file, or plain integers separated by commas/whitespace."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return {m for e in iter_ruler_file(path) for m in e.ruler.absolute}
    return {int(v) for v in re.split(r"[\s,]+", text) if v}


def _ga_config(args) -> GaConfig:
    kw = {"population_size": args.pop, "max_generations": args.generations, "seed": args.seed}
    if args.mutations is not None:
        kw["max_mutations"] = args.mutations
    if args.restarts is not None:
        kw["max_restarts"] = args.restarts
    return GaConfig(**kw)


def cmd_ruler_gen(args) -> int:
    orders = args.order
    grouping = args.grouping.upper() if args.grouping else None
    if len(orders) == 1 and args.count > 1:
        orders = orders * args.count
    if not grouping and len(orders) > 1:
        print("several rulers need --grouping", file=sys.stderr)
        return 2
    span = args.span
    if span is None:
        span = 99 if grouping else 3 * OPTIMAL_LENGTHS.get(orders[0], orders[0] ** 2)
    admissible = set(range(span + 1))
    if args.forbidden:
        admissible -= _read_forbidden(args.forbidden)
    constraint = MarkConstraint(frozenset(admissible))
    config = _ga_config(args)
    rng = np.random.default_rng(args.seed)

    stats = {"seed": args.seed, "span": span}
    if grouping:
        name = args.name or grouping.lower()
        try:
            group = synthesize_group(orders, grouping, constraint, config, rng,
                                     target_length=args.target_length)
            rulers, complete = list(group.rulers), True
        except Exhausted as exc:
            print(f"warning: {exc}", file=sys.stderr)
            rulers, complete = exc.partial, False
        records = [ruler_record(r, name, grouping) for r in rulers]
        stats.update(rulers=len(rulers), requested=len(orders), complete=complete,
                     lengths=[r.length for r in rulers])
    else:
        res = synthesize_ruler(orders[0], constraint, config, rng,
                               target_length=args.target_length)
        records = [ruler_record(res.ruler)]
        stats.update(order=orders[0], length=res.ruler.length, feasible=res.feasible,
                     generations=res.generations, restarts=res.restarts,
                     escalations=res.escalations)
        if res.benchmark is not None:
            stats.update(n_opt=res.benchmark.optimal_length, eta=res.benchmark.eta)
        complete = res.feasible
    write_rulers(args.out, records, [{"stats": stats}])
    print(json.dumps(stats))
    return 0 if complete else 1


def cmd_ruler_verify(args) -> int:
    bad = 0
    for i, entry in enumerate(iter_ruler_file(args.file)):
        r = entry.ruler
        ms = measure_set(r)
        ok = is_golomb(r)
        bad += not ok
        print(f"ruler {i}: K={r.order} N={r.length} M={ms.M} R={ms.repetitions} "
              f"golomb={'yes' if ok else 'no'} marks={list(r.absolute)}")
    for name, group in read_groups(args.file).items():
        violations = check_group(group) if len(group.rulers) > 1 else []
        bad += bool(violations)
        print(f"group {name} ({group.grouping}, {len(group.rulers)} rulers, span {group.span}): "
              + ("ok" if not violations else "; ".join(violations)))
    return 1 if bad else 0


def cmd_crlb(args) -> int:
    entries = list(iter_ruler_file(args.ruler))
    if not entries:
        print(f"no rulers in {args.ruler}", file=sys.stderr)
        return 2
    sigmas = default_sigma_grid(args.points, args.sigma_min, args.sigma_max)
    out = Path(args.out)
    for i, entry in enumerate(entries):
        if not is_golomb(entry.ruler):
            print(f"ruler {i} is not a Golomb ruler", file=sys.stderr)
            return 2
        rows = harness.crlb_table(entry.ruler, args.mode, args.delta_f, sigmas)
        path = out if len(entries) == 1 else out.with_name(f"{out.stem}_{i}{out.suffix}")
        harness.write_crlb(path, rows)
    return 0


def _load_spec(path) -> harness.ExperimentSpec:
    spec = harness.ExperimentSpec.from_json(path)
    if spec.ruler_file is not None:
        spec.ruler_file = str(harness.resolve_path(path, spec.ruler_file))
    return spec


def cmd_simulate(args) -> int:
    spec = _load_spec(args.spec)
    out = args.out or spec.out
    if out is None:
        print("no output path (--out or spec 'out')", file=sys.stderr)
        return 2
    rows = harness.run_experiment(spec, dump_spectrum=args.dump_spectrum)
    harness.write_experiment(out, rows)
    return 0


def cmd_multipoint(args) -> int:
    spec = _load_spec(args.spec)
    if args.group in ("erq", "fra"):
        group = erq_group() if args.group == "erq" else fra_group()
    else:
        groups = read_groups(args.group)
        if len(groups) != 1 and args.name is None:
            print(f"{args.group} holds groups {sorted(groups)}; pick one with --name",
                  file=sys.stderr)
            return 2
        group = groups[args.name] if args.name else next(iter(groups.values()))
    out = args.out or spec.out
    if out is None:
        print("no output path (--out or spec 'out')", file=sys.stderr)
        return 2
    harness.write_multipoint(out, harness.run_multipoint(group, spec))
    return 0


def cmd_bench_ga(args) -> int:
    config = _ga_config(args)
    rows = harness.benchmark_ga(args.orders, args.runs, config, args.seed)
    harness.write_bench(args.out, rows)
    for r in rows:
        print(f"K={r.order:2d} N_opt={r.n_opt:3d} eta={100 * r.mean_eta:6.2f}% "
              f"fail={r.failures} max {max(r.seconds):.1f}s/run", file=sys.stderr)
    return 0


def _add_ga_args(p, generations=500):
    p.add_argument("--pop", type=int, default=4, help="population size P")
    p.add_argument("--mutations", type=int, default=None, help="mutation tries C (default 200*K)")
    p.add_argument("--generations", type=int, default=generations, help="generations G")
    p.add_argument("--restarts", type=int, default=None, help="populations per s_max")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="golomb-ranging", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    ruler = sub.add_parser("ruler", help="generate or verify Golomb rulers")
    rsub = ruler.add_subparsers(dest="ruler_command", required=True)
    gen = rsub.add_parser("gen", help="synthesize a ruler or an orthogonal group")
    gen.add_argument("--order", type=_orders, required=True,
                     help="order K, or a comma list of orders for ERQ groups")
    gen.add_argument("--count", type=int, default=1, help="rulers in the group (Q)")
    gen.add_argument("--grouping", choices=["erq", "fra", "ERQ", "FRA"])
    gen.add_argument("--target-length", type=int, default=None, help="ERQ common length")
    gen.add_argument("--span", type=int, default=None, help="largest admissible mark")
    gen.add_argument("--forbidden", help="file of marks to exclude")
    gen.add_argument("--name", help="group name written to the file")
    _add_ga_args(gen)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_ruler_gen)
    ver = rsub.add_parser("verify", help="check rulers and groups in a file")
    ver.add_argument("file")
    ver.set_defaults(func=cmd_ruler_verify)

    cr = sub.add_parser("crlb", help="Fisher information of marks vs measures")
    cr.add_argument("--ruler", required=True, help="ruler file (one CSV per ruler)")
    cr.add_argument("--mode", choices=["pdoa", "toa"], default="pdoa")
    cr.add_argument("--delta-f", type=float, default=1e6)
    cr.add_argument("--sigma-min", type=float, default=1e-2)
    cr.add_argument("--sigma-max", type=float, default=0.9)
    cr.add_argument("--points", type=int, default=200)
    cr.add_argument("--out", required=True)
    cr.set_defaults(func=cmd_crlb)

    sim = sub.add_parser("simulate", help="Monte Carlo ranging experiment")
    sim.add_argument("--spec", required=True, help="experiment JSON")
    sim.add_argument("--out")
    sim.add_argument("--dump-spectrum", help="CSV for the first MUSIC pseudo-spectrum")
    sim.set_defaults(func=cmd_simulate)

    mp = sub.add_parser("multipoint", help="experiment over every ruler of a group")
    mp.add_argument("--spec", required=True)
    mp.add_argument("--group", required=True, help="'erq', 'fra' (built-in) or a ruler file")
    mp.add_argument("--name", help="group name inside the ruler file")
    mp.add_argument("--out")
    mp.set_defaults(func=cmd_multipoint)

    bench = sub.add_parser("bench-ga", help="relative error of the GA per order")
    bench.add_argument("--orders", type=_orders, default=list(range(5, 16)))
    bench.add_argument("--runs", type=int, default=20)
    _add_ga_args(bench)
    bench.add_argument("--out", required=True)
    bench.set_defaults(func=cmd_bench_ga)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
