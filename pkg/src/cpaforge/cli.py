"""``forge`` command line.

Exit codes: 0 ok, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import netlist as nlio
from .adders import AdderError, AdderKind, AdderSpec, compose_hybrid, gen_adder, hybrid_spec
from .config import ConfigError
from .costmodel import DEFAULT_SEED, DEFAULT_VECTORS, CostReport, CostTables, area, estimate_activity, load_tables, power
from .multiplier import build_front_end, build_multiplier
from .partition import RegionPartition, closed_form_partition, detect_regions, recommend
from .study import StudyConfig, StudyError, load_config, run_study
from .timing import ArrivalProfile, DelayModel, completion_time, cpa_input_profile, load_model, sta_arrival
from .verify import verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_KINDS = (AdderKind.RCA, AdderKind.BCSLA, AdderKind.BCLA)


class UsageError(Exception):
    pass


def _seed(args_seed, fallback):
    if args_seed is not None:
        return args_seed
    env = os.environ.get("FORGE_SEED")
    if env:
        try:
            return int(env, 0)
        except ValueError:
            raise UsageError(f"FORGE_SEED={env!r} is not an integer")
    return fallback


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _kind_list(text: str) -> list[AdderKind]:
    try:
        return [AdderKind(x.strip().upper()) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown adder kind in {text!r}")


def _write(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _model(args) -> DelayModel:
    return load_model(args.model) if getattr(args, "model", None) else DelayModel()


def cmd_gen_mult(args):
    if args.cpa is AdderKind.HYBRID:
        rec = recommend(closed_form_partition(args.n), args.n)
        nl = build_multiplier(args.n, hybrid_spec(rec.widths, rec.kinds), args.max_fanout)
    elif args.cpa:
        nl = build_multiplier(args.n, args.cpa, args.max_fanout)
    else:
        nl = build_front_end(args.n, args.max_fanout).netlist
    _write(nlio.dumps(nl), args.out)
    return EXIT_OK


def cmd_gen_adder(args):
    if args.kind is AdderKind.HYBRID:
        raise UsageError("use gen-hybrid for HYBRID adders")
    _write(nlio.dumps(gen_adder(AdderSpec(args.kind, args.width, args.block))), args.out)
    return EXIT_OK


def cmd_gen_hybrid(args):
    part = RegionPartition.from_widths(args.n, args.partition) if args.partition else closed_form_partition(args.n)
    kinds = args.kinds or [k for k, w in zip(DEFAULT_KINDS, part.widths) if w > 0]
    _write(nlio.dumps(compose_hybrid(part, kinds)), args.out)
    return EXIT_OK


def cmd_profile(args):
    prof = cpa_input_profile(build_front_end(args.n, args.max_fanout), _model(args))
    _write(prof.to_csv(), args.csv)
    return EXIT_OK


def cmd_partition(args):
    model = _model(args)
    eps = model.flat_tolerance if args.epsilon is None else args.epsilon
    if args.closed_form:
        part = closed_form_partition(args.n)
        source = "closed_form"
    else:
        if args.from_profile:
            prof = ArrivalProfile.from_csv(Path(args.from_profile).read_text())
            if prof.n != args.n:
                raise UsageError(f"profile is for n={prof.n}, not {args.n}")
        else:
            prof = cpa_input_profile(build_front_end(args.n), model)
        part = detect_regions(prof, eps)
        source = "detected"
    rec = recommend(part, args.n)
    doc = {"n": args.n, "source": source, "epsilon": None if args.closed_form else eps, "partition": part.to_dict(), "recommendation": rec.to_dict()}
    _write(json.dumps(doc, indent=1) + "\n", args.json)
    return EXIT_OK


def cmd_cost(args):
    nl = nlio.load(args.netlist)
    tables = load_tables(args.tables) if args.tables else CostTables()
    model = _model(args)
    seed = _seed(args.seed, DEFAULT_SEED)
    if args.profile:
        completion = completion_time(nl, ArrivalProfile.from_csv(Path(args.profile).read_text()), model).time
    else:
        times = sta_arrival(nl, {i: 0.0 for i in nl.primary_inputs}, model)
        completion = max((times[o] for o in nl.outputs), default=0.0)
    act = estimate_activity(nl, args.vectors, seed)
    report = CostReport(nl.name, completion, area(nl, tables), power(nl, act, tables), seed, args.vectors)
    _write(report.to_json(), args.json)
    return EXIT_OK


def cmd_verify(args):
    nl = nlio.load(args.netlist)
    seed = _seed(args.seed, 0)
    res = verify(nl, args.oracle, exhaustive=args.exhaustive, vectors=args.random, seed=seed)
    mode = "exhaustive" if args.exhaustive else f"random {args.random} seed {seed}"
    if res.passed:
        print(f"PASS {nl.name}: {res.cases} cases ({mode})")
        return EXIT_OK
    print(f"FAIL {nl.name}: counterexample {json.dumps(res.counterexample)} ({mode})")
    return EXIT_FAIL


def cmd_study(args):
    cfg = load_config(args.config) if args.config else StudyConfig()
    changes = {}
    if args.n:
        changes["ns"] = tuple(args.n)
    if args.out:
        changes["out_dir"] = args.out
    if args.vectors is not None:
        changes["vectors"] = args.vectors
    if args.model:
        changes["model_path"] = args.model
    if args.tables:
        changes["tables_path"] = args.tables
    changes["seed"] = _seed(args.seed, cfg.seed)
    cfg = StudyConfig(**{**cfg.__dict__, **changes})
    try:
        report = run_study(cfg)
    except StudyError as exc:
        print(f"study failed: {exc}", file=sys.stderr)
        return EXIT_FAIL if exc.verification else EXIT_USAGE
    if not cfg.out_dir:
        sys.stdout.write(report.to_json())
    else:
        for s in report.sizes:
            rec = "/".join(s["recommendation"]["kinds"])
            print(f"n={s['n']}: recommendation {rec}, hybrid<=RCA {s['summary']['hybrid_le_rca']}")
    return EXIT_OK


def cmd_export_hdl(args):
    _write(nlio.to_verilog(nlio.load(args.netlist)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="forge", description="Final-adder generator and analyzer for Dadda multipliers.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen-mult", help="Dadda front-end netlist (optionally with a final adder)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--max-fanout", type=int)
    s.add_argument("--cpa", type=lambda t: AdderKind(t.upper()), help="append this final adder; outputs p[]")
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen_mult)

    s = sub.add_parser("gen-adder", help="one adder architecture")
    s.add_argument("--kind", type=lambda t: AdderKind(t.upper()), required=True, choices=list(AdderKind), metavar="KIND")
    s.add_argument("--width", type=int, required=True)
    s.add_argument("--block", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen_adder)

    s = sub.add_parser("gen-hybrid", help="three-region hybrid final adder for an n x n multiplier")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--partition", type=_int_list, help="region widths r1,r2,r3 (default: closed form)")
    s.add_argument("--kinds", type=_kind_list, help="per-region kinds (default RCA,BCSLA,BCLA)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen_hybrid)

    s = sub.add_parser("profile", help="arrival profile at the final adder inputs")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--model")
    s.add_argument("--max-fanout", type=int)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_profile)

    s = sub.add_parser("partition", help="three-region partition and adder recommendation")
    s.add_argument("--n", type=int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--from-profile")
    g.add_argument("--closed-form", action="store_true")
    s.add_argument("--epsilon", type=float)
    s.add_argument("--model")
    s.add_argument("--json")
    s.set_defaults(func=cmd_partition)

    s = sub.add_parser("cost", help="completion / area / power report for a netlist")
    s.add_argument("--netlist", required=True)
    s.add_argument("--tables")
    s.add_argument("--model")
    s.add_argument("--profile", help="bit,arrival CSV for adder inputs (default: all inputs at 0)")
    s.add_argument("--vectors", type=int, default=DEFAULT_VECTORS)
    s.add_argument("--seed", type=lambda t: int(t, 0))
    s.add_argument("--json")
    s.set_defaults(func=cmd_cost)

    s = sub.add_parser("verify", help="check a netlist against integer add / multiply")
    s.add_argument("--netlist", required=True)
    s.add_argument("--oracle", choices=["add", "mult"], required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--random", type=int, default=100_000, metavar="N")
    s.add_argument("--seed", type=lambda t: int(t, 0))
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("study", help="run the full comparison for several multiplier sizes")
    s.add_argument("--config")
    s.add_argument("--n", type=_int_list)
    s.add_argument("--out")
    s.add_argument("--model")
    s.add_argument("--tables")
    s.add_argument("--vectors", type=int)
    s.add_argument("--seed", type=lambda t: int(t, 0))
    s.set_defaults(func=cmd_study)

    s = sub.add_parser("export-hdl", help="structural Verilog for a netlist")
    s.add_argument("--netlist", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_export_hdl)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError, AdderError, nlio.NetlistError, ValueError, OSError) as exc:
        print(f"forge {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
