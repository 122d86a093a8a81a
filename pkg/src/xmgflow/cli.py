"""Command-line front end.

Verbs: compile, schedule, mfresub, pareto-report, edp, interpret.  Every
invocation prints the effective seed so reruns are reproducible from logs
alone.  All outputs are deterministic given flags + seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import aiger, simulate, textio
from .edp import CostModel, load_cost_model, place, estimate_edp, with_rows
from .instructions import (
    emit_instructions,
    parse_instructions,
    seq_to_json,
    write_instructions,
)
from .mfresub import mfresub
from .pareto import CompilerConfig, run_with_log, select_final
from .passes import cleanup
from .schedule import (
    BoundExceeded,
    ScheduleRequest,
    interpret,
    schedule_exact,
    schedule_heuristic,
)


def _add_config_flags(p):
    p.add_argument("--rounds", type=int, default=20)
    p.add_argument("--lambda", dest="lam", type=float, default=0.6)
    p.add_argument("--beta", type=float, default=1.1)
    p.add_argument("--k-cmds", type=int, default=10)
    p.add_argument("--n-trial", type=int, default=500000)
    p.add_argument("--rows", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact-threshold", type=int, default=24)
    p.add_argument("--jobs", type=int, default=1)


def _config(args) -> CompilerConfig:
    return CompilerConfig(
        rounds=args.rounds,
        lam=args.lam,
        beta=args.beta,
        k_cmds=args.k_cmds,
        n_trial=args.n_trial,
        rows_per_array=args.rows,
        seed=args.seed,
        exact_threshold=args.exact_threshold,
        jobs=args.jobs,
    )


def _load_netlist(path: str):
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".xmg"):
        return textio.parse_xmg(text)
    return aiger.parse_aiger(text, name=Path(path).stem)


def _model(args) -> CostModel:
    model = load_cost_model(getattr(args, "cost_config", None))
    return with_rows(model, args.rows) if hasattr(args, "rows") else model


def _design_record(d, model):
    return {
        "size": d.size,
        "mf": d.mf,
        "edp": estimate_edp(d.scheduled, model),
        "provenance": d.provenance,
    }


def _cmd_compile(args) -> int:
    net = _load_netlist(args.input)
    cfg = _config(args)
    model = _model(args)
    frontier, logs = run_with_log(net, cfg)
    rows_available = cfg.rows_per_array - net.num_pis
    sel = select_final(frontier, rows_available, model)
    placement = place(sel.scheduled, model)
    seq = emit_instructions(sel.scheduled, placement)

    prefix = args.out or Path(args.input).stem
    instr_path = Path(f"{prefix}.instr")
    instr_path.write_text(write_instructions(seq), encoding="utf-8")
    Path(f"{prefix}.instr.json").write_text(seq_to_json(seq), encoding="utf-8")
    usage = list(enumerate(sel.scheduled.trace, start=1))
    report = textio.render_report(
        [_design_record(d, model) for d in frontier],
        usage,
        extra={
            "seed": cfg.seed,
            "selected": _design_record(sel, model),
            "rounds": [
                {"round": lg.round, "outcome": lg.outcome, "category": lg.category}
                for lg in logs
            ],
        },
    )
    Path(f"{prefix}.report.json").write_text(report, encoding="utf-8")
    print(f"effective seed: {cfg.seed}")
    print(f"frontier: {frontier.points()}")
    print(f"selected: size {sel.size} mf {sel.mf} copies {placement.num_copies}")
    print(f"wrote {instr_path} {prefix}.instr.json {prefix}.report.json")
    return 0


def _cmd_schedule(args) -> int:
    net = _load_netlist(args.input)
    if not args.raw:
        net = cleanup(net)
    req = ScheduleRequest(net, mf_bound=args.bound)
    if args.exact:
        design = schedule_exact(req, node_limit=args.exact_threshold)
    else:
        design = schedule_heuristic(req)
    print(f"effective seed: {args.seed}")
    if isinstance(design, BoundExceeded):
        print(f"bound exceeded: no order fits {design.bound} rows", file=sys.stderr)
        return 1
    print(f"size {design.size} mf {design.mf}")
    print("usage " + " ".join(str(u) for u in design.trace))
    return 0


def _cmd_mfresub(args) -> int:
    net = cleanup(_load_netlist(args.input))
    design = schedule_heuristic(ScheduleRequest(net))
    res = mfresub(design, n_trial=args.n_trial, seed=args.seed)
    print(f"effective seed: {args.seed}")
    print(
        f"category {res.category} fired {res.fired} "
        f"size {design.size}->{res.design.size} mf {design.mf}->{res.design.mf}"
    )
    return 0


def _cmd_pareto_report(args) -> int:
    net = _load_netlist(args.input)
    cfg = _config(args)
    model = _model(args)
    frontier, logs = run_with_log(net, cfg)
    sel = select_final(frontier, cfg.rows_per_array - net.num_pis, model)
    usage = list(enumerate(sel.scheduled.trace, start=1))
    text = textio.render_report(
        [_design_record(d, model) for d in frontier],
        usage,
        extra={"seed": cfg.seed, "selected": _design_record(sel, model)},
    )
    print(f"effective seed: {cfg.seed}")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_edp(args) -> int:
    net = cleanup(_load_netlist(args.input))
    design = schedule_heuristic(ScheduleRequest(net))
    model = _model(args)
    placement = place(design, model)
    n_ops, n_copies = design.size, placement.num_copies
    energy = n_ops * model.energy_op + n_copies * model.energy_copy
    delay = n_ops * model.delay_op + n_copies * model.delay_copy
    print(f"effective seed: {args.seed}")
    print(
        f"size {n_ops} mf {design.mf} arrays {placement.num_arrays} "
        f"copies {n_copies} energy {energy} delay {delay} edp {energy * delay}"
    )
    return 0


def _cmd_interpret(args) -> int:
    seq = parse_instructions(Path(args.input).read_text(encoding="utf-8"))
    bits = args.pi
    if len(bits) != seq.num_pis or set(bits) - {"0", "1"}:
        raise ValueError(
            f"--pi wants {seq.num_pis} binary digits, got {bits!r}"
        )
    pi_values = np.array(
        [[np.uint64(1) if b == "1" else np.uint64(0)] for b in bits], dtype=np.uint64
    )
    out = interpret(seq, pi_values, args.rows)
    print("effective seed: 0")
    print("outputs " + "".join(str(int(w[0] & np.uint64(1))) for w in out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="xmgflow",
        description="iterative logic compiler for in-memory SIMD execution",
    )
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("compile", help="full flow: frontier search + instruction emission")
    p.add_argument("input")
    p.add_argument("--out", help="output file prefix (default: input stem)")
    p.add_argument("--cost-config")
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_compile)

    p = sub.add_parser("schedule", help="schedule one netlist and print its usage trace")
    p.add_argument("input")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--raw", action="store_true", help="skip cleanup passes")
    p.add_argument("--bound", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact-threshold", type=int, default=24)
    p.set_defaults(fn=_cmd_schedule)

    p = sub.add_parser("mfresub", help="peak resubstitution on a baseline schedule")
    p.add_argument("input")
    p.add_argument("--n-trial", type=int, default=500000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_mfresub)

    p = sub.add_parser("pareto-report", help="frontier search, report only")
    p.add_argument("input")
    p.add_argument("--out")
    p.add_argument("--cost-config")
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_pareto_report)

    p = sub.add_parser("edp", help="cost breakdown for a baseline schedule")
    p.add_argument("input")
    p.add_argument("--cost-config")
    p.add_argument("--rows", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_edp)

    p = sub.add_parser("interpret", help="replay an instruction file on one input")
    p.add_argument("input")
    p.add_argument("--pi", required=True, help="input bits, first input first")
    p.add_argument("--rows", type=int, default=256)
    p.set_defaults(fn=_cmd_interpret)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
