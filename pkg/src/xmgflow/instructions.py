"""Hardware instruction sequences: emission, text rendering, JSON sidecar.

One instruction executes per clock, numbered consecutively from 1.  MAJ/XOR
read three rows and write one, all inside a single array (the shared zero
row 0 is array-agnostic); COPY moves one row anywhere.  The text form is
line-oriented::

    inputs 9
    rows 1 2 3 4 5 6 7 8 9
    R10 <- MAJ(R1, R2, R0)
    R10 <- MAJ(R10, !R11, R8)
    output R10

Clock indexes are implicit line order.  `!` marks a complemented read.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .xmg import MAJ, XOR


class EmitError(ValueError):
    pass


@dataclass(frozen=True)
class SrcRef:
    row: int
    neg: bool = False

    def render(self) -> str:
        return f"!R{self.row}" if self.neg else f"R{self.row}"


@dataclass(frozen=True)
class Instruction:
    clock: int
    op: str  # MAJ | XOR | COPY
    dest: int
    srcs: tuple

    def render(self) -> str:
        args = ", ".join(s.render() for s in self.srcs)
        return f"R{self.dest} <- {self.op}({args})"


@dataclass(frozen=True)
class InstructionSequence:
    num_pis: int
    pi_rows: tuple
    instructions: tuple
    pos: tuple  # (row, neg) per primary output

    def __post_init__(self):
        for i, ins in enumerate(self.instructions, start=1):
            if ins.clock != i:
                raise EmitError(f"clock {ins.clock} at position {i}: must be consecutive from 1")
            want = 1 if ins.op == "COPY" else 3
            if len(ins.srcs) != want:
                raise EmitError(f"clock {ins.clock}: {ins.op} takes {want} source(s)")

    @property
    def num_copies(self) -> int:
        return sum(1 for ins in self.instructions if ins.op == "COPY")


def emit_instructions(design, placement) -> InstructionSequence:
    """Lower a scheduled design onto physical rows.

    Operations are emitted in netlist index order (the schedule order); each
    operation is preceded by the COPY transfers its placement requires, with
    the copied source read thereafter from its staging row.
    """
    net = design.netlist
    if design.temps:
        raise EmitError("designs with temporary inputs have no preload channel")
    by_op = {}
    for rec in placement.copies:
        by_op.setdefault(rec.op, []).append(rec)
    row_of = placement.value_row
    instrs = []
    clock = 1
    for v in net.op_ids():
        staged = {}
        for rec in by_op.get(v, ()):
            instrs.append(Instruction(clock, "COPY", rec.dest_row, (SrcRef(rec.src_row),)))
            clock += 1
            staged[rec.src_row] = rec.dest_row
        node = net.node(v)
        srcs = []
        for e in node.fanins:
            r = 0 if e.target == 0 else row_of[e.target]
            srcs.append(SrcRef(staged.get(r, r), e.neg))
        instrs.append(Instruction(clock, node.kind, row_of[v], tuple(srcs)))
        clock += 1
    pos = tuple((0 if e.target == 0 else row_of[e.target], e.neg) for e in net.pos)
    return InstructionSequence(net.num_pis, tuple(placement.pi_rows), tuple(instrs), pos)


# -- text form --------------------------------------------------------------------

_SRC_RE = re.compile(r"^(!?)R(\d+)$")
_INS_RE = re.compile(r"^R(\d+) <- (MAJ|XOR|COPY)\((.*)\)$")


def write_instructions(seq: InstructionSequence) -> str:
    lines = [f"inputs {seq.num_pis}"]
    lines.append("rows " + " ".join(str(r) for r in seq.pi_rows))
    for ins in seq.instructions:
        lines.append(ins.render())
    for row, neg in seq.pos:
        lines.append(f"output {'!' if neg else ''}R{row}")
    return "\n".join(lines) + "\n"


def _parse_src(tok: str, line_no: int) -> SrcRef:
    m = _SRC_RE.match(tok.strip())
    if not m:
        raise EmitError(f"line {line_no}: bad source {tok!r}")
    return SrcRef(int(m.group(2)), m.group(1) == "!")


def parse_instructions(text: str) -> InstructionSequence:
    num_pis = None
    pi_rows = ()
    instrs = []
    pos = []
    clock = 1
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("inputs "):
            num_pis = int(line.split()[1])
        elif line.startswith("rows"):
            pi_rows = tuple(int(t) for t in line.split()[1:])
        elif line.startswith("output "):
            src = _parse_src(line[len("output "):], line_no)
            pos.append((src.row, src.neg))
        else:
            m = _INS_RE.match(line)
            if not m:
                raise EmitError(f"line {line_no}: unrecognized instruction {line!r}")
            dest, op, args = int(m.group(1)), m.group(2), m.group(3)
            srcs = tuple(_parse_src(t, line_no) for t in args.split(","))
            instrs.append(Instruction(clock, op, dest, srcs))
            clock += 1
    if num_pis is None:
        raise EmitError("missing 'inputs' header")
    if len(pi_rows) != num_pis:
        raise EmitError(f"'rows' lists {len(pi_rows)} rows for {num_pis} inputs")
    return InstructionSequence(num_pis, pi_rows, tuple(instrs), tuple(pos))


# -- JSON sidecar -----------------------------------------------------------------


def seq_to_json(seq: InstructionSequence) -> str:
    doc = {
        "num_pis": seq.num_pis,
        "pi_rows": list(seq.pi_rows),
        "instructions": [
            {
                "clock": ins.clock,
                "op": ins.op,
                "dest": ins.dest,
                "srcs": [{"row": s.row, "neg": s.neg} for s in ins.srcs],
            }
            for ins in seq.instructions
        ],
        "pos": [{"row": r, "neg": n} for r, n in seq.pos],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def seq_from_json(text: str) -> InstructionSequence:
    doc = json.loads(text)
    instrs = tuple(
        Instruction(
            d["clock"],
            d["op"],
            d["dest"],
            tuple(SrcRef(s["row"], bool(s["neg"])) for s in d["srcs"]),
        )
        for d in doc["instructions"]
    )
    pos = tuple((d["row"], bool(d["neg"])) for d in doc["pos"])
    return InstructionSequence(doc["num_pis"], tuple(doc["pi_rows"]), instrs, pos)
