"""ASCII AIGER ("aag") import.

Each AND gate becomes MAJ(a, b, 0) and inverted literals become
complemented edges, so the imported netlist has exactly one operation node
per AND gate.  Only combinational files are accepted: a non-zero latch
count is rejected.  Gate definitions may appear out of order; they are
topologically sorted while preserving file order among ready gates.
Symbol and comment sections are ignored.
"""

from __future__ import annotations

from .xmg import CONST0, MAJ, Edge, XmgNetlist, XmgNode


class AigerError(ValueError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _ints(line_no, line, expect):
    parts = line.split()
    if len(parts) != expect:
        raise AigerError(line_no, f"expected {expect} integers, got {line!r}")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise AigerError(line_no, f"non-integer token in {line!r}") from None
    if any(v < 0 for v in vals):
        raise AigerError(line_no, f"negative value in {line!r}")
    return vals


def parse_aiger(text, name=""):
    lines = text.splitlines()
    if not lines:
        raise AigerError(1, "empty file")
    header = lines[0].split()
    if len(header) != 6 or header[0] != "aag":
        raise AigerError(1, f"bad header {lines[0]!r} (want 'aag M I L O A')")
    try:
        m, i, l, o, a = (int(x) for x in header[1:])
    except ValueError:
        raise AigerError(1, f"non-integer header field in {lines[0]!r}") from None
    if l != 0:
        raise AigerError(1, f"latches are not supported (L={l})")
    pos = 1
    inputs = []
    for k in range(i):
        if pos >= len(lines):
            raise AigerError(pos + 1, "unexpected end of file in inputs")
        (lit,) = _ints(pos + 1, lines[pos], 1)
        if lit % 2 or lit == 0:
            raise AigerError(pos + 1, f"input literal {lit} must be even and non-zero")
        inputs.append(lit // 2)
        pos += 1
    out_lits = []
    for k in range(o):
        if pos >= len(lines):
            raise AigerError(pos + 1, "unexpected end of file in outputs")
        (lit,) = _ints(pos + 1, lines[pos], 1)
        if lit > 2 * m + 1:
            raise AigerError(pos + 1, f"output literal {lit} exceeds 2*M+1")
        out_lits.append(lit)
        pos += 1
    ands = []
    for k in range(a):
        if pos >= len(lines):
            raise AigerError(pos + 1, "unexpected end of file in AND gates")
        lhs, r0, r1 = _ints(pos + 1, lines[pos], 3)
        if lhs % 2 or lhs == 0:
            raise AigerError(pos + 1, f"AND output literal {lhs} must be even")
        if max(lhs, r0, r1) > 2 * m + 1:
            raise AigerError(pos + 1, "AND literal exceeds 2*M+1")
        ands.append((pos + 1, lhs // 2, r0, r1))
        pos += 1
    # Remaining lines: symbols / comments, ignored.

    var_of_pi = {}
    for idx, v in enumerate(inputs):
        if v in var_of_pi:
            raise AigerError(1, f"duplicate input variable {v}")
        var_of_pi[v] = idx + 1  # PI ids are 1..I in declaration order

    defined = dict(var_of_pi)
    gate_of = {}
    for line_no, lhs_var, r0, r1 in ands:
        if lhs_var in var_of_pi:
            raise AigerError(line_no, f"AND redefines input variable {lhs_var}")
        if lhs_var in gate_of:
            raise AigerError(line_no, f"duplicate AND definition for variable {lhs_var}")
        gate_of[lhs_var] = (line_no, r0, r1)

    # Topological order over gates, stable in file order among ready ones.
    order = []
    placed = set()
    pending = [(line_no, v, r0, r1) for (line_no, v, r0, r1) in ands]
    while pending:
        progressed = False
        rest = []
        for line_no, v, r0, r1 in pending:
            deps = [r0 // 2, r1 // 2]
            ok = True
            for d in deps:
                if d == 0 or d in var_of_pi or d in placed:
                    continue
                if d not in gate_of:
                    raise AigerError(line_no, f"literal references undefined variable {d}")
                ok = False
            if ok:
                order.append((line_no, v, r0, r1))
                placed.add(v)
                progressed = True
            else:
                rest.append((line_no, v, r0, r1))
        if not progressed:
            raise AigerError(rest[0][0], "cyclic AND definitions")
        pending = rest

    node_of = dict(var_of_pi)  # var -> netlist id
    nodes = []
    first_op = i + 1

    def edge_of(line_no, lit):
        v = lit // 2
        neg = bool(lit & 1)
        if v == 0:
            return Edge(CONST0, neg)
        nid = node_of.get(v)
        if nid is None:
            raise AigerError(line_no, f"literal references undefined variable {v}")
        return Edge(nid, neg)

    for line_no, v, r0, r1 in order:
        ea = edge_of(line_no, r0)
        eb = edge_of(line_no, r1)
        node_of[v] = first_op + len(nodes)
        nodes.append(XmgNode(MAJ, (ea, eb, Edge(CONST0))))

    pos_edges = tuple(edge_of(1, lit) for lit in out_lits)
    return XmgNetlist(i, nodes, pos_edges, name)


def parse_aiger_file(path):
    with open(path, "r", encoding="ascii") as fh:
        return parse_aiger(fh.read(), name=_stem(path))


def _stem(path):
    base = str(path).rsplit("/", 1)[-1]
    return base.rsplit(".", 1)[0]
