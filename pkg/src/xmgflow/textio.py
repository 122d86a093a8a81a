"""Line-oriented text formats: netlist serialization and run reports.

Netlist grammar (diff-friendly, one node per line)::

    name adder
    inputs 4
    outputs 2
    N5 = MAJ(N1, N2, N0)
    N6 = XOR(!N5, N3, N4)
    output N6
    output !N5

``N0`` is the constant-zero literal, ``N1..Nk`` the primary inputs, and `!`
complements.  The report document is JSON: a design record per frontier
member (size, memory footprint, estimated energy-delay product) plus the
selected design's per-cycle usage points.
"""

from __future__ import annotations

import json
import re

from .xmg import Edge, MAJ, XOR, XmgNetlist, XmgNode


class TextFormatError(ValueError):
    def __init__(self, line_no, msg):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {msg}")


_LIT_RE = re.compile(r"^(!?)N(\d+)$")
_NODE_RE = re.compile(r"^N(\d+) = (MAJ|XOR)\((.*)\)$")


def write_xmg(net: XmgNetlist) -> str:
    lines = []
    if net.name:
        lines.append(f"name {net.name}")
    lines.append(f"inputs {net.num_pis}")
    lines.append(f"outputs {len(net.pos)}")
    for nid in net.op_ids():
        node = net.node(nid)
        args = ", ".join(f"{'!' if e.neg else ''}N{e.target}" for e in node.fanins)
        lines.append(f"N{nid} = {node.kind}({args})")
    for e in net.pos:
        lines.append(f"output {'!' if e.neg else ''}N{e.target}")
    return "\n".join(lines) + "\n"


def _parse_lit(tok: str, line_no: int, max_id: int) -> Edge:
    m = _LIT_RE.match(tok.strip())
    if not m:
        raise TextFormatError(line_no, f"bad literal {tok!r}")
    target = int(m.group(2))
    if target > max_id:
        raise TextFormatError(line_no, f"literal N{target} is not defined yet")
    return Edge(target, m.group(1) == "!")


def parse_xmg(text: str) -> XmgNetlist:
    name = ""
    num_pis = None
    num_pos = None
    nodes = []
    pos = []
    next_id = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("name "):
            name = line[len("name "):].strip()
        elif line.startswith("inputs "):
            num_pis = int(line.split()[1])
            next_id = num_pis + 1
        elif line.startswith("outputs "):
            num_pos = int(line.split()[1])
        elif line.startswith("output "):
            if next_id is None:
                raise TextFormatError(line_no, "output before 'inputs' header")
            pos.append(_parse_lit(line[len("output "):], line_no, next_id - 1))
        else:
            m = _NODE_RE.match(line)
            if not m:
                raise TextFormatError(line_no, f"unrecognized line {line!r}")
            if next_id is None:
                raise TextFormatError(line_no, "node before 'inputs' header")
            nid, kind = int(m.group(1)), m.group(2)
            if nid != next_id:
                raise TextFormatError(line_no, f"expected node N{next_id}, got N{nid}")
            fanins = tuple(
                _parse_lit(t, line_no, nid - 1) for t in m.group(3).split(",")
            )
            if len(fanins) != 3:
                raise TextFormatError(line_no, "operations take exactly three fan-ins")
            nodes.append(XmgNode(kind, fanins))
            next_id += 1
    if num_pis is None:
        raise TextFormatError(0, "missing 'inputs' header")
    if num_pos is not None and len(pos) != num_pos:
        raise TextFormatError(0, f"header promises {num_pos} outputs, found {len(pos)}")
    return XmgNetlist(num_pis, tuple(nodes), tuple(pos), name=name)


def write_xmg_file(net: XmgNetlist, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_xmg(net))


def parse_xmg_file(path) -> XmgNetlist:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_xmg(fh.read())


# -- run reports ------------------------------------------------------------------


def render_report(design_records, usage_points, extra=None) -> str:
    """JSON report: one record per design plus per-cycle usage of the pick.

    design_records: iterables of dicts with keys size / mf / edp (plus any
    provenance extras); usage_points: iterable of (cycle, live-rows) pairs.
    """
    doc = {
        "designs": [dict(r) for r in design_records],
        "usage": [[int(c), int(u)] for c, u in usage_points],
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_report(text: str) -> dict:
    doc = json.loads(text)
    if not isinstance(doc, dict) or "designs" not in doc or "usage" not in doc:
        raise ValueError("report must carry 'designs' and 'usage'")
    for rec in doc["designs"]:
        for key in ("size", "mf", "edp"):
            if key not in rec:
                raise ValueError(f"design record missing {key!r}")
    doc["usage"] = [tuple(p) for p in doc["usage"]]
    return doc
