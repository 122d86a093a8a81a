"""Critical sub-netlist extraction and re-insertion.

The scheduler's peak window [m, n] marks the cycles around maximum memory
usage.  ``extract`` lifts exactly those operations out of a scheduled
design into a standalone netlist whose PIs are the signals crossing into
the window: parent PIs stay ordinary, while pre-window operation results
become *temporary inputs* when nothing after the window needs them (the
sub-schedule may then free their rows).  Window operations still consumed
after the window, or driving parent POs, become the sub-netlist's POs.

``reinsert`` splices an optimized (and re-scheduled) sub back between the
untouched pre/post segments after checking every boundary PO is still the
same function of the boundary PIs, so spliced size is exactly
parent_size - sub_size + optimized_size.

Rows the parent keeps live straight through the window but that the sub's
own accounting cannot see (pass-through results and non-temporary operation
inputs) are counted in ``live_through``; a whole-design mf bound shrinks by
that amount before being handed to the sub scheduler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import simulate
from .schedule import PeakWindow, ScheduledNetlist, ScheduleError
from .xmg import Edge, XmgNetlist, XmgNode


class SpliceError(ValueError):
    pass


@dataclass(frozen=True)
class SubNetlist:
    netlist: XmgNetlist
    boundary_pis: dict  # sub PI id -> parent id (PI or pre-window op)
    po_parent: tuple  # parent op id per sub PO, aligned with netlist.pos
    temps: frozenset  # sub PI ids the sub-schedule may free
    window: PeakWindow
    pass_through: int  # pre-window results live across the window, unused by it
    live_through: int  # pass_through + non-temporary op boundary inputs

    @property
    def boundary_pos(self):
        return {self.netlist.pos[i].target: pid for i, pid in enumerate(self.po_parent)}

    def effective_bound(self, bound):
        """Translate a whole-design mf bound into the sub's own accounting."""
        if bound is None:
            return None
        return bound - self.live_through


def extract(design: ScheduledNetlist, window: PeakWindow) -> SubNetlist:
    parent = design.netlist
    first = parent.first_op_id
    m, n = window.m, window.n
    if parent.size == 0 or n < m:
        raise ScheduleError("empty extraction window")
    if not (1 <= m and n <= parent.size):
        raise ScheduleError(f"window [{m},{n}] outside 1..{parent.size}")

    lo = first + m - 1
    hi = first + n - 1
    window_ids = range(lo, hi + 1)
    in_window = lambda t: lo <= t <= hi

    # signals crossing into the window
    boundary = set()
    for w in window_ids:
        for e in parent.node(w).fanins:
            t = e.target
            if t != 0 and not in_window(t):
                boundary.add(t)

    last_cycle = {}
    for nid in parent.op_ids():
        cyc = nid - first + 1
        for e in parent.node(nid).fanins:
            t = e.target
            if parent.is_op(t):
                last_cycle[t] = max(last_cycle.get(t, 0), cyc)

    temps_parent = set()
    for t in boundary:
        if parent.is_op(t) and not parent.drives_po(t) and last_cycle.get(t, 0) <= n:
            temps_parent.add(t)

    pass_through = 0
    for t in range(first, lo):
        if t in boundary:
            continue
        if parent.drives_po(t) or last_cycle.get(t, 0) > n:
            pass_through += 1
    non_temp_ops = sum(
        1 for t in boundary if parent.is_op(t) and t not in temps_parent
    )

    order = sorted(boundary)
    sub_pi_of = {pid: i + 1 for i, pid in enumerate(order)}
    sub_first = len(order) + 1
    sub_id = {w: sub_first + i for i, w in enumerate(window_ids)}

    def remap(e):
        t = e.target
        if t == 0:
            return e
        if in_window(t):
            return Edge(sub_id[t], e.neg)
        return Edge(sub_pi_of[t], e.neg)

    nodes = tuple(
        XmgNode(parent.node(w).kind, tuple(remap(e) for e in parent.node(w).fanins))
        for w in window_ids
    )
    po_parent = []
    pos = []
    for w in window_ids:
        if parent.drives_po(w) or last_cycle.get(w, 0) > n:
            po_parent.append(w)
            pos.append(Edge(sub_id[w]))
    sub = XmgNetlist(len(order), nodes, tuple(pos), name=parent.name)
    return SubNetlist(
        netlist=sub,
        boundary_pis={sub_pi_of[pid]: pid for pid in order},
        po_parent=tuple(po_parent),
        temps=frozenset(sub_pi_of[pid] for pid in temps_parent),
        window=window,
        pass_through=pass_through,
        live_through=pass_through + non_temp_ops,
    )


def _check_boundary_pos(sub: SubNetlist, optimized: ScheduledNetlist):
    """Sim-equivalence of every boundary PO over the boundary PIs."""
    a, b = sub.netlist, optimized.netlist
    if b.num_pis != a.num_pis or len(b.pos) != len(a.pos):
        raise SpliceError("optimized sub has a different boundary shape")
    pats = simulate.make_patterns(a.num_pis, seed=1)
    sim_a = simulate.simulate(a, pats)
    sim_b = simulate.simulate(b, pats)
    for i in range(len(a.pos)):
        wa = simulate.edge_words(sim_a, a.pos[i])
        wb = simulate.edge_words(sim_b, b.pos[i])
        if not np.array_equal(wa, wb):
            raise SpliceError(
                f"boundary PO {i} (parent op {sub.po_parent[i]}) changed function"
            )


def reinsert(
    design: ScheduledNetlist, sub: SubNetlist, optimized: ScheduledNetlist
) -> XmgNetlist:
    """Splice the optimized sub between the untouched pre/post segments.

    The returned netlist's index order is the splice order (pre-window ops,
    optimized sub order, post-window ops); the caller re-derives liveness
    or re-schedules fully.  When the optimized sub dropped its dependence on
    a boundary value, the producer outside the window may end up without
    consumers, so the spliced result is swept before it is returned.
    """
    _check_boundary_pos(sub, optimized)
    parent = design.netlist
    opt = optimized.netlist
    first = parent.first_op_id
    m, n = sub.window.m, sub.window.n
    size_h = sub.netlist.size
    shift = opt.size - size_h
    splice_base = first + (m - 1)
    sub_first = opt.first_op_id

    def opt_edge(e):
        t = e.target
        if t == 0:
            return Edge(0, e.neg)
        if opt.is_pi(t):
            return Edge(sub.boundary_pis[t], e.neg)
        return Edge(splice_base + (t - sub_first), e.neg)

    redirect = {
        pid: opt_edge(opt.pos[i]) for i, pid in enumerate(sub.po_parent)
    }

    def remap(e):
        t = e.target
        if not parent.is_op(t):
            return e
        cyc = t - first + 1
        if cyc < m:
            return e
        if cyc <= n:
            r = redirect.get(t)
            if r is None:
                raise SpliceError(f"window op {t} consumed outside but not a boundary PO")
            return Edge(r.target, r.neg ^ e.neg)
        return Edge(t + shift, e.neg)

    nodes = []
    for nid in range(first, splice_base):
        nodes.append(parent.node(nid))
    for onid in opt.op_ids():
        node = opt.node(onid)
        nodes.append(XmgNode(node.kind, tuple(opt_edge(e) for e in node.fanins)))
    for nid in range(first + n, parent.num_ids):
        node = parent.node(nid)
        nodes.append(XmgNode(node.kind, tuple(remap(e) for e in node.fanins)))
    pos = tuple(remap(e) for e in parent.pos)
    return XmgNetlist(parent.num_pis, tuple(nodes), pos, name=parent.name).sweep()


def pareto_mf_bound(frontier, new_size, beta):
    """Row bound for scheduling a spliced design of ``new_size``.

    Reference design D = the frontier member with the largest size <= new_size
    (ties: smaller mf).  Returns ceil(beta * (MF(D) - 1)), or None (unbounded)
    when every frontier member is larger than new_size.
    """
    designs = getattr(frontier, "designs", frontier)
    cands = [d for d in designs if d.size <= new_size]
    if not cands:
        return None
    ref = max(cands, key=lambda d: (d.size, -d.mf))
    return math.ceil(beta * (ref.mf - 1))
