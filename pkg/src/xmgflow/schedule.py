"""Execution-order search and memory-liveness accounting.

One operation executes per clock cycle and writes its result into a result
row; PIs live in their own rows and are never deleted.  A result dies once
its last consumer has executed (PO results never die), and a row freed at
cycle t may be overwritten at cycle t by the consuming operation itself.
The memory footprint (mf) of an order is the maximum number of
simultaneously live results, and each result is stored in the lowest-index
free row, which never needs more than mf rows.

Sub-netlists extracted from a larger design mark some PIs as *temporary
inputs*: results of the surrounding netlist that already sit in result rows
and may be deleted after their last use inside the window.

Two engines produce orders: a greedy lookahead heuristic and an exact
branch-and-bound (small netlists).  Both honour an optional mf bound and
report BoundExceeded instead of a schedule when they cannot stay within
it; for the exact engine that answer is definitive, for the heuristic it
only means the greedy trajectory failed.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .xmg import XmgNetlist

FULL = np.uint64(0xFFFFFFFFFFFFFFFF)


class ScheduleError(ValueError):
    pass


class InterpreterError(ValueError):
    pass


@dataclass(frozen=True)
class BoundExceeded:
    """No schedule within the requested mf bound (see engine caveats)."""

    bound: int


@dataclass(frozen=True)
class ScheduleRequest:
    netlist: XmgNetlist
    temporary_inputs: frozenset = frozenset()
    mf_bound: int | None = None


@dataclass
class LivenessResult:
    mf: int
    trace: tuple
    row_of: dict
    initial_live: int
    max_row: int


@dataclass
class ScheduledNetlist:
    """A netlist whose op index order is its execution order."""

    netlist: XmgNetlist
    mf: int
    trace: tuple
    row_of: dict
    temps: frozenset = frozenset()

    @property
    def size(self):
        return self.netlist.size


@dataclass(frozen=True)
class PeakWindow:
    mf: int
    p: int  # first cycle at peak usage
    m: int  # window start cycle
    n: int  # window end cycle


def _last_use(netlist, cycle_of, temps):
    """Per-id last consumer cycle (absent when never consumed)."""
    last = {}
    for nid in netlist.op_ids():
        c = cycle_of[nid]
        for e in netlist.node(nid).fanins:
            t = e.target
            if netlist.is_op(t) or t in temps:
                last[t] = max(last.get(t, 0), c)
    return last


def liveness_mf(netlist, order=None, temporary_inputs=()):
    """Memory liveness of an execution order (default: index order).

    Returns LivenessResult.  usage[t] counts the result rows that cannot be
    overwritten after cycle t: live op results plus still-needed temporary
    inputs.  PO results never die.  Rows are assigned greedily to the
    lowest free index; temporary inputs pre-occupy rows 1.. in id order.
    """
    temps = frozenset(temporary_inputs)
    for t in temps:
        if not netlist.is_pi(t):
            raise ScheduleError(f"temporary input {t} is not a PI")
    if order is None:
        order = list(netlist.op_ids())
    else:
        order = list(order)
        if sorted(order) != list(netlist.op_ids()):
            raise ScheduleError("order is not a permutation of the op ids")
    cycle_of = {}
    for cyc, nid in enumerate(order, start=1):
        for e in netlist.node(nid).fanins:
            if netlist.is_op(e.target) and e.target not in cycle_of:
                raise ScheduleError(
                    f"order is not topological: {nid} before fan-in {e.target}"
                )
        cycle_of[nid] = cyc
    last = _last_use(netlist, cycle_of, temps)
    po_targets = {e.target for e in netlist.pos}

    row_of = {}
    free = []
    next_row = 1
    live_rows = set()
    for t in sorted(temps):
        row_of[t] = next_row
        if last.get(t, 0) > 0 or t in po_targets:
            live_rows.add(next_row)
        else:
            heapq.heappush(free, next_row)
        next_row += 1
    max_row = next_row - 1
    initial_live = len(live_rows)

    deaths = {}
    for sig, cyc in last.items():
        if sig in po_targets:
            continue  # never freed
        deaths.setdefault(cyc, []).append(sig)

    trace = []
    live = initial_live
    for cyc, nid in enumerate(order, start=1):
        for sig in deaths.get(cyc, ()):
            r = row_of[sig]
            live_rows.discard(r)
            heapq.heappush(free, r)
            live -= 1
        if free:
            r = heapq.heappop(free)
        else:
            r = next_row
            next_row += 1
        row_of[nid] = r
        max_row = max(max_row, r)
        if nid in po_targets or last.get(nid, 0) > 0:
            live_rows.add(r)
            live += 1
        else:
            heapq.heappush(free, r)  # dead on arrival, reusable next cycle
        trace.append(live)
    mf = max([initial_live] + trace)
    return LivenessResult(mf, tuple(trace), row_of, initial_live, max_row)


def scheduled(netlist, order=None, temporary_inputs=()):
    """Reorder ops into execution order and attach liveness data."""
    temps = frozenset(temporary_inputs)
    if order is not None and list(order) != list(netlist.op_ids()):
        netlist = netlist.reorder(order)
    res = liveness_mf(netlist, None, temps)
    return ScheduledNetlist(netlist, res.mf, res.trace, res.row_of, temps)


# -- shared incremental state -------------------------------------------------


def _prep(netlist, temps):
    n_ids = netlist.num_ids
    consumers = [[] for _ in range(n_ids)]
    distinct = np.zeros((n_ids, 3), dtype=np.int64)  # padded with const id 0
    for nid in netlist.op_ids():
        seen = []
        for e in netlist.node(nid).fanins:
            t = e.target
            if (netlist.is_op(t) or t in temps) and t not in seen:
                seen.append(t)
                consumers[t].append(nid)
        distinct[nid, : len(seen)] = seen
    remaining = np.array([len(consumers[x]) for x in range(n_ids)], dtype=np.int64)
    po = np.zeros(n_ids, dtype=bool)
    for e in netlist.pos:
        po[e.target] = True
    self_live = np.zeros(n_ids, dtype=np.int64)
    for nid in netlist.op_ids():
        self_live[nid] = 1 if (po[nid] or remaining[nid] > 0) else 0
    dep = np.zeros(n_ids, dtype=np.int64)
    for nid in netlist.op_ids():
        dep[nid] = sum(1 for t in set(distinct[nid].tolist()) if netlist.is_op(t))
    return consumers, distinct, remaining, po, self_live, dep


# -- greedy lookahead ----------------------------------------------------------


def schedule_heuristic(req):
    """Greedy lookahead: pick the ready op minimizing the resulting live
    count (ties: most kills, then smallest id).  With an mf bound set, the
    run stops as soon as the trajectory under construction exceeds it.
    """
    net = req.netlist
    temps = frozenset(req.temporary_inputs)
    bound = req.mf_bound
    consumers, distinct, remaining, po, self_live, dep = _prep(net, temps)
    n_ids = net.num_ids
    alive = np.zeros(n_ids, dtype=bool)
    for t in temps:
        alive[t] = remaining[t] > 0 or po[t]
    live = int(alive.sum())
    if bound is not None and live > bound:
        return BoundExceeded(bound)
    # killable[u]: executing u's sole remaining consumer frees u's row
    killable = alive & (remaining == 1) & ~po
    ready = np.zeros(n_ids, dtype=bool)
    for nid in net.op_ids():
        ready[nid] = dep[nid] == 0
    order = []
    for _ in range(net.size):
        cand = np.flatnonzero(ready)
        kills = killable[distinct[cand]].sum(axis=1)
        score = self_live[cand] - kills
        v = int(cand[np.lexsort((cand, -kills, score))[0]])
        ready[v] = False
        order.append(v)
        for u in set(distinct[v].tolist()):
            if u == 0:
                continue
            remaining[u] -= 1
            if remaining[u] == 0 and alive[u] and not po[u]:
                alive[u] = False
                live -= 1
            killable[u] = alive[u] and remaining[u] == 1 and not po[u]
        if self_live[v]:
            alive[v] = True
            killable[v] = remaining[v] == 1 and not po[v]
            live += 1
        for c in consumers[v]:
            dep[c] -= 1
            if dep[c] == 0:
                ready[c] = True
        if bound is not None and live > bound:
            return BoundExceeded(bound)
    return scheduled(net, order, temps)


# -- exact branch and bound ----------------------------------------------------


def schedule_exact(req, node_limit=24):
    """Minimum-mf schedule by branch-and-bound over topological orders.

    Feasibility of "peak <= B" is decided completely for descending B
    (failed states carry over, since failure at B implies failure below),
    so a BoundExceeded answer means no order meets the bound, full stop.
    """
    net = req.netlist
    if net.size > node_limit:
        raise ScheduleError(
            f"netlist size {net.size} exceeds exact engine limit {node_limit}"
        )
    temps = frozenset(req.temporary_inputs)
    bound = req.mf_bound
    consumers, distinct, remaining0, po, self_live, dep0 = _prep(net, temps)
    ops = list(net.op_ids())
    n = len(ops)
    initial_live = sum(1 for t in temps if remaining0[t] > 0 or po[t])
    if n == 0:
        if bound is not None and initial_live > bound:
            return BoundExceeded(bound)
        return scheduled(net, None, temps)
    heur = schedule_heuristic(ScheduleRequest(net, temps, None))
    upper = heur.mf
    po_results = len({e.target for e in net.pos if net.is_op(e.target)})
    lower = max(po_results, 1, initial_live)

    bit_of = {nid: 1 << i for i, nid in enumerate(ops)}
    full = (1 << n) - 1
    failed = set()

    def try_bound(B):
        """Return an order with peak <= B, or None (complete search)."""
        if initial_live > B:
            return None
        remaining = remaining0.copy()
        dep = dep0.copy()
        alive = np.zeros(net.num_ids, dtype=bool)
        for t in temps:
            alive[t] = remaining[t] > 0 or po[t]
        ready = {nid for nid in ops if dep[nid] == 0}
        order = []

        def dfs(state, live):
            if state == full:
                return True
            if state in failed:
                return False
            cands = []
            for v in ready:
                kills = 0
                for u in set(distinct[v].tolist()):
                    if u and alive[u] and remaining[u] == 1 and not po[u]:
                        kills += 1
                nl = live + int(self_live[v]) - kills
                if nl <= B:
                    cands.append((nl, -kills, v))
            cands.sort()
            for nl, _negk, v in cands:
                ready.discard(v)
                order.append(v)
                died = []
                for u in set(distinct[v].tolist()):
                    if u == 0:
                        continue
                    remaining[u] -= 1
                    if remaining[u] == 0 and alive[u] and not po[u]:
                        alive[u] = False
                        died.append(u)
                if self_live[v]:
                    alive[v] = True
                became = []
                for c in consumers[v]:
                    dep[c] -= 1
                    if dep[c] == 0:
                        became.append(c)
                        ready.add(c)
                if dfs(state | bit_of[v], nl):
                    return True
                for c in became:
                    ready.discard(c)
                for c in consumers[v]:
                    dep[c] += 1
                if self_live[v]:
                    alive[v] = False
                for u in died:
                    alive[u] = True
                for u in set(distinct[v].tolist()):
                    if u:
                        remaining[u] += 1
                order.pop()
                ready.add(v)
            failed.add(state)
            return False

        return list(order) if dfs(0, initial_live) else None

    best_order = None
    best_mf = upper if bound is None or upper <= bound else None
    B = upper - 1 if bound is None else min(upper - 1, bound)
    while B >= lower:
        got = try_bound(B)
        if got is None:
            break
        best_order = got
        best_mf = liveness_mf(net, got, temps).mf
        B = best_mf - 1  # skip straight below the realised peak
    if best_order is not None:
        return scheduled(net, best_order, temps)
    if best_mf is not None:
        return heur  # heuristic already optimal (or within bound)
    return BoundExceeded(bound)


# -- peak window -----------------------------------------------------------------


def peak_window(trace, lam):
    """Window [m, n] around the peak: p is the first cycle at the maximum,
    and the window extends while usage stays at or above lam * mf."""
    if not trace:
        raise ScheduleError("empty memory-usage trace")
    if not (0.0 < lam < 1.0):
        raise ScheduleError("lambda must lie strictly between 0 and 1")
    trace = tuple(trace)
    mf = max(trace)
    threshold = lam * mf
    p = trace.index(mf) + 1
    last_peak = len(trace) - trace[::-1].index(mf)
    m = 1
    for t in range(p - 1, 0, -1):
        if trace[t - 1] < threshold:
            m = t + 1
            break
    n = len(trace)
    for t in range(last_peak + 1, len(trace) + 1):
        if trace[t - 1] < threshold:
            n = t - 1
            break
    return PeakWindow(mf, p, m, n)


def first_peak(design):
    """(p, members): first cycle at peak usage and the results (temporary
    inputs and op results) still live at the end of that cycle.  p is 0
    when only the initial temporary-input load reaches the peak."""
    trace = design.trace
    net = design.netlist
    mf = design.mf
    cycle_of = {nid: i + 1 for i, nid in enumerate(net.op_ids())}
    last = _last_use(net, cycle_of, design.temps)
    po_targets = {e.target for e in net.pos}
    p = trace.index(mf) + 1 if mf in trace else 0
    members = []
    for t in sorted(design.temps):
        if t in po_targets or last.get(t, 0) > p:
            members.append(t)
    for nid in net.op_ids():
        if cycle_of[nid] > p:
            break
        if nid in po_targets or last.get(nid, 0) > p:
            members.append(nid)
    return p, members


# -- instruction interpreter -----------------------------------------------------


def interpret(seq, pi_values, rows_per_array):
    """Replay an instruction sequence over per-array row memories.

    pi_values: uint64 array (num_pis, words) of packed input patterns.
    Row 0 reads as constant zero.  MAJ/XOR instructions must keep all their
    rows inside one array; COPY may cross arrays.  Reading a row that was
    never written (and is not a PI row or row 0) is an error.  Returns the
    (num_pos, words) PO value matrix.
    """
    pi_values = np.asarray(pi_values, dtype=np.uint64)
    if pi_values.ndim != 2 or pi_values.shape[0] != seq.num_pis:
        raise InterpreterError("pi_values must be (num_pis, words)")
    words = pi_values.shape[1]
    mem = {0: np.zeros(words, dtype=np.uint64)}
    for idx, row in enumerate(seq.pi_rows):
        mem[row] = pi_values[idx].copy()

    def array_of(row):
        return (row - 1) // rows_per_array

    def read(row, neg, clock):
        val = mem.get(row)
        if val is None:
            raise InterpreterError(f"clock {clock}: read of never-written row R{row}")
        return (val ^ FULL) if neg else val

    expect = 1
    for ins in seq.instructions:
        if ins.clock != expect:
            raise InterpreterError(
                f"clock {ins.clock}: expected consecutive clock {expect}"
            )
        expect += 1
        if ins.op == "COPY":
            (src,) = ins.srcs
            mem[ins.dest] = read(src.row, src.neg, ins.clock).copy()
            continue
        if ins.op not in ("MAJ", "XOR"):
            raise InterpreterError(f"clock {ins.clock}: unknown op {ins.op!r}")
        arrays = {array_of(s.row) for s in ins.srcs if s.row != 0}
        arrays.add(array_of(ins.dest))
        if len(arrays) > 1:
            raise InterpreterError(
                f"clock {ins.clock}: operation touches rows in arrays {sorted(arrays)}"
            )
        a, b, c = (read(s.row, s.neg, ins.clock) for s in ins.srcs)
        if ins.op == "MAJ":
            mem[ins.dest] = (a & b) | (a & c) | (b & c)
        else:
            mem[ins.dest] = a ^ b ^ c
    outs = np.zeros((len(seq.pos), words), dtype=np.uint64)
    for i, (row, neg) in enumerate(seq.pos):
        outs[i] = read(row, neg, "PO")
    return outs
