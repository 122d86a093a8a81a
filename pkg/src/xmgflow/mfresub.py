"""Memory-footprint-oriented resubstitution on scheduled netlists.

Works on the set of results live at the first peak cycle p and tries to
free a row without re-scheduling (relative execution order is preserved;
liveness is recomputed after every structural change):

* case 1 -- two peak members compute the same function (or complements):
  the later one is substituted by the earlier and its exclusive cone
  removed.
* case 2 -- a non-PO peak member j whose only still-unscheduled fan-out is
  f: try to rebuild f as one fresh MAJ/XOR over divisors that exclude j
  (other peak members, operations between p and f, f's support PIs, and
  constant zero), so j can die at the peak instead of surviving to f.

Candidate triples are sim-checked in bulk (16 kind/complement combinations
per triple) and every sim hit is then fully validated before a rewrite is
accepted.  The driver repeats both cases until neither fires and reports
how (size, mf) moved as one of six outcome categories.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import simulate
from .kernels import scan_triples
from .schedule import ScheduledNetlist, first_peak as _live_peak, scheduled
from .util import derive_seed
from .xmg import MAJ, XOR, Edge

FULL = np.uint64(0xFFFFFFFFFFFFFFFF)

CATEGORIES = (
    "no-resub",
    "no-change",
    "trade-off",
    "less-mf",
    "less-size",
    "both-less",
)

TRIPLE_CHUNK = 65536


@dataclass(frozen=True)
class PeakSet:
    p: int
    members: tuple


@dataclass
class MfResubResult:
    design: ScheduledNetlist
    category: str
    fired: int


def peak_set(design: ScheduledNetlist) -> PeakSet:
    p, members = _live_peak(design)
    assert len(members) == design.mf, "peak set must have exactly mf members"
    return PeakSet(p, tuple(members))


# backwards-friendly alias matching the liveness helper's name
first_peak = peak_set


def _rescore(design, net):
    """Same relative order, fresh liveness."""
    return scheduled(net, None, design.temps)


def mfresub_case1(design: ScheduledNetlist):
    """Merge two functionally equivalent (or complementary) peak members."""
    net = design.netlist
    peak = peak_set(design)
    sim = simulate.simulate(net, simulate.make_patterns(net.num_pis, seed=1))
    members = list(peak.members)
    for jx, j in enumerate(members):
        if not net.is_op(j):
            continue
        for i in members[:jx]:
            rel = simulate.check_candidate_equal(sim, Edge(j), Edge(i))
            if rel == "neither":
                continue
            compl = rel == "compl"
            if i in net.mffc(j):
                continue
            if simulate.validate_equivalence(net, Edge(j), Edge(i, compl)):
                return _rescore(design, net.substitute(j, Edge(i, compl)))
    return None


@functools.lru_cache(maxsize=2)
def _all_triples(n):
    """All 3-combinations of range(n), lexicographic, as an (m, 3) array."""
    return np.array(list(itertools.combinations(range(n), 3)), dtype=np.int64)


def _triple_batches(n_divs, n_trial, seed):
    """Yield (chunk, 3) int64 index triples: the whole space when it fits the
    budget, otherwise a seeded uniform sample without replacement."""
    total = math.comb(n_divs, 3)
    if total <= n_trial:
        allt = _all_triples(n_divs)
        for lo in range(0, len(allt), TRIPLE_CHUNK):
            yield allt[lo : lo + TRIPLE_CHUNK]
        return
    rng = np.random.default_rng(seed)
    if total <= 2 * n_trial:
        # dense budget: subsample the full enumeration instead of rejecting
        allt = _all_triples(n_divs)
        pick = rng.choice(total, size=n_trial, replace=False)
        pick.sort()
        for lo in range(0, n_trial, TRIPLE_CHUNK):
            yield allt[pick[lo : lo + TRIPLE_CHUNK]]
        return
    # sparse budget: draw sorted distinct rows, reject repeats across batches
    n = np.int64(n_divs)
    seen = np.empty(0, dtype=np.int64)
    produced = 0
    while produced < n_trial:
        want = min(TRIPLE_CHUNK, n_trial - produced)
        m = rng.integers(0, n_divs, size=(want + (want >> 1) + 16, 3), dtype=np.int64)
        m.sort(axis=1)
        m = m[(m[:, 0] != m[:, 1]) & (m[:, 1] != m[:, 2])]
        keys = (m[:, 0] * n + m[:, 1]) * n + m[:, 2]
        _, first = np.unique(keys, return_index=True)
        order = np.sort(first)
        m, keys = m[order], keys[order]
        fresh = ~np.isin(keys, seen)
        m, keys = m[fresh][:want], keys[fresh][:want]
        if len(m) == 0:
            continue
        seen = np.concatenate([seen, keys])
        produced += len(m)
        yield m


def mfresub_case2(design: ScheduledNetlist, n_trial, seed=0):
    """Rebuild the single unscheduled fan-out of a peak member."""
    net = design.netlist
    peak = peak_set(design)
    p = peak.p
    first = net.first_op_id
    cycle = lambda nid: nid - first + 1
    sim = simulate.simulate(net, simulate.make_patterns(net.num_pis, seed=1))
    rem = sim.width % 64
    tail_mask = FULL if rem == 0 else np.uint64((1 << rem) - 1)
    support = simulate.support_masks(net)

    for j in peak.members:
        if net.drives_po(j):
            continue
        late = sorted({c for c in net.consumers(j) if cycle(c) > p})
        if len(late) != 1:
            continue
        f = late[0]
        mask_f = support[f]
        divisors = set()
        for d in peak.members:
            if d != j and support[d] & ~mask_f == 0:
                divisors.add(d)
        for d in net.op_ids():
            if p < cycle(d) < cycle(f) and support[d] & ~mask_f == 0:
                divisors.add(d)
        divisors |= simulate.dependent_pis(net, f)
        divisors.add(0)
        divisors.discard(j)
        divs = sorted(divisors)
        if len(divs) < 3:
            continue
        node_f = net.node(f)
        cur_key = (node_f.kind, frozenset(node_f.fanins))
        divs_arr = np.array(divs, dtype=np.int64)
        for batch in _triple_batches(len(divs), n_trial, derive_seed("mfresub2", seed, j, f)):
            rows = divs_arr[batch]
            t0, c0 = 0, 0
            while True:
                hits = scan_triples(sim.mat, f, rows, tail_mask, t0, c0, max_hits=32)
                for t_idx, combo in hits:
                    kind = MAJ if combo < 8 else XOR
                    mask = combo & 7
                    d3 = rows[t_idx]
                    fanins = (
                        Edge(int(d3[0]), bool(mask & 1)),
                        Edge(int(d3[1]), bool(mask & 2)),
                        Edge(int(d3[2]), bool(mask & 4)),
                    )
                    if (kind, frozenset(fanins)) == cur_key:
                        continue
                    if simulate.validate_equivalence(net, Edge(f), (kind, fanins)):
                        return _rescore(design, net.rewrite_node(f, kind, fanins))
                if len(hits) < 32:
                    break
                t0, c0 = hits[-1][0], hits[-1][1] + 1
    return None


def mfresub(design: ScheduledNetlist, n_trial=500000, seed=0) -> MfResubResult:
    """Repeat {case 1, else case 2} until neither fires; classify outcome."""
    size0, mf0 = design.size, design.mf
    seen = {design.netlist.signature()}
    cur = design
    fired = 0
    while True:
        nxt = mfresub_case1(cur)
        if nxt is None:
            nxt = mfresub_case2(cur, n_trial, seed)
        if nxt is None:
            break
        fired += 1
        cur = nxt
        sig = cur.netlist.signature()
        if sig in seen:
            break  # structural cycle guard; lateral rewrites cannot loop
        seen.add(sig)
    assert cur.size <= size0, "resubstitution must never grow the netlist"
    if fired == 0:
        category = "no-resub"
    elif cur.mf > mf0:
        category = "trade-off"
    elif cur.size < size0 and cur.mf < mf0:
        category = "both-less"
    elif cur.size < size0:
        category = "less-size"
    elif cur.mf < mf0:
        category = "less-mf"
    else:
        category = "no-change"
    return MfResubResult(cur, category, fired)
