"""Shared oracles for the test suite.

Everything here is deliberately independent of the package's vectorized
code paths: scalar recursive evaluation, full truth-table enumeration and
a downward-closed-subset DP for the minimum memory footprint.  Tests use
these as the second route when checking the fast implementations.
"""

import itertools

import numpy as np
import pytest

from xmgflow.xmg import MAJ, XOR, Edge, XmgNetlist


def naive_eval(net, pi_bits):
    """Evaluate every node for one assignment; returns {id: 0/1}."""
    assert len(pi_bits) == net.num_pis
    val = {0: 0}
    for i, b in enumerate(pi_bits, start=1):
        val[i] = int(b)
    for nid in net.op_ids():
        node = net.node(nid)
        ins = [val[e.target] ^ int(e.neg) for e in node.fanins]
        if node.kind == MAJ:
            val[nid] = 1 if sum(ins) >= 2 else 0
        else:
            val[nid] = ins[0] ^ ins[1] ^ ins[2]
    return val


def po_bits(net, pi_bits):
    val = naive_eval(net, pi_bits)
    return tuple(val[e.target] ^ int(e.neg) for e in net.pos)


def brute_tables(net):
    """PO truth tables as ints, bit k = output under assignment k
    (x1 is the least significant input bit)."""
    tabs = [0] * len(net.pos)
    for k in range(1 << net.num_pis):
        bits = [(k >> i) & 1 for i in range(net.num_pis)]
        for j, b in enumerate(po_bits(net, bits)):
            tabs[j] |= b << k
    return tabs


def assert_same_function(a, b, limit=10):
    """Exhaustive PO-function comparison of two netlists (small PIs only)."""
    assert a.num_pis == b.num_pis <= limit
    assert len(a.pos) == len(b.pos)
    assert brute_tables(a) == brute_tables(b)


# -- minimum-MF oracle -------------------------------------------------------
#
# Memory usage after a prefix S of a topological order depends on S alone:
# a result is live iff it drives a PO or some consumer lies outside S.  The
# minimum peak over all orders is therefore a DP over downward-closed
# subsets: f(S) = max(live(S), min over removable last ops o of f(S - o)).


def min_mf_subsets(net, temps=()):
    ops = list(net.op_ids())
    n = len(ops)
    first = net.first_op_id
    temps = frozenset(temps)
    po_targets = {e.target for e in net.pos}

    cons_mask = [0] * n  # op-consumer bitmask per op
    temp_cons = {t: 0 for t in temps}
    for nid in ops:
        bit = 1 << (nid - first)
        for e in net.node(nid).fanins:
            t = e.target
            if net.is_op(t):
                cons_mask[t - first] |= bit
            elif t in temps:
                temp_cons[t] |= bit

    full = (1 << n) - 1

    def live(S):
        c = 0
        for t in temps:
            if t in po_targets or temp_cons[t] & ~S & full:
                c += 1
        m = S
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            nid = first + i
            if nid in po_targets or cons_mask[i] & ~S & full:
                c += 1
        return c

    fanin_mask = [0] * n
    for nid in ops:
        for e in net.node(nid).fanins:
            if net.is_op(e.target):
                fanin_mask[nid - first] |= 1 << (e.target - first)

    memo = {0: live(0)}

    def f(S):
        got = memo.get(S)
        if got is not None:
            return got
        best = None
        m = S
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            # o removable iff nothing in S consumes it (prefix stays closed)
            if cons_mask[i] & S:
                continue
            sub = f(S & ~(1 << i))
            if best is None or sub < best:
                best = sub
        got = max(live(S), best)
        memo[S] = got
        return got

    return f(full)


def all_topo_orders(net):
    """Every topological permutation of the op ids (tiny netlists only)."""
    ops = list(net.op_ids())
    for perm in itertools.permutations(ops):
        seen = set()
        ok = True
        for nid in perm:
            for e in net.node(nid).fanins:
                if net.is_op(e.target) and e.target not in seen:
                    ok = False
                    break
            if not ok:
                break
            seen.add(nid)
        if ok:
            yield list(perm)


def masked(words, width):
    """Copy of a word vector with the bits above `width` cleared."""
    out = np.array(words, dtype=np.uint64, copy=True)
    rem = width % 64
    if rem:
        out[-1] &= np.uint64((1 << rem) - 1)
    return out


def chain_net(length, num_pis=2):
    """length ops in a single AND chain; mf of any order is 1."""
    from xmgflow.xmg import XmgNode

    nodes = []
    prev = Edge(1)
    for i in range(length):
        nodes.append(XmgNode(MAJ, (prev, Edge(2), Edge(0))))
        prev = Edge(num_pis + 1 + i)
    return XmgNetlist(num_pis, nodes, [prev])


@pytest.fixture
def tiny_net():
    """E1: N4=MAJ(x1,x2,0), N5=XOR(x1,x2,x3), N6=MAJ(N4,!N5,x3)."""
    from xmgflow.xmg import XmgNode

    nodes = [
        XmgNode(MAJ, (Edge(1), Edge(2), Edge(0))),
        XmgNode(XOR, (Edge(1), Edge(2), Edge(3))),
        XmgNode(MAJ, (Edge(4), Edge(5, True), Edge(3))),
    ]
    return XmgNetlist(3, nodes, [Edge(6)])
