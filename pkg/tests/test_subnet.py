import random

import pytest

from conftest import assert_same_function, brute_tables
from xmgflow.schedule import PeakWindow, ScheduleRequest, peak_window, schedule_heuristic, scheduled
from xmgflow.subnet import SpliceError, extract, pareto_mf_bound, reinsert
from xmgflow.xmg import MAJ, XOR, Edge, XmgNetlist, XmgNode, random_netlist


def ladder_net():
    """Six ops; the middle ones form a natural extraction window."""
    nodes = [
        XmgNode(MAJ, (Edge(1), Edge(2), Edge(0))),   # 5
        XmgNode(XOR, (Edge(2), Edge(3), Edge(4))),   # 6
        XmgNode(MAJ, (Edge(5), Edge(6), Edge(1))),   # 7
        XmgNode(XOR, (Edge(7), Edge(4), Edge(0))),   # 8
        XmgNode(MAJ, (Edge(7), Edge(8, True), Edge(3))),  # 9
        XmgNode(XOR, (Edge(9), Edge(6), Edge(2))),   # 10
    ]
    return XmgNetlist(4, nodes, [Edge(10)])


def test_extract_window_shape():
    des = scheduled(ladder_net())
    sub = extract(des, PeakWindow(des.mf, 3, 3, 5))
    # window ops 7..9; boundary: 5, 6 (ops) and PIs 1, 3, 4
    assert sub.netlist.size == 3
    parents = sorted(sub.boundary_pis.values())
    assert parents == [1, 3, 4, 5, 6]
    # op 9 is consumed after the window -> boundary PO; op 8 dies inside
    assert sub.po_parent == (9,)
    # op 5 dies inside the window (temp); op 6 is used after it (not a temp)
    temp_parents = {sub.boundary_pis[t] for t in sub.temps}
    assert temp_parents == {5}
    assert sub.live_through == 1  # op 6 stays occupied across the window
    assert sub.effective_bound(None) is None
    assert sub.effective_bound(5) == 4


def test_extract_preserves_window_function():
    des = scheduled(ladder_net())
    sub = extract(des, PeakWindow(des.mf, 3, 3, 5))
    # brute-compare the sub PO against the parent cone over boundary values
    parent = des.netlist
    for k in range(1 << 5):
        bvals = {pid: (k >> i) & 1 for i, pid in enumerate(sorted(sub.boundary_pis))}
        # evaluate sub
        val = {0: 0}
        for spid, ppid in sub.boundary_pis.items():
            val[spid] = bvals[spid]
        for nid in sub.netlist.op_ids():
            node = sub.netlist.node(nid)
            ins = [val[e.target] ^ int(e.neg) for e in node.fanins]
            val[nid] = (1 if sum(ins) >= 2 else 0) if node.kind == MAJ else ins[0] ^ ins[1] ^ ins[2]
        sub_out = val[sub.netlist.pos[0].target]
        # evaluate the parent window directly with the same boundary values
        pval = {0: 0}
        inv = {ppid: bvals[spid] for spid, ppid in sub.boundary_pis.items()}
        for pid, v in inv.items():
            pval[pid] = v
        for nid in (7, 8, 9):
            node = parent.node(nid)
            ins = [pval[e.target] ^ int(e.neg) for e in node.fanins]
            pval[nid] = (1 if sum(ins) >= 2 else 0) if node.kind == MAJ else ins[0] ^ ins[1] ^ ins[2]
        assert sub_out == pval[9], k


def test_extract_rejects_bad_windows():
    des = scheduled(ladder_net())
    with pytest.raises(Exception):
        extract(des, PeakWindow(des.mf, 1, 1, 99))
    with pytest.raises(Exception):
        extract(des, PeakWindow(des.mf, 1, 3, 2))


def test_reinsert_identity_roundtrip():
    rng = random.Random(13)
    for trial in range(25):
        net = random_netlist(4200 + trial, num_pis=rng.randint(3, 5), num_ops=rng.randint(4, 12))
        des = schedule_heuristic(ScheduleRequest(net))
        w = peak_window(des.trace, 0.6)
        try:
            sub = extract(des, w)
        except Exception:
            continue
        ident = scheduled(sub.netlist, temporary_inputs=sub.temps)
        out = reinsert(des, sub, ident)
        assert out.size == des.size
        assert_same_function(out, des.netlist, limit=5)


def test_reinsert_with_real_optimization():
    # window contains a duplicated node pair the optimizer can merge
    nodes = [
        XmgNode(MAJ, (Edge(1), Edge(2), Edge(0))),   # 4
        XmgNode(XOR, (Edge(3), Edge(4), Edge(0))),   # 5
        XmgNode(XOR, (Edge(3), Edge(4), Edge(0))),   # 6 duplicate of 5
        XmgNode(MAJ, (Edge(5), Edge(6, True), Edge(1))),  # 7
        XmgNode(MAJ, (Edge(7), Edge(2), Edge(0))),   # 8
    ]
    net = XmgNetlist(3, nodes, [Edge(8)])
    des = scheduled(net)
    sub = extract(des, PeakWindow(des.mf, 2, 2, 4))
    from xmgflow.passes import dedup_strash

    opt_net = dedup_strash(sub.netlist)
    assert opt_net.size == sub.netlist.size - 1
    opt = scheduled(opt_net, temporary_inputs=sub.temps)
    out = reinsert(des, sub, opt)
    assert out.size == des.size - 1
    assert_same_function(out, net)


def test_reinsert_rejects_wrong_function():
    des = scheduled(ladder_net())
    sub = extract(des, PeakWindow(des.mf, 3, 3, 5))
    # flip a PO polarity: boundary check must catch it
    wrong = XmgNetlist(
        sub.netlist.num_pis,
        sub.netlist.nodes,
        tuple(e.flip() for e in sub.netlist.pos),
    )
    with pytest.raises(SpliceError):
        reinsert(des, sub, scheduled(wrong, temporary_inputs=sub.temps))


class _Pt:
    def __init__(self, size, mf):
        self.size, self.mf = size, mf


def test_pareto_mf_bound_reference_pick():
    frontier = [_Pt(41, 9), _Pt(42, 8), _Pt(45, 7)]
    # largest member not exceeding the new size is the reference
    assert pareto_mf_bound(frontier, 46, 1.1) == 7  # ref (45,7): ceil(1.1*6)
    assert pareto_mf_bound(frontier, 44, 1.1) == 8  # ref (42,8): ceil(1.1*7)
    assert pareto_mf_bound(frontier, 41, 1.1) == 9  # ref (41,9): ceil(1.1*8)
    assert pareto_mf_bound(frontier, 40, 1.1) is None
    # beta scales the allowance
    assert pareto_mf_bound(frontier, 46, 2.0) == 12
