import math
import random

import numpy as np

from conftest import assert_same_function, masked
from xmgflow.mfresub import CATEGORIES, _triple_batches, mfresub, mfresub_case1, peak_set
from xmgflow.schedule import scheduled
from xmgflow.simulate import edge_words, make_patterns, simulate
from xmgflow.textio import parse_xmg
from xmgflow.xmg import random_netlist

CASE1_NET = """inputs 3
outputs 1
N4 = MAJ(N1, N2, N0)
N5 = MAJ(N2, N1, N0)
N6 = MAJ(N4, N3, N0)
N7 = MAJ(N5, !N3, N0)
N8 = XOR(N6, N7, N0)
output N8
"""

CASE2_NET = """inputs 4
outputs 1
N5 = MAJ(N1, N2, N0)
N6 = MAJ(N3, N4, N0)
N7 = XOR(N5, N6, N0)
N8 = MAJ(N5, !N6, N0)
N9 = MAJ(N7, N8, N0)
N10 = MAJ(N9, N5, !N0)
output N10
"""


def full_schedule(net):
    return scheduled(net)


def test_peak_set_matches_trace():
    net = parse_xmg(CASE2_NET)
    des = full_schedule(net)
    ps = peak_set(des)
    assert des.trace[ps.p - 1] == des.mf
    assert all(des.trace[c - 1] < des.mf for c in range(1, ps.p))
    assert len(ps.members) == des.mf


def test_case1_substitutes_duplicate_peak_member():
    net = parse_xmg(CASE1_NET)
    des = full_schedule(net)
    res = mfresub_case1(des)
    assert res is not None
    assert res.size < des.size
    assert_same_function(res.netlist, net)


def test_case2_frees_a_row():
    net = parse_xmg(CASE2_NET)
    des = full_schedule(net)
    res = mfresub(des, n_trial=500000, seed=3)
    assert res.design.mf < des.mf
    assert res.design.size <= des.size
    assert res.category == "both-less"
    assert_same_function(res.design.netlist, net)


def expected_category(size0, mf0, size1, mf1, fired):
    if fired == 0:
        return "no-resub"
    if mf1 > mf0:
        return "trade-off"
    if size1 < size0 and mf1 < mf0:
        return "both-less"
    if size1 < size0:
        return "less-size"
    if mf1 < mf0:
        return "less-mf"
    return "no-change"


def test_random_soundness_and_categories():
    rng = random.Random(1000)
    checked = 0
    for s in range(40):
        net = random_netlist(2000 + s, num_pis=rng.randint(3, 6), num_ops=rng.randint(5, 18))
        des = full_schedule(net)
        res = mfresub(des, n_trial=20000, seed=s)
        assert res.design.size <= des.size
        assert res.category in CATEGORIES
        assert res.category == expected_category(
            des.size, des.mf, res.design.size, res.design.mf, res.fired
        ), s
        pats = make_patterns(net.num_pis)
        sa = simulate(net, pats)
        sb = simulate(res.design.netlist, pats)
        for pa, pb in zip(net.pos, res.design.netlist.pos):
            wa = masked(edge_words(sa, pa), pats.width)
            wb = masked(edge_words(sb, pb), pats.width)
            assert (wa == wb).all(), s
        checked += 1
    assert checked == 40


def test_mfresub_deterministic():
    net = random_netlist(77, num_pis=6, num_ops=30)
    des = full_schedule(net)
    a = mfresub(des, n_trial=5000, seed=9)
    b = mfresub(des, n_trial=5000, seed=9)
    assert a.design.netlist.signature() == b.design.netlist.signature()
    assert (a.category, a.fired) == (b.category, b.fired)


def test_triple_batches_regimes():
    for n, n_trial in [(8, 1000), (30, 2000), (200, 5000)]:
        total = math.comb(n, 3)
        got = np.concatenate(list(_triple_batches(n, n_trial, seed=4)))
        assert got.shape[1] == 3
        assert (got[:, 0] < got[:, 1]).all() and (got[:, 1] < got[:, 2]).all()
        keys = (got[:, 0] * n + got[:, 1]) * n + got[:, 2]
        assert len(np.unique(keys)) == len(keys)
        assert len(got) == min(total, n_trial)
        again = np.concatenate(list(_triple_batches(n, n_trial, seed=4)))
        assert (got == again).all()


def test_triple_batches_seed_changes_sample():
    a = np.concatenate(list(_triple_batches(60, 500, seed=1)))
    b = np.concatenate(list(_triple_batches(60, 500, seed=2)))
    assert a.shape == b.shape
    assert (a != b).any()
