import random
from pathlib import Path

import pytest

from conftest import assert_same_function, brute_tables
from xmgflow.aiger import parse_aiger_file
from xmgflow.passes import (
    PASS_NAMES,
    cleanup,
    constant_propagate,
    dedup_strash,
    maj_rewrite,
    run_random_sequence,
    window_resub0,
    window_resub1,
    xor_rewrite,
)
from xmgflow.xmg import MAJ, XOR, Edge, XmgNetlist, XmgNode, random_netlist

ALL_PASSES = (
    constant_propagate,
    dedup_strash,
    maj_rewrite,
    xor_rewrite,
    window_resub0,
    window_resub1,
)


def test_constant_propagate_trivial_majority():
    # MAJ(x1, 0, 0) is constant 0: node goes away, PO rewires to the constant
    net = XmgNetlist(1, [XmgNode(MAJ, (Edge(1), Edge(0), Edge(0)))], [Edge(2)])
    out = constant_propagate(net)
    assert out.size == 0
    assert out.pos[0] == Edge(0)


def test_dedup_strash_merges_pair():
    nodes = [
        XmgNode(MAJ, (Edge(1), Edge(2), Edge(0))),
        XmgNode(MAJ, (Edge(1), Edge(2), Edge(0))),
        XmgNode(XOR, (Edge(3), Edge(4), Edge(2))),
    ]
    net = XmgNetlist(2, nodes, [Edge(5)])
    out = dedup_strash(net)
    assert out.size == net.size - 1
    assert_same_function(net, out)


def test_every_pass_preserves_function_and_size():
    rng = random.Random(21)
    for trial in range(30):
        net = random_netlist(
            7000 + trial, num_pis=rng.randint(3, 6), num_ops=14
        )
        want = brute_tables(net)
        for fn in ALL_PASSES:
            out = fn(net, seed=trial)
            assert out.size <= net.size, fn.__name__
            assert brute_tables(out) == want, (fn.__name__, trial)


def test_cleanup_idempotent():
    rng = random.Random(4)
    for trial in range(15):
        net = random_netlist(800 + trial, num_pis=rng.randint(3, 5), num_ops=rng.randint(4, 16))
        once = cleanup(net)
        twice = cleanup(once)
        assert twice.size == once.size
        assert twice.signature() == once.signature()
        assert_same_function(net, once)


def test_run_random_sequence_k0_is_cleanup():
    net = random_netlist(123, num_pis=4, num_ops=12)
    out = run_random_sequence(net, 0, seed=5)
    assert out.signature() == cleanup(net).signature()
    assert_same_function(net, out)


def test_run_random_sequence_deterministic():
    net = random_netlist(321, num_pis=5, num_ops=15)
    a = run_random_sequence(net, 10, seed=9)
    b = run_random_sequence(net, 10, seed=9)
    assert a.signature() == b.signature()
    c = run_random_sequence(net, 10, seed=10)
    assert_same_function(a, c)


def test_run_random_sequence_reduces_benchmark():
    # the imported AND-gate netlist carries plenty of redundancy
    net = parse_aiger_file(Path(__file__).resolve().parents[1] / "benchmarks" / "int2float.aag")
    naive_size = net.size
    assert naive_size == 260
    out = run_random_sequence(net, 10, seed=0)
    assert out.size < naive_size
    assert out.size == 61  # pinned from a recorded run of this exact seed


def test_pass_names_cover_dispatch():
    assert len(PASS_NAMES) == 6
    assert len(set(PASS_NAMES)) == 6
