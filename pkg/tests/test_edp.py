import json

import pytest

from xmgflow.edp import (
    CostModel,
    PlacementError,
    estimate_edp,
    load_cost_model,
    place,
    save_cost_model,
    with_rows,
)
from xmgflow.schedule import scheduled
from xmgflow.xmg import MAJ, XOR, Edge, XmgNetlist, XmgNode, random_netlist


def two_then_join():
    """N4, N5 both live until N6 kills them: trace (1,2,1), mf 2."""
    nodes = [
        XmgNode(MAJ, (Edge(1), Edge(2), Edge(0))),
        XmgNode(XOR, (Edge(1), Edge(2), Edge(3))),
        XmgNode(MAJ, (Edge(4), Edge(5), Edge(0))),
    ]
    return scheduled(XmgNetlist(3, nodes, [Edge(6)]))


def test_cost_model_validation():
    with pytest.raises(ValueError):
        CostModel(energy_op=2.0, energy_copy=2.0)
    with pytest.raises(ValueError):
        CostModel(rows_per_array=0)
    m = CostModel(energy_op=2.0, energy_copy=5.0)
    assert m.delay_op == 1.0


def test_cost_model_file_round_trip(tmp_path):
    m = CostModel(energy_op=2.0, energy_copy=30.0, delay_copy=4.0, rows_per_array=32)
    p = tmp_path / "cost.json"
    save_cost_model(m, p)
    assert load_cost_model(p) == m
    # partial config: unnamed fields keep their defaults
    q = tmp_path / "partial.json"
    q.write_text(json.dumps({"energy_copy": 99.0, "rows_per_array": 8.0}))
    got = load_cost_model(q)
    assert got == CostModel(energy_copy=99.0, rows_per_array=8)
    assert isinstance(got.rows_per_array, int)


def test_cost_model_env_var(tmp_path, monkeypatch):
    p = tmp_path / "cost.json"
    save_cost_model(CostModel(energy_copy=42.0), p)
    monkeypatch.delenv("XMGFLOW_COST_CONFIG", raising=False)
    assert load_cost_model() == CostModel()
    monkeypatch.setenv("XMGFLOW_COST_CONFIG", str(p))
    assert load_cost_model().energy_copy == 42.0


@pytest.mark.parametrize(
    "doc,frag",
    [
        ({"bogus": 2}, "unknown cost config fields: bogus"),
        ({"energy_op": "fast"}, "must be numeric"),
        ({"energy_op": True}, "must be numeric"),
        ([1, 2], "JSON object"),
    ],
)
def test_cost_model_rejects_bad_config(tmp_path, doc, frag):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match=frag):
        load_cost_model(p)


def test_single_array_placement_rows():
    d = two_then_join()
    assert (d.mf, d.row_of) == (2, {4: 1, 5: 2, 6: 1})
    pl = place(d, CostModel())
    assert pl.num_arrays == 1
    assert pl.pi_rows == (1, 2, 3)
    assert pl.copies == ()
    # PI i sits in row i, logical result row r in row num_pis + r
    assert pl.value_row == {1: 1, 2: 2, 3: 3, 4: 4, 5: 5, 6: 4}


def test_multi_array_placement_hand_example():
    d = two_then_join()
    pl = place(d, CostModel(rows_per_array=4))
    # 3 PIs + mf 2 = 5 slots, 2 data rows per array (2 reserved for staging)
    assert pl.num_arrays == 3
    assert pl.pi_rows == (1, 2, 5)
    assert pl.value_row == {1: 1, 2: 2, 3: 5, 4: 6, 5: 9, 6: 6}
    got = [(c.op, c.src_row, c.dest_row) for c in pl.copies]
    assert got == [
        (4, 1, 7),
        (4, 2, 8),
        (5, 1, 11),
        (5, 2, 12),
        (5, 5, 9),  # third foreign source staged in the dest row itself
        (6, 9, 7),
    ]


def test_array_of():
    pl = place(two_then_join(), CostModel(rows_per_array=4))
    assert pl.array_of(0) == -1
    assert [pl.array_of(r) for r in (1, 4, 5, 8, 9)] == [0, 0, 1, 1, 2]


def test_placement_infeasible():
    d = two_then_join()  # 3 PIs
    with pytest.raises(PlacementError, match="infeasible"):
        place(d, CostModel(rows_per_array=3))


def test_placement_no_data_rows():
    # 1 PI, mf 2: passes the PI+result check at rpa=2 but leaves no data rows
    nodes = [
        XmgNode(XOR, (Edge(1), Edge(0), Edge(0))),
        XmgNode(MAJ, (Edge(1), Edge(0), Edge(0))),
        XmgNode(XOR, (Edge(2), Edge(3), Edge(0))),
    ]
    d = scheduled(XmgNetlist(1, nodes, [Edge(4)]))
    assert d.mf == 2
    with pytest.raises(PlacementError, match="no data rows"):
        place(d, CostModel(rows_per_array=2))


def test_estimate_edp_closed_form():
    d = two_then_join()
    assert estimate_edp(d, CostModel()) == 9.0  # 3 ops, no copies
    # 6 copies at rpa=4: (3*1 + 6*10) * (3*1 + 6*1)
    assert estimate_edp(d, CostModel(rows_per_array=4)) == 63.0 * 9.0
    m = CostModel(energy_op=2.0, energy_copy=5.0, delay_op=3.0, delay_copy=7.0, rows_per_array=4)
    assert estimate_edp(d, m) == (3 * 2 + 6 * 5) * (3 * 3 + 6 * 7)


def test_with_rows():
    m = with_rows(CostModel(), 12)
    assert m.rows_per_array == 12
    assert m.energy_copy == CostModel().energy_copy


def test_placement_invariants_random():
    # every operand either shares the dest array or has a staged copy there
    for s in range(20):
        net = random_netlist(700 + s, num_pis=4, num_ops=14)
        d = scheduled(net)
        rpa = 5 + s % 4
        pl = place(d, CostModel(rows_per_array=rpa))
        by_op = {}
        for c in pl.copies:
            by_op.setdefault(c.op, []).append(c)
        for v in net.op_ids():
            dest = pl.value_row[v]
            da = pl.array_of(dest)
            staged = {c.src_row: c.dest_row for c in by_op.get(v, [])}
            assert len(staged) <= 3
            for e in net.node(v).fanins:
                if e.target == 0:
                    continue
                src = pl.value_row[e.target]
                if pl.array_of(src) != da:
                    assert pl.array_of(staged[src]) == da
