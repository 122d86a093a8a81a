import numpy as np
import pytest

from conftest import brute_tables, masked
from xmgflow.edp import CostModel, place
from xmgflow.instructions import (
    EmitError,
    Instruction,
    InstructionSequence,
    SrcRef,
    emit_instructions,
    parse_instructions,
    seq_from_json,
    seq_to_json,
    write_instructions,
)
from xmgflow.schedule import interpret, scheduled
from xmgflow.simulate import edge_words, make_patterns, simulate
from xmgflow.textio import (
    TextFormatError,
    parse_report,
    parse_xmg,
    render_report,
    write_xmg,
)
from xmgflow.xmg import MAJ, XOR, Edge, XmgNetlist, XmgNode, random_netlist

GOLDEN_XMG = """\
inputs 3
outputs 1
N4 = MAJ(N1, N2, N0)
N5 = XOR(N1, N2, N3)
N6 = MAJ(N4, !N5, N3)
output N6
"""


def test_write_xmg_golden(tiny_net):
    assert write_xmg(tiny_net) == GOLDEN_XMG


def test_parse_xmg_golden(tiny_net):
    net = parse_xmg(GOLDEN_XMG)
    assert net.signature() == tiny_net.signature()
    assert net.name == ""


def test_parse_xmg_comments_name_and_blanks():
    text = "# header comment\nname probe\n\ninputs 2\noutputs 1\n\n# body\nN3 = XOR(N1, !N2, N0)\noutput !N3\n"
    net = parse_xmg(text)
    assert net.name == "probe"
    assert net.num_pis == 2
    assert net.pos == (Edge(3, True),)
    assert net.node(3).fanins == (Edge(1), Edge(2, True), Edge(0))


def test_xmg_round_trip_random():
    for s in range(30):
        net = random_netlist(1200 + s, num_pis=1 + s % 6, num_ops=1 + (s * 7) % 23)
        back = parse_xmg(write_xmg(net))
        assert back.signature() == net.signature()
        assert back.canonical_lines() == net.canonical_lines()
        assert back.name == net.name


@pytest.mark.parametrize(
    "text,line_no,frag",
    [
        ("N4 = MAJ(N1, N2, N0)\n", 1, "before 'inputs'"),
        ("output N1\n", 1, "before 'inputs'"),
        ("inputs 3\nN4 = MAJ(Nx, N2, N0)\n", 2, "bad literal"),
        ("inputs 3\nN4 = MAJ(N5, N2, N0)\n", 2, "not defined yet"),
        ("inputs 3\nN6 = MAJ(N1, N2, N0)\n", 2, "expected node N4"),
        ("inputs 3\nN4 = MAJ(N1, N2)\n", 2, "exactly three"),
        ("inputs 3\nfrobnicate\n", 2, "unrecognized line"),
        ("outputs 1\n", 0, "missing 'inputs'"),
        ("inputs 2\noutputs 2\noutput N1\n", 0, "promises 2 outputs"),
    ],
)
def test_parse_xmg_errors(text, line_no, frag):
    with pytest.raises(TextFormatError, match=frag) as exc:
        parse_xmg(text)
    assert exc.value.line_no == line_no


def test_report_round_trip():
    recs = [
        {"size": 41, "mf": 9, "edp": 1681.0, "provenance": "baseline"},
        {"size": 42, "mf": 8, "edp": 1764.0},
    ]
    usage = [(1, 1), (2, 2), (3, 1)]
    text = render_report(recs, usage, extra={"selected": 1})
    doc = parse_report(text)
    assert doc["designs"] == recs
    assert doc["usage"] == usage
    assert doc["selected"] == 1


@pytest.mark.parametrize(
    "text,frag",
    [
        ("[]", "designs"),
        ('{"designs": []}', "usage"),
        ('{"designs": [{"size": 3, "mf": 1}], "usage": []}', "missing 'edp'"),
    ],
)
def test_parse_report_errors(text, frag):
    with pytest.raises(ValueError, match=frag):
        parse_report(text)


# -- instruction sequences ---------------------------------------------------


def two_then_join():
    nodes = [
        XmgNode(MAJ, (Edge(1), Edge(2), Edge(0))),
        XmgNode(XOR, (Edge(1), Edge(2), Edge(3))),
        XmgNode(MAJ, (Edge(4), Edge(5), Edge(0))),
    ]
    return scheduled(XmgNetlist(3, nodes, [Edge(6)]))


GOLDEN_INSTR = """\
inputs 3
rows 1 2 3
R4 <- MAJ(R1, R2, R0)
R5 <- XOR(R1, R2, R3)
R4 <- MAJ(R4, R5, R0)
output R4
"""


def test_emit_single_array_golden():
    d = two_then_join()
    seq = emit_instructions(d, place(d, CostModel()))
    assert write_instructions(seq) == GOLDEN_INSTR
    assert seq.num_copies == 0


def test_emit_multi_array_stages_copies():
    d = two_then_join()
    model = CostModel(rows_per_array=4)
    seq = emit_instructions(d, place(d, model))
    text = write_instructions(seq)
    assert text == (
        "inputs 3\n"
        "rows 1 2 5\n"
        "R7 <- COPY(R1)\n"
        "R8 <- COPY(R2)\n"
        "R6 <- MAJ(R7, R8, R0)\n"
        "R11 <- COPY(R1)\n"
        "R12 <- COPY(R2)\n"
        "R9 <- COPY(R5)\n"
        "R9 <- XOR(R11, R12, R9)\n"
        "R7 <- COPY(R9)\n"
        "R6 <- MAJ(R6, R7, R0)\n"
        "output R6\n"
    )
    assert seq.num_copies == 6
    # replay agrees with the exhaustive truth table
    pats = make_patterns(3)
    out = interpret(seq, pats.rows[1:], model.rows_per_array)
    assert int(out[0, 0]) & 0xFF == brute_tables(d.netlist)[0]


def test_instruction_text_and_json_round_trip():
    d = two_then_join()
    for rpa in (256, 4):
        seq = emit_instructions(d, place(d, CostModel(rows_per_array=rpa)))
        assert parse_instructions(write_instructions(seq)) == seq
        assert seq_from_json(seq_to_json(seq)) == seq


def test_parse_instructions_comments():
    text = "# preamble\ninputs 1\nrows 7\n\nR9 <- XOR(R7, !R7, R0)\noutput !R9\n"
    seq = parse_instructions(text)
    assert seq.pi_rows == (7,)
    assert seq.instructions == (
        Instruction(1, "XOR", 9, (SrcRef(7), SrcRef(7, True), SrcRef(0))),
    )
    assert seq.pos == ((9, True),)


@pytest.mark.parametrize(
    "text,frag",
    [
        ("rows 1\nR2 <- COPY(R1)\n", "missing 'inputs'"),
        ("inputs 2\nrows 1\n", "'rows' lists 1 rows for 2 inputs"),
        ("inputs 1\nrows 1\nR2 <- COPY(Q1)\n", "bad source"),
        ("inputs 1\nrows 1\nR2 <- NAND(R1, R1, R0)\n", "unrecognized instruction"),
    ],
)
def test_parse_instructions_errors(text, frag):
    with pytest.raises(EmitError, match=frag):
        parse_instructions(text)


def test_sequence_validation():
    with pytest.raises(EmitError, match="consecutive"):
        InstructionSequence(1, (1,), (Instruction(2, "COPY", 3, (SrcRef(1),)),), ())
    with pytest.raises(EmitError, match="COPY takes 1"):
        InstructionSequence(
            1, (1,), (Instruction(1, "COPY", 3, (SrcRef(1), SrcRef(1))),), ()
        )
    with pytest.raises(EmitError, match="MAJ takes 3"):
        InstructionSequence(1, (1,), (Instruction(1, "MAJ", 3, (SrcRef(1),)),), ())


def test_emit_rejects_temporary_inputs():
    from conftest import chain_net

    d = scheduled(chain_net(3), temporary_inputs=(2,))
    with pytest.raises(EmitError, match="temporary"):
        emit_instructions(d, None)


def test_emit_interpret_matches_simulate():
    for s in range(25):
        net = random_netlist(2310 + s, num_pis=3 + s % 5, num_ops=4 + (s * 5) % 18)
        d = scheduled(net)
        rpa = 256 if s % 2 == 0 else max(net.num_pis + 1, 4)
        model = CostModel(rows_per_array=rpa)
        seq = emit_instructions(d, place(d, model))
        pats = make_patterns(net.num_pis)
        out = interpret(seq, pats.rows[1:], rpa)
        vals = simulate(net, pats)
        assert out.shape[0] == len(net.pos)
        for j, e in enumerate(net.pos):
            want = masked(edge_words(vals, e), pats.width)
            got = masked(out[j], pats.width)
            assert (want == got).all()
