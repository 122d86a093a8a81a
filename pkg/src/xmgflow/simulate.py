"""Bit-parallel simulation and functional equivalence checking.

Signals are simulated 64 patterns per uint64 word.  The default pattern
set is exhaustive when the netlist has at most 10 PIs and otherwise packs
the all-zeros and all-ones patterns plus 1024 seeded random ones.  Pattern
agreement is only a necessary condition for equivalence; candidates that
survive it go through validate_equivalence, which is exhaustive over the
dependent PIs when that support is small enough and otherwise hands a
miter to the internal SAT solver.  A solver timeout surfaces as None so
callers can fail closed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels, sat
from .xmg import CONST0, MAJ, XOR, Edge, XmgNetlist, XmgNode

FULL = np.uint64(0xFFFFFFFFFFFFFFFF)

EXHAUSTIVE_PI_LIMIT = 10
EXHAUSTIVE_SUPPORT_LIMIT = 20
RANDOM_PATTERNS = 1024

# Per-variable word masks for the six variables that alternate within a word.
_WORD_MASKS = [
    0xAAAAAAAAAAAAAAAA,
    0xCCCCCCCCCCCCCCCC,
    0xF0F0F0F0F0F0F0F0,
    0xFF00FF00FF00FF00,
    0xFFFF0000FFFF0000,
    0xFFFFFFFF00000000,
]


def _tail_mask(width):
    rem = width % 64
    return FULL if rem == 0 else np.uint64((1 << rem) - 1)


@dataclass
class PatternSet:
    """PI stimulus: one row of packed words per PI (row 0 is constant 0)."""

    num_pis: int
    width: int
    rows: np.ndarray  # (num_pis + 1, words) uint64

    @property
    def words(self):
        return self.rows.shape[1]

    @property
    def tail_mask(self):
        return _tail_mask(self.width)


def exhaustive_rows(num_vars, word_offset=0, n_words=None):
    """Rows enumerating all 2^num_vars assignments, var j toggling every 2^j."""
    total_words = max(1, 2 ** max(0, num_vars - 6))
    if n_words is None:
        n_words = total_words
    rows = np.zeros((num_vars, n_words), dtype=np.uint64)
    widx = np.arange(word_offset, word_offset + n_words, dtype=np.uint64)
    for j in range(num_vars):
        if j < 6:
            rows[j, :] = np.uint64(_WORD_MASKS[j])
        else:
            bit = (widx >> np.uint64(j - 6)) & np.uint64(1)
            rows[j, :] = bit * FULL
    if num_vars < 6:
        rows &= _tail_mask(2**num_vars)
    return rows


def make_patterns(num_pis, seed=1):
    """Default pattern policy (see module docstring)."""
    if num_pis <= EXHAUSTIVE_PI_LIMIT:
        width = 2**num_pis
        body = exhaustive_rows(num_pis)
    else:
        width = RANDOM_PATTERNS + 2
        n_words = (width + 63) // 64
        rng = np.random.default_rng(seed)
        body = rng.integers(0, 1 << 64, size=(num_pis, n_words), dtype=np.uint64)
        # Pattern 0 = all zeros, pattern 1 = all ones.
        body &= ~np.uint64(1)
        body |= np.uint64(2)
        body[:, -1] &= _tail_mask(width)
    rows = np.zeros((num_pis + 1, body.shape[1]), dtype=np.uint64)
    rows[1:] = body
    return PatternSet(num_pis, width, rows)


@dataclass
class SimResult:
    """Simulation matrix: one row per node id, tail bits kept at zero."""

    mat: np.ndarray
    width: int

    @property
    def tail_mask(self):
        return _tail_mask(self.width)


def op_arrays(netlist):
    """(kinds, fanin ids, complement masks) ready for the kernels."""
    n = netlist.size
    kinds = np.zeros(n, dtype=np.uint8)
    fis = np.zeros((n, 3), dtype=np.int64)
    fnegs = np.zeros((n, 3), dtype=np.uint64)
    for i, node in enumerate(netlist.nodes):
        kinds[i] = 0 if node.kind == MAJ else 1
        for k, e in enumerate(node.fanins):
            fis[i, k] = e.target
            fnegs[i, k] = FULL if e.neg else 0
    return kinds, fis, fnegs


def simulate(netlist, patterns):
    """Evaluate every node on the pattern set."""
    if patterns.num_pis != netlist.num_pis:
        raise ValueError("pattern set PI count does not match the netlist")
    mat = np.zeros((netlist.num_ids, patterns.words), dtype=np.uint64)
    mat[: netlist.num_pis + 1] = patterns.rows
    kinds, fis, fnegs = op_arrays(netlist)
    kernels.eval_ops(kinds, fis, fnegs, mat, netlist.first_op_id, patterns.tail_mask)
    return SimResult(mat, patterns.width)


def edge_words(sim, edge):
    row = sim.mat[edge.target]
    if not edge.neg:
        return row
    out = row ^ FULL
    out[-1] &= sim.tail_mask
    return out


def check_candidate_equal(sim, a, b):
    """'equal', 'compl', or 'neither' for two edges on the pattern set."""
    ra = sim.mat[a.target]
    rb = sim.mat[b.target]
    same_pol = a.neg == b.neg
    x = ra ^ rb
    if not x.any():
        return "equal" if same_pol else "compl"
    ones = np.full_like(ra, FULL)
    ones[-1] = sim.tail_mask
    if np.array_equal(x, ones):
        return "compl" if same_pol else "equal"
    return "neither"


def check_candidate_op(sim, target, kind, fanins):
    """Pattern-level test of target == kind(fanins) (edges, negs included)."""
    a = edge_words(sim, fanins[0])
    b = edge_words(sim, fanins[1])
    c = edge_words(sim, fanins[2])
    if kind == MAJ:
        out = (a & b) | (a & c) | (b & c)
    else:
        out = a ^ b ^ c
    out = out.copy()
    out[-1] &= sim.tail_mask
    return np.array_equal(out, edge_words(sim, target))


# -- structural support -------------------------------------------------------


def support_masks(netlist):
    """Per-id bitmask of PIs in the transitive fan-in (bit j = PI j+1)."""
    masks = [0] * netlist.num_ids
    for pid in netlist.pi_ids():
        masks[pid] = 1 << (pid - 1)
    first = netlist.first_op_id
    for i, node in enumerate(netlist.nodes):
        m = 0
        for e in node.fanins:
            m |= masks[e.target]
        masks[first + i] = m
    return masks


def dependent_pis(netlist, nid):
    """PI ids the node structurally depends on."""
    if not (0 <= nid < netlist.num_ids):
        raise KeyError(f"unknown id {nid}")
    mask = support_masks(netlist)[nid]
    out = set()
    j = 0
    while mask:
        if mask & 1:
            out.add(j + 1)
        mask >>= 1
        j += 1
    return frozenset(out)


# -- exhaustive evaluation over a support --------------------------------------


def _cone_ids(netlist, roots):
    seen = set()
    stack = [r for r in roots if netlist.is_op(r)]
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        for e in netlist.node(x).fanins:
            if netlist.is_op(e.target) and e.target not in seen:
                stack.append(e.target)
    return sorted(seen)


def _eval_on_support(netlist, edges, support, chunk_words=1024):
    """Yield per-chunk word arrays for `edges` over all 2^k support patterns.

    Non-support PIs are held at zero, which is sound because the compared
    signals cannot read them.
    """
    support = list(support)
    k = len(support)
    cone = _cone_ids(netlist, [e.target for e in edges])
    local = {CONST0: 0}
    for j, pid in enumerate(support):
        local[pid] = 1 + j
    for pid in netlist.pi_ids():
        local.setdefault(pid, 0)  # held at constant zero
    for idx, nid in enumerate(cone):
        local[nid] = 1 + k + idx
    kinds = np.zeros(len(cone), dtype=np.uint8)
    fis = np.zeros((len(cone), 3), dtype=np.int64)
    fnegs = np.zeros((len(cone), 3), dtype=np.uint64)
    for i, nid in enumerate(cone):
        node = netlist.node(nid)
        kinds[i] = 0 if node.kind == MAJ else 1
        for s, e in enumerate(node.fanins):
            fis[i, s] = local[e.target]
            fnegs[i, s] = FULL if e.neg else 0
    total_words = max(1, 2 ** max(0, k - 6))
    tail = _tail_mask(2**k)
    for lo in range(0, total_words, chunk_words):
        n_words = min(chunk_words, total_words - lo)
        mat = np.zeros((1 + k + len(cone), n_words), dtype=np.uint64)
        mat[1 : 1 + k] = exhaustive_rows(k, word_offset=lo, n_words=n_words)
        kernels.eval_ops(kinds, fis, fnegs, mat, 1 + k, tail)
        outs = []
        for e in edges:
            row = mat[local[e.target]]
            if e.neg:
                row = row ^ FULL
                row[-1] &= tail
            outs.append(row)
        yield outs


@dataclass
class TruthTable:
    """Packed truth table of a signal over an ordered PI subset."""

    bits: np.ndarray
    num_vars: int
    pis: tuple


def truth_table(netlist, edge, pis=None):
    if pis is None:
        pis = sorted(dependent_pis(netlist, edge.target))
    pis = list(pis)
    if len(pis) > EXHAUSTIVE_SUPPORT_LIMIT:
        raise ValueError(f"truth table over {len(pis)} variables is too wide")
    parts = [out[0].copy() for out in _eval_on_support(netlist, [edge], pis)]
    return TruthTable(np.concatenate(parts), len(pis), tuple(pis))


# -- full validation ------------------------------------------------------------


def with_candidate_node(netlist, kind, fanins):
    """Netlist extended with one trial node; returns (netlist, its edge)."""
    nodes = list(netlist.nodes) + [XmgNode(kind, tuple(fanins))]
    ext = XmgNetlist(netlist.num_pis, nodes, netlist.pos, netlist.name)
    return ext, Edge(ext.num_ids - 1)


def validate_equivalence(
    netlist,
    lhs,
    rhs,
    exhaustive_limit=EXHAUSTIVE_SUPPORT_LIMIT,
    max_conflicts=60000,
):
    """Decide lhs == rhs as global functions.

    rhs is an Edge or a (kind, [edge, edge, edge]) candidate operation.
    Returns True, False, or None when the SAT budget is exhausted
    (undecided -- treat as not proven).
    """
    if isinstance(rhs, tuple):
        kind, fanins = rhs
        netlist, rhs = with_candidate_node(netlist, kind, fanins)
    masks = support_masks(netlist)
    union = masks[lhs.target] | masks[rhs.target]
    support = []
    j = 0
    m = union
    while m:
        if m & 1:
            support.append(j + 1)
        m >>= 1
        j += 1
    if len(support) <= exhaustive_limit:
        for la, lb in _eval_on_support(netlist, [lhs, rhs], support):
            if not np.array_equal(la, lb):
                return False
        return True
    return sat.prove_equal(
        netlist, lhs, lambda enc: enc.literal(rhs), max_conflicts=max_conflicts
    )
