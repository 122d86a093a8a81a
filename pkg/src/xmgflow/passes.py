"""Netlist optimization pass pool.

Six function-preserving passes over XMG netlists, each deterministic given
(netlist, seed) and never increasing size:

* ``constant-propagate`` -- collapse nodes that reduce to a single edge
  (duplicate or complementary fan-in pairs, XOR cancellation) and drop
  everything unreachable from the POs.
* ``dedup-strash``       -- structural hashing.
* ``window-resub-0``     -- replace a node by an existing equivalent signal
  found in its fan-in window (zero added nodes), to a fixpoint.
* ``window-resub-1``     -- rebuild one node as a fresh op over window
  divisors, letting its old cone cascade away (at most one rewrite per
  application; may keep size equal).
* ``maj-rewrite``        -- MAJ absorption family M(x,y,M(x,y,r)) -> M(x,y,r)
  plus the edge collapses.
* ``xor-rewrite``        -- XOR chain merge a^b^(a^c) -> b^c on single-fanout
  chain nodes, plus the edge collapses.

``cleanup`` runs dedup-strash, constant-propagate, and window-resub-0 in a
loop until the netlist stops changing, which makes it idempotent.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

from . import simulate
from .kernels import scan_triples
from .util import derive_seed
from .xmg import CONST0, MAJ, XOR, Edge, XmgNetlist, XmgNode

FULL = np.uint64(0xFFFFFFFFFFFFFFFF)

PASS_NAMES = (
    "constant-propagate",
    "dedup-strash",
    "window-resub-0",
    "window-resub-1",
    "maj-rewrite",
    "xor-rewrite",
)

RESUB_CONE_CAP = 12  # transitive fan-in window size per root


@dataclass(frozen=True)
class PassId:
    name: str
    seed: int = 0

    def __post_init__(self):
        if self.name not in PASS_NAMES:
            raise ValueError(f"unknown pass {self.name!r}")


# -- alias/redefinition sweep machinery -----------------------------------------


def _resolve(alias, e):
    a = alias.get(e.target)
    while a is not None:
        e = Edge(a.target, a.neg ^ e.neg)
        a = alias.get(e.target)
    return e


def _rebuild(net, alias, new_def):
    """Apply alias (node -> edge) and redefinitions, drop ops unreachable
    from the POs, and reindex densely preserving relative order."""
    pos = tuple(_resolve(alias, e) for e in net.pos)
    keep = set()
    stack = [e.target for e in pos if net.is_op(e.target)]
    while stack:
        nid = stack.pop()
        if nid in keep:
            continue
        keep.add(nid)
        _kind, fanins = new_def[nid]
        for e in fanins:
            if net.is_op(e.target) and e.target not in keep:
                stack.append(e.target)
    remap = {i: i for i in range(net.first_op_id)}
    nodes = []
    nxt = net.first_op_id
    for nid in net.op_ids():
        if nid not in keep:
            continue
        kind, fanins = new_def[nid]
        nodes.append(
            XmgNode(kind, tuple(Edge(remap[e.target], e.neg) for e in fanins))
        )
        remap[nid] = nxt
        nxt += 1
    pos = tuple(Edge(remap[e.target], e.neg) for e in pos)
    return XmgNetlist(net.num_pis, tuple(nodes), pos, name=net.name)


def _collapse(kind, f):
    """Edge this node is equivalent to, or None.

    MAJ: two equal fan-ins win; a complementary pair yields the third.
    XOR: any two fan-ins on the same target cancel into a parity flip.
    """
    a, b, c = f
    if kind == MAJ:
        if a == b or a == c:
            return a
        if b == c:
            return b
        if a.target == b.target:
            return c
        if a.target == c.target:
            return b
        if b.target == c.target:
            return a
        return None
    for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        if f[i].target == f[j].target:
            par = f[i].neg ^ f[j].neg
            return Edge(f[k].target, f[k].neg ^ par)
    return None


# -- simple passes ---------------------------------------------------------------


def constant_propagate(net, seed=0):
    alias, new_def = {}, {}
    for nid in net.op_ids():
        node = net.node(nid)
        f = tuple(_resolve(alias, e) for e in node.fanins)
        red = _collapse(node.kind, f)
        if red is not None:
            alias[nid] = red
        else:
            new_def[nid] = (node.kind, f)
    return _rebuild(net, alias, new_def)


def dedup_strash(net, seed=0):
    return net.strash()


def _absorb_maj(net, new_def, f):
    """M(x, y, +-M(..)) where two inner fan-ins match {x, y} either both
    plain or both complemented -> (x, y, leftover inner fan-in).

    Sound by cases: x == y makes both sides x; x != y makes the inner MAJ
    (and hence both sides) the leftover.  A mixed plain/complemented match
    is NOT an identity and is never taken.
    """
    for k in range(3):
        ek = f[k]
        t = ek.target
        if not net.is_op(t) or t not in new_def:
            continue
        kind_i, fin = new_def[t]
        if kind_i != MAJ:
            continue
        eff = [Edge(e.target, e.neg ^ ek.neg) for e in fin]
        others = [f[i] for i in range(3) if i != k]
        for flip in (False, True):
            slots = {0, 1, 2}
            ok = True
            for e in others:
                want = Edge(e.target, e.neg ^ flip)
                match = next((s for s in slots if eff[s] == want), None)
                if match is None:
                    ok = False
                    break
                slots.discard(match)
            if ok:
                (left,) = slots
                return (others[0], others[1], eff[left])
    return None


def maj_rewrite(net, seed=0):
    alias, new_def = {}, {}
    for nid in net.op_ids():
        node = net.node(nid)
        f = tuple(_resolve(alias, e) for e in node.fanins)
        red = _collapse(node.kind, f)
        if red is None and node.kind == MAJ:
            got = _absorb_maj(net, new_def, f)
            if got is not None:
                f = got
                red = _collapse(MAJ, f)
        if red is not None:
            alias[nid] = red
        else:
            new_def[nid] = (node.kind, f)
    return _rebuild(net, alias, new_def)


def _merge_xor(net, new_def, f):
    """a ^ b ^ (a ^ c ^ d) -> b ^ c ^ d', folding the cancelled pair's
    complement parity into one leftover fan-in.  Only fires when the chain
    node has a single fan-out and drives no PO, so it dies afterwards."""
    for k in range(3):
        ek = f[k]
        t = ek.target
        if not net.is_op(t) or t not in new_def:
            continue
        kind_i, fin = new_def[t]
        if kind_i != XOR:
            continue
        cons, drives_po = net.fanouts(t)
        if len(cons) != 1 or drives_po:
            continue
        others = [f[i] for i in range(3) if i != k]
        for oi in range(2):
            for gj in range(3):
                if others[oi].target == fin[gj].target:
                    par = ek.neg ^ others[oi].neg ^ fin[gj].neg
                    rem = [fin[x] for x in range(3) if x != gj]
                    return (
                        others[1 - oi],
                        rem[0],
                        Edge(rem[1].target, rem[1].neg ^ par),
                    )
    return None


def xor_rewrite(net, seed=0):
    alias, new_def = {}, {}
    for nid in net.op_ids():
        node = net.node(nid)
        f = tuple(_resolve(alias, e) for e in node.fanins)
        red = _collapse(node.kind, f)
        if red is None and node.kind == XOR:
            got = _merge_xor(net, new_def, f)
            if got is not None:
                f = got
                red = _collapse(XOR, f)
        if red is not None:
            alias[nid] = red
        else:
            new_def[nid] = (node.kind, f)
    return _rebuild(net, alias, new_def)


# -- window resubstitution ---------------------------------------------------------


def _cone(net, root, cap=RESUB_CONE_CAP):
    """Transitive fan-in window (capped BFS) and its frontier signals."""
    cone = {root}
    queue = [root]
    while queue:
        nid = queue.pop(0)
        for e in net.node(nid).fanins:
            t = e.target
            if net.is_op(t) and t not in cone and len(cone) < cap:
                cone.add(t)
                queue.append(t)
    frontier = set()
    for nid in cone:
        for e in net.node(nid).fanins:
            t = e.target
            if t != CONST0 and t not in cone:
                frontier.add(t)
    return cone, frontier


def _divisors(net, root):
    cone, frontier = _cone(net, root)
    excl = net.mffc(root)
    return sorted(t for t in frontier | (cone - {root}) if t < root and t not in excl)


def _tail_vec(sim):
    tails = np.full(sim.mat.shape[1], FULL, dtype=np.uint64)
    rem = sim.width % 64
    if rem:
        tails[-1] = np.uint64((1 << rem) - 1)
    return tails


def window_resub0(net, seed=0):
    """Merge nodes into existing equivalent window signals, to a fixpoint."""
    while True:
        pats = simulate.make_patterns(net.num_pis, seed=1)
        sim = simulate.simulate(net, pats)
        tails = _tail_vec(sim)
        hit = None
        for root in net.op_ids():
            cands = _divisors(net, root)
            if not cands:
                continue
            arr = np.array(cands, dtype=np.int64)
            root_row = sim.mat[root]
            eq = np.all(sim.mat[arr] == root_row, axis=1)
            cm = np.all(sim.mat[arr] == ((root_row ^ FULL) & tails), axis=1)
            for idx in np.flatnonzero(eq | cm):
                d = int(arr[idx])
                compl = not eq[idx]
                if simulate.validate_equivalence(net, Edge(root), Edge(d, compl)):
                    hit = (root, d, compl)
                    break
            if hit:
                break
        if hit is None:
            return net
        root, d, compl = hit
        net = net.substitute(root, Edge(d, compl))


def window_resub1(net, seed=0):
    """Rebuild one node as a fresh MAJ/XOR over window divisors.

    Roots are visited in a seeded order; the first validated rewrite wins.
    The node keeps its id slot, so size never grows (its old fan-in cone
    may cascade away).
    """
    rng = random.Random(derive_seed("resub1", seed))
    pats = simulate.make_patterns(net.num_pis, seed=1)
    sim = simulate.simulate(net, pats)
    rem = sim.width % 64
    tail_mask = FULL if rem == 0 else np.uint64((1 << rem) - 1)
    roots = list(net.op_ids())
    rng.shuffle(roots)
    for root in roots:
        divs = _divisors(net, root)
        if len(divs) < 3:
            continue
        cur = net.node(root)
        cur_key = (cur.kind, frozenset(cur.fanins))
        triples = np.array(list(itertools.combinations(divs, 3)), dtype=np.int64)
        t0, c0 = 0, 0
        while True:
            hits = scan_triples(sim.mat, root, triples, tail_mask, t0, c0, max_hits=32)
            for t_idx, combo in hits:
                kind = MAJ if combo < 8 else XOR
                mask = combo & 7
                d = triples[t_idx]
                fanins = (
                    Edge(int(d[0]), bool(mask & 1)),
                    Edge(int(d[1]), bool(mask & 2)),
                    Edge(int(d[2]), bool(mask & 4)),
                )
                if (kind, frozenset(fanins)) == cur_key:
                    continue
                if simulate.validate_equivalence(net, Edge(root), (kind, fanins)):
                    return net.rewrite_node(root, kind, fanins)
            if len(hits) < 32:
                break
            t0, c0 = hits[-1][0], hits[-1][1] + 1
    return net


# -- dispatch, sequences, cleanup ---------------------------------------------------


_DISPATCH = {
    "constant-propagate": constant_propagate,
    "dedup-strash": dedup_strash,
    "window-resub-0": window_resub0,
    "window-resub-1": window_resub1,
    "maj-rewrite": maj_rewrite,
    "xor-rewrite": xor_rewrite,
}


def run_pass(net, pass_id):
    if isinstance(pass_id, str):
        pass_id = PassId(pass_id)
    return _DISPATCH[pass_id.name](net, pass_id.seed)


def cleanup(net):
    """dedup-strash; constant-propagate; window-resub-0, looped to a fixpoint."""
    for _ in range(64):
        before = net.signature()
        net = net.strash()
        net = constant_propagate(net)
        net = window_resub0(net)
        if net.signature() == before:
            break
    return net


def run_random_sequence(net, k, seed):
    """Apply k uniformly drawn passes, then cleanup."""
    if k < 0:
        raise ValueError("k must be >= 0")
    rng = random.Random(derive_seed("opt-seq", seed))
    for _ in range(k):
        name = rng.choice(PASS_NAMES)
        net = run_pass(net, PassId(name, rng.randrange(2**31)))
    return cleanup(net)
