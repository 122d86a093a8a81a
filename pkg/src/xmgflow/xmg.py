"""XOR-majority graph (XMG) netlists.

Node ids are dense and topological: id 0 is the constant-zero signal, ids
1..num_pis are the primary inputs, and operation nodes (three-input MAJ or
XOR) occupy the ids after that.  Every fan-in id is strictly smaller than
the node's own id, so iterating operation nodes in id order is always a
valid evaluation order.  Edges carry a complement flag; inversion is free.

Netlists are immutable.  Structural edits (substitute, rewrite_node,
strash, sweep, reorder) return new netlists whose surviving operation
nodes keep their original relative order under densely re-assigned ids.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

MAJ = "MAJ"
XOR = "XOR"

CONST0 = 0


@dataclass(frozen=True)
class Edge:
    """A reference to a node, optionally complemented."""

    target: int
    neg: bool = False

    def flip(self, flag=True):
        return Edge(self.target, self.neg ^ bool(flag))


@dataclass(frozen=True)
class XmgNode:
    """A three-input MAJ or XOR operation."""

    kind: str
    fanins: tuple

    def __post_init__(self):
        if self.kind not in (MAJ, XOR):
            raise ValueError(f"unknown node kind {self.kind!r}")
        if len(self.fanins) != 3:
            raise ValueError("nodes take exactly three fan-ins")


class XmgNetlist:
    """Immutable XMG with dense topological ids."""

    def __init__(self, num_pis, nodes, pos, name=""):
        self.num_pis = int(num_pis)
        self.nodes = tuple(nodes)
        self.pos = tuple(pos)
        self.name = name
        if self.num_pis < 0:
            raise ValueError("negative PI count")
        first = self.first_op_id
        for i, node in enumerate(self.nodes):
            nid = first + i
            for e in node.fanins:
                if not (0 <= e.target < nid):
                    raise ValueError(
                        f"node {nid}: fan-in {e.target} is not a smaller id"
                    )
        limit = first + len(self.nodes)
        for e in self.pos:
            if not (0 <= e.target < limit):
                raise ValueError(f"PO targets unknown id {e.target}")
        self._consumers = None
        self._po_targets = None

    # -- id helpers ------------------------------------------------------

    @property
    def first_op_id(self):
        return self.num_pis + 1

    @property
    def size(self):
        return len(self.nodes)

    @property
    def num_ids(self):
        return self.first_op_id + len(self.nodes)

    def op_ids(self):
        return range(self.first_op_id, self.num_ids)

    def pi_ids(self):
        return range(1, self.num_pis + 1)

    def is_const(self, nid):
        return nid == CONST0

    def is_pi(self, nid):
        return 1 <= nid <= self.num_pis

    def is_op(self, nid):
        return self.first_op_id <= nid < self.num_ids

    def node(self, nid):
        if not self.is_op(nid):
            raise KeyError(f"id {nid} is not an operation node")
        return self.nodes[nid - self.first_op_id]

    # -- connectivity ----------------------------------------------------

    def _index_consumers(self):
        if self._consumers is not None:
            return
        consumers = {nid: set() for nid in range(self.num_ids)}
        for nid in self.op_ids():
            for e in self.node(nid).fanins:
                consumers[e.target].add(nid)
        self._consumers = {k: tuple(sorted(v)) for k, v in consumers.items()}
        self._po_targets = frozenset(e.target for e in self.pos)

    def consumers(self, nid):
        self._index_consumers()
        return self._consumers[nid]

    def drives_po(self, nid):
        self._index_consumers()
        return nid in self._po_targets

    def fanouts(self, nid):
        """Consumer node ids in ascending order, plus a drives-PO flag."""
        if not (0 <= nid < self.num_ids):
            raise KeyError(f"unknown id {nid}")
        return list(self.consumers(nid)), self.drives_po(nid)

    def mffc(self, root):
        """Maximum fan-out-free cone of an operation node.

        Root plus every operation node used exclusively (transitively) by
        it: the nodes that dangle once the root is dropped.  A node joins
        when no PO references it and all of its consumers are already
        members.  Consumers always carry higher ids, so one descending
        sweep below the root settles membership.  PIs and the constant are
        never members.
        """
        if not self.is_op(root):
            raise ValueError(f"mffc root {root} is not an operation node")
        member = {root}
        for nid in range(root - 1, self.first_op_id - 1, -1):
            if self.drives_po(nid):
                continue
            cons = self.consumers(nid)
            if cons and all(c in member for c in cons):
                member.add(nid)
        return frozenset(member)

    # -- structural edits --------------------------------------------------

    def _reindex(self, keep_ops, node_of):
        """Rebuild with only keep_ops (ascending), remapping through node_of.

        node_of maps old id -> Edge in the new id space for const/PIs and
        surviving ops; removed ops must not be referenced by survivors.
        """
        new_nodes = []
        for old in keep_ops:
            node = self.node(old)
            fanins = tuple(node_of[e.target].flip(e.neg) for e in node.fanins)
            new_nodes.append(XmgNode(node.kind, fanins))
        pos = tuple(node_of[e.target].flip(e.neg) for e in self.pos)
        return XmgNetlist(self.num_pis, new_nodes, pos, self.name)

    def _identity_map(self):
        node_of = {CONST0: Edge(CONST0)}
        for pid in self.pi_ids():
            node_of[pid] = Edge(pid)
        return node_of

    def _cascade_remove(self, seeds, redirected):
        """Ids of ops that dangle once `seeds` lose their consumers.

        `redirected` maps old ids to replacement edges already applied to the
        survivors, so reference counts are taken after redirection.
        """
        refcount = {nid: 0 for nid in self.op_ids()}
        for nid in self.op_ids():
            for e in self.node(nid).fanins:
                t = redirected.get(e.target, Edge(e.target)).target
                if self.is_op(t):
                    refcount[t] += 1
        po_extra = {
            redirected.get(e.target, Edge(e.target)).target for e in self.pos
        }
        removed = set()
        stack = list(seeds)
        while stack:
            x = stack.pop()
            if x in removed or not self.is_op(x):
                continue
            if x not in seeds and (refcount[x] > 0 or x in po_extra):
                continue
            removed.add(x)
            for e in self.node(x).fanins:
                t = e.target
                if self.is_op(t) and t not in removed:
                    refcount[t] -= 1
                    if refcount[t] == 0 and t not in po_extra:
                        stack.append(t)
        return removed

    def substitute(self, old, replacement):
        """Point every consumer of `old` (POs included) at `replacement`.

        Complement flags compose.  The cone that only served `old` (its
        mffc) is removed and ids are densely re-assigned, preserving the
        relative order of survivors.
        """
        if not self.is_op(old):
            raise ValueError(f"substitute target {old} is not an operation")
        if not (0 <= replacement.target < self.num_ids):
            raise ValueError(f"replacement id {replacement.target} unknown")
        if replacement.target == old:
            if replacement.neg:
                raise ValueError("cannot substitute a node by its own complement")
            return self
        cone = self.mffc(old)
        if replacement.target in cone:
            raise ValueError(
                "replacement lies inside the substituted node's exclusive cone"
            )
        # The caller must keep the schedule valid: every consumer of `old`
        # has to execute after the replacement.
        if self.is_op(replacement.target):
            for c in self.consumers(old):
                if c <= replacement.target:
                    raise ValueError(
                        f"consumer {c} would precede replacement {replacement.target}"
                    )
        redirected = {old: replacement}
        removed = self._cascade_remove({old}, redirected)
        keep = [nid for nid in self.op_ids() if nid not in removed]
        node_of = self._identity_map()
        new_id = self.first_op_id
        for nid in keep:
            node_of[nid] = Edge(new_id)
            new_id += 1
        node_of[old] = node_of[replacement.target].flip(replacement.neg)
        new_nodes = []
        for nid in keep:
            node = self.node(nid)
            fanins = []
            for e in node.fanins:
                base = node_of[old] if e.target == old else node_of[e.target]
                fanins.append(base.flip(e.neg))
            new_nodes.append(XmgNode(node.kind, tuple(fanins)))
        pos = []
        for e in self.pos:
            base = node_of[old] if e.target == old else node_of[e.target]
            pos.append(base.flip(e.neg))
        return XmgNetlist(self.num_pis, new_nodes, tuple(pos), self.name)

    def rewrite_node(self, nid, kind, fanins):
        """Replace an operation's definition in place, keeping its id slot.

        New fan-ins must already exist with smaller ids.  Nodes orphaned by
        dropping the old definition's references are removed and ids are
        re-assigned densely.
        """
        if not self.is_op(nid):
            raise ValueError(f"rewrite target {nid} is not an operation")
        fanins = tuple(fanins)
        for e in fanins:
            if not (0 <= e.target < nid):
                raise ValueError(
                    f"rewrite fan-in {e.target} must have an id below {nid}"
                )
        old_node = self.node(nid)
        new_node = XmgNode(kind, fanins)
        nodes = list(self.nodes)
        nodes[nid - self.first_op_id] = new_node
        interim = XmgNetlist(self.num_pis, nodes, self.pos, self.name)
        old_refs = {e.target for e in old_node.fanins if self.is_op(e.target)}
        seeds = {
            t
            for t in old_refs
            if not interim.consumers(t) and not interim.drives_po(t)
        }
        if not seeds:
            return interim
        removed = interim._cascade_remove(seeds, {})
        keep = [x for x in interim.op_ids() if x not in removed]
        node_of = interim._identity_map()
        new_id = interim.first_op_id
        for x in keep:
            node_of[x] = Edge(new_id)
            new_id += 1
        return interim._reindex(keep, node_of)

    def sweep(self):
        """Drop operation nodes with no path to any PO."""
        live = set()
        stack = [e.target for e in self.pos]
        while stack:
            x = stack.pop()
            if x in live or not self.is_op(x):
                continue
            live.add(x)
            stack.extend(e.target for e in self.node(x).fanins)
        keep = [nid for nid in self.op_ids() if nid in live]
        if len(keep) == self.size:
            return self
        node_of = self._identity_map()
        new_id = self.first_op_id
        for nid in keep:
            node_of[nid] = Edge(new_id)
            new_id += 1
        return self._reindex(keep, node_of)

    def strash(self):
        """Merge structurally identical nodes.

        MAJ fan-ins are sorted by (target, neg) for hashing; XOR nodes move
        their fan-in complement parity onto the output edge, so X(!a,b,c)
        and !X(a,b,!c) collapse to one node.  PO functions are unchanged,
        and no function-based merging happens here.
        """
        node_of = self._identity_map()
        table = {}
        new_nodes = []

        def emit(kind, fanins):
            key = (kind, fanins)
            hit = table.get(key)
            if hit is not None:
                return hit
            nid = self.num_pis + 1 + len(new_nodes)
            new_nodes.append(XmgNode(kind, fanins))
            table[key] = nid
            return nid

        for old in self.op_ids():
            node = self.node(old)
            mapped = [node_of[e.target].flip(e.neg) for e in node.fanins]
            if node.kind == XOR:
                parity = False
                plain = []
                for e in mapped:
                    parity ^= e.neg
                    plain.append(Edge(e.target))
                plain.sort(key=lambda e: e.target)
                nid = emit(XOR, tuple(plain))
                node_of[old] = Edge(nid, parity)
            else:
                mapped.sort(key=lambda e: (e.target, e.neg))
                nid = emit(MAJ, tuple(mapped))
                node_of[old] = Edge(nid)
        pos = tuple(node_of[e.target].flip(e.neg) for e in self.pos)
        return XmgNetlist(self.num_pis, new_nodes, pos, self.name)

    def reorder(self, order):
        """Permute operation nodes into `order` (a topological sequence)."""
        order = list(order)
        if sorted(order) != list(self.op_ids()):
            raise ValueError("order is not a permutation of the operation ids")
        node_of = self._identity_map()
        placed = set()
        for cycle, nid in enumerate(order):
            for e in self.node(nid).fanins:
                if self.is_op(e.target) and e.target not in placed:
                    raise ValueError(
                        f"order is not topological: {nid} runs before fan-in {e.target}"
                    )
            node_of[nid] = Edge(self.first_op_id + cycle)
            placed.add(nid)
        new_nodes = []
        for nid in order:
            node = self.node(nid)
            new_nodes.append(
                XmgNode(
                    node.kind,
                    tuple(node_of[e.target].flip(e.neg) for e in node.fanins),
                )
            )
        pos = tuple(node_of[e.target].flip(e.neg) for e in self.pos)
        return XmgNetlist(self.num_pis, new_nodes, pos, self.name)

    # -- identity ----------------------------------------------------------

    def canonical_lines(self):
        lines = [f"pis {self.num_pis}"]
        for nid in self.op_ids():
            node = self.node(nid)
            fan = ",".join(
                f"{'!' if e.neg else ''}{e.target}" for e in node.fanins
            )
            lines.append(f"{nid}={node.kind}({fan})")
        for e in self.pos:
            lines.append(f"po {'!' if e.neg else ''}{e.target}")
        return lines

    def signature(self):
        """Stable content hash used for frontier de-duplication."""
        blob = "\n".join(self.canonical_lines()).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def __repr__(self):
        return (
            f"XmgNetlist(name={self.name!r}, pis={self.num_pis}, "
            f"size={self.size}, pos={len(self.pos)})"
        )


def random_netlist(seed, num_pis, num_ops, name="rand"):
    """Seeded random netlist whose POs cover every sink node."""
    rng = random.Random(seed)
    nodes = []
    first = num_pis + 1
    for i in range(num_ops):
        nid = first + i
        kind = MAJ if rng.random() < 0.6 else XOR
        fanins = []
        for _ in range(3):
            t = rng.randrange(0, nid)
            fanins.append(Edge(t, rng.random() < 0.3))
        if all(e.target == CONST0 for e in fanins):
            fanins[0] = Edge(rng.randrange(1, nid), fanins[0].neg)
        nodes.append(XmgNode(kind, tuple(fanins)))
    net = XmgNetlist(num_pis, nodes, (), name)
    sinks = [nid for nid in net.op_ids() if not net.consumers(nid)]
    if not sinks:
        sinks = [net.num_ids - 1]
    pos = tuple(Edge(s, rng.random() < 0.3) for s in sinks)
    return XmgNetlist(num_pis, nodes, pos, name)
