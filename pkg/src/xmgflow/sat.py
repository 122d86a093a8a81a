"""Small conflict-driven clause-learning SAT solver plus CNF helpers.

Used to decide functional equivalence of signal pairs whose support is too
wide for exhaustive simulation: the pair is encoded as a miter and the
solver answers UNSAT (equal), SAT (differ), or None when the conflict
budget runs out (undecided; callers treat that as "not proven").

Literals are signed ints (+v / -v, vars start at 1).  Deterministic:
identical clause lists and budgets always take the same search path.
"""

from __future__ import annotations

from .xmg import MAJ, XOR, CONST0

UNDEF = 0


class Solver:
    def __init__(self):
        self.n_vars = 0
        self.clauses = []
        self.watches = {}
        self.assign = [UNDEF]
        self.level = [0]
        self.reason = [None]
        self.activity = [0.0]
        self.trail = []
        self.trail_lim = []
        self.var_inc = 1.0
        self.ok = True

    def new_var(self):
        self.n_vars += 1
        self.assign.append(UNDEF)
        self.level.append(0)
        self.reason.append(None)
        self.activity.append(0.0)
        return self.n_vars

    def _ensure(self, v):
        while self.n_vars < v:
            self.new_var()

    def value(self, lit):
        v = self.assign[abs(lit)]
        if v == UNDEF:
            return UNDEF
        return v if lit > 0 else -v

    def add_clause(self, lits):
        lits = sorted(set(lits), key=abs)
        for lit in lits:
            self._ensure(abs(lit))
        if any(-lit in lits for lit in lits):
            return True  # tautology
        if not self.ok:
            return False
        if not lits:
            self.ok = False
            return False
        if len(lits) == 1:
            if self.value(lits[0]) == -1:
                self.ok = False
                return False
            if self.value(lits[0]) == UNDEF:
                self._enqueue(lits[0], None)
                if self._propagate() is not None:
                    self.ok = False
                    return False
            return True
        clause = list(lits)
        self.clauses.append(clause)
        self.watches.setdefault(clause[0], []).append(clause)
        self.watches.setdefault(clause[1], []).append(clause)
        return True

    def _enqueue(self, lit, reason):
        v = abs(lit)
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        head = getattr(self, "_qhead", 0)
        while head < len(self.trail):
            lit = self.trail[head]
            head += 1
            false_lit = -lit
            watching = self.watches.get(false_lit)
            if not watching:
                continue
            keep = []
            conflict = None
            for pos, clause in enumerate(watching):
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if self.value(first) == 1:
                    keep.append(clause)
                    continue
                moved = False
                for k in range(2, len(clause)):
                    if self.value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches.setdefault(clause[1], []).append(clause)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(clause)
                if self.value(first) == -1:
                    keep.extend(watching[pos + 1 :])
                    conflict = clause
                    break
                self._enqueue(first, clause)
            self.watches[false_lit] = keep
            if conflict is not None:
                self._qhead = len(self.trail)
                return conflict
        self._qhead = head
        return None

    def _bump(self, v):
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for i in range(1, self.n_vars + 1):
                self.activity[i] *= 1e-100
            self.var_inc *= 1e-100

    def _analyze(self, conflict):
        learnt = []
        seen = [False] * (self.n_vars + 1)
        counter = 0
        lit = None
        reason = conflict
        idx = len(self.trail) - 1
        btlevel = 0
        cur_level = len(self.trail_lim)
        while True:
            for q in reason:
                if lit is not None and q == lit:
                    continue
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
                        btlevel = max(btlevel, self.level[v])
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            lit = self.trail[idx]
            v = abs(lit)
            seen[v] = False
            counter -= 1
            idx -= 1
            if counter == 0:
                learnt.append(-lit)
                break
            reason = self.reason[v]
        self.var_inc /= 0.95
        return learnt, btlevel

    def _backtrack(self, level):
        while len(self.trail_lim) > level:
            lim = self.trail_lim.pop()
            while len(self.trail) > lim:
                lit = self.trail.pop()
                v = abs(lit)
                self.assign[v] = UNDEF
                self.reason[v] = None
        self._qhead = len(self.trail)

    def _decide(self):
        best = 0
        best_act = -1.0
        for v in range(1, self.n_vars + 1):
            if self.assign[v] == UNDEF and self.activity[v] > best_act:
                best = v
                best_act = self.activity[v]
        return best

    def solve(self, max_conflicts=100000):
        """True = SAT, False = UNSAT, None = budget exceeded."""
        if not self.ok:
            return False
        self._qhead = 0
        if self._propagate() is not None:
            self.ok = False
            return False
        conflicts = 0
        restart_limit = 100
        restart_ceiling = restart_limit
        while True:
            conflict = self._propagate()
            if conflict is not None:
                conflicts += 1
                if conflicts >= max_conflicts:
                    self._backtrack(0)
                    return None
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, btlevel = self._analyze(conflict)
                self._backtrack(btlevel)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    learnt.sort(key=lambda q: -self.level[abs(q)])
                    self.clauses.append(learnt)
                    self.watches.setdefault(learnt[0], []).append(learnt)
                    self.watches.setdefault(learnt[1], []).append(learnt)
                    self._enqueue(learnt[0], learnt)
                if conflicts >= restart_ceiling:
                    restart_limit = int(restart_limit * 1.5)
                    restart_ceiling = conflicts + restart_limit
                    self._backtrack(0)
            else:
                v = self._decide()
                if v == 0:
                    return True
                self.trail_lim.append(len(self.trail))
                self._enqueue(-v, None)

    def model_value(self, v):
        return self.assign[v] == 1


# -- CNF encoding of netlist cones -------------------------------------------


class ConeEncoder:
    """Tseitin-encodes the cone feeding requested edges of one netlist."""

    def __init__(self, netlist, solver=None):
        self.net = netlist
        self.solver = solver or Solver()
        self.var_of = {}

    def _lit(self, edge):
        t, neg = edge.target, edge.neg
        if t == CONST0:
            v = self.var_of.get(CONST0)
            if v is None:
                v = self.solver.new_var()
                self.var_of[CONST0] = v
                self.solver.add_clause([-v])
            return -v if neg else v
        v = self.var_of.get(t)
        if v is None:
            v = self.solver.new_var()
            self.var_of[t] = v
            if self.net.is_op(t):
                self._encode_op(t, v)
        return -v if neg else v

    def _encode_op(self, nid, out):
        node = self.net.node(nid)
        a, b, c = (self._lit(e) for e in node.fanins)
        add = self.solver.add_clause
        if node.kind == MAJ:
            add([-out, a, b])
            add([-out, a, c])
            add([-out, b, c])
            add([out, -a, -b])
            add([out, -a, -c])
            add([out, -b, -c])
        else:
            # out <-> a ^ b ^ c: clauses over every odd/even sign pattern.
            for sa in (1, -1):
                for sb in (1, -1):
                    for sc in (1, -1):
                        parity = (sa < 0) ^ (sb < 0) ^ (sc < 0)
                        so = 1 if parity else -1
                        add([sa * a, sb * b, sc * c, so * out])

    def literal(self, edge):
        return self._lit(edge)

    def pi_var(self, pid):
        return self.var_of.get(pid)


def prove_equal(netlist, lhs, rhs_literal_builder, max_conflicts=60000):
    """UNSAT-check a miter between edge `lhs` and a caller-built literal.

    rhs_literal_builder(enc) must return a solver literal in the same
    encoder, so both sides share PI variables.  Returns True (equal),
    False (differ), or None (budget exceeded).
    """
    enc = ConeEncoder(netlist)
    la = enc.literal(lhs)
    lb = rhs_literal_builder(enc)
    enc.solver.add_clause([la, lb])
    enc.solver.add_clause([-la, -lb])
    res = enc.solver.solve(max_conflicts=max_conflicts)
    if res is None:
        return None
    return not res
