#!/usr/bin/env python3
"""Deterministically generate the stand-in benchmark circuits.

The four circuits reproduce the (inputs, outputs, AND-gates) interface
profile of the EPFL combinational suite members of the same name, but the
gate structure is seeded-random: the real suite is not vendored here.
Redundancy is injected on purpose (duplicate AND pairs, double-negated
re-encodings, shared fan-in chains) so optimization passes and peak
resubstitution have material to work with.

Run from the repository root:  python3 benchmarks/gen_circuits.py
"""

from __future__ import annotations

import random
from pathlib import Path

# name -> (num_pis, num_pos, num_ands), matching the published profiles
PROFILES = {
    "router": (60, 3, 257),
    "int2float": (11, 7, 260),
    "cavlc": (10, 11, 693),
    "priority": (128, 8, 978),
}

GEN_SEED = 20240817


def _lit(var: int, neg: bool) -> int:
    return 2 * var + (1 if neg else 0)


def generate(name: str, num_pis: int, num_pos: int, num_ands: int, seed: int) -> str:
    rng = random.Random(seed)
    total_vars = num_pis + num_ands
    lines = [f"aag {total_vars} {num_pis} 0 {num_pos} {num_ands}"]
    for i in range(1, num_pis + 1):
        lines.append(str(_lit(i, False)))

    # candidate fan-in pool: variable indexes, weighted toward recent gates
    pool = list(range(1, num_pis + 1))
    gate_defs = []  # (var, a_lit, b_lit)

    def pick_src() -> int:
        # half the time one of the most recent 60 values, else anywhere
        if len(pool) > 60 and rng.random() < 0.5:
            return pool[rng.randrange(len(pool) - 60, len(pool))]
        return pool[rng.randrange(len(pool))]

    def next_var() -> int:
        return num_pis + 1 + len(gate_defs)

    def emit(a: int, b: int) -> int:
        if a < b:
            a, b = b, a  # AIGER convention: rhs0 >= rhs1
        var = next_var()
        gate_defs.append((var, a, b))
        pool.append(var)
        return var

    while len(gate_defs) < num_ands:
        left = num_ands - len(gate_defs)
        roll = rng.random()
        if gate_defs and roll < 0.06:
            # re-encode an existing gate: same sources, fresh polarity pattern
            _, a, b = gate_defs[rng.randrange(len(gate_defs))]
            emit(a ^ rng.randrange(2), b ^ rng.randrange(2))
        elif roll < 0.16 and left >= 3:
            # parity via three gates: optimization can collapse this to one op
            va, vb = pick_src(), pick_src()
            a = _lit(va, rng.random() < 0.5)
            b = _lit(vb, rng.random() < 0.5)
            g1 = emit(a, b ^ 1)
            g2 = emit(a ^ 1, b)
            emit(_lit(g1, True), _lit(g2, True))
        else:
            va, vb = pick_src(), pick_src()
            emit(_lit(va, rng.random() < 0.5), _lit(vb, rng.random() < 0.5))

    # outputs tap the final gates: keeps the deep chained structure alive
    tail = [v for (v, _, _) in gate_defs][-num_pos:]
    while len(tail) < num_pos:  # tiny circuits: repeat with flipped polarity
        tail.append(tail[0] if tail else 1)
    for i, v in enumerate(reversed(tail)):
        lines.append(str(_lit(v, i % 2 == 1)))
    for var, a, b in gate_defs:
        lines.append(f"{_lit(var, False)} {a} {b}")
    return "\n".join(lines) + "\n"


def main() -> None:
    out_dir = Path(__file__).parent
    for name, (pis, pos, ands) in PROFILES.items():
        text = generate(name, pis, pos, ands, derive(name))
        path = out_dir / f"{name}.aag"
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path} ({pis} in / {pos} out / {ands} ands)")


def derive(name: str) -> int:
    return GEN_SEED * 1000003 + sum(ord(c) * 131 for c in name)


if __name__ == "__main__":
    main()
