"""Bit-parallel evaluation kernels.

Two hot loops live here: filling the per-node simulation matrix (one
uint64 word row per signal, 64 patterns per word) and scanning divisor
triples for resubstitution candidates.  Both ship a numba @njit build and
a pure-numpy build.  Set XMGFLOW_DISABLE_NUMBA=1 to force the numpy path;
otherwise numba is used when importable.
"""

from __future__ import annotations

import os

import numpy as np

FULL = np.uint64(0xFFFFFFFFFFFFFFFF)
ZERO = np.uint64(0)

_want_numba = os.environ.get("XMGFLOW_DISABLE_NUMBA", "") not in ("1", "true", "yes")

try:  # pragma: no cover - exercised via the env flag in the benchmark
    if not _want_numba:
        raise ImportError("numba disabled by XMGFLOW_DISABLE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


# -- simulation matrix ------------------------------------------------------
#
# mat has one row per node id (row 0 = constant zero, rows 1..P = PIs) and
# W words per row.  kinds[i] is 0 for MAJ, 1 for XOR; fis/fnegs give fan-in
# row ids and complement masks (0 or ~0) for op i, which fills row
# first_op + i.  tail_mask zeroes the unused high bits of the last word so
# complemented rows stay canonical.


def _eval_ops_np(kinds, fis, fnegs, mat, first_op, tail_mask):
    n_ops = kinds.shape[0]
    for i in range(n_ops):
        a = mat[fis[i, 0]] ^ fnegs[i, 0]
        b = mat[fis[i, 1]] ^ fnegs[i, 1]
        c = mat[fis[i, 2]] ^ fnegs[i, 2]
        if kinds[i] == 0:
            out = (a & b) | (a & c) | (b & c)
        else:
            out = a ^ b ^ c
        out[-1] &= tail_mask
        mat[first_op + i] = out
    return mat


@njit(cache=True, nogil=True)
def _eval_ops_nb(kinds, fis, fnegs, mat, first_op, tail_mask):  # pragma: no cover
    n_ops = kinds.shape[0]
    n_words = mat.shape[1]
    for i in range(n_ops):
        fa = fis[i, 0]
        fb = fis[i, 1]
        fc = fis[i, 2]
        na = fnegs[i, 0]
        nb = fnegs[i, 1]
        nc = fnegs[i, 2]
        row = first_op + i
        if kinds[i] == 0:
            for w in range(n_words):
                a = mat[fa, w] ^ na
                b = mat[fb, w] ^ nb
                c = mat[fc, w] ^ nc
                mat[row, w] = (a & b) | (a & c) | (b & c)
        else:
            for w in range(n_words):
                mat[row, w] = (
                    (mat[fa, w] ^ na) ^ (mat[fb, w] ^ nb) ^ (mat[fc, w] ^ nc)
                )
        mat[row, n_words - 1] &= tail_mask
    return mat


# -- divisor triple scan ----------------------------------------------------
#
# Given the simulation matrix, a target row, and a (T, 3) array of divisor
# row ids, find pattern-consistent candidates target == OP(±u, ±v, ±w).
# Combos are ordered kind-major then complement mask (bit0 -> first fan-in),
# so hits come back in a deterministic order both builds agree on.
# Resume support: scanning starts at triple `t0`, combo `c0`.


def _scan_triples_np(mat, target_row, triples, tail_mask, t0, c0, max_hits):
    n = triples.shape[0]
    hits = []
    tgt = mat[target_row][np.newaxis, :]
    chunk = 4096
    for lo in range(t0, n, chunk):
        hi = min(lo + chunk, n)
        rows = triples[lo:hi]
        u = mat[rows[:, 0]]
        v = mat[rows[:, 1]]
        w = mat[rows[:, 2]]
        found = []
        for combo in range(16):
            kind = combo >> 3
            m = combo & 7
            a = u ^ FULL if (m & 1) else u
            b = v ^ FULL if (m & 2) else v
            c = w ^ FULL if (m & 4) else w
            out = ((a & b) | (a & c) | (b & c)) if kind == 0 else (a ^ b ^ c)
            out[:, -1] &= tail_mask
            eq = np.flatnonzero(np.all(out == tgt, axis=1))
            for idx in eq.tolist():
                t = lo + idx
                if t == t0 and combo < c0:
                    continue
                found.append((t, combo))
        if found:
            found.sort()
            hits.extend(found)
            if len(hits) >= max_hits:
                return hits[:max_hits]
    return hits


@njit(cache=True, nogil=True)
def _scan_triples_nb(mat, target_row, triples, tail_mask, t0, c0, max_hits):  # pragma: no cover
    n = triples.shape[0]
    n_words = mat.shape[1]
    out_t = np.empty(max_hits, np.int64)
    out_c = np.empty(max_hits, np.int64)
    found = 0
    full = FULL
    zero = ZERO
    for t in range(t0, n):
        ru = triples[t, 0]
        rv = triples[t, 1]
        rw = triples[t, 2]
        start = c0 if t == t0 else 0
        for combo in range(start, 16):
            kind = combo >> 3
            m = combo & 7
            na = full if (m & 1) else zero
            nb = full if (m & 2) else zero
            nc = full if (m & 4) else zero
            ok = True
            for wd in range(n_words):
                a = mat[ru, wd] ^ na
                b = mat[rv, wd] ^ nb
                c = mat[rw, wd] ^ nc
                if kind == 0:
                    val = (a & b) | (a & c) | (b & c)
                else:
                    val = a ^ b ^ c
                if wd == n_words - 1:
                    val = val & tail_mask
                if val != mat[target_row, wd]:
                    ok = False
                    break
            if ok:
                out_t[found] = t
                out_c[found] = combo
                found += 1
                if found >= max_hits:
                    return out_t[:found], out_c[:found]
    return out_t[:found], out_c[:found]


def eval_ops(kinds, fis, fnegs, mat, first_op, tail_mask):
    """Fill op rows of the simulation matrix in place and return it."""
    if HAS_NUMBA:
        return _eval_ops_nb(
            kinds, fis, fnegs, mat, np.int64(first_op), np.uint64(tail_mask)
        )
    return _eval_ops_np(kinds, fis, fnegs, mat, first_op, np.uint64(tail_mask))


def scan_triples(mat, target_row, triples, tail_mask, t0=0, c0=0, max_hits=32):
    """Pattern-consistent (triple index, combo) hits, in scan order.

    combo = kind * 8 + complement mask; kind 0 is MAJ, 1 is XOR.
    """
    if triples.shape[0] == 0:
        return []
    if HAS_NUMBA:
        ts, cs = _scan_triples_nb(
            mat,
            np.int64(target_row),
            triples,
            np.uint64(tail_mask),
            np.int64(t0),
            np.int64(c0),
            np.int64(max_hits),
        )
        return list(zip(ts.tolist(), cs.tolist()))
    return _scan_triples_np(
        mat, target_row, triples, np.uint64(tail_mask), t0, c0, max_hits
    )
