"""Iterative compile loop: frontier maintenance, rounds, final selection.

Each round picks a frontier design uniformly at random (seeded per round),
carves out the sub-netlist around its memory-usage peak, runs a random
optimization recipe on it, schedules the result under a frontier-derived
footprint bound, splices it back, applies peak resubstitution, and offers
the outcome to the frontier.  Rounds that blow the bound are abandoned
early and still count toward the round budget.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .edp import CostModel, estimate_edp
from .mfresub import mfresub
from .passes import cleanup, run_random_sequence
from .schedule import (
    BoundExceeded,
    ScheduleRequest,
    ScheduledNetlist,
    peak_window,
    schedule_exact,
    schedule_heuristic,
    scheduled,
)
from .subnet import extract, pareto_mf_bound
from .util import derive_seed


@dataclass(frozen=True)
class Design:
    scheduled: ScheduledNetlist
    provenance: str = ""

    @property
    def size(self) -> int:
        return self.scheduled.size

    @property
    def mf(self) -> int:
        return self.scheduled.mf

    @property
    def netlist(self):
        return self.scheduled.netlist

    def signature(self) -> str:
        return self.scheduled.netlist.signature()

    def key(self):
        return (self.size, self.mf, self.signature())


def _dominates(a, b) -> bool:
    """a dominates b: no worse on both metrics, better on at least one."""
    return (
        a.size <= b.size
        and a.mf <= b.mf
        and (a.size < b.size or a.mf < b.mf)
    )


class ParetoSet:
    """Mutable frontier; members are mutually non-dominating."""

    def __init__(self, designs=()):
        self.designs = []
        for d in designs:
            self.insert(d)

    def __iter__(self):
        return iter(self.designs)

    def __len__(self):
        return len(self.designs)

    def insert(self, d: Design) -> bool:
        """Add d unless dominated or an exact duplicate; evict the dominated."""
        key = d.key()
        for e in self.designs:
            if _dominates(e, d) or e.key() == key:
                return False
        self.designs = [e for e in self.designs if not _dominates(d, e)]
        self.designs.append(d)
        self.designs.sort(key=lambda e: (e.size, e.mf, e.signature()))
        return True

    def snapshot(self) -> tuple:
        return tuple(self.designs)

    def points(self) -> list:
        return [(d.size, d.mf) for d in self.designs]

    def weakly_dominates(self, other) -> bool:
        """Every member of `other` is dominated-or-equaled by some member here."""
        def covered(b):
            return any(
                a.size <= b.size and a.mf <= b.mf for a in self.designs
            )
        return all(covered(b) for b in other)


@dataclass(frozen=True)
class CompilerConfig:
    rounds: int = 20
    lam: float = 0.6
    beta: float = 1.1
    k_cmds: int = 10
    n_trial: int = 500000
    rows_per_array: int = 256
    seed: int = 0
    exact_threshold: int = 24
    jobs: int = 1

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise ValueError("lambda must lie strictly between 0 and 1")
        if not self.beta > 1.0:
            raise ValueError("beta must exceed 1")
        if self.rounds < 0:
            raise ValueError("rounds must be nonnegative")


@dataclass(frozen=True)
class RoundLog:
    round: int
    picked: tuple  # (size, mf) of the baseline pick
    outcome: str   # inserted provenance, "bound-exceeded", or "skipped-empty"
    category: str = ""  # resubstitution outcome classification


def _run_round(snapshot, r, cfg):
    """One optimization round against a frontier snapshot.

    Returns (candidates, log): zero or more Designs to offer the frontier.
    Pure in (snapshot, r, cfg), so batched rounds can evaluate concurrently.
    """
    rng = random.Random(derive_seed(cfg.seed, "round", r))
    base = snapshot[rng.randrange(len(snapshot))]
    picked = (base.size, base.mf)
    if base.size == 0:
        return [], RoundLog(r, picked, "skipped-empty")
    w = peak_window(base.scheduled.trace, cfg.lam)
    sub = extract(base.scheduled, w)
    opt = run_random_sequence(sub.netlist, cfg.k_cmds, derive_seed(cfg.seed, "opt", r))
    new_size = base.size - sub.netlist.size + opt.size
    bound = pareto_mf_bound(snapshot, new_size, cfg.beta)
    eff = sub.effective_bound(bound)
    if eff is not None and eff <= 0:
        return [], RoundLog(r, picked, "bound-exceeded")
    req = ScheduleRequest(opt, temporary_inputs=sub.temps, mf_bound=eff)
    if opt.size <= cfg.exact_threshold:
        sub_design = schedule_exact(req, node_limit=max(cfg.exact_threshold, 1))
    else:
        sub_design = schedule_heuristic(req)
    if isinstance(sub_design, BoundExceeded):
        return [], RoundLog(r, picked, "bound-exceeded")
    from .subnet import reinsert  # local import keeps module load acyclic

    spliced_net = reinsert(base.scheduled, sub, sub_design)
    spliced = scheduled(spliced_net)
    res = mfresub(spliced, cfg.n_trial, seed=derive_seed(cfg.seed, "mfresub", r))
    cands = [Design(res.design, f"round-{r}-spliced")]
    resched = schedule_heuristic(ScheduleRequest(res.design.netlist))
    if not isinstance(resched, BoundExceeded):
        cands.append(Design(resched, f"round-{r}-rescheduled"))
    return cands, RoundLog(r, picked, "inserted", res.category)


def run_with_log(netlist, cfg: CompilerConfig):
    """Full compile flow; returns (frontier, per-round logs)."""
    base_net = cleanup(netlist)
    baseline = Design(schedule_heuristic(ScheduleRequest(base_net)), "baseline")
    frontier = ParetoSet([baseline])
    logs = []
    r = 1
    while r <= cfg.rounds:
        batch = list(range(r, min(r + max(cfg.jobs, 1), cfg.rounds + 1)))
        snap = frontier.snapshot()
        if cfg.jobs > 1 and len(batch) > 1:
            with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
                results = list(pool.map(lambda rr: _run_round(snap, rr, cfg), batch))
        else:
            results = [_run_round(snap, rr, cfg) for rr in batch]
        for cands, log in results:
            logs.append(log)
            for d in cands:
                frontier.insert(d)
        r = batch[-1] + 1
    return frontier, logs


def run(netlist, cfg: CompilerConfig) -> ParetoSet:
    return run_with_log(netlist, cfg)[0]


def select_final(frontier, rows_available, model: CostModel) -> Design:
    """Least-size design fitting the available rows, else the EDP minimum."""
    designs = list(getattr(frontier, "designs", frontier))
    if not designs:
        raise ValueError("empty frontier")
    fits = [d for d in designs if d.mf <= rows_available]
    if fits:
        return min(fits, key=lambda d: (d.size, d.mf, d.signature()))
    return min(
        designs,
        key=lambda d: (estimate_edp(d.scheduled, model), d.size, d.mf, d.signature()),
    )
