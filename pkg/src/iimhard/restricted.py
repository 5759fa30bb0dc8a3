"""Polynomial algorithms for systems whose relations use only size-1 minterms.

Case I: every relation is ``e <- f`` (one minterm of one entity).
Case II: every relation is ``e <- f1 + f2 + ...``.

In Case I the protection sets are laminar (nested or disjoint), which makes
the greedy algorithms below optimal. In Case II protection sets are additive
(hardening ``{a, b}`` saves ``PS(a) | PS(b)``), so ENH is a maximum-coverage
problem and TEH a set-cover problem, solved greedily with the usual
``1 - 1/e`` and ``1 + ln|P|`` guarantees.
"""

from __future__ import annotations

import enum
import time
from itertools import combinations
from typing import Iterable, Optional

from .cascade import final_failed_mask, protection_sets
from .exact import EnhInstance, SolveReport, TehInstance, make_report
from .system import System


class IdrClass(enum.Enum):
    CASE_I = "CaseI"
    CASE_II = "CaseII"
    GENERAL = "General"

    def __str__(self):
        return self.value


class IdrClassError(ValueError):
    pass


def classify(system: System) -> IdrClass:
    case1 = True
    for idr in system.idrs.values():
        if any(len(m) != 1 for m in idr.minterms):
            return IdrClass.GENERAL
        if len(idr.minterms) != 1:
            case1 = False
    return IdrClass.CASE_I if case1 else IdrClass.CASE_II


def _require(system: System, allowed: tuple[IdrClass, ...], what: str):
    cls = classify(system)
    if cls not in allowed:
        raise IdrClassError(f"{what} needs a {'/'.join(map(str, allowed))} system, got {cls}")


def _count(x: int) -> int:
    return bin(x).count("1")


def solve_enh_case1(inst: EnhInstance) -> SolveReport:
    """Greedy over the seeds' disjoint failure regions.

    Each initially failed entity owns the entities whose nearest failed
    ancestor it is; that region is its protection set, and these sets are
    pairwise disjoint, so taking the ``budget`` largest is optimal.
    """
    started = time.perf_counter()
    system = inst.system
    _require(system, (IdrClass.CASE_I,), "solve_enh_case1")
    if inst.budget >= len(inst.initial_failed):
        return make_report(system, inst.initial_failed, inst.initial_failed, "case1", started,
                           threshold=inst.decision_threshold)
    seed = system.mask(inst.initial_failed)
    sets = protection_sets(system, seed, candidates=seed)
    hardened = []
    for _ in range(inst.budget):
        live = {i: s for i, s in sets.items() if s}
        if not live:
            break
        pick = min(live, key=lambda i: (-_count(live[i]), system.labels[i]))
        chosen = sets.pop(pick)
        for i in sets:
            sets[i] &= ~chosen
        hardened.append(system.labels[pick])
    return make_report(system, inst.initial_failed, hardened, "case1", started,
                       threshold=inst.decision_threshold)


def solve_teh_case1(inst: TehInstance) -> SolveReport:
    started = time.perf_counter()
    system = inst.system
    _require(system, (IdrClass.CASE_I,), "solve_teh_case1")
    seed = system.mask(inst.initial_failed)
    pending = system.mask(inst.protect)
    sets = protection_sets(system, seed)
    hardened = []
    while pending:
        pick = min(sets, key=lambda i: (-_count(sets[i] & pending), -_count(sets[i]),
                                        system.labels[i]))
        chosen = sets.pop(pick)
        pending &= ~chosen
        for i in sets:
            sets[i] &= ~chosen
        hardened.append(system.labels[pick])
    return make_report(system, inst.initial_failed, hardened, "case1", started)


def greedy_max_coverage(sets: dict, budget: int, key) -> list:
    """Pick up to ``budget`` sets (bitsets) maximising the union size."""
    covered = 0
    chosen = []
    pool = dict(sets)
    for _ in range(budget):
        if not pool:
            break
        pick = min(pool, key=lambda i: (-_count(pool[i] & ~covered), -_count(pool[i]), key(i)))
        if not pool[pick] & ~covered:
            break
        covered |= pool.pop(pick)
        chosen.append(pick)
    return chosen


def greedy_set_cover(universe: int, sets: dict, key) -> list:
    covered = 0
    chosen = []
    pool = dict(sets)
    while universe & ~covered:
        pick = min(pool, key=lambda i: (-_count(pool[i] & universe & ~covered), -_count(pool[i]),
                                        key(i)))
        if not pool[pick] & universe & ~covered:
            raise ValueError("universe cannot be covered")
        covered |= pool.pop(pick)
        chosen.append(pick)
    return chosen


def solve_enh_case2_maxcov(inst: EnhInstance) -> SolveReport:
    started = time.perf_counter()
    system = inst.system
    _require(system, (IdrClass.CASE_I, IdrClass.CASE_II), "solve_enh_case2_maxcov")
    if inst.budget >= len(inst.initial_failed):
        return make_report(system, inst.initial_failed, inst.initial_failed, "case2", started,
                           threshold=inst.decision_threshold)
    sets = protection_sets(system, system.mask(inst.initial_failed))
    picks = greedy_max_coverage(sets, inst.budget, key=lambda i: system.labels[i])
    return make_report(system, inst.initial_failed, [system.labels[i] for i in picks], "case2",
                       started, threshold=inst.decision_threshold)


def solve_teh_case2_setcover(inst: TehInstance) -> SolveReport:
    started = time.perf_counter()
    system = inst.system
    _require(system, (IdrClass.CASE_I, IdrClass.CASE_II), "solve_teh_case2_setcover")
    universe = system.mask(inst.protect)
    sets = protection_sets(system, system.mask(inst.initial_failed))
    # PS(p) always contains p for a failed p, so the cover exists
    picks = greedy_set_cover(universe, {i: s & universe for i, s in sets.items()},
                             key=lambda i: system.labels[i])
    return make_report(system, inst.initial_failed, [system.labels[i] for i in picks], "case2",
                       started)


def find_laminar_violation(system: System, seed: Iterable) -> Optional[tuple[str, str, str]]:
    """First pair of protection sets (or single-seed kill sets) that overlap without nesting.

    Returns ``(kind, label_a, label_b)`` or ``None``.
    """
    s = system.mask(seed)
    ps = protection_sets(system, s)
    kills = {i: final_failed_mask(system, 1 << i) for i in range(len(system)) if s >> i & 1}
    for kind, table in (("protection", ps), ("kill", kills)):
        for a, b in combinations(sorted(table, key=lambda i: system.labels[i]), 2):
            x, y = table[a], table[b]
            inter = x & y
            if inter and inter != x and inter != y:
                return kind, system.labels[a], system.labels[b]
    return None


def check_laminar_protection(system: System, seed: Iterable) -> bool:
    return find_laminar_violation(system, seed) is None
