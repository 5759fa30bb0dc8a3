"""Problem instances, solve reports and exhaustive ENH / TEH solvers."""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Optional

from .cascade import final_failed_mask
from .system import System

DEFAULT_MAX_SUBSETS = 2 ** 26


class SearchSpaceTooLarge(RuntimeError):
    """Exhaustive search would enumerate more subsets than allowed."""


@dataclass(frozen=True)
class EnhInstance:
    system: System
    initial_failed: frozenset[str]
    budget: int
    decision_threshold: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "initial_failed", _labels(self.system, self.initial_failed))
        if self.budget < 0:
            raise ValueError("budget must be non-negative")
        if self.decision_threshold is not None and self.decision_threshold < 0:
            raise ValueError("decision threshold must be non-negative")


@dataclass(frozen=True)
class TehInstance:
    system: System
    initial_failed: frozenset[str]
    protect: frozenset[str]

    def __post_init__(self):
        sys_ = self.system
        seed = _labels(sys_, self.initial_failed)
        protect = _labels(sys_, self.protect)
        killed = sys_.decode(final_failed_mask(sys_, sys_.mask(seed)))
        never = protect - killed
        if never:
            warnings.warn(
                f"dropping protect-set members that never fail: {sorted(never)}",
                stacklevel=3,
            )
        object.__setattr__(self, "initial_failed", seed)
        object.__setattr__(self, "protect", protect & killed)


def _labels(system: System, items: Iterable) -> frozenset[str]:
    if isinstance(items, str):
        items = [items]
    return system.decode(system.mask(items))


@dataclass
class SolveReport:
    hardened: frozenset[str]
    baseline_failed: int
    failed_with_plan: int
    method: str
    wall_time: float = 0.0
    notes: tuple[str, ...] = ()
    meets_threshold: Optional[bool] = None

    @property
    def protected(self) -> int:
        return self.baseline_failed - self.failed_with_plan

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "hardened": sorted(self.hardened),
            "n_hardened": len(self.hardened),
            "baseline_failed": self.baseline_failed,
            "failed_with_plan": self.failed_with_plan,
            "protected": self.protected,
            "wall_time": self.wall_time,
            "notes": list(self.notes),
            "meets_threshold": self.meets_threshold,
        }


def make_report(system: System, seed: Iterable[str], hardened: Iterable[str], method: str,
                started: float, notes=(), threshold: Optional[int] = None) -> SolveReport:
    """Score a plan by running the real cascade with and without it."""
    s = system.mask(seed)
    h = system.mask(hardened)
    base = bin(final_failed_mask(system, s)).count("1")
    after = bin(final_failed_mask(system, s, h)).count("1")
    rep = SolveReport(
        hardened=system.decode(h),
        baseline_failed=base,
        failed_with_plan=after,
        method=method,
        wall_time=time.perf_counter() - started,
        notes=tuple(notes),
    )
    if threshold is not None:
        rep.meets_threshold = after <= threshold
    return rep


def _popcount(x: int) -> int:
    return bin(x).count("1")


def solve_enh_exact(inst: EnhInstance, max_subsets: int = DEFAULT_MAX_SUBSETS) -> SolveReport:
    """Best plan of at most ``budget`` entities drawn from the kill set.

    Ties: fewer hardened entities first, then the lexicographically smallest
    sorted label tuple.
    """
    started = time.perf_counter()
    system = inst.system
    seed = system.mask(inst.initial_failed)
    if inst.budget >= len(inst.initial_failed):
        return make_report(system, inst.initial_failed, inst.initial_failed, "exact", started,
                           threshold=inst.decision_threshold)

    killed = final_failed_mask(system, seed)
    cands = sorted(system.decode(killed))
    k = min(inst.budget, len(cands))
    total = sum(comb(len(cands), j) for j in range(k + 1))
    if total > max_subsets:
        raise SearchSpaceTooLarge(f"{total} candidate subsets exceed the cap of {max_subsets}")

    bits = [1 << system.index[c] for c in cands]
    best_mask, best_failed = 0, _popcount(killed)
    for size in range(1, k + 1):
        for combo in combinations(range(len(cands)), size):
            h = 0
            for j in combo:
                h |= bits[j]
            failed = _popcount(final_failed_mask(system, seed, h))
            if failed < best_failed:
                best_failed, best_mask = failed, h
    return make_report(system, inst.initial_failed, system.decode(best_mask), "exact", started,
                       threshold=inst.decision_threshold)


def solve_teh_exact(inst: TehInstance, max_subsets: int = DEFAULT_MAX_SUBSETS) -> SolveReport:
    """Smallest plan keeping every protect-set member operational."""
    started = time.perf_counter()
    system = inst.system
    seed = system.mask(inst.initial_failed)
    target = system.mask(inst.protect)
    if not target:
        return make_report(system, inst.initial_failed, (), "exact", started)

    killed = final_failed_mask(system, seed)
    cands = sorted(system.decode(killed))
    bits = [1 << system.index[c] for c in cands]
    enumerated = 0
    # hardening every initial failure always works, so the search stops there
    for size in range(1, len(inst.initial_failed) + 1):
        enumerated += comb(len(cands), size)
        if enumerated > max_subsets:
            raise SearchSpaceTooLarge(
                f"more than {max_subsets} candidate subsets needed (reached size {size})"
            )
        for combo in combinations(range(len(cands)), size):
            h = 0
            for j in combo:
                h |= bits[j]
            if not final_failed_mask(system, seed, h) & target:
                return make_report(system, inst.initial_failed, system.decode(h), "exact", started)
    raise AssertionError("hardening all initial failures must protect everything")


@dataclass(frozen=True)
class VulnerableSet:
    entities: frozenset[str]
    killed: frozenset[str]
    method: str = "exact"
    notes: tuple[str, ...] = field(default=())


def k_most_vulnerable(system: System, K: int, max_subsets: int = DEFAULT_MAX_SUBSETS) -> VulnerableSet:
    """K entities whose joint initial failure kills the most entities.

    Exhaustive over all K-subsets when that fits under ``max_subsets``;
    otherwise grows the set greedily by largest kill-set gain and tags the
    result ``method="greedy"``.
    """
    n = len(system)
    if not 0 <= K <= n:
        raise ValueError(f"K must lie in [0, {n}]")
    order = sorted(range(n), key=lambda i: system.labels[i])
    if comb(n, K) <= max_subsets:
        best, best_killed = 0, -1
        best_mask = 0
        for combo in combinations(order, K):
            s = 0
            for i in combo:
                s |= 1 << i
            killed = final_failed_mask(system, s)
            c = _popcount(killed)
            if c > best_killed:
                best, best_killed, best_mask = s, c, killed
        return VulnerableSet(system.decode(best), system.decode(best_mask), "exact")
    return _greedy_vulnerable(system, K, order)


def _greedy_vulnerable(system: System, K: int, order=None) -> VulnerableSet:
    if order is None:
        order = sorted(range(len(system)), key=lambda i: system.labels[i])
    s = 0
    killed = 0
    for _ in range(K):
        best_i, best_k = None, -1
        for i in order:
            if s >> i & 1:
                continue
            c = final_failed_mask(system, s | 1 << i)
            if _popcount(c) > best_k:
                best_i, best_k, best_c = i, _popcount(c), c
        s |= 1 << best_i
        killed = best_c
    return VulnerableSet(system.decode(s), system.decode(killed), "greedy",
                         ("exhaustive search over the cap; greedy fallback",))
