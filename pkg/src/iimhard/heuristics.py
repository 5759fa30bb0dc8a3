"""Greedy hardening heuristics ranked by protection-set size and minterm hit values."""

from __future__ import annotations

import time
from fractions import Fraction
from typing import Iterable, Optional

from .cascade import final_failed_mask
from .exact import EnhInstance, SolveReport, TehInstance, make_report
from .system import System


def fmhv(system: System, e, excluded: Iterable = ()) -> Fraction:
    """Sum of ``1/|s|`` over minterms ``s`` containing ``e``.

    Relations whose target is in ``excluded`` are skipped.
    """
    i = system.index_of(e)
    skip = system.mask(excluded)
    total = Fraction(0)
    for t, idr in system.idrs.items():
        if skip >> t & 1:
            continue
        for m in idr.minterms:
            if m.mask >> i & 1:
                total += Fraction(1, len(m))
    return total


def pfmhv(system: System, e, scope: Iterable, excluded: Iterable = ()) -> Fraction:
    """Like :func:`fmhv` but only over relations of (still failed) members of ``scope``."""
    i = system.index_of(e)
    keep = system.mask(scope) & ~system.mask(excluded)
    total = Fraction(0)
    for t, idr in system.idrs.items():
        if not keep >> t & 1:
            continue
        for m in idr.minterms:
            if m.mask >> i & 1:
                total += Fraction(1, len(m))
    return total


def _ps_table(system: System, seed: int, hardened: int = 0) -> tuple[int, dict[int, int]]:
    """Failed set under ``hardened`` and the protection set of each failed entity."""
    killed = final_failed_mask(system, seed, hardened)
    table = {}
    pool = killed
    i = 0
    while pool:
        if pool & 1:
            table[i] = killed & ~final_failed_mask(system, seed, hardened | 1 << i)
        pool >>= 1
        i += 1
    return killed, table


def _indices(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _fmhv_idx(system: System, i: int, skip: int, keep: Optional[int] = None) -> Fraction:
    total = Fraction(0)
    for t, idr in system.idrs.items():
        if skip >> t & 1 or (keep is not None and not keep >> t & 1):
            continue
        for m in idr.minterms:
            if m.mask >> i & 1:
                total += Fraction(1, len(m))
    return total


def _cumulative(system: System, e: int, ps: dict[int, int], scope: Optional[int]) -> Fraction:
    return sum(
        (_fmhv_idx(system, x, ps.get(x, 0), scope) for x in _indices(ps.get(e, 0))),
        Fraction(0),
    )


def _residual_hits(system: System, gone: int) -> list[list[tuple[int, int]]]:
    """Per entity, ``(target, minterm size)`` over the system left after deleting ``gone``.

    Deleted entities drop out of every minterm; duplicate reduced minterms
    count once. A relation with an emptied minterm belongs to an initially
    failed entity and no longer counts.
    """
    hits: list[list[tuple[int, int]]] = [[] for _ in range(len(system))]
    for t, idr in system.idrs.items():
        if gone >> t & 1:
            continue
        reduced = {m.mask & ~gone for m in idr.minterms}
        if 0 in reduced:
            continue
        for r in reduced:
            size = bin(r).count("1")
            for x in _indices(r):
                hits[x].append((t, size))
    return hits


def _residual_cumulative(hits, e: int, ps: dict[int, int], scope: Optional[int]) -> Fraction:
    """Cumulative hit value of ``e``: each ``x`` in ``PS(e)`` scores its minterms outside ``PS(x)``."""
    by_size: dict[int, int] = {}
    for x in _indices(ps.get(e, 0)):
        skip = ps.get(x, 0)
        for t, size in hits[x]:
            if skip >> t & 1 or (scope is not None and not scope >> t & 1):
                continue
            by_size[size] = by_size.get(size, 0) + 1
    return sum((Fraction(c, size) for size, c in by_size.items()), Fraction(0))


def cfmhv(system: System, e, seed: Iterable) -> Fraction:
    """Sum of ``fmhv(x, excluded=PS(x))`` over ``x`` in ``PS(e)``."""
    _, ps = _ps_table(system, system.mask(seed))
    return _cumulative(system, system.index_of(e), ps, None)


def pcfmhv(system: System, e, seed: Iterable, scope: Iterable) -> Fraction:
    """Prioritised :func:`cfmhv`: only relations of ``scope`` members count."""
    _, ps = _ps_table(system, system.mask(seed))
    return _cumulative(system, system.index_of(e), ps, system.mask(scope))


def _fill(hits: list, system: System, gone: int) -> list:
    # built on the first tie only
    hits.extend(_residual_hits(system, gone))
    return hits


def _pick(system: System, ps: dict[int, int], score, tiebreak):
    """Max ``score``, then max ``tiebreak`` (only evaluated on ties), then smallest label."""
    best = max(score(i) for i in ps)
    tied = [i for i in ps if score(i) == best]
    if len(tied) > 1:
        metric = {i: tiebreak(i) for i in tied}
        top = max(metric.values())
        tied = [i for i in tied if metric[i] == top]
    return min(tied, key=lambda i: system.labels[i]), best


def solve_enh_heuristic(inst: EnhInstance) -> SolveReport:
    """Greedy: harden the entity with the largest protection set, then re-evaluate.

    Entities already saved are treated as permanently operational, which is
    the same as cascading with the partial plan hardened. Ties go to the
    larger cumulative minterm hit value, then to the smaller label.
    """
    started = time.perf_counter()
    system = inst.system
    seed = system.mask(inst.initial_failed)
    hard = 0
    hardened: list[str] = []
    notes = []
    while len(hardened) < inst.budget:
        killed, ps = _ps_table(system, seed, hard)
        if not killed:
            break
        gone = system.full_mask & ~killed
        hits = []
        pick, _ = _pick(
            system, ps,
            score=lambda i: bin(ps[i]).count("1"),
            tiebreak=lambda i: _residual_cumulative(hits or _fill(hits, system, gone), i, ps, None),
        )
        hardened.append(system.labels[pick])
        hard |= 1 << pick
    if len(hardened) >= len(inst.initial_failed):
        hardened = list(inst.initial_failed)
        notes.append("hardened the initial failures directly")
    return make_report(system, inst.initial_failed, hardened, "heuristic", started,
                       notes, inst.decision_threshold)


def solve_teh_heuristic(inst: TehInstance) -> SolveReport:
    """Greedy: harden the entity saving the most pending protect-set members."""
    started = time.perf_counter()
    system = inst.system
    seed = system.mask(inst.initial_failed)
    pending = system.mask(inst.protect)
    hard = 0
    hardened: list[str] = []
    notes = []
    while pending:
        killed, ps = _ps_table(system, seed, hard)
        gone = system.full_mask & ~killed
        target = pending
        hits = []
        pick, gain = _pick(
            system, ps,
            score=lambda i: bin(ps[i] & target).count("1"),
            tiebreak=lambda i: _residual_cumulative(hits or _fill(hits, system, gone), i, ps, target),
        ) if ps else (None, 0)
        if not gain:
            # every pending member protects itself, so this is only a guard
            hardened.extend(sorted(system.decode(pending)))
            notes.append("no candidate protected a pending member; hardened them directly")
            break
        hardened.append(system.labels[pick])
        hard |= 1 << pick
        pending &= ~ps[pick]
    if len(hardened) >= len(inst.initial_failed) and inst.protect:
        hardened = list(inst.initial_failed)
        notes.append("hardened the initial failures directly")
    return make_report(system, inst.initial_failed, hardened, "heuristic", started, notes)
