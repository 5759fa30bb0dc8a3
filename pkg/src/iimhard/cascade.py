"""Cascading failure to fixed point, kill sets and protection sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .system import Idr, Minterm, System, natural_key


@dataclass(frozen=True)
class CascadeTrace:
    """Cumulative failure bitsets ``masks[t]`` for ``t = 0..fixed_point_time``.

    ``fixed_point_time`` is the last step at which a new entity failed (0 if
    nothing beyond the initial set fails), so ``masks[-1]`` is the steady state.
    """

    system: System
    masks: tuple[int, ...]
    hardened_mask: int = 0

    @property
    def fixed_point_time(self) -> int:
        return len(self.masks) - 1

    @property
    def steps(self) -> list[frozenset[str]]:
        return [self.system.decode(m) for m in self.masks]

    @property
    def final_mask(self) -> int:
        return self.masks[-1]

    @property
    def final(self) -> frozenset[str]:
        return self.system.decode(self.masks[-1])

    def state_at(self, t: int) -> int:
        """Failure bitset at time ``t``, constant past the fixed point."""
        return self.masks[min(t, len(self.masks) - 1)]

    def failure_times(self) -> dict[str, int]:
        out = {}
        prev = 0
        for t, m in enumerate(self.masks):
            for lab in self.system.decode(m & ~prev):
                out[lab] = t
            prev = m
        return out

    def table(self) -> str:
        """0/1 grid, one row per entity (natural label order), one column per time step."""
        T = self.fixed_point_time
        width = max([len(lab) for lab in self.system.labels] + [6])
        head = "entity".ljust(width) + "".join(f" t{t}" for t in range(T + 1))
        rows = [head]
        for lab in sorted(self.system.labels, key=natural_key):
            i = self.system.index[lab]
            cells = ("1" if self.masks[t] >> i & 1 else "0" for t in range(T + 1))
            rows.append(lab.ljust(width) + "".join(c.rjust(len(f" t{t}")) for t, c in enumerate(cells)))
        return "\n".join(rows) + "\n"


def cascade_masks(system: System, seed: int, hardened: int = 0) -> tuple[int, ...]:
    """Synchronous update: every relation is evaluated against the previous step."""
    masks = system._minterm_masks
    cur = seed & ~hardened
    out = [cur]
    while True:
        new = cur
        blocked = cur | hardened
        for i, mms in enumerate(masks):
            if mms is None or blocked >> i & 1:
                continue
            for m in mms:
                if not m & cur:
                    break
            else:
                new |= 1 << i
        if new == cur:
            return tuple(out)
        out.append(new)
        cur = new


def final_failed_mask(system: System, seed: int, hardened: int = 0) -> int:
    """Steady-state failure bitset by worklist propagation.

    Same fixed point as :func:`cascade_masks` (the update is monotone) but
    linear in the total minterm size, which is what the solvers call in
    their inner loops.
    """
    failed = seed & ~hardened
    if not failed:
        return 0
    deps = system._dependents
    alive = system._minterm_counts.copy()
    dead = [0] * len(alive)
    stack = []
    m = failed
    i = 0
    while m:
        if m & 1:
            stack.append(i)
        m >>= 1
        i += 1
    blocked = failed | hardened
    while stack:
        j = stack.pop()
        for t, k in deps[j]:
            bit = 1 << k
            if dead[t] & bit:
                continue
            dead[t] |= bit
            alive[t] -= 1
            if alive[t] == 0 and not blocked >> t & 1:
                failed |= 1 << t
                blocked |= 1 << t
                stack.append(t)
    return failed


def cascade(system: System, initial_failed: Iterable = (), hardened: Iterable = ()) -> CascadeTrace:
    h = system.mask(hardened)
    return CascadeTrace(system, cascade_masks(system, system.mask(initial_failed), h), h)


def kill_set(system: System, seed: Iterable) -> frozenset[str]:
    return system.decode(final_failed_mask(system, system.mask(seed)))


def protection_set_mask(system: System, candidate: int, seed: int, killed: int | None = None) -> int:
    if killed is None:
        killed = final_failed_mask(system, seed)
    if not killed >> candidate & 1:
        return 0
    return killed & ~final_failed_mask(system, seed, 1 << candidate)


def protection_set(system: System, candidate, seed: Iterable) -> frozenset[str]:
    """Entities saved from failure by hardening ``candidate`` alone."""
    return system.decode(
        protection_set_mask(system, system.index_of(candidate), system.mask(seed))
    )


def protection_sets(system: System, seed: int, candidates: int | None = None) -> dict[int, int]:
    """``{index: PS bitset}`` for every candidate in the kill set of ``seed``."""
    killed = final_failed_mask(system, seed)
    pool = killed if candidates is None else killed & candidates
    out = {}
    i = 0
    while pool:
        if pool & 1:
            out[i] = killed & ~final_failed_mask(system, seed, 1 << i)
        pool >>= 1
        i += 1
    return out


def remove_operational(system: System, operational: Iterable,
                       failed: Iterable = ()) -> tuple[System, frozenset[str]]:
    """Drop entities that can never fail.

    Their relations are deleted and they are removed from every minterm (an
    always-true conjunct is vacuous). A relation left with an empty minterm
    means its target can never fail either, so it joins the removed set; this
    repeats to a fixpoint. Entities in ``failed`` fail initially, so they stay
    and only lose their relation. Returns the reduced system and the removed
    labels.
    """
    gone = system.mask(operational)
    pinned = system.mask(failed)
    idrs = system.idrs
    while True:
        grew = gone
        for t, idr in idrs.items():
            if (gone | pinned) >> t & 1:
                continue
            if any(not (m.mask & ~gone) for m in idr.minterms):
                grew |= 1 << t
        if grew == gone:
            break
        gone = grew

    keep = [i for i in range(len(system)) if not gone >> i & 1]
    new_index = {old: new for new, old in enumerate(keep)}
    new_idrs = []
    for t, idr in idrs.items():
        if gone >> t & 1 or any(not (m.mask & ~gone) for m in idr.minterms):
            continue
        mts = []
        seen = set()
        for m in idr.minterms:
            members = tuple(new_index[j] for j in m.members if not gone >> j & 1)
            key = frozenset(members)
            if key not in seen:
                seen.add(key)
                mts.append(Minterm(members))
        new_idrs.append(Idr(new_index[t], tuple(mts)))
    reduced = System([system.labels[i] for i in keep], new_idrs)
    return reduced, system.decode(gone)


def prune_system(system: System, seed: Iterable) -> tuple[System, frozenset[str]]:
    """Restrict the system to the entities that fail under ``seed``."""
    killed = final_failed_mask(system, system.mask(seed))
    return remove_operational(system, system.decode(system.full_mask & ~killed), seed)
