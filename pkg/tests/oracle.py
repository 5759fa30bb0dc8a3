"""Deliberately naive reference implementations.

Plain dicts of label -> list of minterm label-lists, recomputed from scratch
at every step. Shares no code with the package.
"""

from itertools import combinations


def naive_steps(relations, entities, seed, hardened=()):
    hardened = set(hardened)
    failed = set(seed) - hardened
    steps = [set(failed)]
    while True:
        nxt = set(failed)
        for target, minterms in relations.items():
            if target in hardened or target in failed:
                continue
            if all(any(m in failed for m in mt) for mt in minterms):
                nxt.add(target)
        if nxt == failed:
            return steps
        failed = nxt
        steps.append(set(failed))


def naive_final(relations, entities, seed, hardened=()):
    return naive_steps(relations, entities, seed, hardened)[-1]


def naive_ps(relations, entities, e, seed):
    base = naive_final(relations, entities, seed)
    if e not in base:
        return set()
    return base - naive_final(relations, entities, seed, {e})


def naive_enh_opt(relations, entities, seed, k):
    """Largest number of protected entities over every plan of size <= k."""
    base = len(naive_final(relations, entities, seed))
    best = 0
    for size in range(0, min(k, len(entities)) + 1):
        for plan in combinations(sorted(entities), size):
            best = max(best, base - len(naive_final(relations, entities, seed, plan)))
    return best


def naive_teh_opt(relations, entities, seed, protect):
    protect = set(protect)
    for size in range(0, len(entities) + 1):
        for plan in combinations(sorted(entities), size):
            if not naive_final(relations, entities, seed, plan) & protect:
                return size
    raise AssertionError("unreachable")


def relations_of(system):
    """Convert a package System to the oracle's dict form (labels only)."""
    out = {}
    for lab in system.labels:
        if not system.is_source(lab):
            out[lab] = system.minterms_of(lab)
    return out
