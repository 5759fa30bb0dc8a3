from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import scenarios
from iimhard import (EnhInstance, System, TehInstance, cascade, cfmhv, fmhv, kill_set, pcfmhv,
                     pfmhv, solve_enh_exact, solve_enh_heuristic, solve_teh_exact,
                     solve_teh_heuristic)

SEED = {"a2", "a3"}


def test_fmhv(t1):
    assert fmhv(t1, "a1") == 2
    assert fmhv(t1, "b1") == 0
    assert fmhv(t1, "a1", {"b1", "b2", "b3"}) == 0


def test_cfmhv(t1):
    assert cfmhv(t1, "a1", {"a3"}) == 0  # a1 survives, empty protection set


def test_cfmhv_pinned(t1):
    # PS(a3) = {a3, b4}. a3 with b4's relation excluded: 1/2 from b3's {a1 a3};
    # b4 with its own relation excluded: 1 from a3's {b4}
    assert cfmhv(t1, "a3", SEED) == Fraction(3, 2)


def test_cfmhv_symmetric_pair():
    s = System.from_relations({"a": [["b"]], "b": [["a"]]})
    assert cfmhv(s, "a", {"a"}) == 1


def test_pfmhv(t1):
    assert pfmhv(t1, "a3", ()) == 0
    assert pfmhv(t1, "a3", {"b4"}) == 1
    assert pfmhv(t1, "b2", {"b4"}) == 0


def test_pcfmhv(t1):
    assert pcfmhv(t1, "a3", SEED, ()) == 0
    # b4's relation is excluded for a3 (b4 is in PS(a3)), a3 is not in scope
    assert pcfmhv(t1, "a3", SEED, {"b4"}) == 0
    assert pcfmhv(t1, "a3", SEED, {"b3"}) == Fraction(1, 2)
    everything = set(t1.labels)
    assert pcfmhv(t1, "a3", SEED, everything) == cfmhv(t1, "a3", SEED)


def test_enh_worked(t1):
    assert solve_enh_heuristic(EnhInstance(t1, SEED, 1)).hardened == {"a2"}
    rep = solve_enh_heuristic(EnhInstance(t1, SEED, 0))
    assert rep.hardened == frozenset() and rep.protected == 0


def test_teh_worked(t1):
    assert solve_teh_heuristic(TehInstance(t1, SEED, {"b4"})).hardened == {"a3"}
    assert solve_teh_heuristic(TehInstance(t1, SEED, ())).hardened == frozenset()


@settings(max_examples=150, deadline=None)
@given(scenarios(max_n=8), st.integers(0, 4))
def test_enh_bounded_by_exact(sc, k):
    system, seed = sc
    inst = EnhInstance(system, seed, k)
    h = solve_enh_heuristic(inst)
    assert len(h.hardened) <= k
    assert h.protected <= solve_enh_exact(inst).protected
    assert solve_enh_heuristic(inst).hardened == h.hardened


@settings(max_examples=150, deadline=None)
@given(scenarios(max_n=8), st.data())
def test_teh_valid_and_bounded(sc, data):
    system, seed = sc
    killed = sorted(kill_set(system, seed))
    protect = data.draw(st.sets(st.sampled_from(killed))) if killed else set()
    inst = TehInstance(system, seed, protect)
    h = solve_teh_heuristic(inst)
    assert not cascade(system, seed, h.hardened).final & protect
    assert len(h.hardened) >= len(solve_teh_exact(inst).hardened)
    assert solve_teh_heuristic(inst).hardened == h.hardened


def _residual_reference(system, seed, k=None, protect=None):
    """Greedy on an explicitly rebuilt residual system (the slow, literal reading)."""
    from iimhard import kill_set, protection_set, prune_system, remove_operational
    residual, _ = prune_system(system, seed)
    pending = set(protect or ())
    hardened = []
    while (len(hardened) < k) if protect is None else pending:
        rs = set(seed) & set(residual.labels)
        ps = {e: protection_set(residual, e, rs) for e in kill_set(residual, rs)}
        if not ps:
            break
        if protect is None:
            score = {e: len(v) for e, v in ps.items()}
            metric = lambda e: cfmhv(residual, e, rs)  # noqa: E731
        else:
            score = {e: len(v & pending) for e, v in ps.items()}
            metric = lambda e: pcfmhv(residual, e, rs, pending & set(residual.labels))  # noqa: E731
        best = max(score.values())
        tied = [e for e in ps if score[e] == best]
        if len(tied) > 1:
            vals = {e: metric(e) for e in tied}
            tied = [e for e in tied if vals[e] == max(vals.values())]
        pick = min(tied)
        hardened.append(pick)
        pending -= ps[pick]
        residual, _ = remove_operational(residual, ps[pick], rs - ps[pick])
    if len(hardened) >= len(seed) and (protect is None or protect):
        hardened = list(seed)
    return frozenset(hardened)


@settings(max_examples=150, deadline=None)
@given(scenarios(max_n=9), st.integers(0, 4), st.data())
def test_matches_residual_reference(sc, k, data):
    system, seed = sc
    assert solve_enh_heuristic(EnhInstance(system, seed, k)).hardened == \
        _residual_reference(system, seed, k=k)
    killed = sorted(kill_set(system, seed))
    protect = data.draw(st.sets(st.sampled_from(killed))) if killed else set()
    assert solve_teh_heuristic(TehInstance(system, seed, protect)).hardened == \
        _residual_reference(system, seed, protect=protect)
