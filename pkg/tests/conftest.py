import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from iimhard import parse_system  # noqa: E402
from iimhard.system import System  # noqa: E402

SAMPLE = """\
a1 <- b2
a2 <- b2
a3 <- b4
b1 <- a1 + a2
b2 <- a1 a2
b3 <- a2 + a1 a3
b4 <- a3
"""

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def t1():
    return parse_system(SAMPLE)


@pytest.fixture
def t1_path(tmp_path):
    p = tmp_path / "t1.iim"
    p.write_text(SAMPLE)
    return p


@st.composite
def systems(draw, min_n=1, max_n=8, max_minterms=3, max_size=3, unit=False, single=False):
    """Random systems; ``unit`` restricts to size-1 minterms, ``single`` to one minterm."""
    n = draw(st.integers(min_n, max_n))
    labels = [f"e{i}" for i in range(n)]
    relations = {}
    for t in range(n):
        others = [x for x in labels if x != labels[t]]
        if not others or not draw(st.booleans()):
            continue
        n_mt = 1 if single else draw(st.integers(1, max_minterms))
        mts = []
        for _ in range(n_mt):
            size = 1 if unit else draw(st.integers(1, min(max_size, len(others))))
            members = draw(st.lists(st.sampled_from(others), min_size=size, max_size=size, unique=True))
            if set(members) not in [set(m) for m in mts]:
                mts.append(members)
        relations[labels[t]] = mts
    return System.from_relations(relations, sources=labels)


@st.composite
def scenarios(draw, **kw):
    system = draw(systems(**kw))
    labels = list(system.labels)
    seed = draw(st.sets(st.sampled_from(labels), max_size=len(labels)))
    return system, seed


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
