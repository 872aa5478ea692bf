import re
from collections import deque
from pathlib import Path

import pytest

from iterpcp.coding import Alphabet
from iterpcp.pcp import PcpInstance

ROOT = Path(__file__).resolve().parent.parent
AB = Alphabet.of("ab")


@pytest.fixture
def example():
    return PcpInstance(AB, (("a", "baa"), ("ab", "aa"), ("bba", "bb")))


@pytest.fixture
def example_file():
    return str(ROOT / "instances" / "post_example.json")


def count_nodes(text):
    """Node count from the text alone: one node per variable token and one
    per arrow."""
    return len(re.findall(r"[a-z][a-z0-9_]*", text)) + text.count("->")


def forward_reachable(inst, start, max_len, target=None):
    """Forward closure of a word pair under prepending, words capped at
    ``max_len``. Independent of the reverse search used by the library."""
    seen = {start}
    queue = deque([start])
    while queue:
        u, v = queue.popleft()
        for a, b in inst.pairs:
            nxt = (a + u, b + v)
            if len(nxt[0]) <= max_len and len(nxt[1]) <= max_len and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def all_words(letters, max_len, empty=True):
    out = [""] if empty else []
    level = [""]
    for _ in range(max_len):
        level = [w + c for w in level for c in letters]
        out.extend(level)
    return out


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
