"""Post correspondence instances and the word-pair derivation relation.

A pair ``(u, v)`` steps to ``(alpha_j u, beta_j v)``; derivability is the
reflexive-transitive closure of that step. Pair indices are 1-based.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .coding import Alphabet, Word

__all__ = [
    "PcpInstance",
    "PcpSolution",
    "SolveResult",
    "elementary_successors",
    "elementary_predecessors",
    "derives",
    "closure_member",
    "predecessor_set",
    "solve_pcp",
    "verify_pcp_solution",
    "load_instance",
    "instance_to_json",
]

WordPair = tuple[Word, Word]
EMPTY: WordPair = ("", "")


@dataclass(frozen=True)
class PcpInstance:
    alphabet: Alphabet
    pairs: tuple[WordPair, ...]

    def __post_init__(self):
        pairs = tuple((str(a), str(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise ValueError("an instance needs at least one pair")
        for j, (a, b) in enumerate(pairs, 1):
            if not a or not b:
                raise ValueError(f"pair {j} has an empty word")
            self.alphabet.check_word(a)
            self.alphabet.check_word(b)
        if len(set(pairs)) != len(pairs):
            raise ValueError("duplicate pair")

    @classmethod
    def from_dict(cls, data: dict) -> "PcpInstance":
        try:
            letters = data["alphabet"]
            pairs = data["pairs"]
        except (KeyError, TypeError):
            raise ValueError("instance needs 'alphabet' and 'pairs'") from None
        if not all(isinstance(p, (list, tuple)) and len(p) == 2 for p in pairs):
            raise ValueError("each pair must be a two-element list")
        return cls(Alphabet.of(letters), tuple((a, b) for a, b in pairs))

    def to_dict(self) -> dict:
        return {
            "alphabet": list(self.alphabet.letters),
            "pairs": [[a, b] for a, b in self.pairs],
        }

    @property
    def size(self) -> int:
        return len(self.pairs)

    def pair(self, j: int) -> WordPair:
        if not 1 <= j <= len(self.pairs):
            raise IndexError(f"pair index {j} out of range 1..{len(self.pairs)}")
        return self.pairs[j - 1]


def load_instance(path: str | Path) -> PcpInstance:
    with open(path, encoding="utf-8") as fh:
        return PcpInstance.from_dict(json.load(fh))


def instance_to_json(inst: PcpInstance) -> str:
    return json.dumps(inst.to_dict())


@dataclass(frozen=True)
class PcpSolution:
    """Indices in concatenation order: ``alpha_{i_1} ... alpha_{i_N}``."""

    indices: tuple[int, ...]
    matched_word: Word

    @property
    def application_order(self) -> tuple[int, ...]:
        """The same indices in the order elementary steps apply from (e, e)."""
        return tuple(reversed(self.indices))


def elementary_successors(inst: PcpInstance, start: WordPair) -> list[tuple[int, WordPair]]:
    u, v = start
    return [(j, (a + u, b + v)) for j, (a, b) in enumerate(inst.pairs, 1)]


def elementary_predecessors(inst: PcpInstance, end: WordPair) -> list[tuple[int, WordPair]]:
    u, v = end
    return [
        (j, (u[len(a):], v[len(b):]))
        for j, (a, b) in enumerate(inst.pairs, 1)
        if u.startswith(a) and v.startswith(b)
    ]


def _reverse_search(inst: PcpInstance, target: WordPair):
    """BFS over predecessors of ``target``; returns parent links
    ``state -> (index, successor state)``."""
    parent: dict[WordPair, Optional[tuple[int, WordPair]]] = {target: None}
    queue = deque([target])
    while queue:
        cur = queue.popleft()
        for j, prev in elementary_predecessors(inst, cur):
            if prev not in parent:
                parent[prev] = (j, cur)
                queue.append(prev)
    return parent


def derives(inst: PcpInstance, start: WordPair, end: WordPair) -> Optional[list[int]]:
    """Index chain (application order) taking ``start`` to ``end``, or None.

    Exact: every predecessor strips a nonempty prefix from both words, so the
    reverse search space is finite.
    """
    start, end = tuple(start), tuple(end)
    if start == end:
        return []
    parent = _reverse_search(inst, end)
    if start not in parent:
        return None
    chain = []
    cur = start
    while parent[cur] is not None:
        j, cur = parent[cur]
        chain.append(j)
    return chain


def closure_member(inst: PcpInstance, pair: WordPair) -> Optional[list[int]]:
    if not pair[0] or not pair[1]:
        raise ValueError("closure membership is defined for nonempty words only")
    return derives(inst, EMPTY, pair)


def predecessor_set(inst: PcpInstance, target: WordPair) -> set[WordPair]:
    return set(_reverse_search(inst, tuple(target)))


def verify_pcp_solution(inst: PcpInstance, indices: Sequence[int]) -> Optional[Word]:
    if not indices:
        raise ValueError("a solution needs at least one index")
    top = "".join(inst.pair(j)[0] for j in indices)
    bottom = "".join(inst.pair(j)[1] for j in indices)
    return top if top == bottom else None


@dataclass(frozen=True)
class SolveResult:
    """Outcome of bounded search. ``status`` is ``solved``, ``unsolvable``
    (search space exhausted without bound pruning) or ``unknown``."""

    status: str
    solution: Optional[PcpSolution]
    levels: int
    states: int

    def __bool__(self) -> bool:
        return self.solution is not None


def solve_pcp(inst: PcpInstance, max_n: int = 12, max_len: int = 40) -> SolveResult:
    """Breadth-first search over index sequences in concatenation order.

    A partial sequence is summarised by its overhang: which side is ahead and
    the unmatched suffix. Sequences are expanded in lexicographic order and
    only the first sequence reaching an overhang is kept, so the first
    solution found has minimal length and is lexicographically least.
    ``max_len`` caps the overhang length.
    """
    if max_n < 1 or max_len < 1:
        raise ValueError("bounds must be >= 1")
    # state: (top_ahead, overhang) -> the sequence and the matched prefix so far
    frontier: list[tuple[tuple[int, ...], bool, str, str]] = [((), True, "", "")]
    seen = {(True, "")}
    pruned = False
    states = 0
    for level in range(1, max_n + 1):
        nxt = []
        for seq, top_ahead, over, word in frontier:
            for j, (a, b) in enumerate(inst.pairs, 1):
                # extend: ahead side gets over+(its word), other side its word
                if top_ahead:
                    t, s = over + a, b
                else:
                    t, s = a, over + b
                if t.startswith(s):
                    ahead, rest, matched = True, t[len(s):], s
                elif s.startswith(t):
                    ahead, rest, matched = False, s[len(t):], t
                else:
                    continue
                new_seq = seq + (j,)
                new_word = word + matched
                if not rest:
                    sol = PcpSolution(new_seq, new_word)
                    return SolveResult("solved", sol, level, states)
                if len(rest) > max_len:
                    pruned = True
                    continue
                key = (ahead, rest)
                if key in seen:
                    continue
                seen.add(key)
                states += 1
                nxt.append((new_seq, ahead, rest, new_word))
        frontier = nxt
        if not frontier:
            status = "unknown" if pruned else "unsolvable"
            return SolveResult(status, None, level, states)
    return SolveResult("unknown", None, max_n, states)
