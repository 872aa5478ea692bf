"""Implication-only formula terms.

Formulas are hash-consed: building the same tree twice returns the same
object, so equality and hashing are identity based and cheap. Interning is
invisible to callers apart from speed.
"""

from __future__ import annotations

import re
import weakref
from typing import Iterator, Mapping, Optional

__all__ = [
    "Formula",
    "Var",
    "Impl",
    "FormulaSyntaxError",
    "parse_formula",
    "print_formula",
    "formula_size",
    "variables_of",
    "impl_tower",
    "detect_tower",
    "substitute",
    "apply_substitution",
    "match_instance",
    "unify",
    "rename_apart",
]

VAR_RE = re.compile(r"[a-z][a-z0-9_]*\Z")

_var_table: dict[str, "Var"] = {}
_impl_table: "weakref.WeakValueDictionary[tuple[Formula, Formula], Impl]" = (
    weakref.WeakValueDictionary()
)


class Formula:
    __slots__ = ("size", "occ", "_text", "__weakref__")

    size: int
    # variable name -> number of occurrences
    occ: Mapping[str, int]

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(self.occ)

    @property
    def text(self) -> str:
        if self._text is None:
            self._text = _render(self)
        return self._text

    def __str__(self) -> str:
        return self.text

    def __reduce__(self):
        return (parse_formula, (self.text,))

    def __lt__(self, other: "Formula") -> bool:
        return (self.size, self.text) < (other.size, other.text)


class Var(Formula):
    __slots__ = ("name",)

    def __new__(cls, name: str) -> "Var":
        try:
            return _var_table[name]
        except KeyError:
            pass
        if not isinstance(name, str) or not VAR_RE.match(name):
            raise ValueError(f"invalid variable name {name!r}")
        self = object.__new__(cls)
        self.name = name
        self.size = 1
        self.occ = {name: 1}
        self._text = name
        _var_table[name] = self
        return self

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


class Impl(Formula):
    __slots__ = ("antecedent", "consequent")

    antecedent: Formula
    consequent: Formula

    def __new__(cls, antecedent: Formula, consequent: Formula) -> "Impl":
        key = (antecedent, consequent)
        self = _impl_table.get(key)
        if self is not None:
            return self
        if not isinstance(antecedent, Formula) or not isinstance(consequent, Formula):
            raise TypeError("Impl takes two formulas")
        self = object.__new__(cls)
        self.antecedent = antecedent
        self.consequent = consequent
        self.size = 1 + antecedent.size + consequent.size
        occ = dict(antecedent.occ)
        for v, n in consequent.occ.items():
            occ[v] = occ.get(v, 0) + n
        self.occ = occ
        self._text = None
        _impl_table[key] = self
        return self

    def __repr__(self) -> str:
        return f"Impl({self.antecedent!r}, {self.consequent!r})"


def _render(f: Formula) -> str:
    # iterative along the right spine so long chains do not recurse deeply
    parts = []
    while isinstance(f, Impl):
        a = f.antecedent
        parts.append(f"({a.text})" if isinstance(a, Impl) else a.text)
        f = f.consequent
    parts.append(f.text)
    return "->".join(parts)


def print_formula(f: Formula) -> str:
    """Canonical text: right-associative ``->`` with minimal parentheses."""
    return f.text


def formula_size(f: Formula) -> int:
    return f.size


def variables_of(f: Formula) -> frozenset[str]:
    return f.variables


# -- parsing ---------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(->)|([()])|([a-z][a-z0-9_]*)|(\S))")


class FormulaSyntaxError(ValueError):
    """Malformed formula text. ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int, text: str):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


def _tokens(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1):
            yield "ARROW", "->", m.start(1)
        elif m.group(2):
            yield m.group(2), m.group(2), m.start(2)
        elif m.group(3):
            yield "VAR", m.group(3), m.start(3)
        else:
            raise FormulaSyntaxError(
                f"unexpected character {m.group(4)!r}", m.start(4), text
            )
        pos = m.end()
    yield "EOF", "", len(text)


def parse_formula(text: str) -> Formula:
    """Parse ``formula := atom | atom "->" formula``; atoms are variables or
    parenthesised formulas."""
    toks = list(_tokens(text))
    pos = 0

    def expect_atom() -> Formula:
        nonlocal pos
        kind, val, at = toks[pos]
        if kind == "VAR":
            pos += 1
            return Var(val)
        if kind == "(":
            pos += 1
            inner = formula()
            kind, val, at = toks[pos]
            if kind != ")":
                raise FormulaSyntaxError("expected ')'", at, text)
            pos += 1
            return inner
        what = "end of input" if kind == "EOF" else repr(val)
        raise FormulaSyntaxError(f"expected variable or '(', got {what}", at, text)

    def formula() -> Formula:
        nonlocal pos
        spine = [expect_atom()]
        while toks[pos][0] == "ARROW":
            pos += 1
            spine.append(expect_atom())
        f = spine.pop()
        while spine:
            f = Impl(spine.pop(), f)
        return f

    result = formula()
    kind, val, at = toks[pos]
    if kind != "EOF":
        raise FormulaSyntaxError(f"unexpected {val!r}", at, text)
    return result


# -- towers ----------------------------------------------------------------


def impl_tower(g: Formula, i: int) -> Formula:
    """``g ->_i g``: ``(g->g)->g`` for i=1, then one more ``->g`` per level."""
    if i < 1:
        raise ValueError("tower height must be >= 1")
    f = Impl(Impl(g, g), g)
    for _ in range(i - 1):
        f = Impl(f, g)
    return f


def detect_tower(f: Formula) -> Optional[tuple[Formula, int]]:
    if not isinstance(f, Impl):
        return None
    g = f.consequent
    i = 0
    while isinstance(f, Impl) and f.consequent is g:
        if f.antecedent is g:
            return (g, i) if i >= 1 else None
        f = f.antecedent
        i += 1
    return None


# -- substitution ----------------------------------------------------------


def substitute(f: Formula, v: str, b: Formula) -> Formula:
    """Replace every occurrence of variable ``v`` in ``f`` by ``b``."""
    if v not in f.occ:
        return f
    return _subst(f, {v: b}, {})


def apply_substitution(f: Formula, s: Mapping[str, Formula]) -> Formula:
    """Simultaneous substitution; inserted formulas are not rewritten again."""
    if not s or f.occ.keys().isdisjoint(s):
        return f
    return _subst(f, s, {})


def _subst(f: Formula, s: Mapping[str, Formula], memo: dict) -> Formula:
    if isinstance(f, Var):
        return s.get(f.name, f)
    if f.occ.keys().isdisjoint(s):
        return f
    r = memo.get(f)
    if r is None:
        r = Impl(_subst(f.antecedent, s, memo), _subst(f.consequent, s, memo))
        memo[f] = r
    return r


def match_instance(pattern: Formula, target: Formula) -> Optional[dict[str, Formula]]:
    """One-way matching: the substitution mapping ``pattern`` onto ``target``
    with domain exactly the pattern's variables, or None."""
    s: dict[str, Formula] = {}
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = s.get(p.name)
            if bound is None:
                s[p.name] = t
            elif bound is not t:
                return None
        elif isinstance(t, Impl):
            if p.size > t.size:
                return None
            stack.append((p.consequent, t.consequent))
            stack.append((p.antecedent, t.antecedent))
        else:
            return None
    return s


def _walk(f: Formula, s: dict[str, Formula]) -> Formula:
    while isinstance(f, Var) and f.name in s:
        f = s[f.name]
    return f


def _occurs(v: str, f: Formula, s: dict[str, Formula]) -> bool:
    stack = [f]
    while stack:
        g = _walk(stack.pop(), s)
        if isinstance(g, Var):
            if g.name == v:
                return True
        else:
            stack.append(g.antecedent)
            stack.append(g.consequent)
    return False


def _resolve(f: Formula, s: dict[str, Formula], memo: dict) -> Formula:
    f = _walk(f, s)
    if isinstance(f, Var):
        return f
    r = memo.get(f)
    if r is None:
        r = Impl(_resolve(f.antecedent, s, memo), _resolve(f.consequent, s, memo))
        memo[f] = r
    return r


def unify(a: Formula, b: Formula) -> Optional[dict[str, Formula]]:
    """Most general syntactic unifier with occurs check, fully resolved
    (idempotent), or None."""
    s: dict[str, Formula] = {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = _walk(x, s)
        y = _walk(y, s)
        if x is y:
            continue
        if isinstance(x, Var):
            if _occurs(x.name, y, s):
                return None
            s[x.name] = y
        elif isinstance(y, Var):
            if _occurs(y.name, x, s):
                return None
            s[y.name] = x
        else:
            stack.append((x.consequent, y.consequent))
            stack.append((x.antecedent, y.antecedent))
    memo: dict = {}
    return {v: _resolve(t, s, memo) for v, t in s.items()}


def rename_apart(a: Formula, b: Formula) -> tuple[Formula, Formula]:
    """Variants of ``a`` and ``b`` over disjoint variables: ``v`` becomes
    ``v_1`` in ``a`` and ``v_2`` in ``b`` (suffix bumped past any clash)."""
    used = set(a.occ) | set(b.occ)

    def fresh(v: str, tag: int) -> str:
        k = tag
        while f"{v}_{k}" in used:
            k += 2
        name = f"{v}_{k}"
        used.add(name)
        return name

    ra = {v: Var(fresh(v, 1)) for v in sorted(a.occ)}
    rb = {v: Var(fresh(v, 2)) for v in sorted(b.occ)}
    return apply_substitution(a, ra), apply_substitution(b, rb)
