"""Letter and word codes.

A letter ``a_i`` (1-based position in the alphabet) is coded as
``x -> ((p ->_i p) -> (p -> p))``; a word is the composition of its letter
codes at ``x``, and the empty word is ``x`` itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .formula import Formula, Impl, Var, detect_tower, impl_tower, substitute

X = Var("x")
Y = Var("y")
P = Var("p")

Word = str


@dataclass(frozen=True)
class Alphabet:
    letters: tuple[str, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if len(letters) < 2:
            raise ValueError("an alphabet needs at least two letters")
        if len(set(letters)) != len(letters):
            raise ValueError("alphabet letters must be distinct")
        for a in letters:
            if not isinstance(a, str) or len(a) != 1 or a.isspace() or a == ",":
                raise ValueError(f"letter must be a single printable symbol: {a!r}")

    def __len__(self) -> int:
        return len(self.letters)

    def index(self, letter: str) -> int:
        """1-based index of ``letter``."""
        try:
            return self.letters.index(letter) + 1
        except ValueError:
            raise ValueError(f"letter {letter!r} is not in the alphabet") from None

    def check_word(self, w: Word) -> Word:
        for c in w:
            self.index(c)
        return w

    @classmethod
    def of(cls, letters: Iterable[str]) -> "Alphabet":
        return cls(tuple(letters))


def letter_tag(i: int) -> Formula:
    """``(p ->_i p) -> (p -> p)``, the part of a letter code after ``x``."""
    return Impl(impl_tower(P, i), Impl(P, P))


def code_letter(alphabet: Alphabet, letter: str) -> Formula:
    return Impl(X, letter_tag(alphabet.index(letter)))


def code_word(alphabet: Alphabet, w: Word) -> Formula:
    # code(a_1...a_n) = (...((x -> t_n) -> t_(n-1)) ...) -> t_1
    f: Formula = X
    for c in reversed(w):
        f = Impl(f, letter_tag(alphabet.index(c)))
    return f


def code_word_via_substitution(alphabet: Alphabet, w: Word) -> Formula:
    """Code built literally by the inductive definition: ``code(v b) =
    code(v)[code(b)]``. Kept as an independent route for tests."""
    if not w:
        return X
    f = code_letter(alphabet, w[0])
    for c in w[1:]:
        f = substitute(f, "x", code_letter(alphabet, c))
    return f


def _tag_index(f: Formula) -> Optional[int]:
    if not (isinstance(f, Impl) and isinstance(f.consequent, Impl)):
        return None
    if f.consequent.antecedent is not P or f.consequent.consequent is not P:
        return None
    t = detect_tower(f.antecedent)
    if t is None or t[0] is not P:
        return None
    return t[1]


def decode_code(alphabet: Alphabet, f: Formula) -> Optional[Word]:
    """The word whose code is exactly ``f``, or None."""
    out = []
    m = len(alphabet)
    while isinstance(f, Impl):
        i = _tag_index(f.consequent)
        if i is None or i > m:
            return None
        out.append(alphabet.letters[i - 1])
        f = f.antecedent
    if f is not X:
        return None
    return "".join(out)


def decode_pair(alphabet: Alphabet, f: Formula) -> Optional[tuple[Word, Word]]:
    """Decode ``code(u) -> code(v)`` into ``(u, v)``."""
    if not isinstance(f, Impl):
        return None
    u = decode_code(alphabet, f.antecedent)
    if u is None:
        return None
    v = decode_code(alphabet, f.consequent)
    if v is None:
        return None
    return u, v


def code_pair(alphabet: Alphabet, u: Word, v: Word) -> Formula:
    return Impl(code_word(alphabet, u), code_word(alphabet, v))


def words_up_to(alphabet: Alphabet | Sequence[str], n: int, *, empty: bool = True):
    """All words of length <= n in length-lexicographic order."""
    letters = alphabet.letters if isinstance(alphabet, Alphabet) else tuple(alphabet)
    level = [""]
    if empty:
        yield ""
    for _ in range(n):
        level = [w + c for w in level for c in letters]
        yield from level
