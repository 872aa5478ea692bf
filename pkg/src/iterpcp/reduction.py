"""From a PCP instance to a calculus whose theorem ``x -> x`` witnesses a
solution, and back.

Axioms, for letters ``a_i`` and pairs ``(alpha_j, beta_j)``::

    A1_i   code(a_i)[x]
    A2_j   (code(alpha_j)[x] -> code(beta_j)[y]) -> (x -> y)
    A3_i   code(a_i)[x] -> code(a_i)[x]
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .calculus import Calculus, Certificate, CertificateError, Step, check_certificate
from .coding import X, Y, Alphabet, Word, code_letter, code_pair, code_word, decode_pair
from .formula import Formula, Impl, Var, detect_tower, match_instance, rename_apart, substitute, unify
from .pcp import (
    EMPTY,
    PcpInstance,
    PcpSolution,
    derives,
    predecessor_set,
    verify_pcp_solution,
)

__all__ = [
    "ReductionCalculus",
    "Classification",
    "Match",
    "ExtractionError",
    "build_calculus",
    "goal_formula",
    "build_word_code_cert",
    "build_chain_cert",
    "build_solution_cert",
    "classify",
    "extract_solution",
    "letter_code_unifiers",
    "pair_patterns",
]

AxiomTag = tuple[str, int]  # ("A1", i) | ("A2", j) | ("A3", i), 1-based


@dataclass(frozen=True)
class ReductionCalculus:
    instance: PcpInstance
    calculus: Calculus
    tags: tuple[AxiomTag, ...]

    @property
    def alphabet(self) -> Alphabet:
        return self.instance.alphabet

    def axiom_index(self, tag: AxiomTag) -> int:
        return self.tags.index(tag)

    def tag_label(self, k: int) -> str:
        group, n = self.tags[k]
        return f"{group}:{n}"


def code_in(alphabet: Alphabet, w: Word, var: Var) -> Formula:
    """``code(w)`` with its parameter ``x`` renamed to ``var``."""
    return substitute(code_word(alphabet, w), "x", var)


def build_calculus(inst: PcpInstance) -> ReductionCalculus:
    alpha = inst.alphabet
    axioms: list[Formula] = []
    tags: list[AxiomTag] = []
    for i, a in enumerate(alpha.letters, 1):
        axioms.append(code_letter(alpha, a))
        tags.append(("A1", i))
    for j, (a, b) in enumerate(inst.pairs, 1):
        axioms.append(Impl(Impl(code_word(alpha, a), code_in(alpha, b, Y)), Impl(X, Y)))
        tags.append(("A2", j))
    for i, a in enumerate(alpha.letters, 1):
        c = code_letter(alpha, a)
        axioms.append(Impl(c, c))
        tags.append(("A3", i))
    return ReductionCalculus(inst, Calculus(tuple(axioms)), tuple(tags))


def goal_formula() -> Formula:
    return Impl(X, X)


class _Builder:
    """Accumulates certificate steps, computing each step's formula."""

    def __init__(self, rc: ReductionCalculus, hypotheses: Sequence[Formula] = ()):
        self.rc = rc
        self.hypotheses = tuple(hypotheses)
        self.steps: list[Step] = []

    def _push(self, f: Formula, rule: str, **kw) -> int:
        sid = len(self.steps)
        self.steps.append(Step(sid, rule, formula=f, **kw))
        return sid

    def formula(self, sid: int) -> Formula:
        return self.steps[sid].formula

    def axiom(self, tag: AxiomTag) -> int:
        k = self.rc.axiom_index(tag)
        return self._push(self.rc.calculus.axioms[k], "axiom", index=k)

    def hyp(self, k: int) -> int:
        return self._push(self.hypotheses[k], "hyp", index=k)

    def mp(self, major: int, minor: int) -> int:
        f = self.formula(major)
        assert isinstance(f, Impl) and f.antecedent is self.formula(minor)
        return self._push(f.consequent, "mp", major=major, minor=minor)

    def sup(self, target: int, var: str, arg: int) -> int:
        f = substitute(self.formula(target), var, self.formula(arg))
        return self._push(f, "sup", target=target, var=var, arg=arg)

    def ident(self, target: int, var: str, to: str) -> int:
        f = substitute(self.formula(target), var, Var(to))
        return self._push(f, "ident", target=target, var=var, to=to)

    def word_code(self, w: Word) -> int:
        """One A1 step per letter, composed left to right by Sup."""
        alpha = self.rc.alphabet
        cur = self.axiom(("A1", alpha.index(w[0])))
        for c in w[1:]:
            nxt = self.axiom(("A1", alpha.index(c)))
            cur = self.sup(cur, "x", nxt)
        return cur

    def link(self, j: int, xi: Word, zeta: Word, minor: int) -> int:
        """From the step proving code(alpha_j xi) -> code(beta_j zeta), derive
        code(xi) -> code(zeta). x is instantiated before y: code(xi) holds no
        y, whereas code(zeta) holds x."""
        cur = self.axiom(("A2", j))
        if xi:
            cur = self.sup(cur, "x", self.word_code(xi))
        if zeta:
            cur = self.sup(cur, "y", self.word_code(zeta))
        else:
            cur = self.ident(cur, "y", "x")
        return self.mp(cur, minor)

    def chain_down(self, end: tuple[Word, Word], chain: Sequence[int], top: int) -> int:
        """``top`` proves code(end); walk ``chain`` (application order)
        backwards, ending at a proof of the chain's start pair."""
        u, v = end
        cur = top
        for j in reversed(chain):
            a, b = self.rc.instance.pair(j)
            if not (u.startswith(a) and v.startswith(b)):
                raise ValueError(f"chain index {j} does not apply to ({u!r}, {v!r})")
            u, v = u[len(a):], v[len(b):]
            cur = self.link(j, u, v, cur)
        return cur

    def certificate(self) -> Certificate:
        return Certificate(tuple(self.steps), self.steps[-1].formula, self.hypotheses)


def build_word_code_cert(rc: ReductionCalculus, w: Word) -> Certificate:
    if not w:
        raise ValueError("the empty word's code is a bare variable and is not derivable")
    rc.alphabet.check_word(w)
    b = _Builder(rc)
    b.word_code(w)
    return b.certificate()


def build_chain_cert(
    rc: ReductionCalculus,
    start: tuple[Word, Word],
    end: tuple[Word, Word],
    chain: Optional[Sequence[int]] = None,
) -> Certificate:
    """Certificate of code(start) from hypothesis code(end).

    ``chain`` is the application-order index list from ``derives``; it is
    computed when omitted.
    """
    start, end = tuple(start), tuple(end)
    if chain is None:
        chain = derives(rc.instance, start, end)
        if chain is None:
            raise ValueError(f"{start} does not derive {end}")
    else:
        reached = _replay_chain(rc.instance, start, chain)
        if reached != end:
            raise ValueError(f"chain {list(chain)} takes {start} to {reached}, not {end}")
    alpha = rc.alphabet
    b = _Builder(rc, (code_pair(alpha, *end),))
    b.chain_down(end, chain, b.hyp(0))
    return b.certificate()


def build_solution_cert(rc: ReductionCalculus, sol: PcpSolution | Sequence[int]) -> Certificate:
    """Hypothesis-free certificate of ``x -> x`` from a PCP solution."""
    indices = tuple(sol.indices if isinstance(sol, PcpSolution) else sol)
    if not indices or not all(1 <= j <= rc.instance.size for j in indices):
        raise ValueError(f"indices must lie in 1..{rc.instance.size}")
    gamma = verify_pcp_solution(rc.instance, indices)
    if gamma is None:
        top = "".join(rc.instance.pair(j)[0] for j in indices)
        bottom = "".join(rc.instance.pair(j)[1] for j in indices)
        raise ValueError(f"not a solution: {top!r} != {bottom!r}")
    b = _Builder(rc)
    anchor = b.axiom(("A3", rc.alphabet.index(gamma[0])))
    if len(gamma) > 1:
        anchor = b.sup(anchor, "x", b.word_code(gamma[1:]))
    b.chain_down((gamma, gamma), tuple(reversed(indices)), anchor)
    cert = b.certificate()
    assert cert.conclusion is goal_formula()
    return cert


def _replay_chain(inst: PcpInstance, start, chain: Sequence[int]):
    u, v = start
    for j in chain:
        a, b = inst.pair(j)
        u, v = a + u, b + v
    return (u, v)


# -- classification --------------------------------------------------------


@dataclass(frozen=True)
class Match:
    kind: str  # BareVariable | AxiomInstance | PairCode | TowerInstance
    detail: object = None
    witness: Optional[dict] = field(default=None, compare=False)

    def describe(self) -> str:
        if self.kind == "AxiomInstance":
            return f"AxiomInstance({self.detail})"
        if self.kind == "PairCode":
            u, v = self.detail
            return f"PairCode(({u or 'ε'},{v or 'ε'}))"
        if self.kind == "TowerInstance":
            g, i = self.detail
            return f"TowerInstance({g.text}, {i})"
        return self.kind


@dataclass(frozen=True)
class Classification:
    formula: Formula
    matches: tuple[Match, ...]

    @property
    def first(self) -> str:
        return self.matches[0].kind if self.matches else "Outside"

    @property
    def outside(self) -> bool:
        return not self.matches

    def describe(self) -> str:
        if not self.matches:
            return "Outside"
        return ", ".join(m.describe() for m in self.matches)


def classify(
    rc: ReductionCalculus,
    hyp_pair: Optional[tuple[Word, Word]],
    f: Formula,
    *,
    _pair_patterns: Optional[list] = None,
) -> Classification:
    """Membership in: variables, axiom instances, instances of the codes of
    pairs deriving ``hyp_pair``, and instances of ``(g ->_i g) -> (g -> g)``.
    All matching classes are reported, in that order."""
    found: list[Match] = []
    if isinstance(f, Var):
        found.append(Match("BareVariable"))
    for k, ax in enumerate(rc.calculus.axioms):
        s = match_instance(ax, f)
        if s is not None:
            found.append(Match("AxiomInstance", rc.tag_label(k), s))
    if hyp_pair is not None:
        patterns = _pair_patterns if _pair_patterns is not None else pair_patterns(rc, hyp_pair)
        for pair, pat in patterns:
            s = match_instance(pat, f)
            if s is not None:
                found.append(Match("PairCode", pair, s))
    if isinstance(f, Impl) and isinstance(f.consequent, Impl):
        g = f.consequent.antecedent
        if f.consequent.consequent is g:
            t = detect_tower(f.antecedent)
            if t is not None and t[0] is g:
                found.append(Match("TowerInstance", t))
    return Classification(f, tuple(found))


def pair_patterns(rc: ReductionCalculus, hyp_pair: tuple[Word, Word]) -> list:
    """Sorted (pair, code(pair)) for every pair deriving ``hyp_pair``."""
    preds = sorted(predecessor_set(rc.instance, tuple(hyp_pair)), key=lambda p: (len(p[0]) + len(p[1]), p))
    return [(p, code_pair(rc.alphabet, *p)) for p in preds]


# -- extraction ------------------------------------------------------------


class ExtractionError(CertificateError):
    pass


def extract_solution(rc: ReductionCalculus, cert: Certificate) -> PcpSolution:
    """Read a PCP solution off a hypothesis-free certificate of ``x -> x``.

    From the conclusion, follow modus ponens steps through their minor
    premise while the major premise is a specialisation of some A2_j; the
    collected j are the elementary steps from (e, e). The step reached last
    must prove code(w) -> code(w).
    """
    if cert.hypotheses:
        raise ExtractionError("certificate must not use hypotheses")
    if cert.conclusion is not goal_formula():
        raise ExtractionError(f"conclusion is {cert.conclusion.text}, expected x->x")
    try:
        check_certificate(rc.calculus, (), cert)
    except CertificateError as exc:
        raise ExtractionError(f"certificate does not check against this calculus: {exc}", exc.step_id) from None
    formulas = _replay_formulas(rc, cert)
    root: list[Optional[int]] = []
    for st in cert.steps:
        if st.rule == "axiom":
            root.append(st.index)
        elif st.rule in ("sup", "ident"):
            root.append(root[st.target])
        else:
            root.append(None)

    alpha = rc.alphabet
    applied = []
    cur = len(cert.steps) - 1
    while True:
        st = cert.steps[cur]
        if st.rule != "mp":
            break
        k = root[st.major]
        if k is None or rc.tags[k][0] != "A2":
            break
        applied.append(rc.tags[k][1])
        cur = st.minor
        if decode_pair(alpha, formulas[cur]) is None:
            raise ExtractionError(
                f"minor premise {formulas[cur].text} is not a code pair", cur
            )
    anchor = decode_pair(alpha, formulas[cur])
    if not applied:
        raise ExtractionError("final step is not modus ponens on an A2 instance", cur)
    if anchor is None or anchor[0] != anchor[1] or not anchor[0]:
        raise ExtractionError(
            f"anchor {formulas[cur].text} is not code(w) -> code(w) for a nonempty w", cur
        )
    if _replay_chain(rc.instance, EMPTY, applied) != anchor:
        raise ExtractionError(f"index chain {applied} does not reach the anchor pair", cur)
    indices = tuple(reversed(applied))
    word = verify_pcp_solution(rc.instance, indices)
    if word is None:
        raise ExtractionError(f"extracted indices {indices} are not a solution", cur)
    return PcpSolution(indices, word)


def _replay_formulas(rc: ReductionCalculus, cert: Certificate) -> list[Formula]:
    out: list[Formula] = []
    for st in cert.steps:
        if st.rule == "axiom":
            out.append(rc.calculus.axioms[st.index])
        elif st.rule == "hyp":
            out.append(cert.hypotheses[st.index])
        elif st.rule == "mp":
            out.append(out[st.major].consequent)
        elif st.rule == "sup":
            out.append(substitute(out[st.target], st.var, out[st.arg]))
        else:
            out.append(substitute(out[st.target], st.var, Var(st.to)))
    return out


# -- letter-code compatibility --------------------------------------------


def letter_code_unifiers(alphabet: Alphabet) -> list[tuple[str, str, Optional[dict]]]:
    """For every letter pair (a, b), the unifier of code(a) with
    ``y -> code(b)`` after renaming apart (None when incompatible)."""
    out = []
    for a in alphabet.letters:
        for b in alphabet.letters:
            l, r = rename_apart(code_letter(alphabet, a), Impl(Y, code_letter(alphabet, b)))
            out.append((a, b, unify(l, r)))
    return out
