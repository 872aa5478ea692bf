"""Iterative propositional calculi over ``->``.

Rules:

* modus ponens: from ``A`` and ``A -> B`` infer ``B`` (exact match);
* superposition: from ``A`` and a derived ``B`` infer ``A`` with every
  occurrence of one variable replaced by ``B``;
* identification: from ``A`` infer ``A`` with one of its variables renamed
  to another variable already occurring in ``A``.

Identification is the variable-merging operation of superposition; without
it a bare variable can never be plugged in, since no bare variable is
derivable from the reduction axioms.
"""

from __future__ import annotations

import heapq
import json
from bisect import insort
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .formula import Formula, Impl, Var, FormulaSyntaxError, parse_formula, substitute

__all__ = [
    "Calculus",
    "Step",
    "Certificate",
    "CertificateError",
    "SaturationLimits",
    "SaturationResult",
    "apply_mp",
    "apply_sup",
    "apply_ident",
    "check_certificate",
    "saturate",
    "derive_goal",
    "DEFAULT_LIMITS",
]


def apply_mp(minor: Formula, major: Formula) -> Optional[Formula]:
    if isinstance(major, Impl) and major.antecedent is minor:
        return major.consequent
    return None


def apply_sup(target: Formula, var: str, arg: Formula) -> Formula:
    return substitute(target, var, arg)


def apply_ident(target: Formula, var: str, to: str) -> Optional[Formula]:
    """Rename ``var`` to ``to`` in ``target``; both must occur there."""
    if var == to or var not in target.occ or to not in target.occ:
        return None
    return substitute(target, var, Var(to))


@dataclass(frozen=True)
class Calculus:
    axioms: tuple[Formula, ...]

    def __post_init__(self):
        axioms = tuple(self.axioms)
        object.__setattr__(self, "axioms", axioms)
        if len(set(axioms)) != len(axioms):
            raise ValueError("duplicate axiom")

    @classmethod
    def from_texts(cls, texts: Iterable[str]) -> "Calculus":
        return cls(tuple(parse_formula(t) for t in texts))


@dataclass(frozen=True)
class Step:
    """One derivation step. ``formula`` is filled in by builders and by the
    checker; it is never read from certificate files."""

    id: int
    rule: str  # axiom | hyp | mp | sup | ident
    index: Optional[int] = None
    major: Optional[int] = None
    minor: Optional[int] = None
    target: Optional[int] = None
    var: Optional[str] = None
    arg: Optional[int] = None
    to: Optional[str] = None
    formula: Optional[Formula] = field(default=None, compare=False)

    def to_dict(self) -> dict:
        d: dict = {"id": self.id, "rule": self.rule}
        if self.rule in ("axiom", "hyp"):
            d["index"] = self.index
        elif self.rule == "mp":
            d["major"] = self.major
            d["minor"] = self.minor
        elif self.rule == "sup":
            d.update(target=self.target, var=self.var, arg=self.arg)
        elif self.rule == "ident":
            d.update(target=self.target, var=self.var, to=self.to)
        return d

    def refs(self) -> tuple[int, ...]:
        if self.rule == "mp":
            return (self.major, self.minor)
        if self.rule == "sup":
            return (self.target, self.arg)
        if self.rule == "ident":
            return (self.target,)
        return ()


_STEP_FIELDS = {
    "axiom": ("index",),
    "hyp": ("index",),
    "mp": ("major", "minor"),
    "sup": ("target", "var", "arg"),
    "ident": ("target", "var", "to"),
}


class CertificateError(ValueError):
    def __init__(self, message: str, step_id: Optional[int] = None):
        prefix = f"step {step_id}: " if step_id is not None else ""
        super().__init__(prefix + message)
        self.step_id = step_id


@dataclass(frozen=True)
class Certificate:
    steps: tuple[Step, ...]
    conclusion: Formula
    hypotheses: tuple[Formula, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def to_dict(self) -> dict:
        return {
            "hypotheses": [h.text for h in self.hypotheses],
            "steps": [s.to_dict() for s in self.steps],
            "conclusion": self.conclusion.text,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def from_dict(cls, data: dict) -> "Certificate":
        try:
            raw_steps = data["steps"]
            conclusion = parse_formula(data["conclusion"])
            hyps = tuple(parse_formula(h) for h in data.get("hypotheses", []))
        except (KeyError, TypeError) as exc:
            raise CertificateError(f"malformed certificate: {exc}") from None
        except FormulaSyntaxError as exc:
            raise CertificateError(f"bad formula: {exc}") from None
        steps = []
        for raw in raw_steps:
            sid = raw.get("id") if isinstance(raw, dict) else None
            if not isinstance(raw, dict) or raw.get("rule") not in _STEP_FIELDS:
                raise CertificateError("unknown or missing rule", sid)
            kw = {}
            for name in _STEP_FIELDS[raw["rule"]]:
                if name not in raw:
                    raise CertificateError(f"missing field {name!r}", sid)
                val = raw[name]
                want = str if name in ("var", "to") else int
                if not isinstance(val, want) or isinstance(val, bool):
                    raise CertificateError(f"field {name!r} has wrong type", sid)
                kw[name] = val
            if not isinstance(sid, int):
                raise CertificateError("step id must be an integer", sid)
            steps.append(Step(sid, raw["rule"], **kw))
        return cls(tuple(steps), conclusion, hyps)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateError(f"not JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> "Certificate":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def check_certificate(
    calc: Calculus,
    hypotheses: Sequence[Formula],
    cert: Certificate,
) -> Formula:
    """Replay ``cert``; return its conclusion or raise CertificateError.

    The certificate's own hypothesis list must equal ``hypotheses``.
    """
    if tuple(cert.hypotheses) != tuple(hypotheses):
        raise CertificateError("certificate hypotheses differ from the supplied ones")
    if not cert.steps:
        raise CertificateError("empty certificate")
    derived: list[Formula] = []
    for pos, st in enumerate(cert.steps):
        if st.id != pos:
            raise CertificateError(f"expected id {pos}, got {st.id}", st.id)

        def ref(i: int, what: str) -> Formula:
            if not 0 <= i < pos:
                raise CertificateError(f"forward or invalid reference {what}={i}", st.id)
            return derived[i]

        if st.rule == "axiom":
            if not 0 <= st.index < len(calc.axioms):
                raise CertificateError(f"bad axiom index {st.index}", st.id)
            f = calc.axioms[st.index]
        elif st.rule == "hyp":
            if not 0 <= st.index < len(hypotheses):
                raise CertificateError(f"bad hypothesis index {st.index}", st.id)
            f = hypotheses[st.index]
        elif st.rule == "mp":
            major = ref(st.major, "major")
            minor = ref(st.minor, "minor")
            f = apply_mp(minor, major)
            if f is None:
                raise CertificateError(
                    f"MP antecedent mismatch: major {major.text} does not start "
                    f"with minor {minor.text}",
                    st.id,
                )
        elif st.rule == "sup":
            target = ref(st.target, "target")
            arg = ref(st.arg, "arg")
            f = apply_sup(target, st.var, arg)
        elif st.rule == "ident":
            target = ref(st.target, "target")
            f = apply_ident(target, st.var, st.to)
            if f is None:
                raise CertificateError(
                    f"identification needs distinct variables {st.var!r} and "
                    f"{st.to!r} both occurring in {target.text}",
                    st.id,
                )
        else:
            raise CertificateError(f"unknown rule {st.rule!r}", st.id)
        if st.formula is not None and st.formula is not f:
            kind = "Sup result" if st.rule == "sup" else "step formula"
            raise CertificateError(
                f"{kind} mismatch: recorded {st.formula.text}, replay gives {f.text}",
                st.id,
            )
        derived.append(f)
    if derived[-1] is not cert.conclusion:
        raise CertificateError(
            f"conclusion mismatch: last step gives {derived[-1].text}, "
            f"certificate states {cert.conclusion.text}"
        )
    return cert.conclusion


@dataclass(frozen=True)
class SaturationLimits:
    max_formula_size: int = 96
    max_formulas: int = 20000

    def __post_init__(self):
        if self.max_formula_size < 1 or self.max_formulas < 1:
            raise ValueError("limits must be >= 1")


DEFAULT_LIMITS = SaturationLimits()


@dataclass
class SaturationResult:
    """Formulas in discovery order with the rule application that produced
    each. ``provenance[i]`` is ``("axiom", k)``, ``("hyp", k)``,
    ``("mp", major, minor)``, ``("sup", target, var, arg)`` or
    ``("ident", target, var, to)``, with formula positions as references."""

    calculus: Calculus
    hypotheses: tuple[Formula, ...]
    limits: SaturationLimits
    formulas: list[Formula]
    provenance: list[tuple]
    truncated: bool
    processed: int
    stopped: bool = False
    index: dict[Formula, int] = field(repr=False, default_factory=dict)

    def __contains__(self, f: Formula) -> bool:
        return f in self.index

    def __len__(self) -> int:
        return len(self.formulas)

    @property
    def closed(self) -> bool:
        """True when the bounded closure was computed completely."""
        return not (self.truncated or self.stopped)

    def sorted_formulas(self) -> list[Formula]:
        return sorted(self.formulas, key=lambda f: (f.size, f.text))

    def certificate(self, f: Formula) -> Certificate:
        """Certificate for a retained formula, restricted to its ancestors."""
        root = self.index[f]
        needed = set()
        stack = [root]
        while stack:
            i = stack.pop()
            if i in needed:
                continue
            needed.add(i)
            prov = self.provenance[i]
            if prov[0] == "mp":
                stack.extend(prov[1:3])
            elif prov[0] == "sup":
                stack.extend((prov[1], prov[3]))
            elif prov[0] == "ident":
                stack.append(prov[1])
        renum = {}
        steps = []
        for i in sorted(needed):
            prov = self.provenance[i]
            sid = len(steps)
            renum[i] = sid
            kind = prov[0]
            if kind in ("axiom", "hyp"):
                st = Step(sid, kind, index=prov[1])
            elif kind == "mp":
                st = Step(sid, "mp", major=renum[prov[1]], minor=renum[prov[2]])
            elif kind == "sup":
                st = Step(sid, "sup", target=renum[prov[1]], var=prov[2], arg=renum[prov[3]])
            else:
                st = Step(sid, "ident", target=renum[prov[1]], var=prov[2], to=prov[3])
            steps.append(replace(st, formula=self.formulas[i]))
        return Certificate(tuple(steps), f, self.hypotheses)

    def dump(self) -> str:
        """Deterministic text serialisation, one formula per line."""
        return "".join(f"{i}\t{f.text}\t{self.provenance[i]}\n" for i, f in enumerate(self.formulas))


class _Full(Exception):
    pass


def saturate(
    calc: Calculus,
    hypotheses: Sequence[Formula] = (),
    limits: SaturationLimits = DEFAULT_LIMITS,
    *,
    stop_at: Optional[Formula] = None,
) -> SaturationResult:
    """Bounded closure under modus ponens, superposition and identification.

    Given-formula loop: unprocessed formulas are taken in (size, text) order;
    each is combined with itself and every processed formula under all three
    rules. Conclusions larger than ``max_formula_size`` are dropped. The run
    ends when nothing new appears (``truncated`` False) or when
    ``max_formulas`` distinct formulas are known (``truncated`` True).
    ``stop_at`` ends the run as soon as that formula is found; this only cuts
    the run short, it never changes what is found before it.
    """
    hypotheses = tuple(hypotheses)
    cap = limits.max_formula_size
    formulas: list[Formula] = []
    provenance: list[tuple] = []
    index: dict[Formula, int] = {}
    queue: list[tuple[int, str, int]] = []
    state = {"found": False}

    def add(f: Formula, prov: tuple) -> None:
        if f.size > cap or f in index:
            return
        i = len(formulas)
        index[f] = i
        formulas.append(f)
        provenance.append(prov)
        heapq.heappush(queue, (f.size, f.text, i))
        if stop_at is not None and f is stop_at:
            state["found"] = True
            raise _Full
        if len(formulas) >= limits.max_formulas:
            raise _Full

    # processed formulas, sorted by size, for size-bounded scans
    active: list[tuple[int, int]] = []
    active_set: set[Formula] = set()
    by_antecedent: dict[Formula, list[int]] = {}
    processed = 0
    truncated = False
    try:
        for k, ax in enumerate(calc.axioms):
            add(ax, ("axiom", k))
        for k, h in enumerate(hypotheses):
            add(h, ("hyp", k))
        while queue:
            _, _, gi = heapq.heappop(queue)
            g = formulas[gi]
            processed += 1
            # modus ponens, g as minor and as major
            for mi in by_antecedent.get(g, ()):
                add(formulas[mi].consequent, ("mp", mi, gi))
            if isinstance(g, Impl) and g.antecedent in active_set:
                add(g.consequent, ("mp", gi, index[g.antecedent]))
            insort(active, (g.size, gi))
            active_set.add(g)
            if isinstance(g, Impl):
                by_antecedent.setdefault(g.antecedent, []).append(gi)
            gvars = sorted(g.occ)
            # identification on g
            for v in gvars:
                for w in gvars:
                    if v != w:
                        add(substitute(g, v, Var(w)), ("ident", gi, v, w))
            # superposition with g as target
            for v in gvars:
                n = g.occ[v]
                budget = cap - g.size
                for size, ai in active:
                    if n * (size - 1) > budget:
                        break
                    add(substitute(g, v, formulas[ai]), ("sup", gi, v, ai))
            # superposition with g as argument
            grow = g.size - 1
            for size, ti in active:
                if size + grow > cap:
                    break
                if ti == gi:
                    continue
                t = formulas[ti]
                for v in sorted(t.occ):
                    if size + t.occ[v] * grow <= cap:
                        add(substitute(t, v, g), ("sup", ti, v, gi))
    except _Full:
        truncated = len(formulas) >= limits.max_formulas and not state["found"]
    return SaturationResult(
        calculus=calc,
        hypotheses=hypotheses,
        limits=limits,
        formulas=formulas,
        provenance=provenance,
        truncated=truncated,
        processed=processed,
        stopped=state["found"],
        index=index,
    )


def derive_goal(
    calc: Calculus,
    hypotheses: Sequence[Formula],
    goal: Formula,
    limits: SaturationLimits = DEFAULT_LIMITS,
) -> tuple[Optional[Certificate], SaturationResult]:
    """Search for ``goal`` by saturation; returns (certificate or None, run)."""
    run = saturate(calc, hypotheses, limits, stop_at=goal)
    if goal in run:
        return run.certificate(goal), run
    return None, run
