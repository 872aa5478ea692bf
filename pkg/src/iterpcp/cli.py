"""Command-line front end.

Exit status: 0 success, 1 negative answer within bounds, 2 usage or input
error. ``--json`` switches every command to a single JSON document on
stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .calculus import Calculus, Certificate, CertificateError, SaturationLimits, check_certificate, derive_goal
from .coding import code_word, decode_pair
from .formula import FormulaSyntaxError, parse_formula
from .pcp import PcpInstance, derives, load_instance, solve_pcp, verify_pcp_solution
from .reduction import (
    ExtractionError,
    build_calculus,
    build_solution_cert,
    classify,
    extract_solution,
)

DEFAULT_MAX_N = 12
DEFAULT_MAX_LEN = 40
DEFAULT_MAX_SIZE = 96
DEFAULT_MAX_FORMULAS = 20000


class UsageError(Exception):
    pass


class Outcome:
    def __init__(self, status: int, lines: Sequence[str], payload: dict):
        self.status = status
        self.lines = list(lines)
        self.payload = payload


def _instance(args) -> PcpInstance:
    path = getattr(args, "instance", None)
    if not path:
        raise UsageError("--instance FILE is required")
    try:
        return load_instance(path)
    except OSError as exc:
        raise UsageError(f"cannot read instance: {exc}") from None
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad instance file {path}: {exc}") from None


def _formula(text: str, what: str = "formula"):
    try:
        return parse_formula(text)
    except FormulaSyntaxError as exc:
        raise UsageError(f"{what}: {exc}") from None


def _pair(text: str) -> tuple[str, str]:
    if text.count(",") != 1:
        raise UsageError(f"pair must be written LEFT,RIGHT (got {text!r})")
    u, v = text.split(",")
    return u, v


def _word(w: str) -> str:
    return w if w else "ε"


def _certificate(path: str) -> Certificate:
    try:
        return Certificate.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read certificate: {exc}") from None
    except CertificateError as exc:
        raise UsageError(f"bad certificate {path}: {exc}") from None


# -- commands --------------------------------------------------------------


def cmd_parse(args) -> Outcome:
    f = _formula(args.formula)
    return Outcome(0, [f.text, f"size {f.size}"], {"formula": f.text, "size": f.size})


def cmd_encode(args) -> Outcome:
    inst = _instance(args)
    try:
        inst.alphabet.check_word(args.word)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    f = code_word(inst.alphabet, args.word)
    return Outcome(0, [f.text], {"word": args.word, "code": f.text, "size": f.size})


def cmd_build_calculus(args) -> Outcome:
    rc = build_calculus(_instance(args))
    axioms = [
        {"tag": rc.tag_label(k), "formula": ax.text}
        for k, ax in enumerate(rc.calculus.axioms)
    ]
    lines = [f"{a['tag']}\t{a['formula']}" for a in axioms]
    return Outcome(0, lines, {"axioms": axioms})


def cmd_pcp_solve(args) -> Outcome:
    inst = _instance(args)
    if args.max_n < 1 or args.max_len < 1:
        raise UsageError("bounds must be >= 1")
    res = solve_pcp(inst, args.max_n, args.max_len)
    payload = {
        "result": res.status,
        "bounds": {"max_n": args.max_n, "max_len": args.max_len},
        "levels": res.levels,
        "states": res.states,
    }
    if res.solution is None:
        msg = "unsolvable (frontier empty)" if res.status == "unsolvable" else "unknown within bounds"
        return Outcome(1, [msg], payload)
    sol = res.solution
    payload.update(
        N=len(sol.indices),
        indices=list(sol.indices),
        application_order=list(sol.application_order),
        word=sol.matched_word,
    )
    lines = [
        f"N={len(sol.indices)} indices {','.join(map(str, sol.indices))} word {sol.matched_word}",
        f"application order from (ε,ε): {','.join(map(str, sol.application_order))}",
    ]
    return Outcome(0, lines, payload)


def cmd_pcp_derives(args) -> Outcome:
    inst = _instance(args)
    start, end = _pair(args.start), _pair(args.end)
    chain = derives(inst, start, end)
    payload = {"from": list(start), "to": list(end), "derivable": chain is not None}
    label = f"({_word(start[0])},{_word(start[1])}) => ({_word(end[0])},{_word(end[1])})"
    if chain is None:
        return Outcome(1, [f"not derivable: {label}"], payload)
    payload["chain"] = chain
    shown = ",".join(map(str, chain)) or "(reflexive)"
    return Outcome(0, [f"derivable: {label}", f"application order: {shown}"], payload)


def cmd_derive(args) -> Outcome:
    rc = build_calculus(_instance(args))
    goal = _formula(args.goal, "goal")
    try:
        limits = SaturationLimits(args.max_size, args.max_formulas)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cert, run = derive_goal(rc.calculus, (), goal, limits)
    payload = {
        "goal": goal.text,
        "limits": {"max_size": limits.max_formula_size, "max_formulas": limits.max_formulas},
        "formulas": len(run),
        "processed": run.processed,
        "truncated": run.truncated,
        "found": cert is not None,
    }
    if cert is None:
        why = "formula limit reached" if run.truncated else "closure complete"
        return Outcome(1, [f"not found: {goal.text} ({len(run)} formulas, {why})"], payload)
    lines = [f"found {goal.text}: {len(cert)} steps"]
    if args.out:
        cert.save(args.out)
        payload["out"] = args.out
        lines.append(f"certificate written to {args.out}")
    payload["steps"] = len(cert)
    return Outcome(0, lines, payload)


def cmd_build_proof(args) -> Outcome:
    rc = build_calculus(_instance(args))
    try:
        indices = [int(t) for t in args.solution.split(",")]
    except ValueError:
        raise UsageError(f"solution must be comma-separated indices (got {args.solution!r})") from None
    try:
        cert = build_solution_cert(rc, indices)
    except (ValueError, IndexError) as exc:
        raise UsageError(str(exc)) from None
    payload = {"indices": indices, "steps": len(cert), "conclusion": cert.conclusion.text}
    lines = [f"conclusion {cert.conclusion.text}: {len(cert)} steps"]
    if args.out:
        cert.save(args.out)
        payload["out"] = args.out
        lines.append(f"certificate written to {args.out}")
    return Outcome(0, lines, payload)


def _load_axioms(path: str) -> Calculus:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read axioms: {exc}") from None
    texts = data.get("axioms") if isinstance(data, dict) else data
    if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
        raise UsageError("axioms file must be a JSON list of formulas or {\"axioms\": [...]}")
    try:
        return Calculus(tuple(_formula(t, "axiom") for t in texts))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_check(args) -> Outcome:
    if args.axioms and getattr(args, "instance", None):
        raise UsageError("give either --instance or --axioms, not both")
    calc = _load_axioms(args.axioms) if args.axioms else build_calculus(_instance(args)).calculus
    cert = _certificate(args.certificate)
    try:
        concl = check_certificate(calc, cert.hypotheses, cert)
    except CertificateError as exc:
        payload = {"valid": False, "error": str(exc), "step": exc.step_id}
        raise _Rejected(payload, f"invalid certificate: {exc}")
    payload = {"valid": True, "conclusion": concl.text, "steps": len(cert), "hypotheses": len(cert.hypotheses)}
    return Outcome(0, [concl.text], payload)


def cmd_classify(args) -> Outcome:
    rc = build_calculus(_instance(args))
    f = _formula(args.formula)
    pair = _pair(args.pair) if args.pair else None
    c = classify(rc, pair, f)
    payload = {
        "formula": f.text,
        "pair": list(pair) if pair else None,
        "first": c.first,
        "matches": [m.describe() for m in c.matches],
    }
    decoded = decode_pair(rc.alphabet, f)
    if decoded is not None:
        payload["decoded"] = list(decoded)
    return Outcome(1 if c.outside else 0, [c.describe()], payload)


def cmd_extract(args) -> Outcome:
    rc = build_calculus(_instance(args))
    cert = _certificate(args.certificate)
    try:
        sol = extract_solution(rc, cert)
    except ExtractionError as exc:
        raise _Rejected({"error": str(exc), "step": exc.step_id}, f"not a reduction certificate: {exc}")
    assert verify_pcp_solution(rc.instance, sol.indices) == sol.matched_word
    payload = {"indices": list(sol.indices), "word": sol.matched_word, "N": len(sol.indices)}
    return Outcome(0, [f"indices {','.join(map(str, sol.indices))} word {sol.matched_word}"], payload)


class _Rejected(Exception):
    """Input rejected with a structured diagnosis (status 2)."""

    def __init__(self, payload: dict, message: str):
        super().__init__(message)
        self.payload = payload


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit JSON")
    common.add_argument("--instance", metavar="FILE", default=argparse.SUPPRESS, help="PCP instance (JSON)")

    p = argparse.ArgumentParser(
        prog="iterpcp",
        description="PCP instances as iterative propositional calculi.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--json", action="store_true", help="emit JSON")
    p.add_argument("--instance", metavar="FILE", help="PCP instance (JSON)")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_,
                            formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        sp.set_defaults(func=func)
        return sp

    sp = add("parse", cmd_parse, "print a formula canonically with its size")
    sp.add_argument("formula")

    sp = add("encode", cmd_encode, "print the code of a word")
    sp.add_argument("word")

    add("build-calculus", cmd_build_calculus, "list the tagged axioms of the instance's calculus")

    sp = add("pcp-solve", cmd_pcp_solve, "bounded breadth-first PCP search")
    sp.add_argument("--max-n", type=int, default=DEFAULT_MAX_N, help="maximum number of indices")
    sp.add_argument("--max-len", type=int, default=DEFAULT_MAX_LEN, help="maximum unmatched overhang")

    sp = add("pcp-derives", cmd_pcp_derives, "decide whether one word pair derives another")
    sp.add_argument("--from", dest="start", required=True, metavar="U,V")
    sp.add_argument("--to", dest="end", required=True, metavar="U,V")

    sp = add("derive", cmd_derive, "search a derivation of a formula by saturation")
    sp.add_argument("--goal", default="x->x")
    sp.add_argument("--max-size", type=int, default=DEFAULT_MAX_SIZE, help="largest formula kept")
    sp.add_argument("--max-formulas", type=int, default=DEFAULT_MAX_FORMULAS, help="stop after this many formulas")
    sp.add_argument("--out", metavar="CERT")

    sp = add("build-proof", cmd_build_proof, "certificate of x->x from a PCP solution")
    sp.add_argument("--solution", required=True, metavar="I1,...,IN")
    sp.add_argument("--out", metavar="CERT")

    sp = add("check", cmd_check, "replay a certificate")
    sp.add_argument("--axioms", metavar="FILE", help="JSON list of axiom formulas")
    sp.add_argument("certificate")

    sp = add("classify", cmd_classify, "place a formula in the derivable-formula classes")
    sp.add_argument("--pair", metavar="U,V", help="hypothesis pair")
    sp.add_argument("formula")

    sp = add("extract", cmd_extract, "read a PCP solution off a certificate of x->x")
    sp.add_argument("certificate")
    return p


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, str]:
    """Run a command; returns (status, stdout text). Diagnostics for status 2
    go to the text as well when ``--json`` is set, else to stderr."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), ""
    as_json = getattr(args, "json", False)
    try:
        out = args.func(args)
    except UsageError as exc:
        return _fail(as_json, {"error": str(exc)}, f"error: {exc}")
    except _Rejected as exc:
        return _fail(as_json, exc.payload, f"error: {exc}")
    if as_json:
        body = {"command": args.command, "status": out.status, **out.payload}
        return out.status, json.dumps(body, sort_keys=True) + "\n"
    return out.status, "".join(line + "\n" for line in out.lines)


def _fail(as_json: bool, payload: dict, message: str) -> tuple[int, str]:
    if as_json:
        return 2, json.dumps({"status": 2, **payload}, sort_keys=True) + "\n"
    print(message, file=sys.stderr)
    return 2, ""


def main(argv: Optional[Sequence[str]] = None) -> int:
    status, text = run(argv)
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
