"""Command-line front end.

Exit codes: 0 equivalent or success, 1 inequivalent or a failed law,
2 unknown, 3 usage or parse error.  ``--json`` prints one JSON document with
the keys ``command``, ``inputs``, ``verdict``, ``witness`` (when there is one),
``result`` (listings) and ``stats``; wall time is left out of it so identical
invocations print identical bytes.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional, Sequence, TextIO

from . import semantics as S
from . import weak as W
from .equivalence import (
    IMPLICATIONS,
    STRUCT,
    CheckConfig,
    EquivKind,
    Action,
    Verdict,
    Witness,
    WitnessStep,
    check,
    lattice_violations,
    matching_names,
    relate,
)
from .laws import laws_suite
from .nominal import name_key
from .parser import ParseError, parse_agent, parse_defs, print_agent, print_residual
from .structural import struct_normal_form
from .weak import ExploreLimits, LimitExceeded, Session

SCHEMA_VERSION = 1

EXIT_OK, EXIT_INEQUIVALENT, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _names(text: Optional[str]) -> frozenset:
    if not text:
        return frozenset()
    out = frozenset(n.strip() for n in text.split(",") if n.strip())
    for n in out:
        try:
            parse_agent(f"{n}!{n}.0")
        except ParseError:
            raise UsageError(f"not a name: {n!r}") from None
    return out


def _common(defaults: bool) -> argparse.ArgumentParser:
    # global flags are accepted before and after the subcommand; the
    # subcommand copy must not reset values given before it
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=d(False), help="print a JSON document instead of text")
    common.add_argument("--defs", metavar="FILE", default=d(None), help="definitions file with NAME = agent; lines")
    common.add_argument("--max-states", type=int, default=d(10000), metavar="N")
    common.add_argument("--extra-inputs", default=d(""), metavar="a,b", help="extra names for input instantiation")
    common.add_argument("--seed", type=int, default=d(1))
    return common


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="picalc", description="pi-calculus workbench", parents=[_common(True)])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common(False)

    p = sub.add_parser("parse", parents=[common], help="parse and pretty-print an agent")
    p.add_argument("agent")

    p = sub.add_parser("transitions", parents=[common], help="list the transitions of an agent")
    p.add_argument("agent")
    p.add_argument("--system", choices=("late", "early", "weak-late", "weak-early"), default="late")
    p.add_argument("--avoid", default="", metavar="a,b")
    p.add_argument("--inputs", default="", metavar="a,b")

    p = sub.add_parser("check", parents=[common], help="decide an equivalence")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--kind", choices=[k.value for k in EquivKind], default="strong-late")
    p.add_argument("--up-to-struct", action="store_true", help="bisimulation up to structural congruence")

    p = sub.add_parser("norm", parents=[common], help="structural normal form")
    p.add_argument("agent")

    p = sub.add_parser("relate", parents=[common], help="every equivalence at once")
    p.add_argument("left")
    p.add_argument("right")

    p = sub.add_parser("laws", parents=[common], help="run the law suite on random agents")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--size", type=int, default=5)
    return ap


# ---------------------------------------------------------------------------
# rendering


def action_json(step) -> dict:
    a = step.action
    d = {"kind": a.kind}
    for k in ("chan", "msg", "bind"):
        v = getattr(a, k)
        if v is not None:
            d[k] = v
    if step.received is not None:
        d["received"] = step.received
    return d


def witness_json(w: Witness) -> dict:
    return {
        "sigma": [[old, new] for old, new in w.sigma] if w.sigma else None,
        "steps": [{"side": s.side, "action": action_json(s)} for s in w.steps],
        "left": print_agent(w.left),
        "right": print_agent(w.right),
    }


def witness_from_json(d: dict) -> Witness:
    """Inverse of ``witness_json``; agents come back through the parser."""
    steps = []
    for s in d["steps"]:
        a = dict(s["action"])
        received = a.pop("received", None)
        steps.append(WitnessStep(s["side"], Action(**a), received))
    sigma = tuple(tuple(p) for p in d["sigma"]) if d.get("sigma") else None
    return Witness(tuple(steps), parse_agent(d["left"]), parse_agent(d["right"]), sigma)


def verdict_from_json(doc: dict) -> Verdict:
    v = doc["verdict"]
    w = witness_from_json(doc["witness"]) if doc.get("witness") else None
    return Verdict(v["status"], w, v.get("reason"), dict(doc.get("stats", {})))


def verdict_json(v: Verdict) -> dict:
    d = {"status": v.status}
    if v.reason:
        d["reason"] = v.reason
    return d


def _stats(stats: dict) -> dict:
    return {k: v for k, v in sorted(stats.items()) if k != "wall_time"}


def _exit_for(v: Verdict) -> int:
    return {"Equivalent": EXIT_OK, "Inequivalent": EXIT_INEQUIVALENT}.get(v.status, EXIT_UNKNOWN)


# ---------------------------------------------------------------------------
# commands


def _transitions(args, p, cfg) -> tuple:
    avoid, inputs = _names(args.avoid), _names(args.inputs)
    lim = cfg.limits
    if args.system == "late":
        lines = [print_residual(r) for r in S.late_transitions(p, avoid)]
    elif args.system == "early":
        lines = [print_residual(r) for r in S.early_transitions(p, avoid, inputs)]
    elif args.system == "weak-late":
        s = Session(lim)
        received = sorted(S.early_input_names(p, inputs, avoid), key=name_key)
        lines = []
        for w in W.weak_late_transitions(p, avoid, session=s):
            lines.append(print_residual(w))
            if isinstance(w, W.WInput):
                for u in received:
                    for t in sorted(s.input_tail(w.mid, w.bind, u), key=print_agent):
                        lines.append("  " + print_residual(W.WeakInputStep(u, w.chan, w.bind, w.mid, t)))
    else:
        lines = [print_residual(r) for r in W.weak_early_transitions(p, avoid, inputs, lim)]
    return lines, {"avoid": sorted(avoid), "inputs": sorted(inputs), "system": args.system}


def run(argv: Optional[Sequence[str]] = None, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    t0 = time.perf_counter()
    src = None
    try:
        defs = {}
        if args.defs:
            with open(args.defs, encoding="utf-8") as fh:
                src = fh.read()
            defs = parse_defs(src)
        if args.max_states <= 0:
            raise UsageError("--max-states must be positive")
        cfg = CheckConfig(ExploreLimits(max_states=args.max_states), _names(args.extra_inputs))
        doc, code, text = _dispatch(args, defs, cfg, lambda s: _parse(s, defs))
    except _BadAgent as e:
        print(f"parse error: {e.error.render(e.src)}", file=err)
        return EXIT_USAGE
    except ParseError as e:
        print(f"parse error in {args.defs}: {e.render(src)}", file=err)
        return EXIT_USAGE
    except (UsageError, OSError) as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except LimitExceeded as e:
        doc = {"command": args.command, "inputs": {}, "verdict": {"status": "Unknown", "reason": f"LimitExceeded: {e}"},
               "stats": {}}
        code, text = EXIT_UNKNOWN, [f"Unknown: LimitExceeded: {e}"]
    if args.json:
        doc = {"schema": SCHEMA_VERSION, **doc}
        out.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    else:
        for line in text:
            print(line, file=out)
        if args.command in ("check", "relate", "laws"):
            print(f"time: {time.perf_counter() - t0:.3f}s", file=out)
    return code


class _BadAgent(Exception):
    def __init__(self, error: ParseError, src: str):
        super().__init__(str(error))
        self.error, self.src = error, src


def _parse(text: str, defs: dict):
    try:
        return parse_agent(text, defs)
    except ParseError as e:
        raise _BadAgent(e, text) from None


def _dispatch(args, defs, cfg, parse) -> tuple:
    cmd = args.command
    if cmd == "parse":
        p = parse(args.agent)
        txt = print_agent(p)
        return {"command": cmd, "inputs": {"agent": args.agent}, "verdict": None, "result": txt, "stats": {}}, EXIT_OK, [txt]
    if cmd == "norm":
        p = parse(args.agent)
        txt = print_agent(struct_normal_form(p))
        return {"command": cmd, "inputs": {"agent": args.agent}, "verdict": None, "result": txt, "stats": {}}, EXIT_OK, [txt]
    if cmd == "transitions":
        p = parse(args.agent)
        lines, extra = _transitions(args, p, cfg)
        doc = {"command": cmd, "inputs": {"agent": args.agent, **extra}, "verdict": None, "result": lines,
               "stats": {"transitions": len(lines)}}
        return doc, EXIT_OK, lines
    if cmd == "check":
        p, q = parse(args.left), parse(args.right)
        kind = EquivKind(args.kind)
        if args.up_to_struct:
            cfg = CheckConfig(cfg.limits, cfg.extra_inputs, cfg.max_subst_domain, True)
        v = check(p, q, kind, cfg)
        doc = {
            "command": cmd,
            "inputs": {"left": args.left, "right": args.right, "kind": kind.value,
                       "extra_inputs": sorted(cfg.extra_inputs), "max_states": cfg.limits.max_states,
                       "matching_names": sorted(matching_names(p, q, cfg), key=name_key)},
            "verdict": verdict_json(v),
        }
        text = [f"{v.status}" + (f" ({v.reason})" if v.reason else "")]
        if v.witness:
            doc["witness"] = witness_json(v.witness)
            text += ["witness:"] + ["  " + l for l in v.witness.lines()]
        doc["stats"] = _stats(v.stats)
        text.append("stats: " + ", ".join(f"{k}={val}" for k, val in _stats(v.stats).items()))
        return doc, _exit_for(v), text
    if cmd == "relate":
        p, q = parse(args.left), parse(args.right)
        table = relate(p, q, cfg)
        bad = lattice_violations(table)
        rows = {}
        text = []
        for k, v in table.items():
            name = k if k == STRUCT else k.value
            rows[name] = verdict_json(v)
            text.append(f"{name:18} {v.status}" + (f" ({v.reason})" if v.reason else ""))
        viol = [[a if a == STRUCT else a.value, b if b == STRUCT else b.value] for a, b in bad]
        for a, b in viol:
            text.append(f"lattice violation: {a} holds but {b} does not")
        doc = {"command": cmd, "inputs": {"left": args.left, "right": args.right}, "verdict": None,
               "result": {"table": rows, "lattice_violations": viol}, "stats": {"implications": len(IMPLICATIONS)}}
        return doc, EXIT_INEQUIVALENT if bad else EXIT_OK, text
    if cmd == "laws":
        if args.count < 0 or args.size < 1:
            raise UsageError("--count must be >= 0 and --size >= 1")
        rep = laws_suite(args.seed, args.count, args.size, cfg)
        laws = []
        text = []
        for l in rep.laws:
            entry = {"law": l.name, "passed": l.passed, "failed": l.failed, "unknown": l.unknown, "up_to_struct": l.up_to}
            line = f"{l.name:14} {'PASS' if l.ok else 'FAIL'}  passed={l.passed} failed={l.failed} unknown={l.unknown} up-to-struct={l.up_to}"
            if l.first_failure:
                lhs, rhs, v = l.first_failure
                entry["first_failure"] = {"left": print_agent(lhs), "right": print_agent(rhs), "verdict": verdict_json(v)}
                line += f"\n    first failure: {print_agent(lhs)}  vs  {print_agent(rhs)}: {v.status}"
            laws.append(entry)
            text.append(line)
        viol = [{"left": print_agent(p), "right": print_agent(q),
                 "implication": [a if a == STRUCT else a.value, b if b == STRUCT else b.value]}
                for p, q, (a, b) in rep.lattice_violations]
        text.append(f"lattice: {rep.lattice_pairs} pairs, {len(viol)} violations")
        for v in viol[:5]:
            text.append(f"    {v['left']}  vs  {v['right']}: {v['implication'][0]} => {v['implication'][1]} broken")
        doc = {"command": cmd, "inputs": {"seed": args.seed, "count": args.count, "size": args.size},
               "verdict": {"status": "pass" if rep.ok else "fail"},
               "result": {"laws": laws, "lattice_pairs": rep.lattice_pairs, "lattice_violations": viol},
               "stats": {"instances": args.count * len(rep.laws)}}
        return doc, EXIT_OK if rep.ok else EXIT_INEQUIVALENT, text
    raise UsageError(f"unknown command {cmd}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
