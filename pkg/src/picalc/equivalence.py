"""Bisimulation checkers.

Every kind is decided on the fly.  Starting from the root pair, the checker
explores all pairs the simulation clauses can ask about, then removes pairs
that violate a clause until nothing changes; the root survives iff the agents
are equivalent.  A pair's clauses are *obligations*: one per move of either
agent, each a disjunction of *answers*, each answer a conjunction over
received names of "some candidate pair survives".  Late input is the only
move with several received names per answer, which is where the
``exists P'' forall u exists P'`` alternation of the weak clauses lives.

Universal quantification over received names ranges over ``matching_names``:
the free names of the pair, the configured extra names, and one fresh name.
Equivariance makes every other name behave like the fresh one.
"""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional

from .nominal import Name, fresh_name, name_key
from .semantics import (
    BoundE,
    Free,
    FreeE,
    InputE,
    OutputA,
    TauA,
)
from .structural import struct_normal_form, struct_reduce, unfold_variants
from .syntax import Agent, Tau, apply_chain, canonicalize, free_names, simultaneous_chain, substitute
from .weak import DEFAULT_LIMITS, ExploreLimits, LimitExceeded, Session, WBoundOut, WFree, WInput


class EquivKind(Enum):
    STRONG_LATE = "strong-late"
    STRONG_LATE_S = "strong-late-s"
    STRONG_EARLY = "strong-early"
    STRONG_EARLY_S = "strong-early-s"
    WEAK_LATE = "weak-late"
    WEAK_LATE_CONG = "weak-late-cong"
    WEAK_LATE_CONG_S = "weak-late-cong-s"
    WEAK_EARLY = "weak-early"
    WEAK_EARLY_CONG = "weak-early-cong"
    WEAK_EARLY_CONG_S = "weak-early-cong-s"

    @property
    def is_subst(self) -> bool:
        return self.value.endswith("-s")

    @property
    def base(self) -> "EquivKind":
        return EquivKind(self.value[:-2]) if self.is_subst else self

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]


_SYMBOLS = {
    EquivKind.STRONG_LATE: "~",
    EquivKind.STRONG_LATE_S: "~s",
    EquivKind.STRONG_EARLY: "~e",
    EquivKind.STRONG_EARLY_S: "~es",
    EquivKind.WEAK_LATE: "~~",
    EquivKind.WEAK_LATE_CONG: "~=",
    EquivKind.WEAK_LATE_CONG_S: "~=s",
    EquivKind.WEAK_EARLY: "~~e",
    EquivKind.WEAK_EARLY_CONG: "~=e",
    EquivKind.WEAK_EARLY_CONG_S: "~=es",
}


@dataclass(frozen=True)
class CheckConfig:
    limits: ExploreLimits = DEFAULT_LIMITS
    extra_inputs: frozenset = frozenset()
    max_subst_domain: int = 4
    # bisimulation up to structural congruence; off by default
    up_to_struct: bool = False

    def __post_init__(self):
        if self.max_subst_domain <= 0:
            raise ValueError("max_subst_domain must be positive")
        object.__setattr__(self, "extra_inputs", frozenset(self.extra_inputs))


DEFAULT_CONFIG = CheckConfig()


@dataclass(frozen=True)
class Action:
    """Printable action of a witness step."""

    kind: str  # tau | output | input | bound-output | early-input
    chan: Optional[Name] = None
    msg: Optional[Name] = None
    bind: Optional[Name] = None

    def text(self) -> str:
        if self.kind == "tau":
            return "tau"
        if self.kind == "output":
            return f"{self.chan}!{self.msg}"
        if self.kind == "early-input":
            return f"{self.chan}?{self.msg}"
        if self.kind == "input":
            return f"{self.chan}({self.bind})"
        return f"{self.chan}!({self.bind})"

    def order(self) -> tuple:
        rank = {"tau": 0, "input": 1, "early-input": 1, "output": 2, "bound-output": 3}[self.kind]
        return (rank, name_key(self.chan or ""), name_key(self.msg or ""))


@dataclass(frozen=True)
class WitnessStep:
    side: str  # Left | Right
    action: Action
    received: Optional[Name] = None

    def text(self) -> str:
        s = f"{self.side}: {self.action.text()}"
        if self.received is not None:
            s += f" receiving {self.received}"
        return s


@dataclass(frozen=True)
class Witness:
    steps: tuple
    left: Agent
    right: Agent
    sigma: Optional[tuple] = None  # (old, new) pairs of a simultaneous substitution

    def lines(self) -> list:
        from .parser import print_agent

        out = []
        if self.sigma:
            out.append("under {" + ", ".join(f"{new}/{old}" for old, new in self.sigma) + "}")
        out.extend(s.text() for s in self.steps)
        out.append(f"stuck at: {print_agent(self.left)}  vs  {print_agent(self.right)}")
        return out


EQUIVALENT = "Equivalent"
INEQUIVALENT = "Inequivalent"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: Optional[Witness] = None
    reason: Optional[str] = None
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def equivalent(self) -> bool:
        return self.status == EQUIVALENT

    @property
    def inequivalent(self) -> bool:
        return self.status == INEQUIVALENT

    @property
    def unknown(self) -> bool:
        return self.status == UNKNOWN

    def as_bool(self) -> Optional[bool]:
        return None if self.unknown else self.equivalent


def equivalent(stats=None) -> Verdict:
    return Verdict(EQUIVALENT, stats=stats or {})


def inequivalent(w: Witness, stats=None) -> Verdict:
    return Verdict(INEQUIVALENT, witness=w, stats=stats or {})


def unknown(reason: str, stats=None) -> Verdict:
    return Verdict(UNKNOWN, reason=reason, stats=stats or {})


def matching_names(p: Agent, q: Agent, cfg: CheckConfig = DEFAULT_CONFIG) -> frozenset:
    base = free_names(p) | free_names(q) | cfg.extra_inputs
    return base | {fresh_name(base, "w")}


# ---------------------------------------------------------------------------
# the game


@dataclass(frozen=True)
class _Obligation:
    side: str
    action: Action
    answers: tuple  # of tuples of (received, tuple of node ids)


def _action_of(r, bind: Optional[Name] = None) -> Action:
    if isinstance(r, (Free, FreeE)):
        a = r.act
        if isinstance(a, TauA):
            return Action("tau")
        if isinstance(a, OutputA):
            return Action("output", a.chan, a.msg)
        return Action("early-input", a.chan, a.msg)
    if isinstance(r, BoundE) or not r.is_input:
        return Action("bound-output", r.chan, bind=bind)
    return Action("input", r.chan, bind=bind)


def _single(cands: tuple) -> tuple:
    # one answer with one requirement; no candidates means no answer at all
    return (((None, cands),),) if cands else ()


class _Game:
    def __init__(self, session: Session, cfg: CheckConfig):
        self.s = session
        self.cfg = cfg
        self.norm: Callable[[Agent], Agent] = struct_reduce if cfg.up_to_struct else canonicalize
        self.ids: dict = {}
        self.nodes: list = []
        self.obligations: list = []
        self.preds: list = []

    def node(self, tag: str, p: Agent, q: Agent, root: bool = False) -> int:
        # up to structural congruence only derivatives are normalized; the
        # root pair itself is always taken literally
        norm = canonicalize if root else self.norm
        key = (tag, norm(self.s.guard(p)), norm(self.s.guard(q)))
        i = self.ids.get(key)
        if i is None:
            if len(self.nodes) >= self.cfg.limits.max_states:
                raise LimitExceeded("state pairs", self.cfg.limits.max_states)
            i = self.ids[key] = len(self.nodes)
            self.nodes.append(key)
            self.obligations.append(None)
            self.preds.append(set())
        return i

    # obligations -----------------------------------------------------------

    def expand(self, i: int) -> list:
        tag, p, q = self.nodes[i]
        if p == q:
            return []
        out = []
        for side in ("Left", "Right"):
            m, r = (p, q) if side == "Left" else (q, p)
            for act, answers in self._moves(tag, m, r, side, matching_names(p, q, self.cfg), p, q):
                out.append(_Obligation(side, act, answers))
        return out

    def _moves(self, tag, m, r, side, names, p, q):
        child = {"cong-late": "weak-late", "cong-early": "weak-early"}.get(tag, tag)
        z = fresh_name(free_names(p) | free_names(q) | self.cfg.extra_inputs, "x")

        def pair(m2, r2):
            return self.node(child, m2, r2) if side == "Left" else self.node(child, r2, m2)

        if tag == "strong-late":
            rs = self.s.late(r)
            for mv in self.s.late(m):
                if isinstance(mv, Free):
                    cands = tuple(pair(mv.deriv, x.deriv) for x in rs if isinstance(x, Free) and x.act == mv.act)
                    yield _action_of(mv), _single(cands)
                elif not mv.is_input:
                    d = substitute(mv.deriv, z, mv.bind)
                    cands = tuple(
                        pair(d, substitute(x.deriv, z, x.bind))
                        for x in rs
                        if isinstance(x, type(mv)) and not x.is_input and x.chan == mv.chan
                    )
                    yield _action_of(mv, z), _single(cands)
                else:
                    answers = []
                    for x in rs:
                        if not (isinstance(x, type(mv)) and x.is_input and x.chan == mv.chan):
                            continue
                        answers.append(tuple(
                            (u, (pair(substitute(mv.deriv, u, mv.bind), substitute(x.deriv, u, x.bind)),))
                            for u in sorted(names, key=name_key)
                        ))
                    yield _action_of(mv, z), tuple(answers)
        elif tag == "strong-early":
            rs = self.s.early(r, names)
            for mv in self.s.early(m, names):
                if isinstance(mv, FreeE):
                    cands = tuple(pair(mv.deriv, x.deriv) for x in rs if isinstance(x, FreeE) and x.act == mv.act)
                    yield _action_of(mv), _single(cands)
                else:
                    d = substitute(mv.deriv, z, mv.bind)
                    cands = tuple(
                        pair(d, substitute(x.deriv, z, x.bind)) for x in rs if isinstance(x, BoundE) and x.chan == mv.chan
                    )
                    yield _action_of(mv, z), _single(cands)
        elif tag in ("weak-late", "cong-late"):
            ws = self.s.weak_late(r)
            for mv in self.s.late(m):
                if isinstance(mv, Free):
                    if isinstance(mv.act, TauA) and tag == "weak-late":
                        targets = self.s.ordered_closure(r)
                    else:
                        targets = [w.deriv for w in ws if isinstance(w, WFree) and w.act == mv.act]
                    cands = tuple(pair(mv.deriv, t) for t in targets)
                    yield _action_of(mv), _single(cands)
                elif not mv.is_input:
                    d = substitute(mv.deriv, z, mv.bind)
                    cands = tuple(
                        pair(d, substitute(w.deriv, z, w.bind))
                        for w in ws
                        if isinstance(w, WBoundOut) and w.chan == mv.chan
                    )
                    yield _action_of(mv, z), _single(cands)
                else:
                    answers = []
                    for w in ws:
                        if not (isinstance(w, WInput) and w.chan == mv.chan):
                            continue
                        reqs = []
                        for u in sorted(names, key=name_key):
                            d = substitute(mv.deriv, u, mv.bind)
                            tail = self.s.ordered_tail(w.mid, w.bind, u)
                            reqs.append((u, tuple(pair(d, t) for t in tail)))
                        answers.append(tuple(reqs))
                    yield _action_of(mv, z), tuple(answers)
        elif tag in ("weak-early", "cong-early"):
            ws = self.s.weak_early(r, names)
            for mv in self.s.early(m, names):
                if isinstance(mv, FreeE):
                    if isinstance(mv.act, TauA) and tag == "weak-early":
                        targets = self.s.ordered_closure(r)
                    else:
                        targets = [w.deriv for w in ws if isinstance(w, FreeE) and w.act == mv.act]
                    cands = tuple(pair(mv.deriv, t) for t in targets)
                    yield _action_of(mv), _single(cands)
                else:
                    d = substitute(mv.deriv, z, mv.bind)
                    cands = tuple(
                        pair(d, substitute(w.deriv, z, w.bind)) for w in ws if isinstance(w, BoundE) and w.chan == mv.chan
                    )
                    yield _action_of(mv, z), _single(cands)
        else:
            raise ValueError(tag)

    # exploration and refinement ---------------------------------------------

    def explore(self, root: int):
        todo = deque([root])
        while todo:
            i = todo.popleft()
            if self.obligations[i] is not None:
                continue
            obls = self.expand(i)
            self.obligations[i] = obls
            for ob in obls:
                for ans in ob.answers:
                    for _, cands in ans:
                        for c in cands:
                            self.preds[c].add(i)
                            if self.obligations[c] is None:
                                todo.append(c)

    def refine(self) -> tuple:
        n = len(self.nodes)
        alive = [True] * n
        rank = [0] * n
        death: dict = {}
        removed = 0
        gen = list(range(n))
        rounds = 0
        while gen:
            rounds += 1
            nxt = set()
            for i in gen:
                if not alive[i]:
                    continue
                best = None
                for ob in self.obligations[i]:
                    failed = self._failure(ob, alive, rank)
                    if failed is not None:
                        key = (failed[0], ob.action.order(), ob.side)
                        if best is None or key < best[0]:
                            best = (key, ob, failed)
                if best is not None:
                    alive[i] = False
                    removed += 1
                    rank[i] = best[2][0]
                    death[i] = (best[1], best[2][1], best[2][2])
                    nxt.update(j for j in self.preds[i] if alive[j])
            gen = sorted(nxt)
        return alive, death, removed, rounds

    @staticmethod
    def _failure(ob: _Obligation, alive: list, rank: list):
        """``(rank, received, next node)`` if ``ob`` fails, else ``None``."""
        worst = (0, None, None)  # best defence found so far, measured in rank
        for ans in ob.answers:
            lost = None
            for u, cands in ans:
                if any(alive[c] for c in cands):
                    continue
                r = max((rank[c] for c in cands), default=0)
                nxt = max(cands, key=lambda c: rank[c]) if cands else None
                if lost is None or r < lost[0]:
                    lost = (r, u, nxt)
            if lost is None:
                return None
            if lost[0] >= worst[0]:
                worst = lost
        return (1 + worst[0], worst[1], worst[2])

    def witness(self, root: int, death: dict) -> Witness:
        steps = []
        i = root
        while True:
            ob, u, nxt = death[i]
            steps.append(WitnessStep(ob.side, ob.action, u))
            if nxt is None:
                _, p, q = self.nodes[i]
                # the stuck pair is the one where the last move has no answer
                return Witness(tuple(steps), p, q)
            i = nxt


_TAGS = {
    EquivKind.STRONG_LATE: "strong-late",
    EquivKind.STRONG_EARLY: "strong-early",
    EquivKind.WEAK_LATE: "weak-late",
    EquivKind.WEAK_LATE_CONG: "cong-late",
    EquivKind.WEAK_EARLY: "weak-early",
    EquivKind.WEAK_EARLY_CONG: "cong-early",
}


def _check_base(p: Agent, q: Agent, kind: EquivKind, cfg: CheckConfig, session: Session) -> Verdict:
    t0 = time.perf_counter()
    game = _Game(session, cfg)
    stats = {"pairs_explored": 0, "pairs_refined": 0, "rounds": 0}
    try:
        root = game.node(_TAGS[kind], p, q, root=True)
        game.explore(root)
    except LimitExceeded as e:
        stats["pairs_explored"] = len(game.nodes)
        stats["wall_time"] = time.perf_counter() - t0
        return unknown(f"LimitExceeded: {e}", stats)
    alive, death, removed, rounds = game.refine()
    stats.update(pairs_explored=len(game.nodes), pairs_refined=removed, rounds=rounds)
    stats["wall_time"] = time.perf_counter() - t0
    if alive[root]:
        return equivalent(stats)
    return inequivalent(game.witness(root, death), stats)


def check(
    p: Agent, q: Agent, kind: EquivKind, cfg: CheckConfig = DEFAULT_CONFIG, session: Optional[Session] = None
) -> Verdict:
    """Decide ``p`` vs ``q`` for ``kind`` within the configured limits."""
    session = session or Session(cfg.limits)
    if kind.is_subst:
        return subst_closed(p, q, kind.base, cfg, session)
    return _check_base(p, q, kind, cfg, session)


# ---------------------------------------------------------------------------
# substitution closure


def _partitions(items: list):
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _partitions(rest):
        yield [[head]] + part
        for k in range(len(part)):
            yield part[:k] + [[head] + part[k]] + part[k + 1:]


def substitutions(names: Iterable[Name]) -> list:
    """One simultaneous substitution per way of identifying ``names``.

    Every function from ``names`` into names is, up to a permutation fixing
    nothing relevant, one of these, so equivariance covers the rest.  The
    identity comes first.
    """
    names = sorted(names, key=name_key)
    out = []
    for part in _partitions(names):
        mapping = {}
        for block in part:
            rep = min(block, key=name_key)
            for n in block:
                mapping[n] = rep
        out.append(mapping)
    out.sort(key=lambda m: (sum(1 for k, v in m.items() if k != v), sorted((name_key(k), name_key(v)) for k, v in m.items())))
    return out


def subst_closed(
    p: Agent, q: Agent, base: EquivKind, cfg: CheckConfig = DEFAULT_CONFIG, session: Optional[Session] = None
) -> Verdict:
    if base.is_subst:
        raise ValueError("base kind must not be substitution-closed")
    dom = free_names(p) | free_names(q)
    if len(dom) > cfg.max_subst_domain:
        return unknown(f"SubstDomainTooLarge: {len(dom)} free names, limit {cfg.max_subst_domain}")
    session = session or Session(cfg.limits)
    pending = None
    total = {"pairs_explored": 0, "pairs_refined": 0, "substitutions": 0}
    t0 = time.perf_counter()
    for mapping in substitutions(dom):
        chain = simultaneous_chain(mapping, dom)
        v = _check_base(apply_chain(p, chain), apply_chain(q, chain), base, cfg, session)
        total["substitutions"] += 1
        total["pairs_explored"] += v.stats.get("pairs_explored", 0)
        total["pairs_refined"] += v.stats.get("pairs_refined", 0)
        if v.inequivalent:
            sigma = tuple(sorted(((k, w) for k, w in mapping.items() if k != w), key=lambda kv: name_key(kv[0])))
            w = v.witness
            total["wall_time"] = time.perf_counter() - t0
            return inequivalent(Witness(w.steps, w.left, w.right, sigma), total)
        if v.unknown and pending is None:
            pending = v.reason
    total["wall_time"] = time.perf_counter() - t0
    if pending is not None:
        return unknown(pending, total)
    return equivalent(total)


# ---------------------------------------------------------------------------
# structural congruence


def struct_cong(p: Agent, q: Agent, rounds: int = 2) -> Verdict:
    """Equivalent when the normal forms meet, allowing bounded unfolding.

    Never answers Inequivalent: distinct normal forms are reported as
    ``Unknown(NormalizerIncomplete)``.
    """
    if struct_normal_form(p) == struct_normal_form(q):
        return equivalent()
    if unfold_variants(p, rounds) & unfold_variants(q, rounds):
        return equivalent()
    return unknown("NormalizerIncomplete")


# ---------------------------------------------------------------------------
# corollaries


@dataclass(frozen=True)
class HennessyResult:
    weak: Verdict
    tau_left: Verdict  # tau.p ~= q
    plain: Verdict  # p ~= q
    tau_right: Verdict  # p ~= tau.q

    @property
    def weak_bisim(self) -> Optional[bool]:
        return self.weak.as_bool()

    @property
    def disjuncts(self) -> tuple:
        return (self.tau_left.as_bool(), self.plain.as_bool(), self.tau_right.as_bool())

    @property
    def decisive(self) -> bool:
        return self.weak_bisim is not None and None not in self.disjuncts

    @property
    def holds(self) -> Optional[bool]:
        """The biconditional, or ``None`` when a sub-check was inconclusive."""
        if not self.decisive:
            return None
        return self.weak_bisim == any(self.disjuncts)


def hennessy_classify(
    p: Agent, q: Agent, cfg: CheckConfig = DEFAULT_CONFIG, session: Optional[Session] = None
) -> HennessyResult:
    session = session or Session(cfg.limits)
    cong = EquivKind.WEAK_LATE_CONG
    return HennessyResult(
        check(p, q, EquivKind.WEAK_LATE, cfg, session),
        check(Tau(p), q, cong, cfg, session),
        check(p, q, cong, cfg, session),
        check(p, Tau(q), cong, cfg, session),
    )


STRUCT = "struct"

# (stronger, weaker): whenever the first is Equivalent so must the second be
IMPLICATIONS = (
    (STRUCT, EquivKind.STRONG_LATE),
    (STRUCT, EquivKind.STRONG_LATE_S),
    (EquivKind.STRONG_LATE, EquivKind.WEAK_LATE_CONG),
    (EquivKind.WEAK_LATE_CONG, EquivKind.WEAK_LATE),
    (EquivKind.STRONG_LATE, EquivKind.STRONG_EARLY),
    (EquivKind.STRONG_EARLY, EquivKind.WEAK_EARLY_CONG),
    (EquivKind.WEAK_EARLY_CONG, EquivKind.WEAK_EARLY),
    (EquivKind.STRONG_LATE_S, EquivKind.STRONG_LATE),
    (EquivKind.STRONG_LATE_S, EquivKind.STRONG_EARLY_S),
    (EquivKind.STRONG_EARLY_S, EquivKind.STRONG_EARLY),
    (EquivKind.STRONG_LATE_S, EquivKind.WEAK_LATE_CONG_S),
    (EquivKind.WEAK_LATE_CONG_S, EquivKind.WEAK_LATE_CONG),
    (EquivKind.WEAK_EARLY_CONG_S, EquivKind.WEAK_EARLY_CONG),
    (EquivKind.WEAK_LATE, EquivKind.WEAK_EARLY),
)


def relate(
    p: Agent, q: Agent, cfg: CheckConfig = DEFAULT_CONFIG, kinds: Optional[Iterable[EquivKind]] = None,
    session: Optional[Session] = None,
) -> dict:
    """Verdicts for every kind (or ``kinds``) plus structural congruence."""
    session = session or Session(cfg.limits)
    table = {STRUCT: struct_cong(p, q)}
    for k in kinds or EquivKind:
        table[k] = check(p, q, k, cfg, session)
    return table


def lattice_violations(table: dict) -> list:
    """Implications broken by ``table``; pairs involving an Unknown are skipped."""
    bad = []
    for strong, weak in IMPLICATIONS:
        a, b = table.get(strong), table.get(weak)
        if a is None or b is None or a.unknown or b.unknown:
            continue
        if a.equivalent and not b.equivalent:
            bad.append((strong, weak))
    return bad
