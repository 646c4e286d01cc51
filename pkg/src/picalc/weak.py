"""Weak transitions derived from the strong late and early systems.

``P => alpha P'`` is a tau-chain, one strong ``alpha`` step, then another
tau-chain.  Weak late inputs stop at the mid-point reached right after the
input step; the substitution of the received name and the trailing tau-chain
come from ``weak_input_tail``.

All agents handed out by this module are canonical representatives.  A
``Session`` memoizes the strong and weak enumerations per canonical agent; it
is cheap to create and holds no locks, so share one between threads only if
you accept duplicated work (entries are computed deterministically, so racing
writers store equal values).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .nominal import Name
from .semantics import (
    TAU,
    Bound,
    BoundE,
    Free,
    FreeE,
    TauA,
    action_key,
    early_input_names,
    early_transitions_over,
    late_transitions,
)
from .syntax import Agent, Res, canonicalize, free_names, size, substitute


@dataclass(frozen=True)
class ExploreLimits:
    max_states: int = 10000
    max_depth: int = 1000
    # replication can grow agents without bound; stop before recursion does
    max_size: int = 250

    def __post_init__(self):
        if self.max_states <= 0 or self.max_depth <= 0 or self.max_size <= 0:
            raise ValueError("exploration limits must be positive")


DEFAULT_LIMITS = ExploreLimits()


class LimitExceeded(Exception):
    def __init__(self, what: str, limit: int):
        self.what = what
        self.limit = limit
        super().__init__(f"{what} exceeded limit {limit}")


@dataclass(frozen=True, slots=True)
class WFree:
    act: object
    deriv: Agent

    def map_names(self, f):
        return WFree(self.act.map_names(f), self.deriv.map_names(f))

    def support(self):
        return free_names(self.deriv) | self.act.names()


@dataclass(frozen=True, slots=True)
class WBoundOut:
    chan: Name
    bind: Name
    deriv: Agent

    def map_names(self, f):
        return WBoundOut(f(self.chan), f(self.bind), self.deriv.map_names(f))

    def support(self):
        return (free_names(self.deriv) - {self.bind}) | {self.chan}


@dataclass(frozen=True, slots=True)
class WInput:
    chan: Name
    bind: Name
    mid: Agent

    def map_names(self, f):
        return WInput(f(self.chan), f(self.bind), self.mid.map_names(f))

    def support(self):
        return (free_names(self.mid) - {self.bind}) | {self.chan}


@dataclass(frozen=True, slots=True)
class WeakInputStep:
    """A completed weak late input ``received:chan(bind)@mid -> deriv``."""

    received: Name
    chan: Name
    bind: Name
    mid: Agent
    deriv: Agent


def weak_key(r) -> tuple:
    if isinstance(r, WFree):
        return (r.act, canonicalize(r.deriv))
    if isinstance(r, WBoundOut):
        return ("bo", r.chan, canonicalize(Res(r.bind, r.deriv)))
    if isinstance(r, WInput):
        return ("in", r.chan, canonicalize(Res(r.bind, r.mid)))
    raise TypeError(r)


def _weak_order(r) -> tuple:
    if isinstance(r, WFree):
        return action_key(Free(r.act, r.deriv))
    if isinstance(r, WInput):
        return (1, r.chan)
    return (3, r.chan)


class Session:
    """Memo tables for one checking session."""

    def __init__(self, limits: ExploreLimits = DEFAULT_LIMITS):
        self.limits = limits
        self._late: dict = {}
        self._early: dict = {}
        self._closure: dict = {}
        self._ordered: dict = {}
        self._weak_late: dict = {}
        self._weak_early: dict = {}
        self.states_seen = 0

    def guard(self, p: Agent) -> Agent:
        if size(p) > self.limits.max_size:
            raise LimitExceeded("agent size", self.limits.max_size)
        return p

    # strong steps, cached per canonical agent

    def late(self, p: Agent) -> list:
        p = canonicalize(p)
        rs = self._late.get(p)
        if rs is None:
            rs = self._late[p] = late_transitions(p)
        return rs

    def early(self, p: Agent, names: frozenset) -> list:
        p = canonicalize(p)
        key = (p, names)
        rs = self._early.get(key)
        if rs is None:
            rs = self._early[key] = early_transitions_over(p, names)
        return rs

    # weak steps

    def tau_closure(self, p: Agent) -> frozenset:
        p = canonicalize(p)
        got = self._closure.get(p)
        if got is not None:
            return got
        lim = self.limits
        seen = {p}
        frontier = deque([(p, 0)])
        while frontier:
            q, depth = frontier.popleft()
            for r in self.late(q):
                if isinstance(r, Free) and isinstance(r.act, TauA):
                    d = canonicalize(self.guard(r.deriv))
                    if d in seen:
                        continue
                    if depth + 1 > lim.max_depth:
                        raise LimitExceeded("tau-chain depth", lim.max_depth)
                    seen.add(d)
                    if len(seen) > lim.max_states:
                        raise LimitExceeded("tau-closure states", lim.max_states)
                    frontier.append((d, depth + 1))
        got = self._closure[p] = frozenset(seen)
        self.states_seen += len(got)
        return got

    def ordered_closure(self, p: Agent) -> tuple:
        """``tau_closure(p)`` in a fixed order, so exploration is deterministic."""
        p = canonicalize(p)
        got = self._ordered.get(p)
        if got is None:
            got = self._ordered[p] = tuple(sorted(self.tau_closure(p), key=repr))
        return got

    def weak_late(self, p: Agent, avoid: frozenset = frozenset()) -> list:
        p = canonicalize(p)
        key = (p, avoid)
        got = self._weak_late.get(key)
        if got is not None:
            return got
        av = avoid | free_names(p)
        out = {}
        for s in self.ordered_closure(p):
            for r in late_transitions(s, av):
                if isinstance(r, Free):
                    ws = [WFree(r.act, t) for t in self.tau_closure(r.deriv)]
                elif r.is_input:
                    ws = [WInput(r.chan, r.bind, canonicalize(r.deriv))]
                else:
                    ws = [WBoundOut(r.chan, r.bind, t) for t in self.tau_closure(r.deriv)]
                for w in ws:
                    out.setdefault(weak_key(w), w)
        got = self._weak_late[key] = sorted(out.values(), key=lambda w: (_weak_order(w), repr(weak_key(w))))
        return got

    def input_tail(self, mid: Agent, bind: Name, received: Name) -> frozenset:
        return self.tau_closure(substitute(mid, received, bind))

    def ordered_tail(self, mid: Agent, bind: Name, received: Name) -> tuple:
        return self.ordered_closure(substitute(mid, received, bind))

    def weak_early(self, p: Agent, names: frozenset, avoid: frozenset = frozenset()) -> list:
        p = canonicalize(p)
        key = (p, names, avoid)
        got = self._weak_early.get(key)
        if got is not None:
            return got
        av = avoid | free_names(p)
        out = {}
        for s in self.ordered_closure(p):
            for r in early_transitions_over(s, names, av):
                for t in self.tau_closure(r.deriv):
                    w = FreeE(r.act, t) if isinstance(r, FreeE) else BoundE(r.chan, r.bind, t)
                    out.setdefault(_early_key(w), w)
        got = self._weak_early[key] = sorted(out.values(), key=lambda w: (action_key(w), repr(_early_key(w))))
        return got


def _early_key(r) -> tuple:
    if isinstance(r, BoundE):
        return ("bo", r.chan, canonicalize(Res(r.bind, r.deriv)))
    return (r.act, canonicalize(r.deriv))


def _session(lim: Optional[ExploreLimits], session: Optional[Session]) -> Session:
    if session is not None:
        return session
    return Session(lim or DEFAULT_LIMITS)


def tau_closure(p: Agent, lim: Optional[ExploreLimits] = None, session: Optional[Session] = None) -> frozenset:
    """Canonical agents reachable from ``p`` by zero or more tau steps."""
    return _session(lim, session).tau_closure(p)


def weak_late_transitions(
    p: Agent, avoid: Iterable[Name] = (), lim: Optional[ExploreLimits] = None, session: Optional[Session] = None
) -> list:
    return _session(lim, session).weak_late(p, frozenset(avoid))


def weak_input_tail(
    mid: Agent, bind: Name, received: Name, lim: Optional[ExploreLimits] = None, session: Optional[Session] = None
) -> frozenset:
    return _session(lim, session).input_tail(mid, bind, received)


def weak_input_steps(
    p: Agent, received: Iterable[Name], avoid: Iterable[Name] = (), lim: Optional[ExploreLimits] = None,
    session: Optional[Session] = None,
) -> list:
    """Every completed weak input ``u:a(x)@P'' -> P'`` for ``u`` in ``received``."""
    s = _session(lim, session)
    out = []
    for w in s.weak_late(p, frozenset(avoid)):
        if isinstance(w, WInput):
            for u in received:
                for t in s.ordered_tail(w.mid, w.bind, u):
                    out.append(WeakInputStep(u, w.chan, w.bind, w.mid, t))
    return out


def weak_hat_holds(
    p: Agent, act, q: Agent, lim: Optional[ExploreLimits] = None, session: Optional[Session] = None
) -> bool:
    s = _session(lim, session)
    q = canonicalize(q)
    if isinstance(act, TauA):
        return q in s.tau_closure(p)
    return any(isinstance(w, WFree) and w.act == act and canonicalize(w.deriv) == q for w in s.weak_late(p))


def weak_early_transitions(
    p: Agent, avoid: Iterable[Name] = (), inputs: Iterable[Name] = (), lim: Optional[ExploreLimits] = None,
    session: Optional[Session] = None,
) -> list:
    """Tau-chain, one early step, tau-chain; inputs over ``inputs`` plus ``fn(p)`` plus one fresh name."""
    avoid = frozenset(avoid)
    names = early_input_names(p, inputs, avoid)
    return _session(lim, session).weak_early(p, names, avoid)


__all__ = [
    "DEFAULT_LIMITS",
    "ExploreLimits",
    "LimitExceeded",
    "Session",
    "TAU",
    "WBoundOut",
    "WFree",
    "WInput",
    "WeakInputStep",
    "tau_closure",
    "weak_early_transitions",
    "weak_hat_holds",
    "weak_input_steps",
    "weak_input_tail",
    "weak_key",
    "weak_late_transitions",
]
