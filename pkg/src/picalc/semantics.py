"""Strong late and early transition systems.

Residuals pair an action with its derivative; in a bound residual the binder
scopes over the derivative.  Every binder emitted here is generated fresh for
all names of the source agent and the caller's ``avoid`` set.

Replication only produces minimal-depth derivations: single-copy moves
``P' | !P`` and communications between two copies ``(P1 | P2) | !P``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Union

from .nominal import Name, fresh_name, is_reserved, name_key
from .syntax import (
    Agent,
    Bang,
    Input,
    Match,
    Mismatch,
    Nil,
    Output,
    Par,
    Res,
    Sum,
    Tau,
    abs_alpha_eq,
    all_names,
    alpha_eq,
    canonicalize,
    free_names,
    substitute,
    swap_agent,
)


@dataclass(frozen=True, slots=True)
class InputS:
    chan: Name


@dataclass(frozen=True, slots=True)
class BoundOutputS:
    chan: Name


Subject = Union[InputS, BoundOutputS]


@dataclass(frozen=True, slots=True)
class OutputA:
    chan: Name
    msg: Name

    def map_names(self, f):
        return OutputA(f(self.chan), f(self.msg))

    def names(self):
        return {self.chan, self.msg}


@dataclass(frozen=True, slots=True)
class TauA:
    def map_names(self, f):
        return self

    def names(self):
        return set()


@dataclass(frozen=True, slots=True)
class InputE:
    chan: Name
    msg: Name

    def map_names(self, f):
        return InputE(f(self.chan), f(self.msg))

    def names(self):
        return {self.chan, self.msg}


TAU = TauA()
FreeAction = Union[OutputA, TauA]
# the early system shares the output and tau actions with the late one
OutputE = OutputA
TauE = TauA
EarlyFreeAction = Union[InputE, OutputA, TauA]


@dataclass(frozen=True, slots=True)
class BoundOutputE:
    chan: Name


class _Abstraction:
    """Shared behaviour for residuals whose binder scopes over the derivative."""

    __slots__ = ()

    def support(self) -> frozenset:
        return (free_names(self.deriv) - {self.bind}) | {self.chan}

    def instantiate(self, name: Name) -> Agent:
        """The derivative with the binder renamed to ``name`` (which must be fresh)."""
        return substitute(self.deriv, name, self.bind)


@dataclass(frozen=True, slots=True)
class Bound(_Abstraction):
    subj: Subject
    bind: Name
    deriv: Agent

    @property
    def chan(self) -> Name:
        return self.subj.chan

    @property
    def is_input(self) -> bool:
        return isinstance(self.subj, InputS)

    def map_names(self, f):
        return Bound(type(self.subj)(f(self.subj.chan)), f(self.bind), self.deriv.map_names(f))


@dataclass(frozen=True, slots=True)
class Free:
    act: FreeAction
    deriv: Agent

    def map_names(self, f):
        return Free(self.act.map_names(f), self.deriv.map_names(f))

    def support(self) -> frozenset:
        return free_names(self.deriv) | self.act.names()


@dataclass(frozen=True, slots=True)
class BoundE(_Abstraction):
    chan: Name
    bind: Name
    deriv: Agent

    def map_names(self, f):
        return BoundE(f(self.chan), f(self.bind), self.deriv.map_names(f))


@dataclass(frozen=True, slots=True)
class FreeE:
    act: EarlyFreeAction
    deriv: Agent

    def map_names(self, f):
        return FreeE(self.act.map_names(f), self.deriv.map_names(f))

    def support(self) -> frozenset:
        return free_names(self.deriv) | self.act.names()


Residual = Union[Bound, Free]
EarlyResidual = Union[BoundE, FreeE]


# ---------------------------------------------------------------------------
# keys and ordering


def action_key(r) -> tuple:
    """Canonical action order: tau < input < output < bound output, then names."""
    if isinstance(r, (Free, FreeE)):
        a = r.act
        if isinstance(a, TauA):
            return (0,)
        if isinstance(a, InputE):
            return (1, name_key(a.chan), name_key(a.msg))
        return (2, name_key(a.chan), name_key(a.msg))
    if isinstance(r, Bound):
        return (1, name_key(r.chan)) if r.is_input else (3, name_key(r.chan))
    if isinstance(r, BoundE):
        return (3, name_key(r.chan))
    raise TypeError(r)


def residual_key(r) -> tuple:
    """Hashable key identifying ``r`` up to alpha-equivalence."""
    if isinstance(r, Bound):
        return ("in" if r.is_input else "bo", r.chan, canonicalize(Res(r.bind, r.deriv)))
    if isinstance(r, BoundE):
        return ("bo", r.chan, canonicalize(Res(r.bind, r.deriv)))
    if isinstance(r, (Free, FreeE)):
        return (r.act, canonicalize(r.deriv))
    raise TypeError(r)


def residual_alpha_eq(r1, r2) -> bool:
    if type(r1) is not type(r2):
        return False
    if isinstance(r1, (Free, FreeE)):
        return r1.act == r2.act and alpha_eq(r1.deriv, r2.deriv)
    if isinstance(r1, Bound):
        return r1.subj == r2.subj and abs_alpha_eq(r1.bind, r1.deriv, r2.bind, r2.deriv)
    if isinstance(r1, BoundE):
        return r1.chan == r2.chan and abs_alpha_eq(r1.bind, r1.deriv, r2.bind, r2.deriv)
    raise TypeError(r1)


def _dedup(rs: Iterable) -> list:
    seen = set()
    out = []
    for r in rs:
        k = residual_key(r)
        if k not in seen:
            seen.add(k)
            out.append(r)
    out.sort(key=action_key)
    return out


# ---------------------------------------------------------------------------
# late system


def _hint(n: Name, default: Name) -> Name:
    # canonical binders make poor hints for printed binders
    return default if is_reserved(n) else n


def _late(p: Agent, avoid: frozenset) -> list:
    if isinstance(p, Nil):
        return []
    if isinstance(p, Tau):
        return [Free(TAU, p.cont)]
    if isinstance(p, Output):
        return [Free(OutputA(p.chan, p.msg), p.cont)]
    if isinstance(p, Input):
        x = fresh_name(avoid, _hint(p.bind, "x"))
        return [Bound(InputS(p.chan), x, swap_agent(p.bind, x, p.cont))]
    if isinstance(p, Match):
        return _late(p.cont, avoid) if p.left == p.right else []
    if isinstance(p, Mismatch):
        return _late(p.cont, avoid) if p.left != p.right else []
    if isinstance(p, Sum):
        return _late(p.left, avoid) + _late(p.right, avoid)
    if isinstance(p, Par):
        rp, rq = _late(p.left, avoid), _late(p.right, avoid)
        out = [_lift(r, lambda d: Par(d, p.right)) for r in rp]
        out += [_lift(r, lambda d: Par(p.left, d)) for r in rq]
        out += _late_sync(rp, rq, Par)
        out += _late_sync(rq, rp, lambda a, b: Par(b, a))
        return out
    if isinstance(p, Res):
        return _late_res(p.bind, _late(p.cont, avoid), avoid)
    if isinstance(p, Bang):
        return replication_late(p, _late(p.cont, avoid))
    raise TypeError(p)


def _lift(r, wrap: Callable[[Agent], Agent]):
    if isinstance(r, Bound):
        return Bound(r.subj, r.bind, wrap(r.deriv))
    if isinstance(r, Free):
        return Free(r.act, wrap(r.deriv))
    if isinstance(r, BoundE):
        return BoundE(r.chan, r.bind, wrap(r.deriv))
    return FreeE(r.act, wrap(r.deriv))


def _late_sync(ins: list, outs: list, join: Callable[[Agent, Agent], Agent]) -> list:
    """Comm and Close with the input taken from ``ins``; ``join`` builds the pair."""
    res = []
    for r1 in ins:
        if not (isinstance(r1, Bound) and r1.is_input):
            continue
        for r2 in outs:
            if isinstance(r2, Free) and isinstance(r2.act, OutputA) and r2.act.chan == r1.chan:
                res.append(Free(TAU, join(substitute(r1.deriv, r2.act.msg, r1.bind), r2.deriv)))
            elif isinstance(r2, Bound) and not r2.is_input and r2.chan == r1.chan:
                y = r2.bind
                res.append(Free(TAU, Res(y, join(substitute(r1.deriv, y, r1.bind), r2.deriv))))
    return res


def _late_res(y: Name, rs: list, avoid: frozenset) -> list:
    out = []
    for r in rs:
        if isinstance(r, Free):
            a = r.act
            if isinstance(a, TauA):
                out.append(Free(TAU, Res(y, r.deriv)))
            elif a.chan == y:
                continue
            elif a.msg == y:
                z = fresh_name(avoid, _hint(y, "y"))
                out.append(Bound(BoundOutputS(a.chan), z, swap_agent(y, z, r.deriv)))
            else:
                out.append(Free(a, Res(y, r.deriv)))
        elif r.chan != y:
            out.append(Bound(r.subj, r.bind, Res(y, r.deriv)))
    return out


def replication_late(p: Bang, rs: list) -> list:
    """Minimal-depth transitions of ``!P`` given the transitions ``rs`` of ``P``."""
    out = [_lift(r, lambda d: Par(d, p)) for r in rs]
    out += [_lift(r, lambda d: Par(d, p)) for r in _late_sync(rs, rs, Par)]
    return out


def late_transitions(p: Agent, avoid: Iterable[Name] = ()) -> list:
    """All late residuals of ``p`` up to alpha, in canonical action order."""
    av = frozenset(avoid) | all_names(p)
    return _dedup(_late(p, av))


# ---------------------------------------------------------------------------
# early system


def _early(p: Agent, inputs: frozenset, avoid: frozenset) -> list:
    if isinstance(p, Nil):
        return []
    if isinstance(p, Tau):
        return [FreeE(TAU, p.cont)]
    if isinstance(p, Output):
        return [FreeE(OutputA(p.chan, p.msg), p.cont)]
    if isinstance(p, Input):
        return [FreeE(InputE(p.chan, u), substitute(p.cont, u, p.bind)) for u in sorted(inputs, key=name_key)]
    if isinstance(p, Match):
        return _early(p.cont, inputs, avoid) if p.left == p.right else []
    if isinstance(p, Mismatch):
        return _early(p.cont, inputs, avoid) if p.left != p.right else []
    if isinstance(p, Sum):
        return _early(p.left, inputs, avoid) + _early(p.right, inputs, avoid)
    if isinstance(p, Par):
        P, Q = p.left, p.right
        rp, rq = _early(P, inputs, avoid), _early(Q, inputs, avoid)
        out = [_lift(r, lambda d: Par(d, Q)) for r in rp]
        out += [_lift(r, lambda d: Par(P, d)) for r in rq]
        out += _early_sync(P, rq, inputs, avoid, Par)
        out += _early_sync(Q, rp, inputs, avoid, lambda a, b: Par(b, a))
        return out
    if isinstance(p, Res):
        y, body = p.bind, p.cont
        if y in inputs:
            # received names must not be captured by this binder
            y2 = fresh_name(avoid, _hint(y, "y"))
            body = swap_agent(y, y2, body)
            y, avoid = y2, avoid | {y2}
        out = []
        for r in _early(body, inputs, avoid):
            if isinstance(r, FreeE):
                a = r.act
                if isinstance(a, TauA):
                    out.append(FreeE(TAU, Res(y, r.deriv)))
                elif a.chan == y:
                    continue
                elif isinstance(a, OutputA) and a.msg == y:
                    z = fresh_name(avoid, _hint(y, "y"))
                    out.append(BoundE(a.chan, z, swap_agent(y, z, r.deriv)))
                elif a.msg != y:
                    out.append(FreeE(a, Res(y, r.deriv)))
            elif r.chan != y:
                out.append(BoundE(r.chan, r.bind, Res(y, r.deriv)))
        return out
    if isinstance(p, Bang):
        rs = _early(p.cont, inputs, avoid)
        out = [_lift(r, lambda d: Par(d, p)) for r in rs]
        out += [_lift(r, lambda d: Par(d, p)) for r in _early_sync(p.cont, rs, inputs, avoid, Par)]
        return out
    raise TypeError(p)


def _early_sync(receiver: Agent, senders: list, inputs: frozenset, avoid: frozenset, join) -> list:
    """Comm/Close where ``receiver`` inputs what a residual in ``senders`` emits."""
    wanted = set()
    for r in senders:
        if isinstance(r, FreeE) and isinstance(r.act, OutputA):
            wanted.add(r.act.msg)
        elif isinstance(r, BoundE):
            wanted.add(r.bind)
    if not wanted:
        return []
    ext = inputs | wanted
    received = {}
    for r in _early(receiver, ext, avoid | wanted):
        if isinstance(r, FreeE) and isinstance(r.act, InputE):
            received.setdefault((r.act.chan, r.act.msg), []).append(r.deriv)
    out = []
    for r in senders:
        if isinstance(r, FreeE) and isinstance(r.act, OutputA):
            for d in received.get((r.act.chan, r.act.msg), ()):
                out.append(FreeE(TAU, join(d, r.deriv)))
        elif isinstance(r, BoundE):
            for d in received.get((r.chan, r.bind), ()):
                out.append(FreeE(TAU, Res(r.bind, join(d, r.deriv))))
    return out


def early_input_names(p: Agent, inputs: Iterable[Name] = (), avoid: Iterable[Name] = ()) -> frozenset:
    """``inputs`` plus ``fn(p)`` plus one designated fresh name."""
    base = frozenset(inputs) | free_names(p)
    return base | {fresh_name(base | frozenset(avoid), "w")}


def early_transitions(p: Agent, avoid: Iterable[Name] = (), inputs: Iterable[Name] = ()) -> list:
    """All early residuals of ``p`` up to alpha, in canonical action order."""
    avoid = frozenset(avoid)
    return early_transitions_over(p, early_input_names(p, inputs, avoid), avoid)


def early_transitions_over(p: Agent, names: Iterable[Name], avoid: Iterable[Name] = ()) -> list:
    """Early residuals with inputs instantiated over exactly ``names``."""
    names = frozenset(names)
    av = frozenset(avoid) | all_names(p) | names
    return _dedup(_early(p, names, av))
