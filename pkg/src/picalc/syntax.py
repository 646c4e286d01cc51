"""Agents of the monadic pi-calculus, identified up to alpha-equivalence.

Terms carry concrete binder names.  ``alpha_eq`` decides alpha-equivalence
structurally; ``canonicalize`` picks one representative per class by renaming
binders to the reserved atoms ``#0, #1, ...`` in left-to-right order.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .nominal import (
    RESERVED_PREFIX,
    Name,
    Swap,
    fresh_name,
    is_reserved,
    swap_name,
)


class Agent:
    # hash and size are cached: agents are immutable and hashed constantly
    __slots__ = ("_hash", "_size")

    def map_names(self, f: Callable[[Name], Name]) -> "Agent":
        raise NotImplementedError

    def support(self) -> frozenset:
        return free_names(self)


@dataclass(frozen=True, slots=True)
class Nil(Agent):
    def map_names(self, f):
        return self


@dataclass(frozen=True, slots=True)
class Tau(Agent):
    cont: Agent

    def map_names(self, f):
        return Tau(self.cont.map_names(f))


@dataclass(frozen=True, slots=True)
class Input(Agent):
    chan: Name
    bind: Name
    cont: Agent

    def map_names(self, f):
        return Input(f(self.chan), f(self.bind), self.cont.map_names(f))


@dataclass(frozen=True, slots=True)
class Output(Agent):
    chan: Name
    msg: Name
    cont: Agent

    def map_names(self, f):
        return Output(f(self.chan), f(self.msg), self.cont.map_names(f))


@dataclass(frozen=True, slots=True)
class Match(Agent):
    left: Name
    right: Name
    cont: Agent

    def map_names(self, f):
        return Match(f(self.left), f(self.right), self.cont.map_names(f))


@dataclass(frozen=True, slots=True)
class Mismatch(Agent):
    left: Name
    right: Name
    cont: Agent

    def map_names(self, f):
        return Mismatch(f(self.left), f(self.right), self.cont.map_names(f))


@dataclass(frozen=True, slots=True)
class Sum(Agent):
    left: Agent
    right: Agent

    def map_names(self, f):
        return Sum(self.left.map_names(f), self.right.map_names(f))


@dataclass(frozen=True, slots=True)
class Par(Agent):
    left: Agent
    right: Agent

    def map_names(self, f):
        return Par(self.left.map_names(f), self.right.map_names(f))


@dataclass(frozen=True, slots=True)
class Res(Agent):
    bind: Name
    cont: Agent

    def map_names(self, f):
        return Res(f(self.bind), self.cont.map_names(f))


@dataclass(frozen=True, slots=True)
class Bang(Agent):
    cont: Agent

    def map_names(self, f):
        return Bang(self.cont.map_names(f))


def _cached_hash(self) -> int:
    try:
        return self._hash
    except AttributeError:
        h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
        object.__setattr__(self, "_hash", h)
        return h


for _cls in (Nil, Tau, Input, Output, Match, Mismatch, Sum, Par, Res, Bang):
    _cls.__hash__ = _cached_hash

NIL = Nil()

SubstPair = tuple  # (new, old): read "new for old"
SubstChain = Sequence  # of SubstPair, applied left to right


def size(p: Agent) -> int:
    try:
        return p._size
    except AttributeError:
        pass
    if isinstance(p, Nil):
        n = 1
    elif isinstance(p, (Sum, Par)):
        n = 1 + size(p.left) + size(p.right)
    else:
        n = 1 + size(p.cont)
    object.__setattr__(p, "_size", n)
    return n


@lru_cache(maxsize=1 << 16)
def free_names(p: Agent) -> frozenset:
    if isinstance(p, Nil):
        return frozenset()
    if isinstance(p, Tau) or isinstance(p, Bang):
        return free_names(p.cont)
    if isinstance(p, Input):
        return (free_names(p.cont) - {p.bind}) | {p.chan}
    if isinstance(p, Output):
        return free_names(p.cont) | {p.chan, p.msg}
    if isinstance(p, (Match, Mismatch)):
        return free_names(p.cont) | {p.left, p.right}
    if isinstance(p, (Sum, Par)):
        return free_names(p.left) | free_names(p.right)
    if isinstance(p, Res):
        return free_names(p.cont) - {p.bind}
    raise TypeError(p)


@lru_cache(maxsize=1 << 16)
def all_names(p: Agent) -> frozenset:
    """Every atom occurring in ``p``, binding occurrences included."""
    if isinstance(p, Nil):
        return frozenset()
    if isinstance(p, (Tau, Bang)):
        return all_names(p.cont)
    if isinstance(p, Input):
        return all_names(p.cont) | {p.chan, p.bind}
    if isinstance(p, Output):
        return all_names(p.cont) | {p.chan, p.msg}
    if isinstance(p, (Match, Mismatch)):
        return all_names(p.cont) | {p.left, p.right}
    if isinstance(p, (Sum, Par)):
        return all_names(p.left) | all_names(p.right)
    if isinstance(p, Res):
        return all_names(p.cont) | {p.bind}
    raise TypeError(p)


def swap_agent(a: Name, b: Name, p: Agent) -> Agent:
    if a == b:
        return p
    s = Swap(a, b)
    return p.map_names(lambda n: swap_name(s, n))


def _abs_eq(x: Name, t: Agent, y: Name, u: Agent) -> bool:
    # [x].T = [y].U
    if x == y:
        return alpha_eq(t, u)
    return x not in free_names(u) and alpha_eq(t, swap_agent(x, y, u))


def abs_alpha_eq(x: Name, t: Agent, y: Name, u: Agent) -> bool:
    """Alpha-equivalence of the abstractions ``[x].t`` and ``[y].u``."""
    return _abs_eq(x, t, y, u)


def alpha_eq(p: Agent, q: Agent) -> bool:
    if p is q:
        return True
    if type(p) is not type(q):
        return False
    if isinstance(p, Nil):
        return True
    if isinstance(p, (Tau, Bang)):
        return alpha_eq(p.cont, q.cont)
    if isinstance(p, Output):
        return p.chan == q.chan and p.msg == q.msg and alpha_eq(p.cont, q.cont)
    if isinstance(p, (Match, Mismatch)):
        return p.left == q.left and p.right == q.right and alpha_eq(p.cont, q.cont)
    if isinstance(p, (Sum, Par)):
        return alpha_eq(p.left, q.left) and alpha_eq(p.right, q.right)
    if isinstance(p, Input):
        return p.chan == q.chan and _abs_eq(p.bind, p.cont, q.bind, q.cont)
    if isinstance(p, Res):
        return _abs_eq(p.bind, p.cont, q.bind, q.cont)
    raise TypeError(p)


def _reserved_floor(p: Agent) -> int:
    hi = -1
    for n in free_names(p):
        if is_reserved(n) and n[1:].isdigit():
            hi = max(hi, int(n[1:]))
    return hi + 1


@lru_cache(maxsize=1 << 16)
def canonicalize(p: Agent) -> Agent:
    counter = [_reserved_floor(p)]

    def fresh() -> Name:
        n = f"{RESERVED_PREFIX}{counter[0]}"
        counter[0] += 1
        return n

    def go(p: Agent, env: dict) -> Agent:
        r = lambda n: env.get(n, n)
        if isinstance(p, Nil):
            return p
        if isinstance(p, Tau):
            return Tau(go(p.cont, env))
        if isinstance(p, Bang):
            return Bang(go(p.cont, env))
        if isinstance(p, Output):
            return Output(r(p.chan), r(p.msg), go(p.cont, env))
        if isinstance(p, Match):
            return Match(r(p.left), r(p.right), go(p.cont, env))
        if isinstance(p, Mismatch):
            return Mismatch(r(p.left), r(p.right), go(p.cont, env))
        if isinstance(p, Sum):
            return Sum(go(p.left, env), go(p.right, env))
        if isinstance(p, Par):
            return Par(go(p.left, env), go(p.right, env))
        if isinstance(p, Input):
            chan = r(p.chan)
            b = fresh()
            return Input(chan, b, go(p.cont, {**env, p.bind: b}))
        if isinstance(p, Res):
            b = fresh()
            return Res(b, go(p.cont, {**env, p.bind: b}))
        raise TypeError(p)

    return go(p, {})


def substitute(p: Agent, new: Name, old: Name) -> Agent:
    """``p{new/old}``: replace free occurrences of ``old`` by ``new``, avoiding capture."""
    if new == old or old not in free_names(p):
        return p

    def s(n: Name) -> Name:
        return new if n == old else n

    def go(p: Agent) -> Agent:
        if old not in free_names(p):
            return p
        if isinstance(p, Tau):
            return Tau(go(p.cont))
        if isinstance(p, Bang):
            return Bang(go(p.cont))
        if isinstance(p, Output):
            return Output(s(p.chan), s(p.msg), go(p.cont))
        if isinstance(p, Match):
            return Match(s(p.left), s(p.right), go(p.cont))
        if isinstance(p, Mismatch):
            return Mismatch(s(p.left), s(p.right), go(p.cont))
        if isinstance(p, Sum):
            return Sum(go(p.left), go(p.right))
        if isinstance(p, Par):
            return Par(go(p.left), go(p.right))
        if isinstance(p, (Input, Res)):
            bind, cont = p.bind, p.cont
            if bind == old:
                # shadowed: nothing free below
                if isinstance(p, Input):
                    return Input(s(p.chan), bind, cont)
                return p
            if bind == new:
                # old is free below (checked above), so the binder would capture new
                nb = fresh_name(all_names(cont) | {new, old}, bind)
                cont = swap_agent(bind, nb, cont)
                bind = nb
            if isinstance(p, Input):
                return Input(s(p.chan), bind, go(cont))
            return Res(bind, go(cont))
        raise TypeError(p)

    return go(p)


def apply_chain(p: Agent, chain: Iterable[SubstPair]) -> Agent:
    for new, old in chain:
        p = substitute(p, new, old)
    return p


def simultaneous_chain(mapping: dict, avoid: Iterable[Name] = ()) -> list:
    """A chain whose sequential effect is the simultaneous substitution ``mapping``.

    Sources are first parked on temporary fresh atoms so later pairs cannot
    rewrite names produced by earlier ones.
    """
    moves = {k: v for k, v in mapping.items() if k != v}
    if not moves:
        return []
    taken = set(avoid) | set(moves) | set(moves.values())
    temps = {}
    for k in sorted(moves):
        t = fresh_name(taken, "t")
        taken.add(t)
        temps[k] = t
    return [(temps[k], k) for k in sorted(moves)] + [(moves[k], temps[k]) for k in sorted(moves)]


def subterms(p: Agent):
    yield p
    if isinstance(p, (Sum, Par)):
        yield from subterms(p.left)
        yield from subterms(p.right)
    elif not isinstance(p, Nil):
        yield from subterms(p.cont)


def has_bang(p: Agent) -> bool:
    return any(isinstance(s, Bang) for s in subterms(p))
