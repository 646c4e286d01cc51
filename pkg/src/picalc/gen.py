"""Seeded random agents for the law suite and the property tests.

Constructor weights: leaf 20%, prefixes 40%, binary operators 25%,
restriction 10%, replication 5%.  Replication is never nested.
"""
from __future__ import annotations

import random
from typing import Optional, Sequence

from .nominal import Name, Swap, fresh_name
from .syntax import (
    NIL,
    Agent,
    Bang,
    Input,
    Match,
    Mismatch,
    Output,
    Par,
    Res,
    Sum,
    Tau,
    all_names,
    canonicalize,
    free_names,
    substitute,
    swap_agent,
)

NAMES: tuple = ("a", "b", "c", "x", "y")

_KINDS = ("leaf", "prefix", "binary", "res", "bang")
_WEIGHTS = (20, 40, 25, 10, 5)
_PREFIXES = ("tau", "input", "output", "match", "mismatch")
_PREFIX_WEIGHTS = (8, 12, 12, 4, 4)


def random_agent(
    rng: random.Random, size: int, names: Sequence[Name] = NAMES, bang: bool = True
) -> Agent:
    """An agent with at most ``size`` constructors; ``bang=False`` excludes replication."""
    if size <= 1:
        return NIL
    kinds, weights = _KINDS, _WEIGHTS
    if not bang:
        kinds, weights = _KINDS[:-1], _WEIGHTS[:-1]
    kind = rng.choices(kinds, weights)[0]
    pick = lambda: rng.choice(names)
    if kind == "leaf":
        return NIL
    if kind == "prefix":
        pre = rng.choices(_PREFIXES, _PREFIX_WEIGHTS)[0]
        cont = random_agent(rng, size - 1, names, bang)
        if pre == "tau":
            return Tau(cont)
        if pre == "input":
            return Input(pick(), pick(), cont)
        if pre == "output":
            return Output(pick(), pick(), cont)
        if pre == "match":
            return Match(pick(), pick(), cont)
        return Mismatch(pick(), pick(), cont)
    if kind == "binary":
        if size < 3:
            return NIL
        left = rng.randint(1, size - 2)
        op = rng.choice((Sum, Par))
        return op(random_agent(rng, left, names, bang), random_agent(rng, size - 1 - left, names, bang))
    if kind == "res":
        return Res(pick(), random_agent(rng, size - 1, names, bang))
    return Bang(random_agent(rng, size - 1, names, bang=False))


def random_agents(seed: int, count: int, size: int, bang: bool = True) -> list:
    rng = random.Random(seed)
    return [random_agent(rng, rng.randint(1, size), bang=bang) for _ in range(count)]


def distinct_agents(seed: int, count: int, size: int, bang: bool = True, max_draws: int = 100000) -> list:
    """``count`` pairwise non-alpha-equivalent agents drawn at the full size budget."""
    rng = random.Random(seed)
    seen, out = set(), []
    for _ in range(max_draws):
        if len(out) == count:
            break
        p = random_agent(rng, size, bang=bang)
        key = canonicalize(p)
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def random_permutation(rng: random.Random, names: Sequence[Name] = NAMES, length: int = 3) -> tuple:
    pool = list(names) + ["d", "e"]
    return tuple(Swap(rng.choice(pool), rng.choice(pool)) for _ in range(length))


def alpha_variant(p: Agent, rng: Optional[random.Random] = None) -> Agent:
    """``p`` with every binder renamed to a new atom (an alpha-equivalent agent)."""
    taken = set(all_names(p))

    def go(q: Agent) -> Agent:
        if isinstance(q, (Input, Res)):
            hint = rng.choice(("u", "v", "z")) if rng else "z"
            n = fresh_name(taken, hint)
            taken.add(n)
            body = go(swap_agent(q.bind, n, q.cont))
            return Input(q.chan, n, body) if isinstance(q, Input) else Res(n, body)
        if isinstance(q, (Sum, Par)):
            return type(q)(go(q.left), go(q.right))
        if isinstance(q, (Tau, Bang)):
            return type(q)(go(q.cont))
        if isinstance(q, Output):
            return Output(q.chan, q.msg, go(q.cont))
        if isinstance(q, (Match, Mismatch)):
            return type(q)(q.left, q.right, go(q.cont))
        return q

    return go(p)


def related_pair(rng: random.Random, size: int) -> tuple:
    """A pair biased towards interesting verdicts: equal, congruent, tau-padded or unrelated."""
    p = random_agent(rng, size)
    mode = rng.choice(("same", "alpha", "tau", "sum", "swap", "fresh", "mutate"))
    if mode == "same":
        return p, p
    if mode == "alpha":
        return p, alpha_variant(p, rng)
    if mode == "tau":
        return p, Tau(p)
    if mode == "sum":
        return p, Sum(p, p)
    if mode == "swap":
        q = random_agent(rng, size)
        return Par(p, q), Par(q, p)
    if mode == "mutate":
        fn = sorted(free_names(p))
        if fn:
            return p, substitute(p, rng.choice(NAMES), rng.choice(fn))
    return p, random_agent(rng, size)
