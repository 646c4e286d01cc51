"""Names, swappings and permutations.

Names are plain interned strings.  A permutation is a tuple of swaps and acts
right-to-left: the last swap is applied first.  Anything that contains names
can be permuted as long as it is a name, a collection of permutable values, or
an object exposing ``map_names(f)`` (a homomorphic map over *every* name
occurrence, binding ones included).
"""
from __future__ import annotations

import sys
from typing import Any, Callable, Iterable, NamedTuple, Optional

Name = str

RESERVED_PREFIX = "#"
PRIME = "'"


def intern_name(s: str) -> Name:
    return sys.intern(s)


def is_reserved(n: Name) -> bool:
    return n.startswith(RESERVED_PREFIX)


def name_key(n: Name) -> tuple[str, int]:
    """Canonical order: by base string, then by number of prime decorations."""
    base = n.rstrip(PRIME)
    return base, len(n) - len(base)


class Swap(NamedTuple):
    first: Name
    second: Name


Permutation = tuple  # tuple[Swap, ...]


def swap_name(s: Swap, n: Name) -> Name:
    a, b = s
    if n == a:
        return b
    if n == b:
        return a
    return n


def _perm_fn(p: Iterable[Swap]) -> Callable[[Name], Name]:
    swaps = tuple(reversed(tuple(p)))

    def f(n: Name) -> Name:
        for s in swaps:
            n = swap_name(s, n)
        return n

    return f


def map_names(f: Callable[[Name], Name], t: Any) -> Any:
    if isinstance(t, str):
        return f(t)
    if isinstance(t, frozenset):
        return frozenset(map_names(f, x) for x in t)
    if isinstance(t, set):
        return {map_names(f, x) for x in t}
    if isinstance(t, tuple) and not hasattr(t, "map_names"):
        return tuple(map_names(f, x) for x in t)
    if isinstance(t, list):
        return [map_names(f, x) for x in t]
    if t is None:
        return None
    if hasattr(t, "map_names"):
        return t.map_names(f)
    raise TypeError(f"cannot permute value of type {type(t).__name__}")


def apply_perm(p: Iterable[Swap], t: Any) -> Any:
    """Apply every swap of ``p`` to ``t``, beginning with the last one."""
    p = tuple(p)
    if not p:
        return t
    return map_names(_perm_fn(p), t)


def invert(p: Iterable[Swap]) -> Permutation:
    return tuple(reversed(tuple(p)))


def compose(p: Iterable[Swap], q: Iterable[Swap]) -> Permutation:
    """``apply_perm(compose(p, q), t) == apply_perm(p, apply_perm(q, t))``."""
    return tuple(p) + tuple(q)


def support(t: Any) -> frozenset:
    """Names a permutation can use to change ``t`` (free names, for terms)."""
    if isinstance(t, str):
        return frozenset((t,))
    if isinstance(t, (set, frozenset, list)) or (isinstance(t, tuple) and not hasattr(t, "support")):
        out: set = set()
        for x in t:
            out |= support(x)
        return frozenset(out)
    if t is None:
        return frozenset()
    if hasattr(t, "support"):
        return t.support()
    raise TypeError(f"no support defined for {type(t).__name__}")


def is_fresh(a: Name, t: Any) -> bool:
    return a not in support(t)


def fresh_name(avoid: Iterable[Name], hint: Optional[Name] = None) -> Name:
    """Deterministic fresh atom.

    Decorates ``hint`` with primes until it leaves ``avoid``.  Without a usable
    hint the least unused atom in canonical order is returned, which is ``a``
    with the fewest primes.
    """
    avoid = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    if hint is None or is_reserved(hint):
        hint = "a"
    n = hint
    while n in avoid:
        n += PRIME
    return intern_name(n)


def fresh_names(k: int, avoid: Iterable[Name], hint: Optional[Name] = None) -> list[Name]:
    taken = set(avoid)
    out = []
    for _ in range(k):
        n = fresh_name(taken, hint)
        taken.add(n)
        out.append(n)
    return out
