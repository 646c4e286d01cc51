"""Normal forms for structural congruence.

Phase one pushes every restriction to its minimal scope: unused binders are
dropped, a binder over ``|`` or ``+`` only covers the operands linked to it
(binders sharing an operand are linked), and binders slide under match and
mismatch guards that do not mention them.  Operands of ``|`` and ``+`` are
flattened with ``0`` units removed.

Phase two makes the result independent of names and orders: binders are
renamed by nesting depth, adjacent restrictions are tried in every order, and
operands are sorted.  The unfolding law is not part of the normal form; see
``unfold_variants``.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from typing import Iterator

from .nominal import Name
from .syntax import (
    NIL,
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
    canonicalize,
    free_names,
    swap_agent,
)

MAX_BLOCK_ORDERS = 720  # every order of up to six adjacent binders

_RANK = {Nil: 0, Tau: 1, Input: 2, Output: 3, Match: 4, Mismatch: 5, Sum: 6, Par: 7, Res: 8, Bang: 9}


def _flatten(p: Agent, op: type) -> list:
    if isinstance(p, op):
        return _flatten(p.left, op) + _flatten(p.right, op)
    return [] if isinstance(p, Nil) else [p]


def _build(ops: list, op: type) -> Agent:
    if not ops:
        return NIL
    out = ops[0]
    for q in ops[1:]:
        out = op(out, q)
    return out


def _chain(binders: list, body: Agent) -> Agent:
    for b in reversed(binders):
        body = Res(b, body)
    return body


def _unchain(p: Agent) -> tuple[list, Agent]:
    binders = []
    while isinstance(p, Res):
        binders.append(p.bind)
        p = p.cont
    return binders, p


# ---------------------------------------------------------------------------
# phase one: minimal scopes


def _scope(p: Agent) -> Agent:
    if isinstance(p, Nil):
        return p
    if isinstance(p, Tau):
        return Tau(_scope(p.cont))
    if isinstance(p, Bang):
        return Bang(_scope(p.cont))
    if isinstance(p, Input):
        return Input(p.chan, p.bind, _scope(p.cont))
    if isinstance(p, Output):
        return Output(p.chan, p.msg, _scope(p.cont))
    if isinstance(p, Match):
        return Match(p.left, p.right, _scope(p.cont))
    if isinstance(p, Mismatch):
        return Mismatch(p.left, p.right, _scope(p.cont))
    if isinstance(p, (Sum, Par)):
        op = type(p)
        return _build(_flatten(_scope(p.left), op) + _flatten(_scope(p.right), op), op)
    if isinstance(p, Res):
        binders, body = _unchain(p)
        return _push(binders, _scope(body))
    raise TypeError(p)


def _push(binders: list, body: Agent) -> Agent:
    """Minimal-scope form of ``(nu binders) body`` for an already scoped body."""
    inner, body = _unchain(body)
    binders = binders + inner
    fn = free_names(body)
    binders = [b for b in binders if b in fn]
    if not binders:
        return body
    if isinstance(body, (Par, Sum)):
        op = type(body)
        ops = _flatten(body, op)
        # union-find over operands linked by a shared binder
        parent = list(range(len(ops)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        owner = {}
        for i, q in enumerate(ops):
            for b in binders:
                if b in free_names(q):
                    if b in owner:
                        parent[find(i)] = find(owner[b])
                    else:
                        owner[b] = i
        groups: dict = {}
        for i in range(len(ops)):
            groups.setdefault(find(i), []).append(i)
        out = []
        for idxs in groups.values():
            members = [ops[i] for i in idxs]
            bs = [b for b in binders if b in owner and find(owner[b]) == find(idxs[0])]
            if not bs:
                out.extend(members)
            elif len(members) == 1:
                out.extend(_flatten(_push(bs, members[0]), op))
            else:
                out.append(_chain(bs, _build(members, op)))
        return _build(out, op)
    if isinstance(body, (Match, Mismatch)):
        guard = {body.left, body.right}
        outer = [b for b in binders if b in guard]
        under = [b for b in binders if b not in guard]
        if under:
            body = type(body)(body.left, body.right, _push(under, body.cont))
        return _chain(outer, body)
    return _chain(binders, body)


# ---------------------------------------------------------------------------
# phase two: name- and order-independent representative


def _slot(depth: int) -> Name:
    return f"#d{depth}"


def _sort_key(p: Agent) -> tuple:
    return (_RANK[type(p)], repr(p))


def _order(p: Agent, depth: int) -> Agent:
    if isinstance(p, Nil):
        return p
    if isinstance(p, Tau):
        return Tau(_order(p.cont, depth))
    if isinstance(p, Bang):
        return Bang(_order(p.cont, depth))
    if isinstance(p, Output):
        return Output(p.chan, p.msg, _order(p.cont, depth))
    if isinstance(p, Match):
        return Match(p.left, p.right, _order(p.cont, depth))
    if isinstance(p, Mismatch):
        return Mismatch(p.left, p.right, _order(p.cont, depth))
    if isinstance(p, Input):
        s = _slot(depth)
        return Input(p.chan, s, _order(_rename(p.bind, s, p.cont), depth + 1))
    if isinstance(p, (Sum, Par)):
        op = type(p)
        ops = sorted((_order(q, depth) for q in _flatten(p, op)), key=_sort_key)
        return _build(ops, op)
    if isinstance(p, Res):
        binders, body = _unchain(p)
        best = None
        for k, perm in enumerate(permutations(binders)):
            if k >= MAX_BLOCK_ORDERS:
                break
            slots = [_slot(depth + i) for i in range(len(binders))]
            b = body
            # rename through temporaries so overlapping slot names cannot clash
            temps = [f"#t{depth}_{i}" for i in range(len(binders))]
            for x, t in zip(perm, temps):
                b = _rename(x, t, b)
            for t, s in zip(temps, slots):
                b = _rename(t, s, b)
            cand = _chain(slots, _order(b, depth + len(binders)))
            if best is None or repr(cand) < repr(best):
                best = cand
        return best
    raise TypeError(p)


def _rename(x: Name, y: Name, p: Agent) -> Agent:
    # y is never free in p here, so swapping is a capture-free renaming
    return swap_agent(x, y, p)


@lru_cache(maxsize=1 << 15)
def struct_normal_form(p: Agent) -> Agent:
    """Canonical representative of ``p`` modulo the laws other than unfolding."""
    return canonicalize(_order(_scope(canonicalize(p)), 0))


# ---------------------------------------------------------------------------
# unfolding and absorption


def _unfold_once(p: Agent) -> Iterator[Agent]:
    if isinstance(p, Bang):
        yield Par(p.cont, p)
    if isinstance(p, Nil):
        return
    if isinstance(p, (Sum, Par)):
        for l in _unfold_once(p.left):
            yield type(p)(l, p.right)
        for r in _unfold_once(p.right):
            yield type(p)(p.left, r)
        return
    for c in _unfold_once(p.cont):
        if isinstance(p, Tau):
            yield Tau(c)
        elif isinstance(p, Bang):
            yield Bang(c)
        elif isinstance(p, Input):
            yield Input(p.chan, p.bind, c)
        elif isinstance(p, Output):
            yield Output(p.chan, p.msg, c)
        elif isinstance(p, Match):
            yield Match(p.left, p.right, c)
        elif isinstance(p, Mismatch):
            yield Mismatch(p.left, p.right, c)
        elif isinstance(p, Res):
            yield Res(p.bind, c)


def unfold_variants(p: Agent, rounds: int = 2, cap: int = 256) -> set:
    """Normal forms of ``p`` after at most ``rounds`` unfoldings ``!R -> R | !R``."""
    seen = {struct_normal_form(p)}
    frontier = [p]
    for _ in range(rounds):
        nxt = []
        for q in frontier:
            for u in _unfold_once(q):
                nf = struct_normal_form(u)
                if nf not in seen and len(seen) < cap:
                    seen.add(nf)
                    nxt.append(u)
        frontier = nxt
    return seen


def _absorb(p: Agent) -> Agent:
    """Rewrite ``R | !R`` to ``!R`` bottom-up on a normal form.

    ``R`` may itself be a parallel composition whose operands sit flattened
    among the siblings of ``!R``.
    """
    if isinstance(p, Nil):
        return p
    if isinstance(p, (Sum, Par)):
        op = type(p)
        ops = [_absorb(q) for q in _flatten(p, op)]
        if op is Par:
            ops = _absorb_replicas(ops)
        return _build(ops, op)
    if isinstance(p, Tau):
        return Tau(_absorb(p.cont))
    if isinstance(p, Bang):
        return Bang(_absorb(p.cont))
    if isinstance(p, Input):
        return Input(p.chan, p.bind, _absorb(p.cont))
    if isinstance(p, Output):
        return Output(p.chan, p.msg, _absorb(p.cont))
    if isinstance(p, Match):
        return Match(p.left, p.right, _absorb(p.cont))
    if isinstance(p, Mismatch):
        return Mismatch(p.left, p.right, _absorb(p.cont))
    if isinstance(p, Res):
        return Res(p.bind, _absorb(p.cont))
    raise TypeError(p)


def _absorb_replicas(ops: list) -> list:
    keys = [canonicalize(q) for q in ops]
    changed = True
    while changed:
        changed = False
        for q in ops:
            if not isinstance(q, Bang):
                continue
            need = [canonicalize(c) for c in _flatten(q.cont, Par)]
            if not need:
                continue
            idx = []
            for k in need:
                hits = [i for i, have in enumerate(keys) if have == k and i not in idx and ops[i] is not q]
                if not hits:
                    break
                idx.append(hits[0])
            else:
                ops = [o for i, o in enumerate(ops) if i not in idx]
                keys = [k for i, k in enumerate(keys) if i not in idx]
                changed = True
                break
    return ops


@lru_cache(maxsize=1 << 15)
def struct_reduce(p: Agent) -> Agent:
    """Normal form followed by absorption of unfolded replicas, to a fixpoint."""
    q = struct_normal_form(p)
    for _ in range(8):
        r = struct_normal_form(_absorb(q))
        if r == q:
            break
        q = r
    return q
