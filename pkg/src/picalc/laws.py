"""Law suite: structural-congruence laws and the inclusion lattice on random agents.

Each law instance must be recognised by ``struct_cong`` and be strongly late
bisimilar.  Replication makes the unfolding law infinite-state for the plain
checker, so when that check runs out of room it is retried as a bisimulation
up to structural congruence and counted separately.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .equivalence import (
    CheckConfig,
    DEFAULT_CONFIG,
    EquivKind,
    check,
    lattice_violations,
    relate,
    struct_cong,
)
from .gen import alpha_variant, random_agent, related_pair
from .nominal import fresh_name
from .syntax import NIL, Agent, Bang, Match, Mismatch, Par, Res, Sum, free_names
from .weak import Session


def _fresh_for(rng: random.Random, p: Agent) -> str:
    pool = [n for n in ("x", "y", "c") if n not in free_names(p)]
    return rng.choice(pool) if pool else fresh_name(free_names(p), "x")


def _res_par(rng, p, q, r):
    x = _fresh_for(rng, p)
    return Res(x, Par(p, q)), Par(p, Res(x, q))


def _res_sum(rng, p, q, r):
    x = _fresh_for(rng, p)
    return Res(x, Sum(p, q)), Sum(p, Res(x, q))


def _res_guard(op):
    def law(rng, p, q, r):
        u, v = rng.choice("abc"), rng.choice("abc")
        x = rng.choice([n for n in ("x", "y", "c") if n not in (u, v)])
        return Res(x, op(u, v, p)), op(u, v, Res(x, p))

    return law


def _res_res(rng, p, q, r):
    x, y = rng.sample(("x", "y", "a"), 2)
    return Res(x, Res(y, p)), Res(y, Res(x, p))


LAWS: dict = {
    "alpha": lambda rng, p, q, r: (p, alpha_variant(p, rng)),
    "par-comm": lambda rng, p, q, r: (Par(p, q), Par(q, p)),
    "par-assoc": lambda rng, p, q, r: (Par(Par(p, q), r), Par(p, Par(q, r))),
    "par-unit": lambda rng, p, q, r: (Par(p, NIL), p),
    "sum-comm": lambda rng, p, q, r: (Sum(p, q), Sum(q, p)),
    "sum-assoc": lambda rng, p, q, r: (Sum(Sum(p, q), r), Sum(p, Sum(q, r))),
    "sum-unit": lambda rng, p, q, r: (Sum(p, NIL), p),
    "unfold": lambda rng, p, q, r: (Bang(p), Par(p, Bang(p))),
    "res-nil": lambda rng, p, q, r: (Res(rng.choice("xyc"), NIL), NIL),
    "res-par": _res_par,
    "res-sum": _res_sum,
    "res-match": _res_guard(Match),
    "res-mismatch": _res_guard(Mismatch),
    "res-res": _res_res,
}


@dataclass
class LawReport:
    name: str
    passed: int = 0
    failed: int = 0
    unknown: int = 0
    # instances settled only by the up-to-congruence retry
    up_to: int = 0
    first_failure: Optional[tuple] = None

    @property
    def ok(self) -> bool:
        return self.failed == 0


@dataclass
class SuiteReport:
    laws: list = field(default_factory=list)
    lattice_pairs: int = 0
    lattice_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(l.ok for l in self.laws) and not self.lattice_violations


def check_law_instance(lhs: Agent, rhs: Agent, cfg: CheckConfig = DEFAULT_CONFIG) -> tuple:
    """``(status, verdict)`` with status one of pass, up-to, fail, unknown."""
    sc = struct_cong(lhs, rhs)
    v = check(lhs, rhs, EquivKind.STRONG_LATE, cfg)
    status = "pass"
    if v.unknown and v.reason.startswith("LimitExceeded"):
        v = check(lhs, rhs, EquivKind.STRONG_LATE, CheckConfig(cfg.limits, cfg.extra_inputs, cfg.max_subst_domain, True))
        status = "up-to"
    if not sc.equivalent or v.inequivalent:
        return "fail", sc if not sc.equivalent else v
    if v.unknown:
        return "unknown", v
    return status, v


def laws_suite(
    seed: int, count: int, size: int, cfg: CheckConfig = DEFAULT_CONFIG, lattice: bool = True,
    progress: Optional[Callable[[str], None]] = None,
) -> SuiteReport:
    rng = random.Random(seed)
    report = SuiteReport()
    for name, law in LAWS.items():
        rep = LawReport(name)
        for _ in range(count):
            p, q, r = (random_agent(rng, rng.randint(1, size)) for _ in range(3))
            lhs, rhs = law(rng, p, q, r)
            status, v = check_law_instance(lhs, rhs, cfg)
            if status == "fail":
                rep.failed += 1
                if rep.first_failure is None:
                    rep.first_failure = (lhs, rhs, v)
            elif status == "unknown":
                rep.unknown += 1
            else:
                rep.passed += 1
                rep.up_to += status == "up-to"
        report.laws.append(rep)
        if progress:
            progress(name)
    if lattice:
        session = Session(cfg.limits)
        for _ in range(count):
            p, q = related_pair(rng, size)
            table = relate(p, q, cfg, session=session)
            report.lattice_pairs += 1
            for bad in lattice_violations(table):
                report.lattice_violations.append((p, q, bad))
    return report
