"""Acceptance suite: one test per criterion, seeded and sized for a laptop.

Each test prints a one-line summary (visible with ``pytest -s``) and asserts
the zero-violation contract of its criterion.
"""
import random
import subprocess
import sys

import pytest

from picalc import semantics as S
from picalc.equivalence import (
    CheckConfig,
    EquivKind,
    check,
    hennessy_classify,
    lattice_violations,
    relate,
)
from picalc.gen import distinct_agents, random_agent, random_permutation, related_pair
from picalc.laws import laws_suite
from picalc.nominal import apply_perm
from picalc.parser import parse_agent, print_agent
from picalc.syntax import Bang, Match, Mismatch, Output, Par, Res, Sum, Tau, alpha_eq
from picalc.weak import ExploreLimits, Session

import oracle

K = EquivKind
SEED = 20240601


def report(n, line):
    print(f"\ncriterion {n}: {line}")


def _same_residuals(xs, ys):
    return all(any(S.residual_alpha_eq(x, y) for y in ys) for x in xs) and all(
        any(S.residual_alpha_eq(x, y) for x in xs) for y in ys
    )


def test_criterion_01_late_lts_matches_brute_force_oracle():
    agents = distinct_agents(SEED, 600, 6, bang=False)
    mismatches = [p for p in agents if {oracle.residual_to_db(r) for r in S.late_transitions(p)} != oracle.late_set(p)]
    report(1, f"{len(agents)} distinct agents, {len(mismatches)} mismatches")
    assert len(agents) == 600
    assert not mismatches, print_agent(mismatches[0])


def test_criterion_02_tau_subsets_of_early_and_late_coincide():
    agents = distinct_agents(SEED + 2, 600, 6)
    bad = 0
    for p in agents:
        late = [r for r in S.late_transitions(p) if isinstance(r, S.Free) and isinstance(r.act, S.TauA)]
        early = [r for r in S.early_transitions(p) if isinstance(r, S.FreeE) and isinstance(r.act, S.TauA)]
        late_e = [S.FreeE(r.act, r.deriv) for r in late]
        bad += not _same_residuals(late_e, early)
    report(2, f"{len(agents)} agents, {bad} mismatches")
    assert bad == 0


def test_criterion_03_motivating_example():
    v = check(parse_agent("a(u).(^b)b!x.0"), parse_agent("a(x).0"), K.STRONG_LATE)
    report(3, v.status)
    assert v.equivalent


def test_criterion_04_structural_laws_imply_bisimilarity():
    rep = laws_suite(1, 50, 5, lattice=False)
    total = sum(l.passed + l.failed + l.unknown for l in rep.laws)
    failed = sum(l.failed for l in rep.laws)
    unknown = sum(l.unknown for l in rep.laws)
    up_to = sum(l.up_to for l in rep.laws)
    report(4, f"{len(rep.laws)} laws x 50 tuples, {failed} failures, {unknown} unknown, {up_to} settled up to congruence")
    assert failed == 0
    assert all(l.passed + l.failed + l.unknown >= 50 for l in rep.laws)
    assert unknown / total < 0.05


def test_criterion_05_inclusion_lattice():
    rng = random.Random(SEED + 5)
    session = Session()
    bad, unknown = [], 0
    for _ in range(300):
        p, q = related_pair(rng, 4)
        table = relate(p, q, session=session)
        unknown += any(v.unknown for v in table.values())
        bad += [(p, q, v) for v in lattice_violations(table)]
    report(5, f"300 pairs, {len(bad)} violations, {unknown} pairs with some Unknown")
    assert not bad


def test_criterion_06_strict_separations():
    tau0, nil = parse_agent("tau.0"), parse_agent("0")
    assert check(tau0, nil, K.WEAK_LATE).equivalent
    assert check(tau0, nil, K.STRONG_LATE).inequivalent
    assert check(tau0, nil, K.WEAK_LATE_CONG).inequivalent
    p1 = parse_agent("a(x).tau.0 + a(x).0")
    p2 = Sum(p1, parse_agent("a(x).[x=b]tau.0"))
    assert check(p1, p2, K.STRONG_EARLY).equivalent
    assert check(p1, p2, K.STRONG_LATE).inequivalent
    ctx = parse_agent("a!b.0")
    assert check(Sum(tau0, ctx), Sum(nil, ctx), K.WEAK_LATE).inequivalent
    report(6, "all separations hold")


def test_criterion_07_hennessy_lemma():
    session = Session()
    fixed = [("tau.0", "0"), ("0", "0"), ("a!b.0", "0")]
    for a, b in fixed:
        h = hennessy_classify(parse_agent(a), parse_agent(b), session=session)
        assert h.decisive and h.holds, (a, b)
    rng = random.Random(SEED + 7)
    decisive = violations = tries = 0
    while decisive < 200:
        tries += 1
        assert tries < 2000
        p, q = related_pair(rng, 4)
        h = hennessy_classify(p, q, session=session)
        if not h.decisive:
            continue
        decisive += 1
        violations += not h.holds
    report(7, f"{decisive} decisive pairs ({tries} sampled), {violations} violations")
    assert violations == 0


_BANG_CFG = CheckConfig(ExploreLimits(max_states=300, max_size=40), up_to_struct=True)


def _contexts(rng):
    r = random_agent(rng, 3, bang=False)
    x, u, v = (rng.choice("abcxy") for _ in range(3))
    return [
        ("tau", Tau),
        ("output", lambda t: Output(u, v, t)),
        ("match", lambda t: Match(u, v, t)),
        ("mismatch", lambda t: Mismatch(u, v, t)),
        ("sum", lambda t: Sum(t, r)),
        ("par", lambda t: Par(t, r)),
        ("res", lambda t: Res(x, t)),
        ("bang", Bang),
    ]


def _preservation(kind, skip, rng, need):
    found = violations = unknown = tries = 0
    while found < need:
        tries += 1
        assert tries < 20 * need
        p, q = related_pair(rng, 4)
        if not check(p, q, kind).equivalent:
            continue
        found += 1
        for name, ctx in _contexts(rng):
            if name in skip:
                continue
            v = check(ctx(p), ctx(q), kind, _BANG_CFG if name == "bang" else CheckConfig())
            violations += v.inequivalent
            unknown += v.unknown
    return found, violations, unknown


def test_criterion_08_preservation_theorems():
    rng = random.Random(SEED + 8)
    strong = _preservation(K.STRONG_LATE, (), rng, 200)
    weak = _preservation(K.WEAK_LATE, ("sum",), rng, 100)
    cong = _preservation(K.WEAK_LATE_CONG, (), rng, 100)
    chains = chain_bad = 0
    while chains < 100:
        p, q = related_pair(rng, 4)
        if not check(p, q, K.STRONG_LATE).equivalent:
            continue
        chains += 1
        for x in rng.sample("abcxy", rng.randint(1, 3)):
            p, q = Res(x, p), Res(x, q)
        chain_bad += not check(p, q, K.STRONG_LATE).equivalent
    report(
        8,
        f"strong {strong[0]} pairs/{strong[1]} violations/{strong[2]} unknown; "
        f"weak {weak[0]}/{weak[1]}/{weak[2]}; cong {cong[0]}/{cong[1]}/{cong[2]}; "
        f"restriction chains {chains}/{chain_bad}",
    )
    assert strong[1] == weak[1] == cong[1] == chain_bad == 0
    # the excluded contexts really are excluded
    assert check(Sum(parse_agent("tau.0"), parse_agent("a!b.0")), Sum(parse_agent("0"), parse_agent("a!b.0")), K.WEAK_LATE).inequivalent
    p, q = parse_agent("a(x).[x=b]tau.0"), parse_agent("a(x).0")
    assert check(p.cont, q.cont, K.STRONG_LATE).equivalent and check(p, q, K.STRONG_LATE).inequivalent


def test_criterion_09_equivariance():
    rng = random.Random(SEED + 9)
    agents = distinct_agents(SEED + 9, 200, 5)
    bad_t = 0
    for p in agents:
        base = S.late_transitions(p)
        for _ in range(3):
            pi = random_permutation(rng)
            bad_t += not _same_residuals(apply_perm(pi, base), S.late_transitions(apply_perm(pi, p)))
    bad_v = pairs = 0
    session = Session()
    for _ in range(100):
        p, q = related_pair(rng, 4)
        for kind in (K.STRONG_LATE, K.STRONG_EARLY, K.WEAK_LATE):
            v = check(p, q, kind, session=session)
            if v.unknown:
                continue
            pairs += 1
            for _ in range(3):
                pi = random_permutation(rng)
                w = check(apply_perm(pi, p), apply_perm(pi, q), kind, session=session)
                bad_v += not w.unknown and w.status != v.status
    report(9, f"transitions: {len(agents)} agents x 3 permutations, {bad_t} violations; verdicts: {pairs} x 3, {bad_v} violations")
    assert bad_t == bad_v == 0


def test_criterion_10_round_trip_and_cli_determinism():
    agents = distinct_agents(SEED + 10, 1200, 8)
    bad = [p for p in agents if not alpha_eq(parse_agent(print_agent(p)), p)]
    argv = [sys.executable, "-m", "picalc", "check", "a(x).tau.0 + a(x).0", "a(x).tau.0 + a(x).0 + a(x).[x=b]tau.0", "--json"]
    runs = [subprocess.run(argv, capture_output=True) for _ in range(2)]
    laws = [sys.executable, "-m", "picalc", "laws", "--seed", "1", "--count", "2", "--size", "4", "--json"]
    law_runs = [subprocess.run(laws, capture_output=True) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout and law_runs[0].stdout == law_runs[1].stdout
    report(10, f"{len(agents)} round-trips, {len(bad)} failures; CLI JSON byte-identical: {same}")
    assert not bad
    assert same and runs[0].returncode == 1 and runs[0].stdout
