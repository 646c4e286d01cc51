import random
from collections import Counter

from picalc.equivalence import struct_cong
from picalc.gen import alpha_variant, random_agent, random_agents, related_pair
from picalc.laws import LAWS, check_law_instance, laws_suite
from picalc.parser import parse_agent as P
from picalc.syntax import Bang, Nil, alpha_eq, subterms


def test_generator_is_seeded():
    assert random_agents(5, 20, 6) == random_agents(5, 20, 6)
    assert random_agents(5, 20, 6) != random_agents(6, 20, 6)


def test_generator_respects_size_and_replication_depth():
    for p in random_agents(11, 300, 7):
        assert sum(1 for _ in subterms(p)) <= 7
        for s in subterms(p):
            if isinstance(s, Bang):
                assert not any(isinstance(t, Bang) for t in subterms(s.cont))
    assert not any(isinstance(s, Bang) for p in random_agents(11, 300, 7, bang=False) for s in subterms(p))


def test_generator_covers_every_constructor():
    kinds = Counter(type(s).__name__ for p in random_agents(2, 400, 7) for s in subterms(p))
    assert set(kinds) == {"Nil", "Tau", "Input", "Output", "Match", "Mismatch", "Sum", "Par", "Res", "Bang"}


def test_alpha_variant_renames_binders():
    p = P("a(x).(^y)x!y.0")
    q = alpha_variant(p, random.Random(0))
    assert alpha_eq(p, q) and q.bind != "x"


def test_related_pairs_are_deterministic():
    a = [related_pair(random.Random(4), 5) for _ in range(3)]
    b = [related_pair(random.Random(4), 5) for _ in range(3)]
    assert a == b


def test_every_law_has_an_instance_generator():
    rng = random.Random(0)
    p, q, r = P("a!b.0"), P("tau.0"), P("c(x).0")
    for name, law in LAWS.items():
        lhs, rhs = law(rng, p, q, r)
        assert struct_cong(lhs, rhs).equivalent, name


def test_check_law_instance_statuses():
    assert check_law_instance(P("a!b.0 | 0"), P("a!b.0"))[0] == "pass"
    assert check_law_instance(P("!tau.0"), P("tau.0 | !tau.0"))[0] == "up-to"
    status, v = check_law_instance(P("a!b.0"), P("b!a.0"))
    assert status == "fail" and v.unknown


def test_small_suite_reports_every_law():
    rep = laws_suite(2, 3, 4, lattice=True)
    assert [l.name for l in rep.laws] == list(LAWS)
    assert rep.ok and rep.lattice_pairs == 3
