"""Pair strategies biased towards related agents."""
from hypothesis import strategies as st

from picalc.syntax import Par, Sum, Tau

from strategies import agents


def related_pairs(max_leaves: int = 4, bang: bool = False):
    a = agents(max_leaves, bang)
    return st.one_of(
        st.tuples(a, a),
        a.map(lambda p: (p, p)),
        a.map(lambda p: (p, Sum(p, p))),
        a.map(lambda p: (p, Tau(p))),
        a.map(lambda p: (Tau(p), p)),
        st.tuples(a, a).map(lambda pq: (Par(*pq), Par(pq[1], pq[0]))),
        st.tuples(a, a).map(lambda pq: (Sum(*pq), Sum(pq[0], Tau(pq[1])))),
    )
