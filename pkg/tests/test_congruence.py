"""Congruence closure versus a naive fixpoint of the closure definitions."""
import itertools
import random

import setrel.ast as A
from setrel.congruence import CC

from closure_reference import naive_closure

INT_SET = A.set_sort(A.INT)
U = A.uninterpreted("U")
USET = A.set_sort(U)


def check_store_against_naive(eqs, diseqs, members, nonmembers):
    cc = CC()
    for a, b in eqs:
        cc.assert_eq(a, b)
    for a, b in diseqs:
        cc.assert_diseq(a, b)
    for e, s in members:
        cc.assert_member(e, s, True)
    for e, s in nonmembers:
        cc.assert_member(e, s, False)
    eq_q, dq_q, mem_q = naive_closure(eqs, diseqs, members, nonmembers)
    universe = set(cc.terms.values())
    for t1 in universe:
        for t2 in universe:
            if t1.sort == t2.sort:
                assert cc.equal(t1, t2) == eq_q(t1, t2), (t1, t2)
                assert cc.query_diseq(t1, t2) == dq_q(t1, t2), (t1, t2)
    elems = [t for t in universe if not t.sort.is_set]
    sets = [t for t in universe if t.sort.is_set]
    for e in elems:
        for s in sets:
            if s.sort.elem == e.sort:
                assert cc.query_member(e, s, True) == mem_q(e, s, True)
                assert cc.query_member(e, s, False) == mem_q(e, s, False)


def test_tuple_equality_decomposes():
    a, b, c, d = (A.var(n, U) for n in "abcd")
    cc = CC()
    cc.assert_eq(A.tuple_cons(a, b), A.tuple_cons(c, d))
    assert cc.equal(a, c)
    assert cc.equal(b, d)


def test_transitivity():
    a, b, c = (A.var(n, A.INT) for n in "abc")
    cc = CC()
    cc.assert_eq(a, b)
    cc.assert_eq(b, c)
    assert cc.equal(a, c)


def test_membership_modulo_congruence():
    e, e2 = A.var("e", A.INT), A.var("e2", A.INT)
    s, s2 = A.var("s", INT_SET), A.var("s2", INT_SET)
    cc = CC()
    cc.assert_member(e2, s, True)
    cc.assert_eq(e, e2)
    cc.assert_eq(s, s2)
    assert cc.query_member(e, s2, True)


def test_reflexive_query_on_fresh_index():
    cc = CC()
    x = A.var("x", A.INT)
    assert cc.equal(x, x)


def test_marker_modulo_congruence():
    lam = A.mk_lam([("x", A.INT)], A.gt(A.var("x", A.INT), A.intconst(0)))
    e, e2 = A.var("me", A.INT), A.var("me2", A.INT)
    cc = CC()
    cc.add_marker(lam, e2, True)
    cc.assert_eq(e, e2)
    assert cc.query_marker(lam, e, True)
    assert not cc.query_marker(lam, e, False)


def test_unrelated_membership_false():
    cc = CC()
    u, v = A.var("u", A.INT), A.var("v", INT_SET)
    cc.add_term(u)
    cc.add_term(v)
    assert not cc.query_member(u, v, True)


def test_conflicts():
    e = A.var("ce", A.INT)
    s = A.var("cs", INT_SET)
    cc = CC()
    cc.assert_member(e, s, True)
    cc.assert_member(e, s, False)
    assert cc.member_conflict() is not None

    cc2 = CC()
    a, b = A.var("ca", A.INT), A.var("cb", A.INT)
    cc2.assert_eq(a, b)
    cc2.assert_diseq(a, b)
    assert cc2.eq_conflict() is not None

    cc3 = CC()
    cc3.assert_eq(a, a)
    assert cc3.eq_conflict() is None and cc3.member_conflict() is None


def test_congruence_up_through_operators():
    s, t, w = (A.var(n, INT_SET) for n in ("fs", "ft", "fw"))
    cc = CC()
    cc.assert_eq(s, t)
    cc.add_term(A.union(s, w))
    cc.add_term(A.union(t, w))
    assert cc.equal(A.union(s, w), A.union(t, w))


def test_backtracking_restores_queries():
    a, b, c = (A.var(n, A.INT) for n in ("ba", "bb", "bc"))
    s = A.var("bs", INT_SET)
    cc = CC()
    cc.assert_eq(a, b)
    mark = cc.mark()
    cc.assert_eq(b, c)
    cc.assert_member(a, s, True)
    assert cc.equal(a, c)
    assert cc.query_member(c, s, True)
    cc.undo_to(mark)
    assert cc.equal(a, b)
    assert not cc.equal(a, c)
    assert not cc.query_member(a, s, True)


def test_backtrack_replay_equivalence():
    rng = random.Random(5)
    vars_ = [A.var(f"rv{i}", U) for i in range(5)]
    sets_ = [A.var(f"rs{i}", USET) for i in range(3)]

    def random_lits(n):
        out = []
        for _ in range(n):
            kind = rng.random()
            if kind < 0.5:
                out.append(("eq", rng.choice(vars_), rng.choice(vars_)))
            elif kind < 0.7:
                out.append(("mem", rng.choice(vars_), rng.choice(sets_)))
            else:
                out.append(("dq", rng.choice(vars_), rng.choice(vars_)))
        return out

    base = random_lits(4)
    extra = random_lits(3)

    def apply_all(cc, lits):
        for kind, x, y in lits:
            if kind == "eq":
                cc.assert_eq(x, y)
            elif kind == "mem":
                cc.assert_member(x, y, True)
            else:
                cc.assert_diseq(x, y)

    cc1 = CC()
    apply_all(cc1, base)
    mark = cc1.mark()
    apply_all(cc1, extra)
    cc1.undo_to(mark)

    cc2 = CC()
    apply_all(cc2, base)
    for v1 in vars_:
        for v2 in vars_:
            assert cc1.equal(v1, v2) == cc2.equal(v1, v2)
            assert cc1.query_diseq(v1, v2) == cc2.query_diseq(v1, v2)
        for s in sets_:
            assert cc1.query_member(v1, s, True) == cc2.query_member(v1, s, True)


def _literal_universe():
    a, b = A.var("na", U), A.var("nb", U)
    s, t = A.var("ns", USET), A.var("nt", USET)
    tup = A.tuple_cons
    return [
        ("mem", a, s), ("mem", a, t), ("mem", b, s), ("mem", b, t),
        ("nmem", a, s), ("nmem", b, t),
        ("eq", a, b), ("dq", a, b),
        ("eq", s, t), ("dq", s, t),
        ("eq", tup(a, b), tup(b, b)), ("dq", tup(a, a), tup(b, a)),
    ]


def run_store(chosen):
    eqs, diseqs, members, nonmembers = [], [], [], []
    for kind, x, y in chosen:
        if kind == "eq":
            eqs.append((x, y))
        elif kind == "dq":
            diseqs.append((x, y))
        elif kind == "mem":
            members.append((x, y))
        else:
            nonmembers.append((x, y))
    check_store_against_naive(eqs, diseqs, members, nonmembers)


def test_exhaustive_small_stores_match_naive():
    universe = _literal_universe()
    for size in range(0, 4):
        for chosen in itertools.combinations(universe, size):
            run_store(chosen)


def test_random_stores_match_naive():
    rng = random.Random(17)
    universe = _literal_universe()
    for _ in range(150):
        chosen = [rng.choice(universe) for _ in range(rng.randint(4, 8))]
        run_store(chosen)


def test_union_find_bookkeeping():
    a, b, c = (A.var(n, U) for n in ("ka", "kb", "kc"))
    cc = CC()
    cc.assert_eq(a, b)
    cc.assert_eq(b, c)
    root = cc.find(a)
    assert cc.find(cc.terms[root]) == root  # find is idempotent
    total = sum(cc.size[i] for i in cc.parent if cc.parent[i] == i)
    assert total == len(cc.terms)
