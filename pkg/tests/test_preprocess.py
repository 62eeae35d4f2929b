import random

import setrel.ast as A
from setrel import bruteforce, preprocess
from setrel.bruteforce import Universe
from setrel.preprocess import (classify, desugar_map, desugar_quantifiers,
                               desugar_subset, flatten, lift_ites,
                               merge_nested_foralls, normalize, split_dnf)

INT_SET = A.set_sort(A.INT)


def sv(name):
    return A.var(name, INT_SET)


def lit_formula(d):
    """A Disjunct back as a conjunction, for evaluation."""
    out = []
    for l in d.all_lits():
        out.append(A.not_(l.atom) if l.neg else l.atom)
    return out


# ---------------------------------------------------------------------------
# split_dnf

def test_split_dnf_distributes():
    a = A.member(A.var("x", A.INT), sv("s"))
    b = A.gt(A.var("x", A.INT), A.intconst(0))
    c = A.eq(sv("s"), sv("t"))
    ds = split_dnf(A.or_(A.and_(a, b), c))
    assert len(ds) == 2
    assert {l.atom.op for l in ds[0].s_lits} == {"member"}
    assert {l.atom.op for l in ds[0].e_lits} == {"gt"}
    assert ds[1].s_lits[0].atom is c


def test_split_dnf_single_literal():
    e = A.member(A.var("x", A.INT), sv("s"))
    (d,) = split_dnf(e)
    assert d.s_lits == [A.Lit(False, e)] and d.e_lits == []


def test_split_dnf_de_morgan():
    a = A.eq(A.var("a", A.INT), A.var("b", A.INT))
    c = A.subset(sv("s"), sv("t"))
    phi = A.not_(A.and_(a, c))
    ds = split_dnf(desugar_subset(phi))
    assert len(ds) == 2
    assert ds[0].e_lits[0].neg
    assert ds[1].s_lits[0].neg


def test_dnf_cap():
    import pytest
    from setrel.errors import DnfCapExceeded
    x = A.var("x", A.INT)
    big = A.and_(*[A.or_(A.gt(x, A.intconst(i)), A.ge(x, A.intconst(i)))
                   for i in range(12)])
    with pytest.raises(DnfCapExceeded):
        split_dnf(big, cap=100)


# ---------------------------------------------------------------------------
# flatten

def test_flatten_names_nested_terms():
    x = A.var("x", A.INT)
    a, b, c = sv("a"), sv("b"), sv("c")
    d = split_dnf(A.member(x, A.union(a, A.inter(b, c))))[0]
    f = flatten(d)
    mem = [l for l in f.s_lits if l.atom.op == "member"][0]
    assert mem.atom.args[1].is_var
    eqs = [l for l in f.s_lits if l.atom.op == "eq"]
    assert len(eqs) == 2
    for l in eqs:
        assert l.atom.args[0].is_var
        assert all(arg.is_var for arg in l.atom.args[1].args)


def test_flatten_negated_equality():
    s, t, u = sv("s"), sv("t"), sv("u")
    d = split_dnf(A.not_(A.eq(s, A.diff(t, u))))[0]
    f = flatten(d)
    neq = [l for l in f.s_lits if l.neg][0]
    assert neq.atom.args[0] is s and neq.atom.args[1].is_var
    eq = [l for l in f.s_lits if not l.neg][0]
    assert eq.atom.args[1] is A.diff(t, u)


def test_flatten_idempotent():
    x = A.var("x", A.INT)
    d = split_dnf(A.member(x, A.union(sv("a"), A.inter(sv("b"), sv("c")))))[0]
    f1 = flatten(d)
    f2 = flatten(f1)
    assert f1.s_lits == f2.s_lits


def test_flatten_shares_repeated_subterms():
    x, y = A.var("x", A.INT), A.var("y", A.INT)
    ab = A.inter(sv("a"), sv("b"))
    d = split_dnf(A.and_(A.member(x, ab), A.member(y, ab)))[0]
    f = flatten(d)
    mems = [l for l in f.s_lits if l.atom.op == "member"]
    assert mems[0].atom.args[1] is mems[1].atom.args[1]
    assert len([l for l in f.s_lits if l.atom.op == "eq"]) == 1


# ---------------------------------------------------------------------------
# desugarings

def test_desugar_quantifiers():
    s = sv("s")
    p = A.mk_lam([("x", A.INT)], A.gt(A.var("x", A.INT), A.intconst(0)))
    some = desugar_quantifiers(A.set_some(p, s))
    assert some.op == "not" and some.args[0].op == "eq"
    assert some.args[0].args[0].op == "filter"
    assert some.args[0].args[1].op == "empty"
    all_ = desugar_quantifiers(A.set_all(p, s))
    assert all_.op == "eq"
    assert all_.args[0] is A.filter_of(p, s)
    assert all_.args[1] is s
    plain = A.member(A.var("x", A.INT), s)
    assert desugar_quantifiers(plain) is plain


def test_desugar_subset():
    s, t = sv("s"), sv("t")
    out = desugar_subset(A.subset(s, t))
    assert out is A.eq(s, A.inter(s, t))
    out = desugar_subset(A.not_(A.subset(s, t)))
    assert out is A.not_(A.eq(s, A.inter(s, t)))
    plain = A.eq(s, t)
    assert desugar_subset(plain) is plain


def test_merge_nested_foralls_basic():
    s, t = sv("s"), sv("t")
    x, y = A.var("x", A.INT), A.var("y", A.INT)
    inner = A.mk_lam([("y", A.INT)], A.gt(x, y))
    outer = A.mk_lam([("x", A.INT)], A.set_all(inner, t))
    merged = merge_nested_foralls(A.set_all(outer, s))
    assert merged.op == "setall"
    assert merged.args[0].op == "product"
    assert merged.lam.binder_sorts == (A.INT, A.INT)


def test_merge_nested_foralls_guard_mixed_body():
    s, t = sv("s"), sv("t")
    x, y = A.var("x", A.INT), A.var("y", A.INT)
    inner = A.mk_lam([("y", A.INT)], A.gt(x, y))
    mixed = A.mk_lam([("x", A.INT)],
                     A.and_(A.gt(x, A.intconst(0)), A.set_all(inner, t)))
    phi = A.set_all(mixed, s)
    assert merge_nested_foralls(phi) is phi


def test_merge_nested_foralls_single_level_unchanged():
    s = sv("s")
    p = A.mk_lam([("x", A.INT)], A.gt(A.var("x", A.INT), A.intconst(0)))
    phi = A.set_all(p, s)
    assert merge_nested_foralls(phi) is phi


def test_merge_guard_inner_set_mentions_binder():
    s = sv("s")
    x = A.var("x", A.INT)
    inner = A.mk_lam([("y", A.INT)], A.gt(A.var("y", A.INT), A.intconst(0)))
    outer = A.mk_lam([("x", A.INT)], A.set_all(inner, A.singleton(x)))
    phi = A.set_all(outer, s)
    assert merge_nested_foralls(phi) is phi


def test_desugar_map_structure():
    t, out = sv("t"), None
    f = A.mk_lam([("n", A.INT)], A.add(A.var("n", A.INT), A.intconst(1)))
    phi = A.eq(sv("q"), A.map_of(f, t))
    out = desugar_map(phi)
    assert out.op == "and"
    main, c1, c2 = out.args
    fresh = main.args[1]
    assert fresh.is_var
    # every element of t has its image in the fresh set
    assert c1.args[0] is t and c1.args[1].op == "filter"
    body1 = c1.args[1].lam.body
    assert body1.op == "member" and body1.args[1] is fresh
    # every element of the fresh set has a preimage
    assert c2.args[0] is fresh and c2.args[1].op == "filter"
    inner = c2.args[1].lam.body
    assert inner.op == "not" and inner.args[0].args[0].op == "filter"
    # fragment classification flags the filter predicates
    rep = classify(flatten(split_dnf(out)[0]))
    assert not rep.in_f
    assert any(r == preprocess.SET_TERM_IN_FILTER for r, _ in rep.violations)


def test_desugar_map_shares_occurrences():
    t = sv("t")
    f = A.mk_lam([("n", A.INT)], A.add(A.var("n", A.INT), A.intconst(1)))
    m = A.map_of(f, t)
    phi = A.and_(A.eq(sv("q1"), m), A.eq(sv("q2"), m))
    out = desugar_map(phi)
    q1eq, q2eq = out.args[0].args
    assert q1eq.args[1] is q2eq.args[1]
    assert out.args[1].args[0] is t


def test_desugar_map_identity_without_map():
    phi = A.eq(sv("s"), sv("t"))
    assert desugar_map(phi) is phi


def test_lift_ites():
    x = A.var("x", A.INT)
    cond = A.ge(x, A.intconst(0))
    phi = A.eq(A.var("y", A.INT), A.ite(cond, x, A.neg(x)))
    out = lift_ites(phi)
    assert out.op == "or"
    assert out.args[0].args[0] is cond


# ---------------------------------------------------------------------------
# classification

def test_classify_element_only_filter_in_f():
    s, t = sv("s"), sv("t")
    p = A.mk_lam([("x", A.INT)], A.gt(A.var("x", A.INT), A.intconst(0)))
    d = flatten(split_dnf(A.eq(s, A.filter_of(p, t)))[0])
    assert classify(d).in_f


def test_classify_plain_constraints_in_f():
    d = flatten(split_dnf(A.eq(sv("s"), A.union(sv("t"), sv("u"))))[0])
    assert classify(d).in_f


def test_classify_set_term_in_predicate():
    s, t = sv("s"), sv("t")
    p = A.mk_lam([("x", A.INT)], A.member(A.var("x", A.INT), s))
    d = flatten(split_dnf(A.eq(s, A.filter_of(p, t)))[0])
    rep = classify(d)
    assert not rep.in_f
    assert rep.violations[0][0] == preprocess.SET_TERM_IN_FILTER


# ---------------------------------------------------------------------------
# differential equisatisfiability of the full pipeline

def _random_formula(rng):
    xs = [A.var(n, A.INT) for n in ("x", "y")]
    ss = [sv(n) for n in ("s", "t")]

    def elem():
        return rng.choice(xs + [A.intconst(rng.randint(-1, 1))])

    def setterm(depth):
        if depth == 0 or rng.random() < 0.4:
            return rng.choice(ss)
        k = rng.random()
        if k < 0.2:
            return A.singleton(elem())
        if k < 0.3:
            return A.empty_set(INT_SET)
        if k < 0.5:
            b = A.var("q", A.INT)
            body = rng.choice([A.gt(b, elem()), A.eq(b, elem())])
            return A.filter_of(A.mk_lam([("q", A.INT)], body), setterm(depth - 1))
        op = rng.choice([A.union, A.inter, A.diff])
        return op(setterm(depth - 1), setterm(depth - 1))

    def atom():
        k = rng.random()
        if k < 0.3:
            return A.member(elem(), setterm(1))
        if k < 0.5:
            return A.eq(setterm(1), setterm(1))
        if k < 0.6:
            return A.subset(setterm(0), setterm(0))
        if k < 0.8:
            b = A.var("q", A.INT)
            lam = A.mk_lam([("q", A.INT)], A.gt(b, elem()))
            quant = A.set_all if rng.random() < 0.5 else A.set_some
            return quant(lam, setterm(0))
        return rng.choice([A.gt, A.ge, A.eq])(elem(), elem())

    parts = [atom() for _ in range(rng.randint(1, 3))]
    parts = [A.not_(p) if rng.random() < 0.3 else p for p in parts]
    if len(parts) == 1:
        return parts[0]
    return (A.and_ if rng.random() < 0.6 else A.or_)(*parts)


def test_pipeline_preserves_satisfiability_small_bounds():
    u = Universe(int_lo=-1, int_hi=1)
    rng = random.Random(7)
    for i in range(60):
        phi = _random_formula(rng)
        before = bruteforce.find_model(phi, u) is not None
        disjuncts = normalize(phi)
        after = any(
            bruteforce.find_model(lit_formula(d), u) is not None
            for d in disjuncts)
        assert before == after, f"iteration {i}"


def test_rewrites_idempotent():
    rng = random.Random(3)
    for _ in range(40):
        phi = _random_formula(rng)
        for op in (desugar_subset, desugar_quantifiers, merge_nested_foralls,
                   desugar_map):
            once = op(phi)
            assert op(once) is once


def test_pipeline_invariants():
    rng = random.Random(11)
    for _ in range(40):
        phi = _random_formula(rng)
        for d in normalize(phi):
            for l in d.s_lits:
                a = l.atom
                if a.op == "member":
                    assert a.args[1].is_var
                else:
                    lhs, rhs = a.args
                    assert lhs.is_var
                    if not l.neg:
                        for arg in rhs.args:
                            if arg.sort is not None and arg.sort.is_set:
                                assert arg.is_var
