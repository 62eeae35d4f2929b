import itertools
import random

import pytest

import setrel.ast as A
from setrel import bruteforce
from setrel.ast import eq_lit
from setrel.errors import UnsupportedLiteral
from setrel.oracle import (IncrementalOracle, Oracle, combine, euf_check,
                           lia_check)

U = A.uninterpreted("U")


def ints(*names):
    return [A.var(n, A.INT) for n in names]


def lit(atom, pos=True):
    return A.Lit(not pos, atom)


def evaluate(lits, assignment):
    for l in lits:
        v = bruteforce.eval_term(l.atom, assignment)
        if l.neg:
            v = not v
        if not v:
            return False
    return True


# ---------------------------------------------------------------------------
# euf

def test_euf_transitivity_clash():
    a, b, c = (A.var(n, U) for n in "abc")
    v = euf_check([eq_lit(a, b), eq_lit(b, c), eq_lit(a, c, pos=False)])
    assert not v.sat


def test_euf_simple_diseq():
    a, b = A.var("a", U), A.var("b", U)
    v = euf_check([eq_lit(a, b, pos=False)])
    assert v.sat
    assert v.assignment[a] != v.assignment[b]


def test_euf_tuple_injectivity():
    a, b, c, d = (A.var(n, U) for n in "abcd")
    v = euf_check([eq_lit(A.tuple_cons(a, b), A.tuple_cons(c, d)),
                   eq_lit(a, c, pos=False)])
    assert not v.sat


def test_euf_rejects_arithmetic():
    x, = ints("x")
    with pytest.raises(UnsupportedLiteral):
        euf_check([lit(A.gt(x, A.intconst(0)))])


def test_euf_deterministic_values():
    a, b = A.var("da", U), A.var("db", U)
    v1 = euf_check([eq_lit(a, b, pos=False)])
    v2 = euf_check([eq_lit(a, b, pos=False)])
    assert v1.assignment == v2.assignment


# ---------------------------------------------------------------------------
# lia

def test_lia_no_integer_between():
    x, = ints("x")
    v = lia_check([lit(A.gt(x, A.intconst(0))), lit(A.gt(A.intconst(1), x))])
    assert not v.sat


def test_lia_forced_values():
    x, y = ints("x", "y")
    lits = [lit(A.eq(x, A.add(y, A.intconst(1)))), lit(A.eq(y, A.intconst(2)))]
    v = lia_check(lits)
    assert v.sat
    assert v.assignment[x] == 3 and v.assignment[y] == 2


def test_lia_ground_literal():
    v = lia_check([lit(A.gt(A.intconst(5), A.intconst(0)))])
    assert v.sat


def test_lia_gcd_parity():
    x, y = ints("x", "y")
    two_x = A.mul(A.intconst(2), x)
    two_y = A.mul(A.intconst(2), y)
    v = lia_check([lit(A.eq(two_x, A.add(two_y, A.intconst(1))))])
    assert not v.sat


def test_lia_disequalities():
    x, y = ints("x", "y")
    lits = [lit(A.ge(x, A.intconst(0))), lit(A.ge(A.intconst(0), x)),
            lit(A.ge(y, A.intconst(0))), lit(A.ge(A.intconst(1), y)),
            lit(A.eq(x, y), pos=False)]
    v = lia_check(lits)
    assert v.sat
    assert v.assignment[x] != v.assignment[y]
    lits.append(lit(A.eq(y, A.intconst(0))))
    assert not lia_check(lits).sat


def test_lia_rejects_uninterpreted():
    a = A.var("a", U)
    with pytest.raises(UnsupportedLiteral):
        lia_check([eq_lit(a, a)])


def test_lia_bool_encoding():
    b, c = A.var("b", A.BOOL), A.var("c", A.BOOL)
    v = lia_check([eq_lit(b, A.TRUE), eq_lit(b, c, pos=False)])
    assert v.sat
    assert v.assignment[b] is True and v.assignment[c] is False


def box_search(lits, bound=8):
    vs = sorted({v for l in lits for v in A.free_vars(l.atom)},
                key=lambda t: t.index)
    for combo in itertools.product(range(-bound, bound + 1), repeat=len(vs)):
        assignment = dict(zip(vs, combo))
        if evaluate(lits, assignment):
            return assignment
    return None


def random_lia_instance(rng):
    xs = ints("bx", "by", "bz")
    lits = []
    for _ in range(rng.randint(1, 4)):
        def term():
            parts = [A.intconst(rng.randint(-4, 4))]
            for v in xs:
                if rng.random() < 0.5:
                    parts.append(A.mul(A.intconst(rng.randint(-2, 2)), v))
            return A.add(*parts) if len(parts) > 1 else parts[0]
        op = rng.choice([A.gt, A.ge, A.eq])
        lits.append(lit(op(term(), term()), pos=rng.random() < 0.8))
    # keep solutions inside the box so box search is a complete reference
    for v in xs:
        lits.append(lit(A.ge(v, A.intconst(-6))))
        lits.append(lit(A.ge(A.intconst(6), v)))
    return lits


def test_lia_agrees_with_box_search():
    rng = random.Random(23)
    for i in range(120):
        lits = random_lia_instance(rng)
        got = lia_check(lits)
        expect = box_search(lits)
        assert got.sat == (expect is not None), f"instance {i}"
        if got.sat:
            assert evaluate(lits, got.assignment), f"instance {i}"


# ---------------------------------------------------------------------------
# combination

def test_combine_disjoint():
    x, = ints("x")
    a, b = A.var("a", U), A.var("b", U)
    v = combine([lit(A.gt(x, A.intconst(0))), eq_lit(a, b, pos=False)])
    assert v.sat
    assert v.assignment[x] > 0
    assert v.assignment[a] != v.assignment[b]


def test_combine_tuple_component_conflict():
    x, y = ints("x", "y")
    pair = A.tuple_cons(x, y)
    lits = [eq_lit(pair, A.tuple_cons(A.intconst(1), A.intconst(2))),
            lit(A.ge(A.intconst(0), x))]
    assert not combine(lits).sat


def test_combine_empty_store():
    v = combine([])
    assert v.sat and v.assignment == {}


def test_combine_mixed_tuple_diseq():
    x, y = ints("x", "y")
    a, b = A.var("a", U), A.var("b", U)
    t1 = A.tuple_cons(x, a)
    t2 = A.tuple_cons(y, b)
    # uninterpreted components can differ, so the integers may agree
    v = combine([eq_lit(t1, t2, pos=False), lit(A.eq(x, y))])
    assert v.sat
    # forcing the uninterpreted components equal pushes it to the integers
    v = combine([eq_lit(t1, t2, pos=False), lit(A.eq(x, y)), eq_lit(a, b)])
    assert not v.sat


def test_combine_assignments_evaluate():
    rng = random.Random(31)
    a, b, c = (A.var(n, U) for n in ("ua", "ub", "uc"))
    x, y = ints("cx", "cy")
    pool = [
        eq_lit(a, b), eq_lit(b, c), eq_lit(a, c, pos=False),
        eq_lit(A.tuple_cons(x, a), A.tuple_cons(y, b)),
        eq_lit(A.tuple_cons(x, a), A.tuple_cons(y, b), pos=False),
        lit(A.gt(x, y)), lit(A.ge(y, x)), lit(A.eq(x, A.intconst(3))),
    ]
    for _ in range(200):
        lits = [rng.choice(pool) for _ in range(rng.randint(1, 5))]
        v = combine(lits)
        if v.sat:
            assert evaluate(lits, v.assignment)


def test_incremental_retract_replay():
    x, = ints("ix")
    inc = IncrementalOracle(Oracle("auto"))
    inc.assert_lit(lit(A.gt(x, A.intconst(0))))
    before = inc.check()
    mark = inc.mark()
    inc.assert_lit(lit(A.gt(A.intconst(0), x)))
    assert not inc.check().sat
    inc.undo_to(mark)
    after = inc.check()
    assert after.sat == before.sat
    assert after.assignment == before.assignment


def test_oracle_supports():
    assert Oracle("auto").supports(A.set_sort(A.INT).elem)
    assert Oracle("lia").supports(A.INT)
    assert not Oracle("lia").supports(U)
    assert Oracle("euf").supports(U)
    assert not Oracle("euf").supports(A.INT)
