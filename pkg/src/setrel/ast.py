"""Sorts, hash-consed terms, lambda abstractions, and literals.

Terms are interned: structurally equal terms are the same object, so identity
comparison is syntactic equality and terms can key dicts cheaply.  All
constructors check sorts and raise SortMismatch on rank violations.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import ArityMismatch, SortMismatch

# ---------------------------------------------------------------------------
# Sorts

SCALAR_KINDS = ("bool", "int", "un")


_sort_table: Dict[tuple, "Sort"] = {}


@dataclass(frozen=True)
class Sort:
    kind: str  # 'bool' | 'int' | 'un' | 'tuple' | 'set'
    name: str = ""
    args: Tuple["Sort", ...] = ()

    def __new__(cls, kind, name="", args=()):
        # interned: equal sorts are the same object
        key = (kind, name, tuple(id(a) for a in args))
        hit = _sort_table.get(key)
        if hit is None:
            hit = super().__new__(cls)
            _sort_table[key] = hit
        return hit

    @property
    def is_set(self) -> bool:
        return self.kind == "set"

    @property
    def is_tuple(self) -> bool:
        return self.kind == "tuple"

    @property
    def is_element(self) -> bool:
        return self.kind in SCALAR_KINDS or self.kind == "tuple"

    @property
    def elem(self) -> "Sort":
        assert self.kind == "set"
        return self.args[0]

    def components(self) -> Tuple["Sort", ...]:
        """Component sorts for the flat-product view: tuples splice open."""
        if self.kind == "tuple":
            return self.args
        return (self,)

    def __str__(self) -> str:
        if self.kind == "bool":
            return "Bool"
        if self.kind == "int":
            return "Int"
        if self.kind == "un":
            return self.name
        if self.kind == "tuple":
            return "(Tuple%s)" % "".join(" " + str(a) for a in self.args)
        return f"(Set {self.args[0]})"


BOOL = Sort("bool")
INT = Sort("int")


def uninterpreted(name: str) -> Sort:
    return Sort("un", name=name)


def tuple_sort(*comps: Sort) -> Sort:
    for c in comps:
        if c.kind not in SCALAR_KINDS:
            raise SortMismatch(f"tuple components must be scalar sorts, got {c}")
    return Sort("tuple", args=tuple(comps))


def set_sort(elem: Sort) -> Sort:
    if not elem.is_element:
        raise SortMismatch(f"set elements must be element-sorted, got {elem}")
    return Sort("set", args=(elem,))


def rel_sort(*comps: Sort) -> Sort:
    return set_sort(tuple_sort(*comps))


# ---------------------------------------------------------------------------
# Terms

_intern_lock = threading.Lock()
_term_table: Dict[tuple, "Term"] = {}
_term_by_id: Dict[int, "Term"] = {}
_lam_table: Dict[tuple, "Lam"] = {}
_next_term_id = 0
_next_fresh = 0

class Term:
    __slots__ = ("id", "op", "args", "sort", "name", "value", "lam", "index")

    def __init__(self, tid, op, args, sort, name, value, lam, index):
        self.id = tid
        self.op = op
        self.args = args
        self.sort = sort
        self.name = name
        self.value = value
        self.lam = lam
        self.index = index  # creation order for variables

    def __repr__(self) -> str:
        if self.op == "var":
            return self.name
        if self.op == "int":
            return str(self.value)
        if self.op == "bool":
            return "true" if self.value else "false"
        if self.lam is not None:
            return f"({self.op} {self.lam!r} {' '.join(map(repr, self.args))})"
        return f"({self.op} {' '.join(map(repr, self.args))})"

    def __hash__(self) -> int:
        return self.id

    @property
    def is_var(self) -> bool:
        return self.op == "var"


class Lam:
    """An interned lambda abstraction; binders use canonical names so
    alpha-equivalent lambdas intern to the same object."""

    __slots__ = ("id", "binders", "body", "level")

    def __init__(self, lid, binders, body, level):
        self.id = lid
        self.binders = binders  # tuple of var Terms with canonical names
        self.body = body
        self.level = level

    def __repr__(self) -> str:
        bs = " ".join(f"{b.name}:{b.sort}" for b in self.binders)
        return f"(lambda ({bs}) {self.body!r})"

    def __hash__(self) -> int:
        return self.id

    @property
    def binder_sorts(self) -> Tuple[Sort, ...]:
        return tuple(b.sort for b in self.binders)


def _mk(op, args=(), sort=None, name=None, value=None, lam=None) -> Term:
    global _next_term_id
    key = (op, tuple(t.id for t in args), sort, name, value,
           lam.id if lam is not None else None)
    with _intern_lock:
        t = _term_table.get(key)
        if t is None:
            t = Term(_next_term_id, op, tuple(args), sort, name, value, lam,
                     _next_term_id)
            _next_term_id += 1
            _term_table[key] = t
            _term_by_id[t.id] = t
        return t


def term_of_id(i: int) -> Optional[Term]:
    return _term_by_id.get(i)


def var(name: str, sort: Sort) -> Term:
    return _mk("var", sort=sort, name=name)


def fresh_var(sort: Sort, hint: str = "v") -> Term:
    global _next_fresh
    with _intern_lock:
        n = _next_fresh
        _next_fresh += 1
    # '!' is rejected by the parser's symbol lexer, so fresh names can never
    # collide with user-declared ones
    return var(f"{hint}!{n}", sort)


def intconst(k: int) -> Term:
    return _mk("int", sort=INT, value=k)


def boolconst(b: bool) -> Term:
    return _mk("bool", sort=BOOL, value=bool(b))


TRUE = boolconst(True)
FALSE = boolconst(False)


def _want(t: Term, sort: Sort, what: str) -> None:
    if t.sort != sort:
        raise SortMismatch(f"{what}: expected {sort}, got {t.sort}",
                           expected=sort, got=t.sort)


def tuple_cons(*es: Term) -> Term:
    sort = tuple_sort(*(e.sort for e in es))
    return _mk("tuple", args=es, sort=sort)


def empty_set(sort: Sort) -> Term:
    if not sort.is_set:
        raise SortMismatch(f"set.empty needs a Set sort, got {sort}")
    return _mk("empty", sort=sort)


def singleton(e: Term) -> Term:
    if not e.sort.is_element:
        raise SortMismatch(f"set.singleton over non-element sort {e.sort}")
    return _mk("single", args=(e,), sort=set_sort(e.sort))


def _binary_set(op: str, s: Term, t: Term) -> Term:
    if not s.sort.is_set:
        raise SortMismatch(f"{op}: expected a Set sort, got {s.sort}")
    _want(t, s.sort, op)
    return _mk(op, args=(s, t), sort=s.sort)


def union(s: Term, t: Term) -> Term:
    return _binary_set("union", s, t)


def inter(s: Term, t: Term) -> Term:
    return _binary_set("inter", s, t)


def diff(s: Term, t: Term) -> Term:
    return _binary_set("diff", s, t)


def product(s: Term, t: Term) -> Term:
    """Flat Cartesian product: tuple element sorts splice together."""
    if not (s.sort.is_set and t.sort.is_set):
        raise SortMismatch(f"rel.product over {s.sort}, {t.sort}")
    comps = s.sort.elem.components() + t.sort.elem.components()
    return _mk("product", args=(s, t), sort=set_sort(tuple_sort(*comps)))


def _check_binders(lam: Lam, elem: Sort, what: str) -> None:
    want = (elem,) if len(lam.binders) == 1 else elem.components()
    if lam.binder_sorts != want:
        raise SortMismatch(
            f"{what}: predicate binders {list(map(str, lam.binder_sorts))} do "
            f"not match element sort {elem}")


def filter_of(lam: Lam, s: Term) -> Term:
    if not s.sort.is_set:
        raise SortMismatch(f"set.filter over {s.sort}")
    _check_binders(lam, s.sort.elem, "set.filter")
    _want(lam.body, BOOL, "set.filter predicate body")
    return _mk("filter", args=(s,), sort=s.sort, lam=lam)


def map_of(lam: Lam, s: Term) -> Term:
    if not s.sort.is_set:
        raise SortMismatch(f"set.map over {s.sort}")
    _check_binders(lam, s.sort.elem, "set.map")
    if not lam.body.sort.is_element:
        raise SortMismatch(f"set.map function returns {lam.body.sort}")
    return _mk("map", args=(s,), sort=set_sort(lam.body.sort), lam=lam)


def set_all(lam: Lam, s: Term) -> Term:
    if not s.sort.is_set:
        raise SortMismatch(f"set.all over {s.sort}")
    _check_binders(lam, s.sort.elem, "set.all")
    _want(lam.body, BOOL, "set.all predicate body")
    return _mk("setall", args=(s,), sort=BOOL, lam=lam)


def set_some(lam: Lam, s: Term) -> Term:
    if not s.sort.is_set:
        raise SortMismatch(f"set.some over {s.sort}")
    _check_binders(lam, s.sort.elem, "set.some")
    _want(lam.body, BOOL, "set.some predicate body")
    return _mk("setsome", args=(s,), sort=BOOL, lam=lam)


def add(*es: Term) -> Term:
    if len(es) < 2:
        raise ArityMismatch("+ needs at least two arguments")
    for e in es:
        _want(e, INT, "+")
    return _mk("add", args=es, sort=INT)


def neg(e: Term) -> Term:
    _want(e, INT, "unary -")
    if e.op == "int":
        return intconst(-e.value)
    return _mk("neg", args=(e,), sort=INT)


def mul(k: Term, e: Term) -> Term:
    """Linear scaling only: one side must be an integer constant."""
    if k.op != "int":
        if e.op == "int":
            k, e = e, k
        else:
            raise SortMismatch("* supports only constant * term")
    _want(e, INT, "*")
    return _mk("mul", args=(k, e), sort=INT)


def ite(c: Term, a: Term, b: Term) -> Term:
    _want(c, BOOL, "ite condition")
    if a.sort != b.sort:
        raise SortMismatch(f"ite branches disagree: {a.sort} vs {b.sort}")
    if a.sort.is_set:
        raise SortMismatch("ite over set sorts is not supported")
    if a.sort == BOOL:
        return or_(and_(c, a), and_(not_(c), b))
    return _mk("ite", args=(c, a, b), sort=a.sort)


def member(e: Term, s: Term) -> Term:
    if not s.sort.is_set:
        raise SortMismatch(f"set.member: second argument has sort {s.sort}")
    _want(e, s.sort.elem, "set.member")
    return _mk("member", args=(e, s), sort=BOOL)


def subset(s: Term, t: Term) -> Term:
    if not s.sort.is_set:
        raise SortMismatch(f"set.subset over {s.sort}")
    _want(t, s.sort, "set.subset")
    return _mk("subset", args=(s, t), sort=BOOL)


def eq(a: Term, b: Term) -> Term:
    """Equality; on Bool it is element equality between Bool-sorted terms
    (variables and constants), not a connective."""
    if a.sort != b.sort:
        raise SortMismatch(f"= over {a.sort} and {b.sort}")
    if a.sort == BOOL and not all(t.op in ("var", "bool") for t in (a, b)):
        raise SortMismatch("= over compound Bool terms is not supported")
    return _mk("eq", args=(a, b), sort=BOOL)


def gt(a: Term, b: Term) -> Term:
    _want(a, INT, ">")
    _want(b, INT, ">")
    return _mk("gt", args=(a, b), sort=BOOL)


def ge(a: Term, b: Term) -> Term:
    _want(a, INT, ">=")
    _want(b, INT, ">=")
    return _mk("ge", args=(a, b), sort=BOOL)


def and_(*fs: Term) -> Term:
    for f in fs:
        _want(f, BOOL, "and")
    if len(fs) == 1:
        return fs[0]
    return _mk("and", args=fs, sort=BOOL)


def or_(*fs: Term) -> Term:
    for f in fs:
        _want(f, BOOL, "or")
    if len(fs) == 1:
        return fs[0]
    return _mk("or", args=fs, sort=BOOL)


def not_(f: Term) -> Term:
    _want(f, BOOL, "not")
    return _mk("not", args=(f,), sort=BOOL)


# ---------------------------------------------------------------------------
# Lambdas

def _lams_in(t: Term, acc: set) -> None:
    if t.lam is not None:
        acc.add(t.lam)
    for a in t.args:
        _lams_in(a, acc)


def mk_lam(params: Iterable[Tuple[str, Sort]], body: Term) -> Lam:
    """Build a lambda, renaming binders to canonical level-indexed names.

    The level exceeds every lambda nested in the body, so substituting an
    outer binder under an inner lambda can never capture.
    """
    global _next_term_id
    params = list(params)
    for _, srt in params:
        if srt.is_set:
            raise SortMismatch("lambda binders must be element-sorted")
    inner: set = set()
    _lams_in(body, inner)
    level = 1 + max((l.level for l in inner), default=0)
    canon = [var(f"#b{level}_{i}", srt) for i, (_, srt) in enumerate(params)]
    mapping = {}
    for (name, srt), cv in zip(params, canon):
        old = var(name, srt)
        if old is not cv:
            mapping[old] = cv
    cbody = subst(body, mapping) if mapping else body
    key = (tuple(v.id for v in canon), cbody.id)
    with _intern_lock:
        lam = _lam_table.get(key)
        if lam is None:
            lam = Lam(len(_lam_table), tuple(canon), cbody, level)
            _lam_table[key] = lam
        return lam


def beta(lam: Lam, args: List[Term]) -> Term:
    """Apply a lambda to ground arguments; multi-binder lambdas may instead
    take a single tuple term, which is destructured."""
    if len(args) == 1 and len(lam.binders) > 1:
        (arg,) = args
        if arg.op != "tuple":
            raise ArityMismatch(
                f"cannot destructure non-tuple argument {arg!r}")
        args = list(arg.args)
    if len(args) != len(lam.binders):
        raise ArityMismatch(
            f"lambda of arity {len(lam.binders)} applied to {len(args)} arguments")
    for b, a in zip(lam.binders, args):
        if a.sort != b.sort:
            raise SortMismatch(f"lambda argument: expected {b.sort}, got {a.sort}")
    return subst(lam.body, dict(zip(lam.binders, args)))


# ---------------------------------------------------------------------------
# Traversals

_REBUILDERS = {
    "tuple": lambda t, args: tuple_cons(*args),
    "single": lambda t, args: singleton(*args),
    "union": lambda t, args: union(*args),
    "inter": lambda t, args: inter(*args),
    "diff": lambda t, args: diff(*args),
    "product": lambda t, args: product(*args),
    "add": lambda t, args: add(*args),
    "neg": lambda t, args: neg(*args),
    "mul": lambda t, args: mul(*args),
    "ite": lambda t, args: ite(*args),
    "member": lambda t, args: member(*args),
    "subset": lambda t, args: subset(*args),
    "eq": lambda t, args: eq(*args),
    "gt": lambda t, args: gt(*args),
    "ge": lambda t, args: ge(*args),
    "and": lambda t, args: and_(*args),
    "or": lambda t, args: or_(*args),
    "not": lambda t, args: not_(*args),
    "filter": lambda t, args: filter_of(t.lam, *args),
    "map": lambda t, args: map_of(t.lam, *args),
    "setall": lambda t, args: set_all(t.lam, *args),
    "setsome": lambda t, args: set_some(t.lam, *args),
}


def rebuild(t: Term, args: Tuple[Term, ...], lam: Optional[Lam] = None) -> Term:
    if lam is not None and lam is not t.lam:
        build = {"filter": filter_of, "map": map_of,
                 "setall": set_all, "setsome": set_some}[t.op]
        return build(lam, *args)
    if args == t.args:
        return t
    return _REBUILDERS[t.op](t, args)


def _relam(lam: Lam, new_body: Term) -> Lam:
    """Rebuild a lambda keeping its binder terms verbatim (used by rewriters
    that only touch the body's non-binder structure)."""
    if new_body is lam.body:
        return lam
    key = (tuple(v.id for v in lam.binders), new_body.id)
    with _intern_lock:
        out = _lam_table.get(key)
        if out is None:
            out = Lam(len(_lam_table), lam.binders, new_body, lam.level)
            _lam_table[key] = out
        return out


def subst(t: Term, mapping: Dict[Term, Term]) -> Term:
    if not mapping:
        return t
    memo: Dict[int, Term] = {}

    def go(u: Term) -> Term:
        hit = memo.get(u.id)
        if hit is not None:
            return hit
        out = mapping.get(u)
        if out is None:
            if u.args or u.lam is not None:
                new_args = tuple(go(a) for a in u.args)
                new_lam = u.lam
                if u.lam is not None:
                    nb = go(u.lam.body)
                    new_lam = _relam(u.lam, nb)
                out = rebuild(u, new_args, new_lam)
            else:
                out = u
        memo[u.id] = out
        return out

    return go(t)


def free_vars(t: Term) -> set:
    memo: Dict[int, frozenset] = {}

    def go(u: Term) -> frozenset:
        hit = memo.get(u.id)
        if hit is not None:
            return hit
        if u.op == "var":
            out = frozenset((u,))
        else:
            out = frozenset()
            for a in u.args:
                out |= go(a)
            if u.lam is not None:
                out |= go(u.lam.body) - frozenset(u.lam.binders)
        memo[u.id] = out
        return out

    return set(go(t))


def subterms(t: Term) -> List[Term]:
    """All subterms, not descending into lambda bodies."""
    seen = set()
    out: List[Term] = []

    def go(u: Term) -> None:
        if u.id in seen:
            return
        seen.add(u.id)
        out.append(u)
        for a in u.args:
            go(a)

    go(t)
    return out


# ---------------------------------------------------------------------------
# Literals: the calculus currency

@dataclass(frozen=True)
class Lit:
    neg: bool
    atom: Term  # 'member' | 'eq' | 'gt' | 'ge' atom

    def negate(self) -> "Lit":
        return Lit(not self.neg, self.atom)

    def __repr__(self) -> str:
        return ("(not %r)" % self.atom) if self.neg else repr(self.atom)


def mem_lit(e: Term, s: Term, pos: bool = True) -> Lit:
    return Lit(not pos, member(e, s))


def eq_lit(a: Term, b: Term, pos: bool = True) -> Lit:
    return Lit(not pos, eq(a, b))


def is_relation_lit(l: Lit) -> bool:
    """Relation constraints go to S, element constraints to E."""
    a = l.atom
    if a.op == "member":
        return True
    if a.op == "eq":
        return a.args[0].sort.is_set
    return False
