"""Normalization pipeline: desugarings, DNF split, flattening, equality
orientation, tuple expansion, and the decidable-fragment classifier.

Pipeline order: desugar_map, merge_nested_foralls, desugar_quantifiers,
desugar_subset, ite lifting, DNF split, then per disjunct flatten, orient,
and tuple expansion.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import ast
from .ast import Lit, Term, eq_lit
from .errors import DnfCapExceeded, SetRelError

DEFAULT_DNF_CAP = 10**6


@dataclass
class Disjunct:
    """A flat pair of stores: S holds relation constraints, E element ones."""
    s_lits: List[Lit] = field(default_factory=list)
    e_lits: List[Lit] = field(default_factory=list)
    tuple_expansions: Dict[Term, Term] = field(default_factory=dict)

    def all_lits(self) -> List[Lit]:
        return self.s_lits + self.e_lits


@dataclass
class FragmentReport:
    in_f: bool
    violations: List[Tuple[str, Term]]


# ---------------------------------------------------------------------------
# Generic bottom-up rewriting (descends into lambda bodies)

def _rewrite(t: Term, rule) -> Term:
    memo: Dict[int, Term] = {}

    def go(u: Term) -> Term:
        hit = memo.get(u.id)
        if hit is not None:
            return hit
        new_args = tuple(go(a) for a in u.args)
        new_lam = u.lam
        if u.lam is not None:
            new_lam = ast._relam(u.lam, go(u.lam.body))
        v = ast.rebuild(u, new_args, new_lam)
        w = rule(v)
        out = go(w) if w is not None and w is not v else (w or v)
        memo[u.id] = out
        return out

    return go(t)


# ---------------------------------------------------------------------------
# Desugarings

def desugar_subset(phi: Term) -> Term:
    """s subset t becomes s = s inter t."""
    def rule(u: Term) -> Optional[Term]:
        if u.op == "subset":
            s, t = u.args
            return ast.eq(s, ast.inter(s, t))
        return None
    return _rewrite(phi, rule)


def desugar_quantifiers(phi: Term) -> Term:
    """set.some(p,s) becomes filter(p,s) != empty; set.all(p,s) becomes
    filter(p,s) = s.  Applied bottom-up until none remain."""
    def rule(u: Term) -> Optional[Term]:
        if u.op == "setsome":
            s = u.args[0]
            return ast.not_(ast.eq(ast.filter_of(u.lam, s), ast.empty_set(s.sort)))
        if u.op == "setall":
            s = u.args[0]
            return ast.eq(ast.filter_of(u.lam, s), s)
        return None
    return _rewrite(phi, rule)


def merge_nested_foralls(phi: Term) -> Term:
    """Collapse bare chains of nested universal set quantifiers into a single
    quantifier over a flat cross product; the predicate then ranges over
    tuples.  Fires only when the outer body is exactly the inner set.all and
    the inner set does not mention the outer binders."""
    def rule(u: Term) -> Optional[Term]:
        if u.op != "setall":
            return None
        body = u.lam.body
        if body.op != "setall":
            return None
        inner_set = body.args[0]
        if ast.free_vars(inner_set) & set(u.lam.binders):
            return None
        outer_set = u.args[0]
        params = [(b.name, b.sort) for b in u.lam.binders + body.lam.binders]
        merged = ast.mk_lam(params, body.lam.body)
        return ast.set_all(merged, ast.product(outer_set, inner_set))
    return _rewrite(phi, rule)


def desugar_map(phi: Term) -> Term:
    """Eliminate every image term map(f, t), replacing it by a fresh set
    variable s constrained so that every element of t has its image in s and
    every element of s has a preimage in t.  Occurrences of the same map term
    share one variable.  The introduced filter predicates mention set terms,
    so the result falls outside the decidable fragment."""
    fresh: Dict[Term, Term] = {}
    constraints: List[Term] = []

    def binders(sort, hint):
        """Capture-proof binder specs plus the bound term (a variable or a
        variable tuple)."""
        if sort.is_tuple:
            vs = [ast.fresh_var(c, hint) for c in sort.components()]
            return [(v.name, v.sort) for v in vs], ast.tuple_cons(*vs)
        v = ast.fresh_var(sort, hint)
        return [(v.name, v.sort)], v

    def eliminate(u: Term) -> Optional[Term]:
        if u.op != "map":
            return None
        s = fresh.get(u)
        if s is not None:
            return s
        f, t = u.lam, u.args[0]
        s = ast.fresh_var(u.sort, "m")
        fresh[u] = s
        ex = t.sort.elem
        ey = u.sort.elem
        # t = filter(lambda x. f(x) in s, t): every element has an image
        xs, xv = binders(ex, "mx")
        p1 = ast.mk_lam(xs, ast.member(ast.beta(f, [xv]), s))
        c1 = ast.eq(t, ast.filter_of(p1, t))
        # s = filter(lambda y. filter(lambda x. y = f(x), t) != empty, s):
        # every element has a preimage
        us, uv = binders(ex, "mu")
        ys, yv = binders(ey, "my")
        inner = ast.mk_lam(us, ast.eq(yv, ast.beta(f, [uv])))
        p2 = ast.mk_lam(ys, ast.not_(ast.eq(ast.filter_of(inner, t),
                                            ast.empty_set(t.sort))))
        c2 = ast.eq(s, ast.filter_of(p2, s))
        constraints.append(c1)
        constraints.append(c2)
        return s

    out = _rewrite(phi, eliminate)
    if constraints:
        out = ast.and_(out, *constraints)
    return out


# ---------------------------------------------------------------------------
# ite lifting (outside lambda bodies)

def _find_ite(t: Term) -> Optional[Term]:
    """First ite term reachable without entering a lambda body."""
    seen = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if u.id in seen:
            continue
        seen.add(u.id)
        if u.op == "ite":
            return u
        stack.extend(u.args)
    return None


def lift_ites(phi: Term) -> Term:
    """Pull element-level ite terms out into propositional case splits."""
    while True:
        node = _find_ite(phi)
        if node is None:
            return phi
        c, a, b = node.args
        phi = ast.or_(ast.and_(c, ast.subst(phi, {node: a})),
                      ast.and_(ast.not_(c), ast.subst(phi, {node: b})))


# ---------------------------------------------------------------------------
# DNF split

def _nnf_literals(t: Term, pos: bool, cap: int) -> List[List[Lit]]:
    """Return the DNF of t (with polarity pos) as lists of literals."""
    op = t.op
    if op == "not":
        return _nnf_literals(t.args[0], not pos, cap)
    if op == "bool":
        truth = t.value if pos else not t.value
        return [[]] if truth else []
    if (op == "and" and pos) or (op == "or" and not pos):
        result: List[List[Lit]] = [[]]
        for a in t.args:
            branches = _nnf_literals(a, pos, cap)
            merged = []
            for r in result:
                for b in branches:
                    merged.append(r + b)
                    if len(merged) > cap:
                        raise DnfCapExceeded(
                            f"DNF expansion exceeded the cap of {cap} disjuncts")
            result = merged
        return result
    if (op == "or" and pos) or (op == "and" and not pos):
        result = []
        for a in t.args:
            result.extend(_nnf_literals(a, pos, cap))
            if len(result) > cap:
                raise DnfCapExceeded(
                    f"DNF expansion exceeded the cap of {cap} disjuncts")
        return result
    if op in ("member", "eq"):
        return [[Lit(not pos, t)]]
    if op == "var" and t.sort == ast.BOOL:
        return [[Lit(not pos, ast.eq(t, ast.TRUE))]]
    if op == "gt":
        a, b = t.args
        return [[Lit(False, t)]] if pos else [[Lit(False, ast.ge(b, a))]]
    if op == "ge":
        a, b = t.args
        return [[Lit(False, t)]] if pos else [[Lit(False, ast.gt(b, a))]]
    raise SetRelError(f"operator {op} survived desugaring")


def split_dnf(phi: Term, cap: int = DEFAULT_DNF_CAP) -> List[Disjunct]:
    """DNF split with literals partitioned into relation and element stores.
    The input must be quantifier-free with set.all/set.some/subset desugared
    and ites lifted."""
    disjuncts = []
    for lits in _nnf_literals(phi, True, cap):
        d = Disjunct()
        seen = set()
        for l in lits:
            if l in seen:
                continue
            seen.add(l)
            (d.s_lits if ast.is_relation_lit(l) else d.e_lits).append(l)
        disjuncts.append(d)
    return disjuncts


# ---------------------------------------------------------------------------
# Flattening, orientation, tuple expansion

def flatten(d: Disjunct) -> Disjunct:
    """Name compound set subterms with fresh variables so every literal is
    flat; repeated subterms share one name.  Idempotent."""
    names: Dict[Term, Term] = {}
    extra: List[Lit] = []

    def name_of(t: Term) -> Term:
        if t.is_var:
            return t
        w = names.get(t)
        if w is None:
            w = ast.fresh_var(t.sort, "w")
            names[t] = w
            extra.append(eq_lit(w, shallow(t)))
        return w

    def shallow(t: Term) -> Term:
        """Rebuild t with every proper set-sorted argument named."""
        if t.op in ("union", "inter", "diff", "product"):
            return ast.rebuild(t, tuple(name_of(a) for a in t.args))
        if t.op == "filter":
            return ast.filter_of(t.lam, name_of(t.args[0]))
        return t

    out = Disjunct(e_lits=list(d.e_lits),
                   tuple_expansions=dict(d.tuple_expansions))
    for l in d.s_lits:
        a = l.atom
        if a.op == "member":
            e, s = a.args
            out.s_lits.append(Lit(l.neg, ast.member(e, name_of(s))))
        elif l.neg:
            # disequality sides are named so the split rule sees variables
            lhs, rhs = a.args
            out.s_lits.append(Lit(True, ast.eq(name_of(lhs), name_of(rhs))))
        else:
            lhs, rhs = a.args
            if lhs.is_var:
                out.s_lits.append(Lit(False, ast.eq(lhs, shallow(rhs))))
            elif rhs.is_var:
                out.s_lits.append(Lit(False, ast.eq(rhs, shallow(lhs))))
            else:
                out.s_lits.append(Lit(False, ast.eq(name_of(lhs), name_of(rhs))))
    out.s_lits.extend(extra)
    return out


def orient_equalities(d: Disjunct) -> Disjunct:
    """Positive set equalities get a variable on the left; between two
    variables the one created first wins."""
    def fix(l: Lit) -> Lit:
        a = l.atom
        if a.op != "eq" or not a.args[0].sort.is_set:
            return l
        lhs, rhs = a.args
        if rhs.is_var and (not lhs.is_var or rhs.index < lhs.index):
            lhs, rhs = rhs, lhs
        return Lit(l.neg, ast.eq(lhs, rhs))

    return Disjunct([fix(l) for l in d.s_lits], list(d.e_lits),
                    dict(d.tuple_expansions))


def expand_tuples(d: Disjunct) -> Disjunct:
    """Replace every tuple-sorted variable by a tuple of fresh scalar
    variables, and rewrite membership literals so their tuple sides are
    variable tuples (component constraints go to E)."""
    expansions: Dict[Term, Term] = dict(d.tuple_expansions)
    mapping: Dict[Term, Term] = {}
    vs = set()
    for l in d.all_lits():
        vs |= ast.free_vars(l.atom)
    for v in sorted(vs, key=lambda t: t.index):
        if v.sort.is_tuple and v not in expansions:
            comps = tuple(ast.fresh_var(c, "t") for c in v.sort.args)
            tup = ast.tuple_cons(*comps)
            expansions[v] = tup
            mapping[v] = tup

    def sub(l: Lit) -> Lit:
        return Lit(l.neg, ast.subst(l.atom, mapping)) if mapping else l

    s_lits = [sub(l) for l in d.s_lits]
    e_lits = [sub(l) for l in d.e_lits]

    out_s: List[Lit] = []
    for l in s_lits:
        a = l.atom
        if a.op == "member" and a.args[0].sort.is_tuple:
            e, s = a.args
            e2, extra = varify_tuple(e)
            e_lits.extend(extra)
            out_s.append(Lit(l.neg, ast.member(e2, s)))
        else:
            out_s.append(l)
    return Disjunct(out_s, e_lits, expansions)


def varify_tuple(e: Term) -> Tuple[Term, List[Lit]]:
    """Rewrite a tuple-sorted element term into a tuple of variables plus
    element equalities pinning the non-variable components."""
    extra: List[Lit] = []
    if e.op == "tuple":
        comps = []
        for c in e.args:
            if c.is_var:
                comps.append(c)
            else:
                v = ast.fresh_var(c.sort, "t")
                extra.append(eq_lit(v, c))
                comps.append(v)
        return ast.tuple_cons(*comps), extra
    comps = tuple(ast.fresh_var(c, "t") for c in e.sort.args)
    tup = ast.tuple_cons(*comps)
    extra.append(eq_lit(e, tup))
    return tup, extra


def validate_disjunct(d: Disjunct) -> None:
    """Checked on every solver entry: literals are flat, positive set
    equalities have a variable on the left, and membership tuples are
    variable tuples."""
    for l in d.s_lits:
        a = l.atom
        if a.op == "member":
            if not a.args[1].is_var:
                raise SetRelError(f"non-flat membership {l!r}")
            e = a.args[0]
            if e.sort.is_tuple and (e.op != "tuple"
                                    or not all(c.is_var for c in e.args)):
                raise SetRelError(f"membership without tuple expansion {l!r}")
        else:
            lhs, rhs = a.args
            if not lhs.is_var:
                raise SetRelError(f"unoriented equality {l!r}")
            if l.neg and not rhs.is_var:
                raise SetRelError(f"non-flat disequality {l!r}")
            for arg in rhs.args:
                if arg.sort is not None and arg.sort.is_set and not arg.is_var:
                    raise SetRelError(f"non-flat equality {l!r}")


# ---------------------------------------------------------------------------
# Fragment classification

_F_SET_OPS = {"empty", "single", "union", "inter", "diff", "product", "filter"}

SET_TERM_IN_FILTER = "set-term-in-filter-predicate"
SUBSET_AFTER_REWRITE = "subset-after-rewrite"
UNSUPPORTED_OPERATOR = "unsupported-operator"
PREDICATE_VARIABLE = "predicate-variable"


def _body_has_set_term(t: Term) -> bool:
    if t.sort is not None and t.sort.is_set:
        return True
    for a in t.args:
        if _body_has_set_term(a):
            return True
    if t.lam is not None and _body_has_set_term(t.lam.body):
        return True
    return False


def classify(d: Disjunct) -> FragmentReport:
    """Check the disjunct against the decidable fragment: only the core set
    operators, and no set terms inside filter predicates."""
    violations: List[Tuple[str, Term]] = []
    seen = set()

    def walk(t: Term) -> None:
        if t.id in seen:
            return
        seen.add(t.id)
        if t.op == "subset":
            violations.append((SUBSET_AFTER_REWRITE, t))
        elif t.op in ("setall", "setsome", "map"):
            violations.append((UNSUPPORTED_OPERATOR, t))
        elif t.op == "filter":
            if _body_has_set_term(t.lam.body):
                violations.append((SET_TERM_IN_FILTER, t))
        elif t.sort is not None and t.sort.is_set and t.op not in _F_SET_OPS \
                and t.op != "var":
            violations.append((UNSUPPORTED_OPERATOR, t))
        for a in t.args:
            walk(a)

    for l in d.all_lits():
        walk(l.atom)
    return FragmentReport(in_f=not violations, violations=violations)


# ---------------------------------------------------------------------------
# Full pipeline

def normalize(phi: Term, cap: int = DEFAULT_DNF_CAP) -> List[Disjunct]:
    phi = desugar_map(phi)
    phi = merge_nested_foralls(phi)
    phi = desugar_quantifiers(phi)
    phi = desugar_subset(phi)
    phi = lift_ites(phi)
    out = []
    for d in split_dnf(phi, cap):
        d = flatten(d)
        d = orient_equalities(d)
        d = expand_tuples(d)
        out.append(d)
    return out
