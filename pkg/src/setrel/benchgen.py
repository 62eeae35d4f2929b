"""Instance generators: seeded random scripts for differential fuzzing, the
arithmetic-system encoding family that stresses the undecidable fragment, and
a validator for the restricted map-term language."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import ast, preprocess
from .ast import Sort, Term
from .frontend import Script


# ---------------------------------------------------------------------------
# Encoding systems of equations x=k, x=y, x=y+z, x=y*z over nonnegative
# integers into pure set constraints via the map operator.

@dataclass
class HilbertSystem:
    variables: List[str]
    equations: List[tuple]  # ('assign',x,k) ('copy',x,y) ('sum',x,y,z) ('prod',x,y,z)


def _abs_lambda() -> ast.Lam:
    n = ast.fresh_var(ast.INT, "hn")
    return ast.mk_lam([(n.name, ast.INT)],
                      ast.ite(ast.ge(n, ast.intconst(0)), n, ast.neg(n)))


def gen_hilbert_formulas(h: HilbertSystem) -> Tuple[Dict[str, Term], List[Term]]:
    """The pre-desugaring encoding: per variable x, a singleton set x' that
    the absolute-value image constraint pins to nonnegative integers; per
    equation, the corresponding image constraint."""
    decls: Dict[str, Term] = {}
    out: List[Term] = []
    int_set = ast.set_sort(ast.INT)
    pair = ast.tuple_sort(ast.INT, ast.INT)

    def elem(x: str) -> Term:
        decls.setdefault(x, ast.var(x, ast.INT))
        return decls[x]

    def sing(x: str) -> Term:
        name = x + "_s"
        decls.setdefault(name, ast.var(name, int_set))
        return decls[name]

    for x in h.variables:
        xs = sing(x)
        out.append(ast.eq(xs, ast.map_of(_abs_lambda(), xs)))
        out.append(ast.eq(xs, ast.singleton(elem(x))))
    for equation in h.equations:
        kind = equation[0]
        if kind == "assign":
            _, x, k = equation
            out.append(ast.eq(sing(x), ast.singleton(ast.intconst(k))))
        elif kind == "copy":
            _, x, y = equation
            out.append(ast.eq(sing(x), sing(y)))
        elif kind == "sum":
            _, x, y, z = equation
            n = ast.fresh_var(ast.INT, "hn")
            shift = ast.mk_lam([(n.name, ast.INT)], ast.add(elem(y), n))
            out.append(ast.eq(sing(x), ast.map_of(shift, sing(z))))
        elif kind == "prod":
            _, x, y, z = equation
            v = elem(f"v_{y}_{z}")
            pname = f"p_{y}_{z}"
            decls.setdefault(pname, ast.var(pname, ast.set_sort(pair)))
            p = decls[pname]
            zero = ast.intconst(0)
            one = ast.intconst(1)
            m, n = ast.fresh_var(ast.INT, "hm"), ast.fresh_var(ast.INT, "hn")
            a, b = ast.fresh_var(ast.INT, "ha"), ast.fresh_var(ast.INT, "hb")
            pick = ast.mk_lam([(m.name, ast.INT), (n.name, ast.INT)],
                              ast.ite(ast.eq(m, one), n, v))
            # ite over pairs, encoded componentwise
            step = ast.mk_lam(
                [(a.name, ast.INT), (b.name, ast.INT)],
                ast.tuple_cons(ast.ite(ast.eq(a, one), a, ast.add(a, ast.neg(one))),
                               ast.ite(ast.eq(a, one), b, ast.add(b, elem(z)))))
            phi = ast.and_(
                ast.eq(sing(x), ast.singleton(v)),
                ast.eq(ast.singleton(v), ast.map_of(pick, p)),
                ast.eq(p, ast.union(ast.singleton(ast.tuple_cons(elem(y), elem(z))),
                                    ast.map_of(step, p))))
            out.append(ast.or_(
                ast.and_(ast.eq(elem(y), zero), ast.eq(sing(x), ast.singleton(zero))),
                ast.and_(ast.eq(elem(z), zero), ast.eq(sing(x), ast.singleton(zero))),
                ast.and_(ast.not_(ast.eq(elem(y), zero)),
                         ast.not_(ast.eq(elem(z), zero)), phi)))
        else:
            raise ValueError(f"unknown equation kind {kind}")
    return decls, out


def gen_hilbert(h: HilbertSystem) -> Script:
    """The solver-ready script: the encoding with all map terms eliminated."""
    decls, formulas = gen_hilbert_formulas(h)
    desugared = [preprocess.desugar_map(f) for f in formulas]
    script = Script(check_sat=True)
    for name, v in decls.items():
        script.declarations[name] = v
    extra = set()
    for f in desugared:
        for v in ast.free_vars(f):
            if v not in decls.values():
                extra.add(v)
    for v in sorted(extra, key=lambda t: t.index):
        script.declarations[v.name] = v
    script.assertions = desugared
    return script


def random_hilbert(seed: int, n_vars: int = 3, n_eqs: int = 3) -> HilbertSystem:
    """A solvable-by-construction system: values are fixed first, equations
    emitted consistently with them."""
    rng = random.Random(seed)
    names = [f"h{i}" for i in range(n_vars)]
    values = {x: rng.randint(0, 4) for x in names}
    eqs: List[tuple] = []
    eqs.append(("assign", names[0], values[names[0]]))
    for _ in range(n_eqs):
        kind = rng.choice(["assign", "copy", "sum", "prod"])
        if kind == "assign":
            x = rng.choice(names)
            eqs.append(("assign", x, values[x]))
        elif kind == "copy":
            x = rng.choice(names)
            y = rng.choice(names)
            if values[x] == values[y]:
                eqs.append(("copy", x, y))
        elif kind == "sum":
            y, z = rng.choice(names), rng.choice(names)
            total = values[y] + values[z]
            x = next((w for w in names if values[w] == total), None)
            if x is None:
                x = f"h{len(names)}"
                names.append(x)
                values[x] = total
            eqs.append(("sum", x, y, z))
        else:
            y, z = rng.choice(names), rng.choice(names)
            prod = values[y] * values[z]
            x = next((w for w in names if values[w] == prod), None)
            if x is None:
                x = f"h{len(names)}"
                names.append(x)
                values[x] = prod
            eqs.append(("prod", x, y, z))
    return HilbertSystem(names, eqs)


# ---------------------------------------------------------------------------
# Language validation for the map-term fragment

def _is_lia_term(t: Term, scalars: set) -> bool:
    if t.op == "int":
        return True
    if t.is_var:
        return t.sort == ast.INT
    if t.op == "mul":
        return t.args[0].op == "int" and _is_lia_term(t.args[1], scalars)
    if t.op == "add":
        return all(_is_lia_term(a, scalars) for a in t.args)
    if t.op == "neg":
        return _is_lia_term(t.args[0], scalars)
    if t.op == "ite":
        return _is_lia_constraint(t.args[0], scalars) and \
            _is_lia_term(t.args[1], scalars) and _is_lia_term(t.args[2], scalars)
    return False


def _is_lia_constraint(t: Term, scalars: set) -> bool:
    if t.op in ("eq", "gt", "ge"):
        return all(_is_lia_term(a, scalars) for a in t.args)
    if t.op in ("and", "or"):
        return all(_is_lia_constraint(a, scalars) for a in t.args)
    if t.op == "not":
        return _is_lia_constraint(t.args[0], scalars)
    return False


def _is_lpi_elem(t: Term) -> bool:
    if t.op == "int" or (t.is_var and not t.sort.is_set):
        return not t.sort.is_tuple if t.is_var else True
    if t.op == "tuple":
        return len(t.args) == 2 and all(a.is_var for a in t.args)
    return False


def _is_lpi_lambda(lam: ast.Lam) -> bool:
    body = lam.body
    if len(lam.binders) == 1:
        return _is_lia_term(body, set())
    if len(lam.binders) == 2:
        if body.op == "tuple":
            return len(body.args) == 2 and all(
                _is_lia_term(a, set()) for a in body.args)
        return _is_lia_term(body, set())
    return False


def _is_lpi_set(t: Term) -> bool:
    if t.is_var:
        return True
    if t.op == "single":
        return _is_lpi_elem(t.args[0])
    if t.op in ("union", "inter"):
        return all(_is_lpi_set(a) for a in t.args)
    if t.op == "map":
        return _is_lpi_lambda(t.lam) and _is_lpi_set(t.args[0])
    return False


def validate_lpi(phi: Term) -> bool:
    """True iff the formula derives from the restricted map-term grammar:
    only integers and integer pairs as elements, arithmetic only inside the
    function arguments of map terms."""
    op = phi.op
    if op in ("and", "or"):
        return all(validate_lpi(a) for a in phi.args)
    if op == "not":
        return validate_lpi(phi.args[0])
    if op == "member":
        return _is_lpi_elem(phi.args[0]) and _is_lpi_set(phi.args[1])
    if op == "subset":
        return all(_is_lpi_set(a) for a in phi.args)
    if op == "eq":
        if phi.args[0].sort.is_set:
            return all(_is_lpi_set(a) for a in phi.args)
        return all(_is_lpi_elem(a) for a in phi.args)
    return False


# ---------------------------------------------------------------------------
# Random fragment instances

@dataclass
class Profile:
    element: str = "int"      # 'int' or 'u'
    n_elem_vars: int = 3
    n_set_vars: int = 3
    n_rel_vars: int = 0
    n_assertions: int = 3
    depth: int = 2
    in_f: bool = True
    with_filters: bool = True
    with_quantifiers: bool = True
    with_products: bool = False
    nested_quantifiers: bool = False
    int_lo: int = -2
    int_hi: int = 2


DEFAULT_PROFILE = Profile(n_rel_vars=1, with_products=True)
DIFFERENTIAL_PROFILE = Profile(element="u", n_elem_vars=2, n_set_vars=3,
                               n_assertions=3, depth=2)


class _Gen:
    def __init__(self, seed: int, profile: Profile):
        self.rng = random.Random(seed)
        self.p = profile
        self.esort = ast.INT if profile.element == "int" else ast.uninterpreted("U")
        self.ssort = ast.set_sort(self.esort)
        self.rsort = ast.rel_sort(self.esort, self.esort)
        self.elem_vars = [ast.var(f"x{i}", self.esort)
                          for i in range(profile.n_elem_vars)]
        self.set_vars = [ast.var(f"s{i}", self.ssort)
                         for i in range(profile.n_set_vars)]
        self.rel_vars = [ast.var(f"r{i}", self.rsort)
                         for i in range(profile.n_rel_vars)]
        self.binder_counter = 0

    def const(self) -> Term:
        return ast.intconst(self.rng.randint(self.p.int_lo, self.p.int_hi))

    def elem(self) -> Term:
        if self.esort == ast.INT and self.rng.random() < 0.4:
            return self.const()
        return self.rng.choice(self.elem_vars)

    def predicate(self, elem_sort: Sort, force_set_term: bool = False) -> ast.Lam:
        self.binder_counter += 1
        if elem_sort.is_tuple:
            names = [f"q{self.binder_counter}a", f"q{self.binder_counter}b"]
            params = list(zip(names, elem_sort.args))
            b0, b1 = (ast.var(n, s) for n, s in params)
            if force_set_term:
                body = ast.member(b0, self.rng.choice(self.set_vars))
            elif elem_sort.args[0] == ast.INT:
                body = self.rng.choice([ast.eq(b0, b1), ast.gt(b0, b1),
                                        ast.ge(b1, b0)])
            else:
                body = ast.eq(b0, b1)
            if self.rng.random() < 0.3:
                body = ast.not_(body)
            return ast.mk_lam(params, body)
        name = f"q{self.binder_counter}"
        b = ast.var(name, elem_sort)
        if force_set_term:
            body = ast.member(b, self.rng.choice(self.set_vars))
        elif elem_sort == ast.INT:
            other = self.elem()
            body = self.rng.choice([ast.gt(b, other), ast.ge(b, other),
                                    ast.eq(b, other)])
        else:
            body = ast.eq(b, self.rng.choice(self.elem_vars))
        if self.rng.random() < 0.3:
            body = ast.not_(body)
        return ast.mk_lam([(name, elem_sort)], body)

    def set_term(self, depth: int) -> Term:
        choices = ["var", "var"]
        if depth > 0:
            choices += ["union", "inter", "diff"]
            if self.p.with_filters:
                choices += ["filter"]
            choices += ["single", "empty"]
        kind = self.rng.choice(choices)
        if kind == "var" or not depth:
            return self.rng.choice(self.set_vars)
        if kind == "empty":
            return ast.empty_set(self.ssort)
        if kind == "single":
            return ast.singleton(self.elem())
        if kind == "filter":
            return ast.filter_of(self.predicate(self.esort),
                                 self.set_term(depth - 1))
        build = {"union": ast.union, "inter": ast.inter, "diff": ast.diff}[kind]
        return build(self.set_term(depth - 1), self.set_term(depth - 1))

    def rel_term(self, depth: int) -> Term:
        if not self.rel_vars or (depth == 0 or self.rng.random() < 0.4):
            if self.rel_vars:
                return self.rng.choice(self.rel_vars)
        if self.p.with_products and self.rng.random() < 0.5:
            return ast.product(self.set_term(depth - 1), self.set_term(depth - 1))
        if self.rel_vars:
            build = self.rng.choice([ast.union, ast.inter, ast.diff])
            return build(self.rel_term(depth - 1), self.rel_term(depth - 1))
        return ast.product(self.set_term(depth - 1), self.set_term(depth - 1))

    def atom(self, force_set_pred: bool = False) -> Term:
        if force_set_pred:
            # guarantee one filter whose predicate mentions a set term
            bad = ast.filter_of(self.predicate(self.esort, force_set_term=True),
                                self.set_term(max(self.p.depth - 1, 0)))
            return ast.member(self.elem(), bad)
        kinds = ["member", "seteq", "elemeq", "subset"]
        if self.p.with_quantifiers and self.p.with_filters:
            kinds += ["quant"]
        if self.esort == ast.INT:
            kinds += ["arith"]
        if self.p.n_rel_vars or self.p.with_products:
            kinds += ["relmember"]
        kind = self.rng.choice(kinds)
        if kind == "member":
            return ast.member(self.elem(), self.set_term(self.p.depth))
        if kind == "relmember":
            pair = ast.tuple_cons(self.elem(), self.elem())
            return ast.member(pair, self.rel_term(self.p.depth))
        if kind == "seteq":
            return ast.eq(self.set_term(self.p.depth),
                          self.set_term(self.p.depth))
        if kind == "elemeq":
            return ast.eq(self.rng.choice(self.elem_vars), self.elem())
        if kind == "subset":
            return ast.subset(self.set_term(self.p.depth - 1),
                              self.set_term(self.p.depth - 1))
        if kind == "arith":
            return self.rng.choice([ast.gt, ast.ge])(self.elem(), self.elem())
        # bounded quantifier
        s = self.set_term(self.p.depth - 1)
        pred = self.predicate(self.esort)
        quant = ast.set_all if self.rng.random() < 0.5 else ast.set_some
        if self.p.nested_quantifiers and self.rng.random() < 0.5:
            inner_s = self.set_term(self.p.depth - 1)
            inner = self.predicate(self.esort)
            self.binder_counter += 1
            outer_name = f"q{self.binder_counter}"
            ob = ast.var(outer_name, self.esort)
            inner_quant = ast.set_all if self.rng.random() < 0.5 else ast.set_some
            body = inner_quant(inner, inner_s)
            return quant(ast.mk_lam([(outer_name, self.esort)], body), s)
        return quant(pred, s)

    def formula(self, force_set_pred: bool = False) -> Term:
        n = self.rng.randint(1, 2)
        parts = []
        for i in range(n):
            a = self.atom(force_set_pred if i == 0 else False)
            if self.rng.random() < 0.35:
                a = ast.not_(a)
            parts.append(a)
        if len(parts) == 1:
            return parts[0]
        return (ast.and_ if self.rng.random() < 0.6 else ast.or_)(*parts)

    def script(self) -> Script:
        s = Script(check_sat=True)
        if self.esort.kind == "un":
            s.sorts["U"] = self.esort
        for v in self.elem_vars + self.set_vars + self.rel_vars:
            s.declarations[v.name] = v
        for i in range(self.p.n_assertions):
            force = (not self.p.in_f) and i == 0
            s.assertions.append(self.formula(force_set_pred=force))
        return s


def gen_random(seed: int, profile: Optional[Profile] = None) -> Script:
    """Deterministic per seed; with an in-fragment profile every produced
    disjunct classifies inside the decidable fragment."""
    return _Gen(seed, profile or DEFAULT_PROFILE).script()
