"""Direct evaluation and exhaustive finite-model enumeration.

This is the independent test oracle: `eval_term` evaluates any formula under
a candidate model by the plain operator semantics, and `enumerate_models`
searches all models over small finite carriers.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional

from . import ast
from .ast import Sort, Term
from .errors import SetRelError, UnassignedVariable
from .values import UValue


@dataclass
class Universe:
    """Finite carriers per sort: an Int window plus sizes for uninterpreted
    sorts.  Tuple and set carriers are derived."""
    int_lo: int = -2
    int_hi: int = 2
    un_sizes: Dict[str, int] = field(default_factory=dict)

    def carrier(self, sort: Sort) -> List[object]:
        if sort == ast.INT:
            return list(range(self.int_lo, self.int_hi + 1))
        if sort == ast.BOOL:
            return [False, True]
        if sort.kind == "un":
            n = self.un_sizes.get(sort.name)
            if n is None:
                raise SetRelError(f"no carrier declared for sort {sort}")
            return [UValue(sort.name, i) for i in range(n)]
        if sort.is_tuple:
            comps = [self.carrier(c) for c in sort.args]
            return [tuple(v) for v in itertools.product(*comps)]
        if sort.is_set:
            base = self.carrier(sort.elem)
            out: List[object] = []
            for mask in range(1 << len(base)):
                out.append(frozenset(base[i] for i in range(len(base))
                                     if mask >> i & 1))
            return out
        raise SetRelError(f"no carrier for sort {sort}")


def eval_term(t: Term, model: Dict[Term, object]):
    """Evaluate a term under a variable assignment; pure and total."""
    op = t.op
    if op == "var":
        if t in model:
            return model[t]
        raise UnassignedVariable(f"variable {t.name} has no value")
    if op == "int":
        return t.value
    if op == "bool":
        return t.value
    if op == "tuple":
        return tuple(eval_term(a, model) for a in t.args)
    if op == "empty":
        return frozenset()
    if op == "single":
        return frozenset((eval_term(t.args[0], model),))
    if op == "union":
        return eval_term(t.args[0], model) | eval_term(t.args[1], model)
    if op == "inter":
        return eval_term(t.args[0], model) & eval_term(t.args[1], model)
    if op == "diff":
        return eval_term(t.args[0], model) - eval_term(t.args[1], model)
    if op == "product":
        left = eval_term(t.args[0], model)
        right = eval_term(t.args[1], model)
        lt = t.args[0].sort.elem.is_tuple
        rt = t.args[1].sort.elem.is_tuple
        out = set()
        for a in left:
            for b in right:
                av = a if lt else (a,)
                bv = b if rt else (b,)
                out.add(av + bv)
        return frozenset(out)
    if op == "filter":
        s = eval_term(t.args[0], model)
        return frozenset(a for a in s if _apply(t.lam, a, model))
    if op == "map":
        s = eval_term(t.args[0], model)
        return frozenset(_apply(t.lam, a, model) for a in s)
    if op == "setall":
        s = eval_term(t.args[0], model)
        return all(_apply(t.lam, a, model) for a in s)
    if op == "setsome":
        s = eval_term(t.args[0], model)
        return any(_apply(t.lam, a, model) for a in s)
    if op == "member":
        return eval_term(t.args[0], model) in eval_term(t.args[1], model)
    if op == "subset":
        return eval_term(t.args[0], model) <= eval_term(t.args[1], model)
    if op == "eq":
        return eval_term(t.args[0], model) == eval_term(t.args[1], model)
    if op == "gt":
        return eval_term(t.args[0], model) > eval_term(t.args[1], model)
    if op == "ge":
        return eval_term(t.args[0], model) >= eval_term(t.args[1], model)
    if op == "add":
        return sum(eval_term(a, model) for a in t.args)
    if op == "neg":
        return -eval_term(t.args[0], model)
    if op == "mul":
        return eval_term(t.args[0], model) * eval_term(t.args[1], model)
    if op == "ite":
        return eval_term(t.args[1] if eval_term(t.args[0], model) else t.args[2],
                         model)
    if op == "and":
        return all(eval_term(a, model) for a in t.args)
    if op == "or":
        return any(eval_term(a, model) for a in t.args)
    if op == "not":
        return not eval_term(t.args[0], model)
    raise SetRelError(f"cannot evaluate operator {op}")


def _apply(lam: ast.Lam, value, model: Dict[Term, object]):
    inner = dict(model)
    if len(lam.binders) == 1:
        inner[lam.binders[0]] = value
    else:
        for b, v in zip(lam.binders, value):
            inner[b] = v
    return eval_term(lam.body, inner)


def eval_formula(formulas, model: Dict[Term, object]) -> bool:
    if isinstance(formulas, Term):
        formulas = [formulas]
    return all(eval_term(f, model) for f in formulas)


def _ordered_vars(formulas) -> List[Term]:
    vs = set()
    for f in formulas:
        vs |= ast.free_vars(f)
    elem = sorted((v for v in vs if not v.sort.is_set), key=lambda v: v.index)
    sets = sorted((v for v in vs if v.sort.is_set), key=lambda v: v.index)
    return elem + sets


def enumerate_models(formulas, universe: Universe,
                     variables: Optional[List[Term]] = None
                     ) -> Iterator[Dict[Term, object]]:
    """Yield all models over the universe, first variable varying fastest."""
    if isinstance(formulas, Term):
        formulas = [formulas]
    vs = variables if variables is not None else _ordered_vars(formulas)
    domains = [universe.carrier(v.sort) for v in vs]
    # itertools.product varies the last coordinate fastest, so reverse
    for combo in itertools.product(*reversed(domains)):
        model = dict(zip(vs, reversed(combo)))
        if eval_formula(formulas, model):
            yield model


def find_model(formulas, universe: Universe,
               variables: Optional[List[Term]] = None
               ) -> Optional[Dict[Term, object]]:
    """The lexicographically first model, or None if the universe has none."""
    for m in enumerate_models(formulas, universe, variables):
        return m
    return None

