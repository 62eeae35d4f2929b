"""SMT-LIB-style concrete syntax: parser, script printer, and model printer.

This is the solver's only file interface.  Accepted commands:
set-logic, set-option, set-info, declare-sort, declare-const, declare-fun
(zero arity only), assert, check-sat, get-model, exit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import ast
from .ast import Sort, Term
from .errors import (ArityMismatch, ParseError, SetRelError, SortMismatch,
                     UndeclaredSymbol)
from .values import value_sort_key

MAX_NESTING = 500

_SYMBOL_EXTRA = "~@$%^&*_-+=<>.?/"


def _is_symbol_char(c: str) -> bool:
    return c.isalnum() or c in _SYMBOL_EXTRA


# ---------------------------------------------------------------------------
# Reader: text -> located s-expressions

@dataclass
class SNode:
    """Either an atom (value set) or a list (items set), with its location."""
    line: int
    col: int
    value: Optional[str] = None
    items: Optional[List["SNode"]] = None

    @property
    def is_atom(self) -> bool:
        return self.value is not None


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, c: str) -> None:
        self.pos += 1
        if c == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1

    def _skip_ws(self) -> None:
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c == ";":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance(self.text[self.pos])
            elif c.isspace():
                self._advance(c)
            else:
                return

    def read_all(self) -> List[SNode]:
        forms: List[SNode] = []
        stack: List[SNode] = []
        while True:
            self._skip_ws()
            if self.pos >= len(self.text):
                if stack:
                    raise ParseError(self.line, self.col, "unexpected end of input inside (")
                return forms
            line, col = self.line, self.col
            c = self.text[self.pos]
            if c == "(":
                self._advance(c)
                node = SNode(line, col, items=[])
                if len(stack) >= MAX_NESTING:
                    raise ParseError(line, col, "nesting too deep")
                stack.append(node)
            elif c == ")":
                self._advance(c)
                if not stack:
                    raise ParseError(line, col, "unexpected )")
                node = stack.pop()
                if stack:
                    stack[-1].items.append(node)
                else:
                    forms.append(node)
            elif _is_symbol_char(c):
                tok = []
                while self.pos < len(self.text) and _is_symbol_char(self.text[self.pos]):
                    tok.append(self.text[self.pos])
                    self._advance(self.text[self.pos])
                node = SNode(line, col, value="".join(tok))
                if stack:
                    stack[-1].items.append(node)
                else:
                    forms.append(node)
            else:
                raise ParseError(line, col, f"unexpected character {c!r}")


# ---------------------------------------------------------------------------
# Script

@dataclass
class Script:
    sorts: Dict[str, Sort] = field(default_factory=dict)
    declarations: Dict[str, Term] = field(default_factory=dict)  # name -> var
    assertions: List[Term] = field(default_factory=list)
    options: Dict[str, str] = field(default_factory=dict)
    logic: Optional[str] = None
    check_sat: bool = False
    want_model: bool = False

    def formula(self) -> Term:
        if not self.assertions:
            return ast.TRUE
        return ast.and_(*self.assertions)


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self) -> None:
        self.script = Script()

    def _err(self, node: SNode, msg: str) -> ParseError:
        return ParseError(node.line, node.col, msg)

    def _atom(self, node: SNode, what: str) -> str:
        if not node.is_atom:
            raise self._err(node, f"expected {what}")
        return node.value

    def parse_sort(self, node: SNode) -> Sort:
        try:
            if node.is_atom:
                name = node.value
                if name == "Int":
                    return ast.INT
                if name == "Bool":
                    return ast.BOOL
                if name in self.script.sorts:
                    return self.script.sorts[name]
                raise UndeclaredSymbol(node.line, node.col, f"unknown sort {name}")
            items = node.items
            if not items or not items[0].is_atom:
                raise self._err(node, "malformed sort")
            head = items[0].value
            if head == "Set":
                if len(items) != 2:
                    raise self._err(node, "Set takes one argument")
                return ast.set_sort(self.parse_sort(items[1]))
            if head == "Tuple":
                return ast.tuple_sort(*(self.parse_sort(n) for n in items[1:]))
            if head == "Relation" or head == "Rel":
                return ast.rel_sort(*(self.parse_sort(n) for n in items[1:]))
            raise self._err(node, f"unknown sort constructor {head}")
        except SortMismatch as e:
            e.line, e.col = e.line or node.line, e.col or node.col
            raise

    def parse_term(self, node: SNode, env: Dict[str, Term]) -> Term:
        try:
            return self._term(node, env)
        except SortMismatch as e:
            if e.line is None:
                e.line, e.col = node.line, node.col
            raise
        except ArityMismatch as e:
            raise self._err(node, str(e))

    def _term(self, node: SNode, env: Dict[str, Term]) -> Term:
        if node.is_atom:
            tok = node.value
            digits = tok[1:] if tok.startswith("-") else tok
            if digits.isdigit() and digits:
                return ast.intconst(int(tok))
            if tok == "true":
                return ast.TRUE
            if tok == "false":
                return ast.FALSE
            if tok in env:
                return env[tok]
            if tok in self.script.declarations:
                return self.script.declarations[tok]
            raise UndeclaredSymbol(node.line, node.col, f"undeclared symbol {tok}")
        items = node.items
        if not items:
            raise self._err(node, "empty expression")
        if not items[0].is_atom:
            raise self._err(items[0], "expected an operator symbol")
        head = items[0].value
        loc = items[0]

        def args(lo: int, hi: Optional[int] = None) -> List[Term]:
            n = len(items) - 1
            if n < lo or (hi is not None and n > hi):
                raise self._err(node, f"{head}: wrong number of arguments")
            return [self.parse_term(n, env) for n in items[1:]]

        if head == "as":
            # (as set.empty SORT)
            if len(items) != 3 or not items[1].is_atom or items[1].value != "set.empty":
                raise self._err(node, "only (as set.empty SORT) is supported")
            return ast.empty_set(self.parse_sort(items[2]))
        if head == "set.empty":
            raise self._err(node, "set.empty requires a sort ascription: (as set.empty SORT)")
        if head == "set.singleton":
            return ast.singleton(*args(1, 1))
        if head == "set.union":
            return self._fold_left(ast.union, args(2))
        if head == "set.inter":
            return self._fold_left(ast.inter, args(2))
        if head == "set.minus":
            return ast.diff(*args(2, 2))
        if head == "set.member":
            return ast.member(*args(2, 2))
        if head == "set.subset":
            return ast.subset(*args(2, 2))
        if head == "rel.product":
            return self._fold_left(ast.product, args(2))
        if head == "tuple":
            return ast.tuple_cons(*args(0))
        if head in ("set.filter", "set.all", "set.some", "set.map"):
            if len(items) != 3:
                raise self._err(node, f"{head} takes a lambda and a set")
            lam = self._lambda(items[1], env)
            s = self.parse_term(items[2], env)
            build = {"set.filter": ast.filter_of, "set.all": ast.set_all,
                     "set.some": ast.set_some, "set.map": ast.map_of}[head]
            return build(lam, s)
        if head == "and":
            return ast.and_(*args(1))
        if head == "or":
            return ast.or_(*args(1))
        if head == "not":
            return ast.not_(*args(1, 1))
        if head == "=>":
            a = args(2)
            out = a[-1]
            for f in reversed(a[:-1]):
                out = ast.or_(ast.not_(f), out)
            return out
        if head == "=":
            a = args(2)
            eqs = [ast.eq(x, y) for x, y in zip(a, a[1:])]
            return eqs[0] if len(eqs) == 1 else ast.and_(*eqs)
        if head == "ite":
            c, a, b = args(3, 3)
            if a.sort == ast.BOOL:
                return ast.or_(ast.and_(c, a), ast.and_(ast.not_(c), b))
            return ast.ite(c, a, b)
        if head == "+":
            return ast.add(*args(2))
        if head == "-":
            a = args(1)
            if len(a) == 1:
                return ast.neg(a[0])
            out = a[0]
            for t in a[1:]:
                out = ast.add(out, ast.neg(t))
            return out
        if head == "*":
            a = args(2, 2)
            if a[0].op == "int" and a[1].op == "int":
                return ast.intconst(a[0].value * a[1].value)
            return ast.mul(a[0], a[1])
        if head == ">":
            return ast.gt(*args(2, 2))
        if head == ">=":
            return ast.ge(*args(2, 2))
        if head == "<":
            a, b = args(2, 2)
            return ast.gt(b, a)
        if head == "<=":
            a, b = args(2, 2)
            return ast.ge(b, a)
        raise self._err(loc, f"unknown operator {head}")

    @staticmethod
    def _fold_left(f, a: List[Term]) -> Term:
        out = a[0]
        for t in a[1:]:
            out = f(out, t)
        return out

    def _lambda(self, node: SNode, env: Dict[str, Term]) -> ast.Lam:
        if node.is_atom or len(node.items) != 3 or not node.items[0].is_atom \
                or node.items[0].value != "lambda":
            raise self._err(node, "expected (lambda ((x S) ...) body)")
        binders_node = node.items[1]
        if binders_node.is_atom:
            raise self._err(binders_node, "expected a binder list")
        params: List[Tuple[str, Sort]] = []
        inner = dict(env)
        for b in binders_node.items:
            if b.is_atom or len(b.items) != 2 or not b.items[0].is_atom:
                raise self._err(b, "expected a (name Sort) binder")
            name = b.items[0].value
            srt = self.parse_sort(b.items[1])
            params.append((name, srt))
            inner[name] = ast.var(name, srt)
        body = self.parse_term(node.items[2], inner)
        return ast.mk_lam(params, body)

    def command(self, node: SNode) -> None:
        if node.is_atom:
            raise self._err(node, "expected a command")
        items = node.items
        if not items or not items[0].is_atom:
            raise self._err(node, "expected a command")
        head = items[0].value
        if head == "set-logic":
            if len(items) == 2 and items[1].is_atom:
                self.script.logic = items[1].value
            return
        if head == "set-info":
            return
        if head == "set-option":
            if len(items) == 3 and items[1].is_atom and items[2].is_atom:
                self.script.options[items[1].value] = items[2].value
            return
        if head == "declare-sort":
            if len(items) not in (2, 3) or not items[1].is_atom:
                raise self._err(node, "malformed declare-sort")
            if len(items) == 3 and items[2].value != "0":
                raise self._err(items[2], "only arity-0 sorts are supported")
            name = items[1].value
            if name in self.script.sorts or name in ("Int", "Bool"):
                raise self._err(items[1], f"sort {name} already declared")
            self.script.sorts[name] = ast.uninterpreted(name)
            return
        if head in ("declare-const", "declare-fun"):
            if head == "declare-const":
                if len(items) != 3:
                    raise self._err(node, "malformed declare-const")
                name_node, sort_node = items[1], items[2]
            else:
                if len(items) != 4:
                    raise self._err(node, "malformed declare-fun")
                name_node, arglist, sort_node = items[1], items[2], items[3]
                if arglist.is_atom or arglist.items:
                    raise self._err(arglist, "uninterpreted functions are not supported")
            name = self._atom(name_node, "a symbol")
            if name in self.script.declarations:
                raise self._err(name_node, f"symbol {name} already declared")
            srt = self.parse_sort(sort_node)
            self.script.declarations[name] = ast.var(name, srt)
            return
        if head == "assert":
            if len(items) != 2:
                raise self._err(node, "assert takes one formula")
            f = self.parse_term(items[1], {})
            if f.sort != ast.BOOL:
                raise SortMismatch("assert needs a Bool term", expected=ast.BOOL,
                                   got=f.sort, line=items[1].line, col=items[1].col)
            self.script.assertions.append(f)
            return
        if head == "check-sat":
            self.script.check_sat = True
            return
        if head == "get-model":
            self.script.want_model = True
            return
        if head == "exit":
            return
        raise self._err(items[0], f"unknown command {head}")


def parse(text: str) -> Script:
    try:
        forms = _Reader(text).read_all()
    except RecursionError:
        raise ParseError(0, 0, "input too deeply nested")
    p = _Parser()
    for form in forms:
        p.command(form)
    return p.script


# ---------------------------------------------------------------------------
# Printing

def sort_to_sexpr(s: Sort) -> str:
    return str(s)


def _binder_names(lam: ast.Lam, taken: set) -> List[str]:
    names = []
    for i, _ in enumerate(lam.binders):
        j = i
        name = f"_x{j}"
        while name in taken:
            j += len(lam.binders)
            name = f"_x{j}"
        taken.add(name)
        names.append(name)
    return names


def term_to_sexpr(t: Term) -> str:
    op = t.op
    if op == "var":
        return t.name
    if op == "int":
        return str(t.value) if t.value >= 0 else f"(- {-t.value})"
    if op == "bool":
        return "true" if t.value else "false"
    if op == "empty":
        return f"(as set.empty {t.sort})"
    spelling = {
        "single": "set.singleton", "union": "set.union", "inter": "set.inter",
        "diff": "set.minus", "product": "rel.product", "member": "set.member",
        "subset": "set.subset", "eq": "=", "gt": ">", "ge": ">=",
        "and": "and", "or": "or", "not": "not", "tuple": "tuple",
        "add": "+", "neg": "-", "mul": "*", "ite": "ite",
    }
    if op in spelling:
        inner = " ".join(term_to_sexpr(a) for a in t.args)
        return f"({spelling[op]} {inner})" if inner else f"({spelling[op]})"
    if op in ("filter", "map", "setall", "setsome"):
        word = {"filter": "set.filter", "map": "set.map",
                "setall": "set.all", "setsome": "set.some"}[op]
        return f"({word} {lam_to_sexpr(t.lam)} {term_to_sexpr(t.args[0])})"
    raise SetRelError(f"cannot print operator {op}")


def lam_to_sexpr(lam: ast.Lam) -> str:
    taken = {v.name for v in ast.free_vars(lam.body)}
    names = _binder_names(lam, taken)
    body = ast.subst(lam.body, {b: ast.var(n, b.sort)
                                for b, n in zip(lam.binders, names)})
    binders = " ".join(f"({n} {b.sort})" for n, b in zip(names, lam.binders))
    return f"(lambda ({binders}) {term_to_sexpr(body)})"


def print_script(script: Script) -> str:
    # internally generated names may carry reserved characters; rename them
    # so the printed script reparses
    rename: Dict[Term, Term] = {}
    names: Dict[str, str] = {}
    taken = set(script.declarations)
    counter = 0
    for name, v in script.declarations.items():
        if all(_is_symbol_char(c) for c in name):
            names[name] = name
            continue
        while True:
            fresh = f"_g{counter}"
            counter += 1
            if fresh not in taken:
                break
        taken.add(fresh)
        names[name] = fresh
        rename[v] = ast.var(fresh, v.sort)
    lines: List[str] = []
    if script.logic:
        lines.append(f"(set-logic {script.logic})")
    for k, v in script.options.items():
        lines.append(f"(set-option {k} {v})")
    for name in script.sorts:
        lines.append(f"(declare-sort {name} 0)")
    for name, v in script.declarations.items():
        lines.append(f"(declare-const {names[name]} {v.sort})")
    for f in script.assertions:
        if rename:
            f = ast.subst(f, rename)
        lines.append(f"(assert {term_to_sexpr(f)})")
    if script.check_sat:
        lines.append("(check-sat)")
    if script.want_model:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def value_to_sexpr(v, sort: Sort) -> str:
    if sort == ast.BOOL:
        return "true" if v else "false"
    if sort == ast.INT:
        return str(v) if v >= 0 else f"(- {-v})"
    if sort.kind == "un":
        return f"(as @{v.sort_name}_{v.index} {sort})"
    if sort.is_tuple:
        inner = " ".join(value_to_sexpr(x, srt) for x, srt in zip(v, sort.args))
        return f"(tuple {inner})" if inner else "(tuple)"
    if sort.is_set:
        elems = sorted(v, key=value_sort_key)
        if not elems:
            return f"(as set.empty {sort})"
        parts = [f"(set.singleton {value_to_sexpr(x, sort.elem)})" for x in elems]
        out = parts[0]
        for p in parts[1:]:
            out = f"(set.union {out} {p})"
        return out
    raise SetRelError(f"unprintable sort {sort}")


def print_model(values: Dict[Term, object], declarations: Dict[str, Term]) -> str:
    lines = ["("]
    for name, v in declarations.items():
        if v in values:
            val = value_to_sexpr(values[v], v.sort)
            lines.append(f"  (define-fun {name} () {v.sort} {val})")
    lines.append(")")
    return "\n".join(lines)
