"""Element-theory oracles: EUF over uninterpreted sorts and tuples, linear
integer arithmetic, and their disjoint combination.

Every oracle decides conjunctions of element literals outright (no third
verdict) and returns a satisfying assignment on sat.  Tuple literals are
decomposed by injectivity before routing: after decomposition the integer and
uninterpreted parts share no variables, so the combination is a product of
independent checks.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gcd
from typing import Dict, List, Optional, Tuple

from . import ast
from .ast import Lit, Term
from .errors import OracleIncomplete, SetRelError, UnsupportedLiteral
from .values import UValue

MAX_BRANCH_DEPTH = 200

# work budget per oracle call; exhausting it aborts the call so the solver
# can surface a sound `unknown` instead of grinding on a huge element store
DEFAULT_BUDGET = 2_000_000


class OracleBudgetExceeded(SetRelError):
    pass


class _Meter:
    __slots__ = ("left",)

    def __init__(self, budget: int):
        self.left = budget

    def spend(self, n: int = 1) -> None:
        self.left -= n
        if self.left < 0:
            raise OracleBudgetExceeded("element oracle work budget exhausted")


@dataclass
class OracleVerdict:
    sat: bool
    assignment: Dict[Term, object] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.sat


UNSAT = OracleVerdict(False)


# ---------------------------------------------------------------------------
# Tuple decomposition (memoized per literal; terms are interned)

_decompose_cache: Dict[Lit, Tuple[Optional[tuple], Optional[tuple]]] = {}


def _eq_parts(a: Term, b: Term, out: List[Tuple[Term, Term]]) -> None:
    if a.sort.is_tuple:
        if a.op != "tuple" or b.op != "tuple":
            raise UnsupportedLiteral(f"opaque tuple term in {a!r} = {b!r}")
        for x, y in zip(a.args, b.args):
            _eq_parts(x, y, out)
    else:
        out.append((a, b))


def _decompose_lit(l: Lit) -> Tuple[Optional[tuple], Optional[tuple]]:
    """(base literals, disequality case list) for one literal."""
    hit = _decompose_cache.get(l)
    if hit is not None:
        return hit
    a = l.atom
    if a.op == "eq" and a.args[0].sort.is_tuple:
        parts: List[Tuple[Term, Term]] = []
        _eq_parts(a.args[0], a.args[1], parts)
        if not l.neg:
            out = (tuple(ast.eq_lit(x, y) for x, y in parts), None)
        else:
            out = (None, tuple(ast.eq_lit(x, y, pos=False) for x, y in parts))
    else:
        out = ((l,), None)
    _decompose_cache[l] = out
    return out


def _decompose(lits) -> Tuple[List[Lit], List[List[Lit]]]:
    """Split tuple equalities into component literals; each tuple disequality
    becomes a disjunction of component disequalities (one case list)."""
    base: List[Lit] = []
    cases: List[List[Lit]] = []
    for l in lits:
        flat, case = _decompose_lit(l)
        if flat is not None:
            base.extend(flat)
        if case is not None:
            cases.append(list(case))
    return base, cases


# ---------------------------------------------------------------------------
# EUF over scalar terms

class _UnionFind:
    def __init__(self) -> None:
        self.parent: Dict[int, int] = {}
        self.items: Dict[int, Term] = {}
        self.order: List[int] = []

    def add(self, t: Term) -> int:
        if t.id not in self.parent:
            self.parent[t.id] = t.id
            self.items[t.id] = t
            self.order.append(t.id)
        return self.find(t.id)

    def find(self, i: int) -> int:
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def union(self, a: Term, b: Term) -> None:
        ra, rb = self.add(a), self.add(b)
        if ra != rb:
            # keep the earliest-seen root for deterministic value indices
            if self.order.index(ra) > self.order.index(rb):
                ra, rb = rb, ra
            self.parent[rb] = ra


def _euf_scalars(eqs, diseqs, want_uf: bool = False):
    """Decide scalar equalities/disequalities over uninterpreted sorts and
    constants; returns an assignment (optionally with the union-find) or
    None."""
    uf = _UnionFind()
    for a, b in eqs:
        uf.union(a, b)
    for a, b in diseqs:
        uf.add(a)
        uf.add(b)
        if uf.find(a.id) == uf.find(b.id):
            return None
    # one constant per class at most
    const_of: Dict[int, Term] = {}
    for i in uf.order:
        t = uf.items[i]
        if t.op in ("int", "bool"):
            r = uf.find(i)
            other = const_of.get(r)
            if other is not None and other.value != t.value:
                return None
            const_of.setdefault(r, t)
    # Bool has only two values: 2-color Bool classes along disequality edges
    bool_value: Dict[int, bool] = {}
    for r, c in const_of.items():
        if c.op == "bool":
            bool_value[r] = c.value
    bool_edges: Dict[int, List[int]] = {}
    for a, b in diseqs:
        if a.sort == ast.BOOL:
            ra, rb = uf.find(a.id), uf.find(b.id)
            bool_edges.setdefault(ra, []).append(rb)
            bool_edges.setdefault(rb, []).append(ra)
    parity: Dict[int, bool] = {}
    for start in list(bool_edges):
        if start in parity:
            continue
        component = []
        parity[start] = False
        stack = [start]
        while stack:
            node = stack.pop()
            component.append(node)
            for nb in bool_edges.get(node, ()):
                if nb in parity:
                    if parity[nb] == parity[node]:
                        return None  # odd cycle: no 2-coloring
                else:
                    parity[nb] = not parity[node]
                    stack.append(nb)
        # align the component's parity with any constants inside it
        flip = None
        for node in component:
            forced = bool_value.get(node)
            if forced is not None:
                want = forced != parity[node]
                if flip is None:
                    flip = want
                elif flip != want:
                    return None
        flip = bool(flip)
        for node in component:
            val = parity[node] != flip
            if node in bool_value and bool_value[node] != val:
                return None
            bool_value[node] = val
    assignment: Dict[Term, object] = {}
    fresh: Dict[str, int] = {}
    class_value: Dict[int, object] = {}
    used_ints = {uf.items[i].value for i in uf.order if uf.items[i].op == "int"}
    next_int = max(used_ints, default=-1) + 1
    for i in uf.order:
        r = uf.find(i)
        if r not in class_value:
            c = const_of.get(r)
            if c is not None:
                class_value[r] = c.value
            else:
                srt = uf.items[r].sort
                if srt == ast.INT:
                    class_value[r] = next_int
                    next_int += 1
                elif srt == ast.BOOL:
                    class_value[r] = bool_value.get(r, False)
                else:
                    k = fresh.get(srt.name, 0)
                    fresh[srt.name] = k + 1
                    class_value[r] = UValue(srt.name, k)
        t = uf.items[i]
        if t.is_var:
            assignment[t] = class_value[r]
    if want_uf:
        return assignment, uf
    return assignment


def euf_check(lits) -> OracleVerdict:
    """Equality with uninterpreted sorts, constants, and tuples."""
    for l in lits:
        for t in ast.subterms(l.atom):
            if t.op in ("add", "neg", "mul", "gt", "ge", "ite"):
                raise UnsupportedLiteral(f"arithmetic literal {l!r} in euf oracle")
    base, cases = _decompose(lits)
    for combo in _case_combos(cases):
        chosen = list(base) + [cases[i][j] for i, j in enumerate(combo)]
        eqs, diseqs = [], []
        for l in chosen:
            (diseqs if l.neg else eqs).append((l.atom.args[0], l.atom.args[1]))
        assignment = _euf_scalars(eqs, diseqs)
        if assignment is not None:
            return OracleVerdict(True, assignment)
    return UNSAT


def _case_combos(cases: List[List[Lit]], cap: int = 1 << 14):
    """Index combinations over the tuple-disequality cases, with a budget."""
    if not cases:
        yield ()
        return
    n = 0
    for combo in itertools.product(*[range(len(c)) for c in cases]):
        n += 1
        if n > cap:
            raise OracleBudgetExceeded(
                "too many tuple-disequality case combinations")
        yield combo


# ---------------------------------------------------------------------------
# Linear integer arithmetic

def _linearize(t: Term, coeffs: Dict[Term, int], k: int) -> None:
    if t.op == "int":
        coeffs[None] = coeffs.get(None, 0) + k * t.value
    elif t.op == "bool":
        coeffs[None] = coeffs.get(None, 0) + (k if t.value else 0)
    elif t.is_var:
        coeffs[t] = coeffs.get(t, 0) + k
    elif t.op == "add":
        for a in t.args:
            _linearize(a, coeffs, k)
    elif t.op == "neg":
        _linearize(t.args[0], coeffs, -k)
    elif t.op == "mul":
        _linearize(t.args[1], coeffs, k * t.args[0].value)
    elif t.op == "ite":
        raise UnsupportedLiteral("ite reached the arithmetic oracle")
    else:
        raise UnsupportedLiteral(f"non-linear term {t!r}")


_row_cache: Dict[Tuple[int, int, int], Tuple[Dict[Term, int], int]] = {}


def _row(a: Term, b: Term, shift: int) -> Tuple[Dict[Term, int], int]:
    """a - b - shift as (coeffs, const)."""
    key = (a.id, b.id, shift)
    hit = _row_cache.get(key)
    if hit is not None:
        return hit
    coeffs: Dict[Term, int] = {}
    _linearize(a, coeffs, 1)
    _linearize(b, coeffs, -1)
    const = coeffs.pop(None, 0) - shift
    out = ({v: c for v, c in coeffs.items() if c != 0}, const)
    _row_cache[key] = out
    return out


def _tighten(row: Tuple[Dict[Term, int], int]) -> Tuple[Dict[Term, int], int]:
    """Divide by the gcd of the coefficients, rounding the constant down;
    sound and complete for integer solutions."""
    coeffs, const = row
    if not coeffs:
        return row
    g = 0
    for c in coeffs.values():
        g = gcd(g, abs(c))
    if g <= 1:
        return row
    return ({v: c // g for v, c in coeffs.items()}, floor(Fraction(const, g)))


def _dedupe(rows: List[Tuple[Dict[Term, int], int]]
            ) -> List[Tuple[Dict[Term, int], int]]:
    """Keep only the tightest row per coefficient vector."""
    best: Dict[tuple, Tuple[Dict[Term, int], int]] = {}
    for coeffs, const in rows:
        key = tuple(sorted((v.id, c) for v, c in coeffs.items()))
        old = best.get(key)
        if old is None or const < old[1]:
            best[key] = (coeffs, const)
    return list(best.values())


def _fm_solve(ineqs: List[Tuple[Dict[Term, int], int]], meter: _Meter
              ) -> Optional[Dict[Term, Fraction]]:
    """Rational feasibility of rows sum(c*v) + d >= 0 by Fourier-Motzkin with
    integer tightening; returns a rational witness."""
    rows = _dedupe(_tighten(r) for r in ineqs)
    order: List[Term] = []
    saved: List[List[Tuple[Dict[Term, int], int]]] = []
    while True:
        for coeffs, const in rows:
            if not coeffs and const < 0:
                return None
        occur: Dict[Term, List[int]] = {}
        for coeffs, _ in rows:
            for v, c in coeffs.items():
                occur.setdefault(v, [0, 0])[0 if c > 0 else 1] += 1
        if not occur:
            break
        # eliminate the variable producing the fewest combined rows
        v = min(occur, key=lambda u: (occur[u][0] * occur[u][1], u.index))
        lowers, uppers, rest = [], [], []
        mine = []
        for row in rows:
            c = row[0].get(v, 0)
            if c > 0:
                lowers.append(row)
            elif c < 0:
                uppers.append(row)
            else:
                rest.append(row)
            if c != 0:
                mine.append(row)
        order.append(v)
        saved.append(mine)
        new_rows = rest
        for lc, ld in lowers:
            for uc, ud in uppers:
                meter.spend(len(lc) + len(uc))
                a, b = lc[v], -uc[v]
                combined: Dict[Term, int] = {}
                for u, c in lc.items():
                    if u is not v:
                        combined[u] = combined.get(u, 0) + b * c
                for u, c in uc.items():
                    if u is not v:
                        combined[u] = combined.get(u, 0) + a * c
                combined = {u: c for u, c in combined.items() if c != 0}
                new_rows.append(_tighten((combined, b * ld + a * ud)))
        rows = _dedupe(new_rows)
    # back-substitute, innermost variable first; variables that dropped out
    # with one-sided rows are free and default to 0
    solution: Dict[Term, Fraction] = {}
    for v, mine in zip(reversed(order), reversed(saved)):
        lo: Optional[Fraction] = None
        hi: Optional[Fraction] = None
        for coeffs, const in mine:
            rest = Fraction(const)
            for u, c in coeffs.items():
                if u is not v:
                    rest += c * solution.setdefault(u, Fraction(0))
            c = coeffs[v]
            if c > 0:
                bound = -rest / c
                lo = bound if lo is None or bound > lo else lo
            else:
                bound = rest / (-c)
                hi = bound if hi is None or bound < hi else hi
        if lo is None and hi is None:
            solution[v] = Fraction(0)
        elif lo is None:
            solution[v] = Fraction(min(0, floor(hi)))
        elif hi is None:
            solution[v] = Fraction(max(0, ceil(lo)))
        else:
            # prefer an integer inside the interval
            c = ceil(lo)
            solution[v] = Fraction(c) if c <= hi else lo
    return solution


class _EqElim:
    """Composed triangular substitution from the equality rows: every bound
    variable maps to an expression over free variables only."""

    def __init__(self, meter: Optional[_Meter] = None) -> None:
        self.subs: Dict[Term, Tuple[Dict[Term, int], int]] = {}
        self.infeasible = False
        self.meter = meter or _Meter(DEFAULT_BUDGET)

    def reduce(self, row: Tuple[Dict[Term, int], int]
               ) -> Tuple[Dict[Term, int], int]:
        coeffs, const = row
        if not any(v in self.subs for v in coeffs):
            return row
        self.meter.spend(len(coeffs))
        merged: Dict[Term, int] = {}
        for v, c in coeffs.items():
            hit = self.subs.get(v)
            if hit is None:
                merged[v] = merged.get(v, 0) + c
            else:
                expr, k0 = hit
                const += c * k0
                for u, k in expr.items():
                    merged[u] = merged.get(u, 0) + c * k
        return ({u: c for u, c in merged.items() if c != 0}, const)

    def add_equality(self, row: Tuple[Dict[Term, int], int]
                     ) -> Optional[Tuple[Dict[Term, int], int]]:
        """Absorbs the equality if some variable has a unit coefficient;
        otherwise returns the reduced row for the caller to keep.  Sets
        `infeasible` on an unsatisfiable constant or gcd mismatch."""
        coeffs, const = self.reduce(row)
        if not coeffs:
            if const != 0:
                self.infeasible = True
            return None
        g = 0
        for c in coeffs.values():
            g = gcd(g, abs(c))
        if const % g != 0:
            self.infeasible = True
            return None
        if g > 1:
            coeffs = {v: c // g for v, c in coeffs.items()}
            const //= g
        unit = next((v for v, c in coeffs.items() if abs(c) == 1), None)
        if unit is None:
            return (coeffs, const)
        c = coeffs[unit]
        expr = {v: (-k if c > 0 else k)
                for v, k in coeffs.items() if v is not unit}
        k0 = -const if c > 0 else const
        # rewrite existing entries mentioning the newly bound variable
        for w, (wexpr, wk) in list(self.subs.items()):
            cw = wexpr.get(unit)
            if cw:
                self.meter.spend(len(wexpr) + len(expr))
                merged = {u: k for u, k in wexpr.items() if u is not unit}
                for u, k in expr.items():
                    merged[u] = merged.get(u, 0) + cw * k
                self.subs[w] = ({u: k for u, k in merged.items() if k != 0},
                                wk + cw * k0)
        self.subs[unit] = (expr, k0)
        return None

    def extend(self, solution: Dict[Term, int]) -> Dict[Term, int]:
        out = dict(solution)
        for v, (expr, k0) in self.subs.items():
            val = k0
            for u, k in expr.items():
                val += k * out.get(u, 0)
            out[v] = val
        return out


def _int_point(ineqs: List[Tuple[Dict[Term, int], int]], meter: _Meter,
               depth: int = 0) -> Optional[Dict[Term, int]]:
    """An integer solution of rows sum(c*v) + d >= 0, by rational FM plus
    branch-and-bound on a fractional coordinate."""
    rational = _fm_solve(ineqs, meter)
    if rational is None:
        return None
    frac = next(((v, q) for v, q in rational.items() if q.denominator != 1),
                None)
    if frac is None:
        return {v: int(q) for v, q in rational.items()}
    if depth >= MAX_BRANCH_DEPTH:
        raise OracleIncomplete("branch-and-bound depth exceeded")
    v, q = frac
    for cut in (({v: -1}, floor(q)), ({v: 1}, -ceil(q))):
        got = _int_point(ineqs + [cut], meter, depth + 1)
        if got is not None:
            return got
    return None


_arith_cache: Dict[Lit, Tuple[str, Tuple[Dict[Term, int], int], frozenset]] = {}


def _translate_arith(l: Lit) -> Tuple[str, Tuple[Dict[Term, int], int], frozenset]:
    """Memoized row translation: ('eq'|'ineq'|'diseq', row, bool vars)."""
    hit = _arith_cache.get(l)
    if hit is not None:
        return hit
    a = l.atom
    bool_vars = []
    for t in ast.subterms(a):
        if t.sort is not None and t.sort.kind == "un":
            raise UnsupportedLiteral(
                f"uninterpreted-sort literal {l!r} in arithmetic oracle")
        if t.sort == ast.BOOL and t.is_var:
            bool_vars.append(t)
    if a.op == "eq":
        out = ("diseq" if l.neg else "eq", _row(a.args[0], a.args[1], 0),
               frozenset(bool_vars))
    elif a.op == "gt":
        row = _row(a.args[1], a.args[0], 0) if l.neg \
            else _row(a.args[0], a.args[1], 1)
        out = ("ineq", row, frozenset(bool_vars))
    elif a.op == "ge":
        row = _row(a.args[1], a.args[0], 1) if l.neg \
            else _row(a.args[0], a.args[1], 0)
        out = ("ineq", row, frozenset(bool_vars))
    else:
        raise UnsupportedLiteral(f"literal {l!r} in arithmetic oracle")
    _arith_cache[l] = out
    return out


def lia_check(lits, diseq_groups=()) -> OracleVerdict:
    """Conjunctions of linear integer constraints; Bool variables ride along
    as 0/1 integers.  A diseq group is a disjunction of rows of which at
    least one must be nonzero (tuple disequalities decompose to these)."""
    eq_rows, ineq_rows = [], []
    groups: List[List[Tuple[Dict[Term, int], int]]] = [list(g) for g in
                                                       diseq_groups]
    bool_vars = set()
    for l in lits:
        kind, row, bvs = _translate_arith(l)
        bool_vars |= bvs
        if kind == "eq":
            eq_rows.append(row)
        elif kind == "diseq":
            groups.append([row])
        else:
            ineq_rows.append(row)
    for g in groups:
        for coeffs, _ in g:
            for v in coeffs:
                if v.sort == ast.BOOL:
                    bool_vars.add(v)
    for b in bool_vars:
        ineq_rows.append(({b: 1}, 0))
        ineq_rows.append(({b: -1}, 1))
    # eliminate the equalities once, then branch only over the reduced system
    meter = _Meter(DEFAULT_BUDGET)
    elim = _EqElim(meter)
    kept = []
    for row in eq_rows:
        residue = elim.add_equality(row)
        if elim.infeasible:
            return UNSAT
        if residue is not None:
            kept.append(residue)
    ineqs = []
    for row in kept:
        coeffs, const = row
        ineqs.append(row)
        ineqs.append(({v: -c for v, c in coeffs.items()}, -const))
    for row in ineq_rows:
        coeffs, const = elim.reduce(row)
        if not coeffs:
            if const < 0:
                return UNSAT
            continue
        ineqs.append((coeffs, const))
    diseqs = []
    for g in groups:
        reduced = []
        satisfied = False
        for row in g:
            coeffs, const = elim.reduce(row)
            if not coeffs:
                if const != 0:
                    satisfied = True
                    break
                continue  # identically zero disjunct
            reduced.append((coeffs, const))
        if satisfied:
            continue
        if not reduced:
            return UNSAT
        diseqs.append(reduced)
    solution = _solve_with_diseqs(ineqs, diseqs, meter, 0)
    if solution is None:
        return UNSAT
    solution = elim.extend(solution)
    vars_seen = set(solution)
    for row in eq_rows + ineq_rows:
        vars_seen |= set(row[0])
    for g in groups:
        for row in g:
            vars_seen |= set(row[0])
    assignment: Dict[Term, object] = {}
    for v in vars_seen:
        val = solution.get(v, 0)
        assignment[v] = bool(val) if v.sort == ast.BOOL else val
    return OracleVerdict(True, assignment)


def _solve_with_diseqs(ineq_rows, diseq_groups, meter: _Meter, depth: int
                       ) -> Optional[Dict[Term, int]]:
    """Branch only on disequality groups the current solution violates (all
    disjunct rows zero); each branch adds a strict cut for one row, so a
    group is split at most once per path per row."""
    solution = _int_point(ineq_rows, meter)
    if solution is None:
        return None
    for group in diseq_groups:
        violated = all(
            const + sum(c * solution.get(v, 0) for v, c in coeffs.items()) == 0
            for coeffs, const in group)
        if violated:
            if depth >= MAX_BRANCH_DEPTH:
                raise OracleIncomplete("disequality branching depth exceeded")
            for coeffs, const in group:
                for sign in (1, -1):
                    cut = ({v: sign * c for v, c in coeffs.items()},
                           sign * const - 1)
                    got = _solve_with_diseqs(ineq_rows + [cut], diseq_groups,
                                             meter, depth + 1)
                    if got is not None:
                        return got
            return None
    return solution


# ---------------------------------------------------------------------------
# Combination

def _is_arith_lit(l: Lit) -> bool:
    a = l.atom
    if a.op in ("gt", "ge"):
        return True
    return a.args[0].sort in (ast.INT, ast.BOOL)


def combine(lits) -> OracleVerdict:
    """Disjoint combination: decompose tuples, then the integer and
    uninterpreted parts share no variables.  A tuple disequality is satisfied
    for free when some uninterpreted component pair sits in distinct
    congruence classes; the leftover integer disjunctions go to the
    arithmetic solver as disequality groups."""
    base, cases = _decompose(lits)
    arith = [l for l in base if _is_arith_lit(l)]
    rest = [l for l in base if not _is_arith_lit(l)]
    eqs, diseqs = [], []
    for l in rest:
        (diseqs if l.neg else eqs).append((l.atom.args[0], l.atom.args[1]))
    got = _euf_scalars(eqs, diseqs, want_uf=True)
    if got is None:
        return UNSAT
    euf_assignment, uf = got
    int_groups = []
    for group in cases:
        rows = []
        satisfied = False
        for l in group:
            a, b = l.atom.args
            if a.sort.kind == "un":
                # distinct classes receive distinct values
                if uf.add(a) != uf.add(b):
                    satisfied = True
                    break
            else:
                rows.append(_row(a, b, 0))
        if satisfied:
            continue
        if not rows:
            return UNSAT
        int_groups.append(rows)
    va = lia_check(arith, diseq_groups=int_groups)
    if not va:
        return UNSAT
    assignment = dict(va.assignment)
    assignment.update(euf_assignment)
    # complete values for uninterpreted variables only the groups mention,
    # one fresh value per class so the verdict evaluates cleanly
    next_u: Dict[str, int] = {}
    for v in assignment.values():
        if isinstance(v, UValue):
            next_u[v.sort_name] = max(next_u.get(v.sort_name, 0), v.index + 1)
    class_val: Dict[int, UValue] = {}
    for group in cases:
        for l in group:
            for t in l.atom.args:
                if t.sort.kind == "un" and t.is_var and t not in assignment:
                    r = uf.add(t)
                    val = class_val.get(r)
                    if val is None:
                        k = next_u.get(t.sort.name, 0)
                        next_u[t.sort.name] = k + 1
                        val = UValue(t.sort.name, k)
                        class_val[r] = val
                    assignment[t] = val
    # unconstrained scalar leftovers (e.g. integer components of a tuple
    # disequality already satisfied on the uninterpreted side)
    for l in lits:
        for v in ast.free_vars(l.atom):
            if v not in assignment:
                if v.sort == ast.INT:
                    assignment[v] = 0
                elif v.sort == ast.BOOL:
                    assignment[v] = False
    return OracleVerdict(True, assignment)


class Oracle:
    """Oracle facade selected by name: 'euf', 'lia', or 'auto'."""

    def __init__(self, kind: str = "auto"):
        if kind not in ("euf", "lia", "auto"):
            raise ValueError(f"unknown oracle {kind!r}")
        self.kind = kind
        self.calls = 0

    def check(self, lits) -> OracleVerdict:
        self.calls += 1
        if self.kind == "euf":
            return euf_check(lits)
        if self.kind == "lia":
            return lia_check(lits)
        return combine(lits)

    def supports(self, sort: ast.Sort) -> bool:
        if self.kind == "euf":
            return sort.kind in ("un", "tuple", "bool")
        if self.kind == "lia":
            return sort in (ast.INT, ast.BOOL)
        return True


class IncrementalOracle:
    """Assert/retract wrapper with version marks over a base oracle."""

    def __init__(self, base: Optional[Oracle] = None):
        self.base = base or Oracle("auto")
        self.lits: List[Lit] = []

    def assert_lit(self, l: Lit) -> None:
        self.lits.append(l)

    def mark(self) -> int:
        return len(self.lits)

    def undo_to(self, mark: int) -> None:
        del self.lits[mark:]

    def check(self) -> OracleVerdict:
        return self.base.check(self.lits)
