"""The saturation calculus: configurations, derivation rules, a fair
depth-first strategy with trail backtracking, ranking instrumentation, and
model construction from saturated leaves.

Rule premises are closure queries against the S-side congruence index;
conclusions only ever grow the stores along a branch.  A rule instance is
skipped as redundant when one of its conclusion branches is already entailed,
and fresh variables are drawn from a registry keyed by the triggering
premises so identical premises reuse the same variable.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from . import ast, bruteforce, preprocess
from .ast import Lam, Lit, Term
from .congruence import CC
from .errors import OracleIncomplete, SetRelError
from .oracle import Oracle, OracleBudgetExceeded, OracleVerdict
from .preprocess import Disjunct, classify
from .values import UValue

TIER_CONFLICT, TIER_SAFE, TIER_BRANCH = 0, 1, 2

RULE_TIERS = {
    "e-conf": TIER_CONFLICT, "set-unsat": TIER_CONFLICT,
    "empty-unsat": TIER_CONFLICT, "eq-unsat": TIER_CONFLICT,
    "inter-up": TIER_SAFE, "inter-down": TIER_SAFE,
    "union-up": TIER_SAFE, "union-down": TIER_BRANCH,
    "diff-up": TIER_BRANCH, "diff-down": TIER_SAFE,
    "single-up": TIER_SAFE, "single-down": TIER_SAFE,
    "set-diseq": TIER_BRANCH,
    "prod-up": TIER_SAFE, "prod-down": TIER_SAFE,
    "e-ident": TIER_BRANCH,
    "filter-up": TIER_BRANCH, "filter-down": TIER_SAFE,
}

# ranking-function index per non-conflict rule
RANK_INDEX = {
    "inter-up": 1, "inter-down": 2, "union-up": 3, "union-down": 4,
    "diff-up": 5, "diff-down": 6, "single-up": 7, "single-down": 8,
    "set-diseq": 9, "prod-up": 10, "prod-down": 11, "e-ident": 12,
    "filter-up": 13, "filter-down": 14,
}


def rank_bounds(s0: int, e0: int) -> Dict[int, int]:
    """Bounds for the fourteen ranking functions from the initial term
    counts: e1 = e0 + s0^2 and e2 = e1^2 + 3*e1."""
    e1 = e0 + s0 * s0
    e2 = e1 * e1 + 3 * e1
    b = e2 * s0 * s0
    return {1: b, 2: b, 3: b, 4: b, 5: b, 6: b,
            7: s0, 8: e2 * s0, 9: s0 * s0,
            10: e2 * e2 * s0 * s0, 11: e2 * e2 * s0 * s0,
            12: e2 * e2, 13: e2 * s0, 14: e2 * s0}


@dataclass
class RankVector:
    components: Tuple[int, ...]  # f1..f14

    def __getitem__(self, i: int) -> int:
        return self.components[i - 1]


class RankMonitor:
    """Debug instrumentation: checks that every non-conflict application
    decreases exactly its own ranking component by one and that every
    component stays nonnegative."""

    def __init__(self) -> None:
        self.applications = 0
        self.violations: List[str] = []

    def on_apply(self, rule: str, before: RankVector, after: RankVector) -> None:
        self.applications += 1
        own = RANK_INDEX[rule]
        for i in range(1, 15):
            if i == own:
                if after[i] != before[i] - 1:
                    self.violations.append(
                        f"{rule}: f{i} changed {before[i]} -> {after[i]}")
            elif after[i] != before[i]:
                self.violations.append(
                    f"{rule}: foreign f{i} changed {before[i]} -> {after[i]}")
            if after[i] < 0:
                self.violations.append(f"{rule}: f{i} negative ({after[i]})")


@dataclass
class BranchDelta:
    s_adds: List[Lit] = field(default_factory=list)
    e_adds: List[Lit] = field(default_factory=list)
    markers: List[Tuple[Lam, Term, bool]] = field(default_factory=list)


@dataclass
class Instance:
    rule: str
    key: tuple
    deltas: Optional[List[BranchDelta]]  # None for conflict rules
    note: str = ""


@dataclass
class Limits:
    max_steps: int = 100_000
    timeout: Optional[float] = None
    stop: Optional[object] = None  # threading.Event-like; set() cancels


@dataclass
class SolveStats:
    steps: int = 0
    rule_counts: Dict[str, int] = field(default_factory=dict)
    oracle_calls: int = 0
    branches: int = 0
    step_limit_hit: bool = False
    elapsed: float = 0.0

    def bump(self, rule: str) -> None:
        self.rule_counts[rule] = self.rule_counts.get(rule, 0) + 1


@dataclass
class Model:
    values: Dict[Term, object]

    def value(self, v: Term):
        return self.values.get(v)


@dataclass
class Verdict:
    status: str  # 'sat' | 'unsat' | 'unknown'
    model: Optional[Model] = None
    reason: str = ""

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"


class TermIndex:
    """T(S): set terms grouped by head operator, maintained under the trail."""

    def __init__(self) -> None:
        self.seen: set = set()
        self.by_op: Dict[str, List[Term]] = {
            op: [] for op in ("union", "inter", "diff", "product", "filter",
                              "single", "empty")}
        self.set_terms: List[Term] = []
        self.elem_terms: List[Term] = []
        self.log: List[Term] = []

    def register(self, t: Term) -> None:
        if t.id in self.seen:
            return
        self.seen.add(t.id)
        self.log.append(t)
        for a in t.args:
            self.register(a)
        if t.sort is not None and t.sort.is_set:
            self.set_terms.append(t)
            if t.op in self.by_op:
                self.by_op[t.op].append(t)
        elif t.sort is not None and t.sort.is_element:
            self.elem_terms.append(t)

    def mark(self) -> int:
        return len(self.log)

    def undo_to(self, mark: int) -> None:
        while len(self.log) > mark:
            t = self.log.pop()
            self.seen.discard(t.id)
            if t.sort is not None and t.sort.is_set:
                self.set_terms.pop()
                if t.op in self.by_op:
                    self.by_op[t.op].pop()
            elif t.sort is not None and t.sort.is_element:
                self.elem_terms.pop()


class Config:
    """A configuration <S, E> with closure indices and rule bookkeeping."""

    def __init__(self, d: Disjunct):
        self.s_cc = CC()
        self.e_cc = CC()
        self.index = TermIndex()
        self.s_lits: List[Lit] = []
        self.e_lits: List[Lit] = []
        self.s_lit_set: set = set()
        self.e_lit_set: set = set()
        self.memberships: List[Tuple[Term, Term, bool]] = []
        self.done: set = set()
        self.done_log: List[tuple] = []
        self.seq: Dict[tuple, int] = {}
        self.next_seq = 0
        self.counters: Dict[str, int] = {r: 0 for r in RANK_INDEX}
        self.counter_log: List[str] = []
        self.registry: Dict[tuple, Term] = {}  # premises -> fresh variable
        self.e_version = 0
        self.oracle_cache: Tuple[int, Optional[OracleVerdict]] = (-1, None)
        self.oracle_reuse: Tuple[Optional[OracleVerdict], int] = (None, 0)
        self.verdict_cache: Dict[tuple, OracleVerdict] = {}
        self.disjunct = d
        for l in d.s_lits:
            self.insert_s_lit(l)
        for l in d.e_lits:
            self.insert_e_lit(l)
        self.s0 = len({t.id for t in self.index.set_terms})
        self.e0 = len({t.id for t in self.index.elem_terms})
        self.bounds = rank_bounds(self.s0, self.e0)

    # -- insertion -----------------------------------------------------------

    def insert_s_lit(self, l: Lit) -> None:
        if l in self.s_lit_set:
            return
        self.s_lit_set.add(l)
        self.s_lits.append(l)
        a = l.atom
        self.index.register(a.args[0])
        self.index.register(a.args[1])
        if a.op == "member":
            e, s = a.args
            self.s_cc.assert_member(e, s, not l.neg)
            self.memberships.append((e, s, not l.neg))
        elif l.neg:
            self.s_cc.assert_diseq(a.args[0], a.args[1])
        else:
            self.s_cc.assert_eq(a.args[0], a.args[1])

    def insert_e_lit(self, l: Lit) -> None:
        if l in self.e_lit_set:
            return
        self.e_lit_set.add(l)
        self.e_lits.append(l)
        self.e_version += 1
        a = l.atom
        if a.op == "eq":
            if l.neg:
                self.e_cc.assert_diseq(a.args[0], a.args[1])
            else:
                self.e_cc.assert_eq(a.args[0], a.args[1])

    def insert_marker(self, lam: Lam, e: Term, pol: bool) -> None:
        self.e_cc.add_marker(lam, e, pol)

    # -- fresh names ---------------------------------------------------------

    def fresh_for(self, key: tuple, sort: ast.Sort, hint: str) -> Term:
        t = self.registry.get(key)
        if t is None:
            if sort.is_tuple:
                t = ast.tuple_cons(*(ast.fresh_var(c, hint) for c in sort.args))
            else:
                t = ast.fresh_var(sort, hint)
            self.registry[key] = t
        return t

    # -- trail ---------------------------------------------------------------

    def mark(self) -> tuple:
        return (self.s_cc.mark(), self.e_cc.mark(), self.index.mark(),
                len(self.s_lits), len(self.e_lits), len(self.memberships),
                len(self.done_log), len(self.counter_log), self.e_version)

    def undo_to(self, m: tuple) -> None:
        s_m, e_m, i_m, sl, el, mem, dl, cl, ev = m
        self.s_cc.undo_to(s_m)
        self.e_cc.undo_to(e_m)
        self.index.undo_to(i_m)
        while len(self.s_lits) > sl:
            self.s_lit_set.discard(self.s_lits.pop())
        while len(self.e_lits) > el:
            self.e_lit_set.discard(self.e_lits.pop())
        del self.memberships[mem:]
        while len(self.done_log) > dl:
            self.done.discard(self.done_log.pop())
        while len(self.counter_log) > cl:
            self.counters[self.counter_log.pop()] -= 1
        self.e_version = ev
        self.oracle_cache = (-1, None)
        self.oracle_reuse = (None, 0)

    # -- oracle --------------------------------------------------------------

    def oracle_verdict(self, oracle: Oracle, stats: SolveStats) -> OracleVerdict:
        version, verdict = self.oracle_cache
        if version == self.e_version and verdict is not None:
            return verdict
        # model reuse: a previous sat assignment that satisfies the newly
        # added literals is still a model of the grown conjunction
        prev, plen = self.oracle_reuse
        if prev is not None and prev.sat and plen <= len(self.e_lits):
            if all(_lit_holds(l, prev.assignment) for l in self.e_lits[plen:]):
                self.oracle_cache = (self.e_version, prev)
                self.oracle_reuse = (prev, len(self.e_lits))
                return prev
        # exact content cache: branches revisit the same store after undo
        key = tuple(l.atom.id * 2 + l.neg for l in self.e_lits)
        verdict = self.verdict_cache.get(key)
        if verdict is None:
            verdict = oracle.check(self.e_lits)
            stats.oracle_calls += 1
            if len(self.verdict_cache) > 4096:
                self.verdict_cache.clear()
            self.verdict_cache[key] = verdict
        self.oracle_cache = (self.e_version, verdict)
        if verdict.sat:
            self.oracle_reuse = (verdict, len(self.e_lits))
        return verdict

    # -- redundancy ----------------------------------------------------------

    def _holds_s(self, l: Lit) -> bool:
        a = l.atom
        if a.op == "member":
            return self.s_cc.query_member(a.args[0], a.args[1], not l.neg)
        if l.neg:
            return self.s_cc.query_diseq(a.args[0], a.args[1])
        return self.s_cc.equal(a.args[0], a.args[1])

    def _holds_e(self, l: Lit) -> bool:
        a = l.atom
        if a.op != "eq":
            return False
        if l.neg:
            return self.e_cc.query_diseq(a.args[0], a.args[1])
        return self.e_cc.equal(a.args[0], a.args[1])

    def subsumed(self, inst: Instance) -> bool:
        """Redundant iff some conclusion branch is already entailed."""
        for delta in inst.deltas:
            if all(self._holds_s(l) for l in delta.s_adds) and \
               all(self._holds_e(l) for l in delta.e_adds) and \
               all(self.e_cc.query_marker(lam, e, pol)
                   for lam, e, pol in delta.markers):
                return True
        return False

    def rank_vector(self) -> RankVector:
        return RankVector(tuple(self.bounds[i] - self.counters[rule]
                                for rule, i in sorted(RANK_INDEX.items(),
                                                      key=lambda kv: kv[1])))


# ---------------------------------------------------------------------------
# Rule enumeration

def _lit_holds(l: Lit, assignment: Dict[Term, object]) -> bool:
    try:
        value = bruteforce.eval_term(l.atom, assignment)
    except SetRelError:
        return False
    return (not value) if l.neg else bool(value)


def _mem(e: Term, s: Term, pos: bool = True) -> Lit:
    return ast.mem_lit(e, s, pos)


def _eqp(a: Term, b: Term, pos: bool = True) -> Lit:
    return ast.eq_lit(a, b, pos)


def _beta_body(lam: Lam, e: Term, pol: bool) -> Term:
    body = ast.beta(lam, [e])
    return body if pol else ast.not_(body)


def _split_product_member(e: Term, u: Term) -> Optional[List[Lit]]:
    """Prod Down conclusion: split a tuple membership in a product."""
    if e.op != "tuple":
        return None
    a, b = u.args
    m = len(a.sort.elem.components())
    left, right = e.args[:m], e.args[m:]
    la = left[0] if not a.sort.elem.is_tuple else ast.tuple_cons(*left)
    rb = right[0] if not b.sort.elem.is_tuple else ast.tuple_cons(*right)
    return [_mem(la, a), _mem(rb, b)]


def _concat_tuple(x: Term, a: Term, y: Term, b: Term) -> Term:
    xs = x.args if a.sort.elem.is_tuple else (x,)
    ys = y.args if b.sort.elem.is_tuple else (y,)
    return ast.tuple_cons(*(xs + ys))


def find_conflict(cfg: Config, oracle: Oracle, stats: SolveStats
                  ) -> Optional[Instance]:
    mc = cfg.s_cc.member_conflict()
    if mc is not None:
        m, n, s = mc
        return Instance("set-unsat", ("su-conf",), None,
                        note=f"{m!r} in {s!r} and {n!r} not in {s!r}")
    for emp in cfg.index.by_op["empty"]:
        mem = cfg.s_cc.members_of(emp)
        if mem:
            return Instance("empty-unsat", ("em-conf",), None,
                            note=f"{mem[0]!r} in empty set")
    pair = cfg.s_cc.eq_conflict()
    if pair is not None:
        return Instance("eq-unsat", ("eq-conf",), None,
                        note=f"{pair[0]!r} = {pair[1]!r} and their disequality")
    if not cfg.oracle_verdict(oracle, stats):
        return Instance("e-conf", ("e-conf",), None, note="element store unsat")
    return None


def _partial(f, *args):
    return lambda: f(*args)


def iter_safe_candidates(cfg: Config):
    """Non-branching rule instances whose premises hold; deltas built lazily.
    Premises are monotone along a branch: once yielded, a candidate stays
    applicable until applied or subsumed."""
    s_cc = cfg.s_cc
    # membership-driven rules (Down family)
    for (e, s, pos) in cfg.memberships:
        if not pos:
            continue
        for u in s_cc.terms_of(s):
            if u.op == "inter":
                yield ("inter-down", ("id", e.id, u.id), _partial(_inter_down, e, u))
            elif u.op == "diff":
                yield ("diff-down", ("dd", e.id, u.id), _partial(_diff_down, e, u))
            elif u.op == "single":
                yield ("single-down", ("sd", e.id, u.id), _partial(_single_down, e, u))
            elif u.op == "filter":
                yield ("filter-down", ("fd", e.id, u.id), _partial(_filter_down, e, u))
            elif u.op == "product":
                if e.op == "tuple":
                    yield ("prod-down", ("pd", e.id, u.id),
                           _partial(_prod_down, e, u))
    # term-driven rules (Up family)
    for u in cfg.index.by_op["single"]:
        yield ("single-up", ("su", u.id), _partial(_single_up, u))
    for u in cfg.index.by_op["union"]:
        a, b = u.args
        for arg in (a, b):
            for e in s_cc.members_of(arg):
                yield ("union-up", ("uu", e.id, u.id), _partial(_up_mem, e, u))
    for u in cfg.index.by_op["inter"]:
        a, b = u.args
        for e1 in s_cc.members_of(a):
            for e2 in s_cc.members_of(b):
                if s_cc.equal(e1, e2):
                    yield ("inter-up", ("iu", e1.id, u.id), _partial(_up_mem, e1, u))
    for u in cfg.index.by_op["product"]:
        a, b = u.args
        for x in s_cc.members_of(a):
            for y in s_cc.members_of(b):
                yield ("prod-up", ("pu", x.id, y.id, u.id),
                       _partial(_prod_up, x, y, u))


def iter_branch_candidates(cfg: Config):
    """Branching rule instances; scanned only when no safe rule applies."""
    s_cc = cfg.s_cc
    for (e, s, pos) in cfg.memberships:
        if not pos:
            continue
        for u in s_cc.terms_of(s):
            if u.op == "union":
                yield ("union-down", ("ud", e.id, u.id), _partial(_union_down, e, u))
    for u in cfg.index.by_op["diff"]:
        a, b = u.args
        for e in s_cc.members_of(a):
            yield ("diff-up", ("du", e.id, u.id), _partial(_diff_up, e, u))
    for u in cfg.index.by_op["filter"]:
        (s,) = u.args
        for e in s_cc.members_of(s):
            yield ("filter-up", ("fu", e.id, u.id), _partial(_filter_up, e, u))
    # set disequality splits
    for (x, y) in s_cc.diseqs:
        if not x.sort.is_set:
            continue
        key = ("zd",) + tuple(sorted((x.id, y.id)))
        yield ("set-diseq", key, _partial(_set_diseq, cfg, key, x, y))
    # element identification splits
    for e1, e2 in _eident_pairs(cfg):
        key = ("ei",) + tuple(sorted((e1.id, e2.id)))
        yield ("e-ident", key, _partial(_e_ident, e1, e2))


def iter_candidates(cfg: Config):
    yield from iter_safe_candidates(cfg)
    yield from iter_branch_candidates(cfg)


def _inter_down(e: Term, u: Term) -> List[BranchDelta]:
    return [BranchDelta(s_adds=[_mem(e, u.args[0]), _mem(e, u.args[1])])]


def _union_down(e: Term, u: Term) -> List[BranchDelta]:
    return [BranchDelta(s_adds=[_mem(e, u.args[0])]),
            BranchDelta(s_adds=[_mem(e, u.args[1])])]


def _diff_down(e: Term, u: Term) -> List[BranchDelta]:
    return [BranchDelta(s_adds=[_mem(e, u.args[0]), _mem(e, u.args[1], False)])]


def _single_down(e: Term, u: Term) -> List[BranchDelta]:
    l = _eqp(e, u.args[0])
    return [BranchDelta(s_adds=[l], e_adds=[l])]


def _single_up(u: Term) -> List[BranchDelta]:
    return [BranchDelta(s_adds=[_mem(u.args[0], u)])]


def _up_mem(e: Term, u: Term) -> List[BranchDelta]:
    return [BranchDelta(s_adds=[_mem(e, u)])]


def _diff_up(e: Term, u: Term) -> List[BranchDelta]:
    return [BranchDelta(s_adds=[_mem(e, u.args[1])]),
            BranchDelta(s_adds=[_mem(e, u)])]


def _prod_up(x: Term, y: Term, u: Term) -> List[BranchDelta]:
    a, b = u.args
    return [BranchDelta(s_adds=[_mem(_concat_tuple(x, a, y, b), u)])]


def _prod_down(e: Term, u: Term) -> List[BranchDelta]:
    return [BranchDelta(s_adds=_split_product_member(e, u))]


def _set_diseq(cfg: "Config", key: tuple, x: Term, y: Term) -> List[BranchDelta]:
    z = cfg.fresh_for(key, x.sort.elem, "z")
    return [BranchDelta(s_adds=[_mem(z, x), _mem(z, y, False)]),
            BranchDelta(s_adds=[_mem(z, y), _mem(z, x, False)])]


def _e_ident(e1: Term, e2: Term) -> List[BranchDelta]:
    lit_eq, lit_ne = _eqp(e1, e2), _eqp(e1, e2, False)
    return [BranchDelta(s_adds=[lit_eq], e_adds=[lit_eq]),
            BranchDelta(s_adds=[lit_ne], e_adds=[lit_ne])]


def _filter_down(e: Term, u: Term) -> List[BranchDelta]:
    return [BranchDelta(s_adds=[_mem(e, u.args[0])],
                        markers=[(u.lam, e, True)])]


def _filter_up(e: Term, u: Term) -> List[BranchDelta]:
    return [BranchDelta(s_adds=[_mem(e, u)], markers=[(u.lam, e, True)]),
            BranchDelta(s_adds=[_mem(e, u, False)], markers=[(u.lam, e, False)])]


def _dedupe_terms(terms) -> List[Term]:
    seen = set()
    out = []
    for t in terms:
        if t.id not in seen:
            seen.add(t.id)
            out.append(t)
    return out


def _eident_pairs(cfg: Config):
    """Lazily triggered element pairs: positive vs negative memberships, and
    co-memberships feeding an intersection, difference, or product term."""
    seen = set()

    def emit_all(left: List[Term], right: List[Term]):
        for e1 in left:
            for e2 in right:
                if e1 is e2 or e1.sort is not e2.sort:
                    continue
                key = (e1.id, e2.id) if e1.id < e2.id else (e2.id, e1.id)
                if key in seen:
                    continue
                seen.add(key)
                yield (e1, e2)

    pos = _dedupe_terms(e for (e, s, p) in cfg.memberships if p)
    neg = _dedupe_terms(e for (e, s, p) in cfg.memberships if not p)
    yield from emit_all(pos, neg)
    for op in ("inter", "diff", "product"):
        for u in cfg.index.by_op[op]:
            a, b = u.args
            yield from emit_all(_dedupe_terms(cfg.s_cc.members_of(a)),
                                _dedupe_terms(cfg.s_cc.members_of(b)))


# ---------------------------------------------------------------------------
# Applying instances

def _ground_cases(cfg: Config, payload: List[Term]
                  ) -> List[Tuple[List[Lit], List[Lit]]]:
    """Split ground predicate bodies into insertable cases: each case is a
    pair (S-literals, E-literals).  Disjunctions and ites become separate
    cases; set terms introduced by the body are named by registry variables."""
    f = ast.and_(*payload) if len(payload) != 1 else payload[0]
    f = preprocess.lift_ites(f)
    cases = preprocess._nnf_literals(f, True, 1000)
    out = []
    for lits in cases:
        s_part: List[Lit] = []
        e_part: List[Lit] = []
        for l in lits:
            if ast.is_relation_lit(l):
                s_part.extend(_flatten_dynamic(cfg, l, e_part))
            else:
                e_part.append(l)
        out.append((s_part, e_part))
    return out


def _flatten_dynamic(cfg: Config, l: Lit, e_part: List[Lit]) -> List[Lit]:
    """Prepare a relation literal arriving from a predicate body for
    insertion.  Compound set terms enter the stores directly (term
    registration puts them in T(S) and all rules work modulo congruence);
    tuple element sides are rewritten to variable tuples, reusing the
    registry so re-application after backtracking yields identical stores."""
    a = l.atom
    if a.op != "member":
        return [l]
    e, s = a.args
    if not e.sort.is_tuple:
        return [l]
    if e.op != "tuple":
        raise SetRelError(f"opaque tuple member {e!r}")
    comps = []
    for c in e.args:
        if c.is_var:
            comps.append(c)
        else:
            v = cfg.fresh_for(("vt", c.id), c.sort, "t")
            e_part.append(_eqp(v, c))
            comps.append(v)
    return [Lit(l.neg, ast.member(ast.tuple_cons(*comps), s))]


def expand_branches(cfg: Config, inst: Instance
                    ) -> List[Tuple[BranchDelta, List[Lit], List[Lit]]]:
    """All children of applying the instance: one per (delta, body case).
    Filter-rule markers carry their beta-reduced bodies as payload."""
    children = []
    for delta in inst.deltas:
        payload = [_beta_body(lam, e, pol) for lam, e, pol in delta.markers]
        if payload:
            for s_extra, e_extra in _ground_cases(cfg, payload):
                children.append((delta, s_extra, e_extra))
        else:
            children.append((delta, [], []))
    return children


def apply_child(cfg: Config, inst: Instance,
                child: Tuple[BranchDelta, List[Lit], List[Lit]]) -> None:
    delta, s_extra, e_extra = child
    for l in delta.s_adds:
        cfg.insert_s_lit(l)
    for l in s_extra:
        cfg.insert_s_lit(l)
    for l in delta.e_adds:
        cfg.insert_e_lit(l)
    for l in e_extra:
        cfg.insert_e_lit(l)
    for lam, e, pol in delta.markers:
        cfg.insert_marker(lam, e, pol)


def record_applied(cfg: Config, inst: Instance) -> None:
    cfg.done.add(inst.key)
    cfg.done_log.append(inst.key)
    cfg.counters[inst.rule] += 1
    cfg.counter_log.append(inst.rule)


def _key_terms(key: tuple) -> str:
    """Render the premise terms an instance key refers to."""
    parts = []
    for item in key[1:]:
        t = ast.term_of_id(item) if isinstance(item, int) else None
        parts.append(repr(t) if t is not None else str(item))
    return ", ".join(parts) if parts else "-"


# ---------------------------------------------------------------------------
# The solver

def _pick(cfg: Config, candidates) -> Optional[Instance]:
    pending: List[Tuple[int, str, tuple, Callable]] = []
    for rule, key, build in candidates:
        if key in cfg.done:
            continue
        seq = cfg.seq.get(key)
        if seq is None:
            seq = cfg.next_seq
            cfg.next_seq += 1
            cfg.seq[key] = seq
        pending.append((seq, rule, key, build))
    pending.sort(key=lambda x: x[0])
    for seq, rule, key, build in pending:
        inst = Instance(rule, key, build())
        if cfg.subsumed(inst):
            cfg.done.add(key)
            cfg.done_log.append(key)
            continue
        return inst
    return None


def next_instance(cfg: Config, oracle: Oracle, stats: SolveStats
                  ) -> Optional[Instance]:
    conflict = find_conflict(cfg, oracle, stats)
    if conflict is not None:
        return conflict
    inst = _pick(cfg, iter_safe_candidates(cfg))
    if inst is not None:
        return inst
    return _pick(cfg, iter_branch_candidates(cfg))


def solve(d: Disjunct, oracle: Optional[Oracle] = None,
          limits: Optional[Limits] = None,
          stats: Optional[SolveStats] = None,
          trace: Optional[Callable[[str], None]] = None,
          monitor: Optional[RankMonitor] = None) -> Verdict:
    """Depth-first saturation of one disjunct.  Returns sat with a model
    built from the first saturated leaf, unsat if every branch closes, or
    unknown on resource limits."""
    oracle = oracle or Oracle("auto")
    limits = limits or Limits()
    stats = stats if stats is not None else SolveStats()
    start = time.monotonic()
    preprocess.validate_disjunct(d)
    cfg = Config(d)
    # stack entries: (mark, instance, children, next_child_index)
    stack: List[Tuple[tuple, Instance, list, int]] = []

    def backtrack() -> bool:
        while stack:
            mark, inst, children, idx = stack.pop()
            cfg.undo_to(mark)
            if idx < len(children):
                if idx + 1 < len(children):
                    stack.append((mark, inst, children, idx + 1))
                enter(inst, children[idx], idx)
                return True
        return False

    def enter(inst: Instance, child, branch_idx: int) -> None:
        before = cfg.rank_vector() if monitor else None
        record_applied(cfg, inst)
        apply_child(cfg, inst, child)
        if monitor:
            monitor.on_apply(inst.rule, before, cfg.rank_vector())
        if trace:
            delta, s_extra, e_extra = child
            adds = ", ".join(repr(l) for l in
                             delta.s_adds + s_extra + delta.e_adds + e_extra)
            trace(f"{inst.rule} | {_key_terms(inst.key)} | "
                  f"branch {branch_idx} | adds {adds}")

    while True:
        if stats.steps >= limits.max_steps:
            stats.step_limit_hit = True
            stats.elapsed = time.monotonic() - start
            return Verdict("unknown", reason="step-limit")
        if limits.timeout is not None and time.monotonic() - start > limits.timeout:
            stats.elapsed = time.monotonic() - start
            return Verdict("unknown", reason="timeout")
        if limits.stop is not None and limits.stop.is_set():
            stats.elapsed = time.monotonic() - start
            return Verdict("unknown", reason="cancelled")
        try:
            inst = next_instance(cfg, oracle, stats)
        except OracleBudgetExceeded:
            stats.elapsed = time.monotonic() - start
            return Verdict("unknown", reason="oracle-budget")
        if inst is None:
            assert_saturated(cfg)
            stats.elapsed = time.monotonic() - start
            model = build_model(cfg, oracle, stats)
            return Verdict("sat", model=model)
        if inst.deltas is None:  # conflict rule
            stats.bump(inst.rule)
            if trace:
                trace(f"{inst.rule} | {inst.note} | closed")
            if not backtrack():
                stats.elapsed = time.monotonic() - start
                return Verdict("unsat")
            continue
        children = expand_branches(cfg, inst)
        stats.steps += 1
        stats.bump(inst.rule)
        if not children:
            # every conclusion case is propositionally false
            record_applied(cfg, inst)
            if trace:
                trace(f"{inst.rule} | {_key_terms(inst.key)} | no viable branch")
            if not backtrack():
                stats.elapsed = time.monotonic() - start
                return Verdict("unsat")
            continue
        if len(children) > 1:
            stats.branches += 1
        stack.append((cfg.mark(), inst, children, 1))
        enter(inst, children[0], 0)


def assert_saturated(cfg: Config) -> None:
    """Re-verify saturation ignoring the redundancy cache: every candidate
    instance must have an entailed conclusion branch."""
    for rule, key, build in iter_candidates(cfg):
        if not cfg.subsumed(Instance(rule, key, build())):
            raise SetRelError(f"saturation check failed: {rule} {key} applies")


# ---------------------------------------------------------------------------
# Model construction

def build_model(cfg: Config, oracle: Oracle, stats: SolveStats) -> Model:
    verdict = cfg.oracle_verdict(oracle, stats)
    if not verdict:
        raise OracleIncomplete("saturated leaf with unsat element store")
    values: Dict[Term, object] = dict(verdict.assignment)
    elem_vars: List[Term] = []
    set_vars: List[Term] = []
    seen = set()
    for l in cfg.s_lits + cfg.e_lits:
        for v in ast.free_vars(l.atom):
            if v.id in seen:
                continue
            seen.add(v.id)
            (set_vars if v.sort.is_set else elem_vars).append(v)
    used_ints = {v for v in values.values() if isinstance(v, int)
                 and not isinstance(v, bool)}
    next_int = max(used_ints, default=-1) + 1
    next_u: Dict[str, int] = {}
    for v in values.values():
        if isinstance(v, UValue):
            next_u[v.sort_name] = max(next_u.get(v.sort_name, 0), v.index + 1)
    for v in sorted(elem_vars, key=lambda t: t.index):
        if v in values:
            continue
        if v.sort == ast.INT:
            values[v] = next_int
            next_int += 1
        elif v.sort == ast.BOOL:
            values[v] = False
        elif v.sort.kind == "un":
            k = next_u.get(v.sort.name, 0)
            next_u[v.sort.name] = k + 1
            values[v] = UValue(v.sort.name, k)
        else:
            raise SetRelError(f"unassignable element variable {v!r}")
    for v in sorted(set_vars, key=lambda t: t.index):
        members = cfg.s_cc.members_of(v)
        values[v] = frozenset(bruteforce.eval_term(m, values) for m in members)
    for orig, tup in cfg.disjunct.tuple_expansions.items():
        values[orig] = bruteforce.eval_term(tup, values)
    return Model(values)


def verify_model(model: Model, formulas) -> bool:
    return bruteforce.eval_formula(formulas, model.values)


# ---------------------------------------------------------------------------
# Formula-level driver

def complete_model(model: Model, phi: Term) -> Model:
    """Assign default values to variables of the original formula that the
    solved disjunct never mentioned."""
    values = dict(model.values)
    used_ints = {v for v in values.values() if isinstance(v, int)
                 and not isinstance(v, bool)}
    next_int = max(used_ints, default=-1) + 1
    next_u: Dict[str, int] = {}
    for v in values.values():
        if isinstance(v, UValue):
            next_u[v.sort_name] = max(next_u.get(v.sort_name, 0), v.index + 1)
    for v in sorted(ast.free_vars(phi), key=lambda t: t.index):
        if v in values:
            continue
        if v.sort.is_set:
            values[v] = frozenset()
        elif v.sort == ast.INT:
            values[v] = next_int
            next_int += 1
        elif v.sort == ast.BOOL:
            values[v] = False
        elif v.sort.kind == "un":
            k = next_u.get(v.sort.name, 0)
            next_u[v.sort.name] = k + 1
            values[v] = UValue(v.sort.name, k)
        elif v.sort.is_tuple:
            comps = []
            for c in v.sort.args:
                if c == ast.INT:
                    comps.append(next_int)
                    next_int += 1
                elif c == ast.BOOL:
                    comps.append(False)
                else:
                    k = next_u.get(c.name, 0)
                    next_u[c.name] = k + 1
                    comps.append(UValue(c.name, k))
            values[v] = tuple(comps)
    return Model(values)


@dataclass
class FormulaResult:
    verdict: Verdict
    reports: List[preprocess.FragmentReport]
    stats: SolveStats
    disjuncts: int = 0


def solve_formula(phi: Term, oracle_kind: str = "auto",
                  limits: Optional[Limits] = None,
                  dnf_cap: int = preprocess.DEFAULT_DNF_CAP,
                  trace: Optional[Callable[[str], None]] = None,
                  monitor: Optional[RankMonitor] = None) -> FormulaResult:
    """Normalize, classify, and solve disjunct by disjunct; the first sat
    disjunct wins and its model is completed over the formula's variables."""
    stats = SolveStats()
    disjuncts = preprocess.normalize(phi, cap=dnf_cap)
    reports = [classify(d) for d in disjuncts]
    oracle = Oracle(oracle_kind)
    saw_unknown = False
    reason = ""
    for d in disjuncts:
        v = solve(d, oracle=oracle, limits=limits, stats=stats, trace=trace,
                  monitor=monitor)
        if v.status == "sat":
            v = Verdict("sat", model=complete_model(v.model, phi))
            return FormulaResult(v, reports, stats, len(disjuncts))
        if v.status == "unknown":
            saw_unknown = True
            reason = v.reason
    if saw_unknown:
        return FormulaResult(Verdict("unknown", reason=reason), reports, stats,
                             len(disjuncts))
    return FormulaResult(Verdict("unsat"), reports, stats, len(disjuncts))
