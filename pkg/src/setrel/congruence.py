"""Congruence closure over element and set terms, with tuple injectivity,
membership and disequality tracking, predicate-application markers, and a
trail for cheap backtracking.

Queries answer literal membership in the closures of the stores: an equality
holds when tuple-theory entailment derives it, a membership e in s holds when
some congruent pair e' in s' was asserted, and a marker p(e) holds when p(e')
was recorded for a congruent e'.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .ast import Lam, Term


class CC:
    def __init__(self) -> None:
        self.terms: Dict[int, Term] = {}
        self.parent: Dict[int, int] = {}
        self.size: Dict[int, int] = {}
        self.class_terms: Dict[int, List[Term]] = {}
        self.use: Dict[int, List[Term]] = {}
        self.sigs: Dict[tuple, Term] = {}
        self.tuple_rep: Dict[int, Optional[Term]] = {}
        self.members: Dict[int, List[Term]] = {}
        self.nonmembers: Dict[int, List[Term]] = {}
        self.diseqs: List[Tuple[Term, Term]] = []
        self.markers: Dict[Tuple[int, bool], List[Term]] = {}
        self.trail: List[tuple] = []

    # -- union-find ---------------------------------------------------------

    def _find_id(self, i: int) -> int:
        p = self.parent
        while p[i] != i:
            i = p[i]
        return i

    def find(self, t: Term) -> int:
        if t.id not in self.parent:
            return t.id
        return self._find_id(t.id)

    def has_term(self, t: Term) -> bool:
        return t.id in self.terms

    # -- registration -------------------------------------------------------

    def _sig(self, t: Term) -> tuple:
        return (t.op, t.lam.id if t.lam is not None else None, t.name, t.value,
                tuple(self._find_id(a.id) for a in t.args))

    def add_term(self, t: Term) -> None:
        if t.id in self.terms:
            return
        for a in t.args:
            self.add_term(a)
        self.terms[t.id] = t
        self.parent[t.id] = t.id
        self.size[t.id] = 1
        self.class_terms[t.id] = [t]
        self.tuple_rep[t.id] = t if t.op == "tuple" else None
        self.trail.append(("term", t))
        pending: List[Tuple[int, int]] = []
        if t.args:
            for a in t.args:
                r = self._find_id(a.id)
                self.use.setdefault(r, []).append(t)
                self.trail.append(("use", r))
            key = self._sig(t)
            other = self.sigs.get(key)
            if other is None:
                self.sigs[key] = t
                self.trail.append(("sig", key, False, None))
            else:
                pending.append((t.id, other.id))
        self._process(pending)

    # -- merging ------------------------------------------------------------

    def _merge(self, i: int, j: int, pending: List[Tuple[int, int]]) -> None:
        ri, rj = self._find_id(i), self._find_id(j)
        if ri == rj:
            return
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        # rj merges into ri
        ct, mem, nmem, use = (self.class_terms.setdefault(ri, []),
                              self.members.setdefault(ri, []),
                              self.nonmembers.setdefault(ri, []),
                              self.use.setdefault(ri, []))
        old_tuple = self.tuple_rep.get(ri)
        self.trail.append(("union", rj, ri, self.size[ri], len(ct), len(mem),
                           len(nmem), len(use), old_tuple))
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]
        ct.extend(self.class_terms.get(rj, ()))
        mem.extend(self.members.get(rj, ()))
        nmem.extend(self.nonmembers.get(rj, ()))
        # tuple injectivity: congruent tuples equate componentwise
        rep_j = self.tuple_rep.get(rj)
        if rep_j is not None:
            if old_tuple is not None:
                if len(old_tuple.args) == len(rep_j.args):
                    for a, b in zip(old_tuple.args, rep_j.args):
                        pending.append((a.id, b.id))
            else:
                self.tuple_rep[ri] = rep_j
        # recompute signatures of terms using the merged class
        for p in self.use.get(rj, ()):
            key = self._sig(p)
            other = self.sigs.get(key)
            if other is None:
                self.sigs[key] = p
                self.trail.append(("sig", key, False, None))
            elif other.id != p.id:
                pending.append((p.id, other.id))
        use.extend(self.use.get(rj, ()))

    def _process(self, pending: List[Tuple[int, int]]) -> None:
        while pending:
            i, j = pending.pop()
            self._merge(i, j, pending)

    # -- assertions ----------------------------------------------------------

    def assert_eq(self, a: Term, b: Term) -> None:
        self.add_term(a)
        self.add_term(b)
        self._process([(a.id, b.id)])

    def assert_diseq(self, a: Term, b: Term) -> None:
        self.add_term(a)
        self.add_term(b)
        self.diseqs.append((a, b))
        self.trail.append(("diseq",))

    def assert_member(self, e: Term, s: Term, pos: bool = True) -> None:
        self.add_term(e)
        self.add_term(s)
        r = self._find_id(s.id)
        store = self.members if pos else self.nonmembers
        store.setdefault(r, []).append(e)
        self.trail.append(("member", r, pos))

    def add_marker(self, lam: Lam, e: Term, pol: bool) -> None:
        self.add_term(e)
        key = (lam.id, pol)
        self.markers.setdefault(key, []).append(e)
        self.trail.append(("marker", key))

    # -- queries -------------------------------------------------------------

    def equal(self, a: Term, b: Term) -> bool:
        if a is b:
            return True
        if a.id not in self.parent or b.id not in self.parent:
            return False
        return self._find_id(a.id) == self._find_id(b.id)

    def query_diseq(self, a: Term, b: Term) -> bool:
        if a.id not in self.parent or b.id not in self.parent:
            return False
        ra, rb = self._find_id(a.id), self._find_id(b.id)
        for (x, y) in self.diseqs:
            rx, ry = self._find_id(x.id), self._find_id(y.id)
            if (rx, ry) == (ra, rb) or (rx, ry) == (rb, ra):
                return True
        return False

    def query_member(self, e: Term, s: Term, pos: bool = True) -> bool:
        if s.id not in self.parent:
            return False
        store = self.members if pos else self.nonmembers
        lst = store.get(self._find_id(s.id))
        if not lst:
            return False
        if e.id in self.parent:
            re = self._find_id(e.id)
            return any(self._find_id(m.id) == re for m in lst)
        return any(m is e for m in lst)

    def query_marker(self, lam: Lam, e: Term, pol: bool) -> bool:
        lst = self.markers.get((lam.id, pol))
        if not lst:
            return False
        if e.id in self.parent:
            re = self._find_id(e.id)
            return any(self._find_id(m.id) == re for m in lst)
        return any(m is e for m in lst)

    def members_of(self, s: Term, pos: bool = True) -> List[Term]:
        if s.id not in self.parent:
            return []
        store = self.members if pos else self.nonmembers
        return store.get(self._find_id(s.id), [])

    def terms_of(self, t: Term) -> List[Term]:
        if t.id not in self.parent:
            return [t]
        return self.class_terms.get(self._find_id(t.id), [t])

    def eq_conflict(self) -> Optional[Tuple[Term, Term]]:
        """A disequality edge whose endpoints were merged, if any."""
        for (a, b) in self.diseqs:
            if self._find_id(a.id) == self._find_id(b.id):
                return (a, b)
        return None

    def member_conflict(self) -> Optional[Tuple[Term, Term, Term]]:
        """(e, e', s) with e in s and e' not in s and e, e' congruent."""
        for r in list(self.members):
            if self.parent.get(r) != r:
                continue
            neg = self.nonmembers.get(r)
            if not neg:
                continue
            pos_roots = {self._find_id(m.id): m for m in self.members[r]}
            for n in neg:
                m = pos_roots.get(self._find_id(n.id))
                if m is not None:
                    return (m, n, self.terms[r])
        return None

    # -- backtracking ---------------------------------------------------------

    def mark(self) -> int:
        return len(self.trail)

    def undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            entry = self.trail.pop()
            kind = entry[0]
            if kind == "union":
                _, rj, ri, old_size, ct_len, mem_len, nmem_len, use_len, old_tup = entry
                self.parent[rj] = rj
                self.size[ri] = old_size
                del self.class_terms[ri][ct_len:]
                del self.members[ri][mem_len:]
                del self.nonmembers[ri][nmem_len:]
                del self.use[ri][use_len:]
                self.tuple_rep[ri] = old_tup
            elif kind == "sig":
                _, key, had, old = entry
                if had:
                    self.sigs[key] = old
                else:
                    del self.sigs[key]
            elif kind == "term":
                t = entry[1]
                del self.terms[t.id]
                del self.parent[t.id]
                del self.size[t.id]
                del self.class_terms[t.id]
                del self.tuple_rep[t.id]
            elif kind == "use":
                self.use[entry[1]].pop()
            elif kind == "member":
                _, r, pos = entry
                (self.members if pos else self.nonmembers)[r].pop()
            elif kind == "diseq":
                self.diseqs.pop()
            elif kind == "marker":
                self.markers[entry[1]].pop()
