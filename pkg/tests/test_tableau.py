import random

import setrel.ast as A
from setrel import benchgen, bruteforce, preprocess, tableau
from setrel.bruteforce import Universe
from setrel.oracle import Oracle
from setrel.preprocess import normalize, split_dnf, flatten
from setrel.tableau import (Config, Instance, Limits, RankMonitor, SolveStats,
                            build_model, iter_candidates, next_instance,
                            solve, solve_formula, verify_model)

INT_SET = A.set_sort(A.INT)
U = A.uninterpreted("U")


def sv(name, sort=INT_SET):
    return A.var(name, sort)


def make_config(phi):
    (d,) = normalize(phi)
    return Config(d)


def candidate_rules(cfg):
    return {rule for rule, key, build in iter_candidates(cfg)
            if key not in cfg.done}


# ---------------------------------------------------------------------------
# rule applicability

def test_inter_down_instance_found():
    x = A.var("tx", A.INT)
    cfg = make_config(A.member(x, A.inter(sv("ta"), sv("tb"))))
    assert "inter-down" in candidate_rules(cfg)


def test_set_unsat_conflict_found():
    x = A.var("cx", A.INT)
    s = sv("cs")
    phi = A.and_(A.member(x, s), A.not_(A.member(x, s)))
    cfg = make_config(phi)
    inst = next_instance(cfg, Oracle(), SolveStats())
    assert inst.rule == "set-unsat" and inst.deltas is None


def test_saturated_config_has_no_instances():
    x = A.var("sx", A.INT)
    cfg = make_config(A.member(x, sv("ss")))
    oracle = Oracle()
    stats = SolveStats()
    assert next_instance(cfg, oracle, stats) is None


# ---------------------------------------------------------------------------
# solve verdicts

def test_empty_unsat_forced():
    x = A.var("ex", A.INT)
    s = sv("es")
    phi = A.and_(A.member(x, s), A.eq(s, A.empty_set(INT_SET)))
    r = solve_formula(phi)
    assert r.verdict.status == "unsat"


def test_filter_empty_conflict_derived():
    # s = filter(x>0, t), a in t, s = [], a = 5: both filter branches close
    s, t = sv("fs"), sv("ft")
    a = A.var("fa", A.INT)
    p = A.mk_lam([("x", A.INT)], A.gt(A.var("x", A.INT), A.intconst(0)))
    phi = A.and_(A.eq(s, A.filter_of(p, t)), A.member(a, t),
                 A.eq(s, A.empty_set(INT_SET)), A.eq(a, A.intconst(5)))
    r = solve_formula(phi)
    assert r.verdict.status == "unsat"
    # the independent oracle agrees on a window containing the constant
    assert bruteforce.find_model(phi, Universe(int_lo=0, int_hi=6)) is None


def test_set_some_singleton_sat():
    p = A.mk_lam([("x", A.INT)], A.eq(A.var("x", A.INT), A.intconst(1)))
    phi = A.set_some(p, A.singleton(A.intconst(1)))
    r = solve_formula(phi)
    assert r.verdict.status == "sat"
    assert verify_model(r.verdict.model, phi)


def test_set_diseq_fresh_variable_reused():
    s, t = sv("zs"), sv("zt")
    phi = A.not_(A.eq(s, t))
    (d,) = normalize(phi)
    cfg = Config(d)
    oracle, stats = Oracle(), SolveStats()
    inst = next_instance(cfg, oracle, stats)
    assert inst.rule == "set-diseq"
    assert len(inst.deltas) == 2
    z1 = inst.deltas[0].s_adds[0].atom.args[0]
    inst2 = next_instance(cfg, oracle, stats)
    z2 = inst2.deltas[0].s_adds[0].atom.args[0]
    assert z1 is z2


def test_filter_down_applies_beta_reduced_body():
    s, t = sv("gs"), sv("gt")
    a = A.var("ga", A.INT)
    p = A.mk_lam([("x", A.INT)], A.gt(A.var("x", A.INT), A.intconst(0)))
    phi = A.and_(A.eq(s, A.filter_of(p, t)), A.member(a, s))
    r = solve_formula(phi)
    assert r.verdict.is_sat
    m = r.verdict.model
    assert m.values[a] > 0
    assert m.values[a] in m.values[t]
    assert verify_model(m, phi)


def test_union_membership_propagates_up():
    # w = a | b with x in a forces x in w
    w, a, b = sv("wa"), sv("ab"), sv("bb")
    x = A.var("wx", A.INT)
    phi = A.and_(A.eq(w, A.union(a, b)), A.member(x, a))
    r = solve_formula(phi)
    assert r.verdict.is_sat
    assert r.verdict.model.values[x] in r.verdict.model.values[w]
    assert verify_model(r.verdict.model, phi)


def test_inter_requires_equal_elements():
    w, a, b = sv("ia"), sv("ib"), sv("ic")
    x, y = A.var("ix", A.INT), A.var("iy", A.INT)
    phi = A.and_(A.eq(w, A.inter(a, b)), A.member(x, a), A.member(y, b),
                 A.eq(x, y), A.eq(x, A.intconst(4)))
    r = solve_formula(phi)
    assert r.verdict.is_sat
    assert 4 in r.verdict.model.values[w]
    assert verify_model(r.verdict.model, phi)


def test_diff_membership_unsat():
    w, a, b = sv("dw"), sv("da"), sv("db")
    x = A.var("dx", A.INT)
    phi = A.and_(A.eq(w, A.diff(a, b)), A.member(x, w), A.member(x, b))
    r = solve_formula(phi)
    assert r.verdict.status == "unsat"


def test_product_membership_components():
    r1 = A.var("pr", A.rel_sort(A.INT, A.INT))
    s, t = sv("ps"), sv("pt")
    pair = A.tuple_cons(A.intconst(1), A.intconst(2))
    phi = A.and_(A.eq(r1, A.product(s, t)), A.member(pair, r1))
    out = solve_formula(phi)
    assert out.verdict.is_sat
    m = out.verdict.model
    assert 1 in m.values[s] and 2 in m.values[t]
    assert verify_model(m, phi)


def test_prod_up_completes_products():
    r1 = A.var("qr", A.rel_sort(A.INT, A.INT))
    s, t = sv("qs"), sv("qt")
    phi = A.and_(A.eq(r1, A.product(s, t)),
                 A.member(A.intconst(1), s), A.member(A.intconst(2), t))
    out = solve_formula(phi)
    assert out.verdict.is_sat
    assert (1, 2) in out.verdict.model.values[r1]
    assert verify_model(out.verdict.model, phi)


def test_diff_excludes_shared_members():
    # x sits in both a and b, so it must stay out of w = a \ b even though
    # another element y inhabits w
    w, a, b = sv("dza"), sv("dzb"), sv("dzc")
    x, y = A.var("dzx", A.INT), A.var("dzy", A.INT)
    phi = A.and_(A.eq(w, A.diff(a, b)), A.member(x, a), A.member(x, b),
                 A.member(y, w))
    r = solve_formula(phi)
    assert r.verdict.is_sat
    m = r.verdict.model.values
    assert m[x] not in m[w] and m[y] in m[w]
    assert verify_model(r.verdict.model, phi)


def test_chained_unions_propagate():
    w, v = sv("cw"), sv("cv")
    a, b, c = sv("cca"), sv("ccb"), sv("ccc")
    x = A.var("ccx", A.INT)
    phi = A.and_(A.eq(w, A.union(a, b)), A.eq(v, A.union(w, c)),
                 A.member(x, a))
    r = solve_formula(phi)
    assert r.verdict.is_sat
    m = r.verdict.model.values
    assert m[x] in m[w] and m[x] in m[v]
    assert verify_model(r.verdict.model, phi)


def test_negative_membership_with_element_equality_unsat():
    # a in s, b not in s, but the element store forces a = b
    s = sv("ns")
    a, b = A.var("nna", A.INT), A.var("nnb", A.INT)
    phi = A.and_(A.member(a, s), A.not_(A.member(b, s)), A.eq(a, b))
    r = solve_formula(phi)
    assert r.verdict.status == "unsat"


def test_negative_membership_oracle_collision_avoided():
    # without constraints the arithmetic oracle could pick a = b; the
    # identification split must keep the model sound
    s = sv("os")
    a, b = A.var("oa", A.INT), A.var("ob", A.INT)
    phi = A.and_(A.member(a, s), A.not_(A.member(b, s)),
                 A.ge(a, A.intconst(1)), A.ge(b, A.intconst(1)))
    r = solve_formula(phi)
    assert r.verdict.is_sat
    m = r.verdict.model
    assert m.values[a] != m.values[b]
    assert verify_model(m, phi)


def test_unknown_on_step_limit():
    script = benchgen.gen_hilbert(benchgen.random_hilbert(9))
    r = solve_formula(script.formula(), limits=Limits(max_steps=50))
    assert r.verdict.status == "unknown"
    assert r.stats.step_limit_hit


def test_trace_lines_emitted():
    lines = []
    x = A.var("rx", A.INT)
    s = sv("rs")
    phi = A.and_(A.member(x, s), A.eq(s, A.empty_set(INT_SET)))
    solve_formula(phi, trace=lines.append)
    assert any("empty-unsat" in line for line in lines)


def test_no_assertions_sat():
    r = solve_formula(A.TRUE)
    assert r.verdict.status == "sat"


# ---------------------------------------------------------------------------
# rank instrumentation

def test_rank_root_is_maximal():
    x = A.var("kx", A.INT)
    cfg = make_config(A.member(x, A.inter(sv("ka"), sv("kb"))))
    vec = cfg.rank_vector()
    for i in range(1, 15):
        assert vec[i] == cfg.bounds[i]


def test_rank_decreases_exactly_own_component():
    s, t = sv("ms"), sv("mt")
    a = A.var("ma", A.INT)
    p = A.mk_lam([("x", A.INT)], A.gt(A.var("x", A.INT), A.intconst(0)))
    phi = A.and_(A.eq(s, A.filter_of(p, t)), A.member(a, s))
    monitor = RankMonitor()
    r = solve_formula(phi, monitor=monitor)
    assert r.verdict.is_sat
    assert monitor.applications > 0
    assert monitor.violations == []


def test_rank_monitor_across_random_instances():
    monitor = RankMonitor()
    for seed in range(60):
        script = benchgen.gen_random(seed)
        solve_formula(script.formula(), monitor=monitor)
    assert monitor.applications > 100
    assert monitor.violations == []


# ---------------------------------------------------------------------------
# model construction

def test_build_model_property_two():
    s = sv("m2s")
    a, b = A.var("m2a", A.INT), A.var("m2b", A.INT)
    phi = A.and_(A.member(a, s), A.member(b, s),
                 A.eq(a, A.intconst(1)), A.eq(b, A.intconst(2)))
    r = solve_formula(phi)
    assert r.verdict.model.values[s] == frozenset({1, 2})


def test_build_model_unconstrained_set_empty():
    s = sv("m3s")
    phi = A.eq(s, s)
    r = solve_formula(phi)
    assert r.verdict.model.values[s] == frozenset()


def test_filter_membership_model_checked():
    s, t = sv("m4s"), sv("m4t")
    e = A.var("m4e", A.INT)
    p = A.mk_lam([("x", A.INT)], A.ge(A.var("x", A.INT), A.intconst(3)))
    phi = A.and_(A.eq(s, A.filter_of(p, t)), A.member(e, s))
    r = solve_formula(phi)
    m = r.verdict.model
    assert m.values[e] >= 3
    assert verify_model(m, phi)


def test_tuple_variable_models():
    rel = A.var("m5r", A.rel_sort(A.INT, A.INT))
    v = A.var("m5v", A.tuple_sort(A.INT, A.INT))
    phi = A.and_(A.member(v, rel),
                 A.eq(v, A.tuple_cons(A.intconst(1), A.intconst(2))))
    r = solve_formula(phi)
    assert r.verdict.is_sat
    assert r.verdict.model.values[v] == (1, 2)
    assert verify_model(r.verdict.model, phi)


# ---------------------------------------------------------------------------
# differential behavior at desk scale

def test_differential_on_uninterpreted_sort():
    rng = random.Random(0)
    u = Universe(un_sizes={"U": 3})
    for seed in range(80):
        script = benchgen.gen_random(seed, benchgen.DIFFERENTIAL_PROFILE)
        phi = script.formula()
        r = solve_formula(phi)
        assert r.verdict.status != "unknown"
        enum = bruteforce.find_model(script.assertions, u)
        if enum is not None:
            assert r.verdict.status == "sat", f"seed {seed}"
        if r.verdict.status == "unsat":
            assert enum is None, f"seed {seed}"
        if r.verdict.is_sat:
            assert bruteforce.eval_formula(script.assertions,
                                           r.verdict.model.values), f"seed {seed}"


def test_alternating_quantifiers_best_effort():
    profile = benchgen.Profile(nested_quantifiers=True, n_assertions=2)
    ok = 0
    for seed in range(30):
        script = benchgen.gen_random(seed, profile)
        r = solve_formula(script.formula(), limits=Limits(max_steps=3000))
        assert r.verdict.status in ("sat", "unsat", "unknown")
        if r.verdict.is_sat:
            assert bruteforce.eval_formula(script.assertions,
                                           r.verdict.model.values), f"seed {seed}"
            ok += 1
    assert ok > 0
