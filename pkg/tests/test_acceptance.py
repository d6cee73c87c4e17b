"""Acceptance criteria 1-10, each at its stated tolerance and instance count."""

from __future__ import annotations

import math
import time
from functools import lru_cache

import numpy as np

from instances import (SQRT3_2, balanced_instance, chebyshev_critical_pair, condition_2_instance,
                       condition_3_instance, equal_value_endpoints, near_miss_instance, random_instance,
                       random_point, random_poly, rng, t6_instance)
from polymoment import permutations as perms
from polymoment.cactus import build_cactus, extended_setup, path_ab
from polymoment.continuation import infinity_alignment, monodromy
from polymoment.decompose import (classify, condition_2, condition_3, linear_relation, right_divisors)
from polymoment.moments import criterion_residuals, moment_sequence
from polymoment.polycore import Polynomial, chebyshev
from polymoment.series import (Arrangement, circle_sets, composed_expansion, default_depth,
                               gcd_vanishing_report, inverse_puiseux, recomposition_residual,
                               truncation_bound)


@lru_cache(maxsize=None)
def orthogonal_instances():
    g = rng(20)
    return [condition_2_instance(g) for _ in range(7)] + [condition_3_instance(g) for _ in range(3)]


@lru_cache(maxsize=None)
def non_orthogonal_instances():
    g = rng(21)
    return ([random_instance(g) for _ in range(4)] + [balanced_instance(g) for _ in range(4)]
            + [near_miss_instance(g) for _ in range(2)])


@lru_cache(maxsize=None)
def structure_polynomials():
    g = rng(30)
    return [random_poly(g, 3 + k % 6) for k in range(25)]


def test_criterion_1_t6_counterexample(record):
    P, q, a, b = t6_instance()
    start = time.perf_counter()
    mom = moment_sequence(P, q, a, b, M=40)
    Q = q.antiderivative(a)
    c2 = condition_2(P, Q, a, b)
    c3 = condition_3(P, Q, a, b)
    elapsed = time.perf_counter() - start
    ok = (mom.vanishes and mom.max_abs <= 1e-9 and c2.kind == "NONE" and c3.kind == "CONDITION_3"
          and c3.residual <= 1e-8 and elapsed <= 1.0)
    record(1, ok, f"max|m_i| = {mom.max_abs:.2e}, condition_3 residual = {c3.residual:.2e}, {elapsed:.2f} s")
    assert mom.verdict == "VANISHES"
    assert mom.max_abs <= 1e-9
    assert c2.kind == "NONE"
    assert c3.kind == "CONDITION_3" and c3.residual <= 1e-8
    assert elapsed <= 1.0


def _criterion_and_moments(P, q, a, b):
    _, cx, ext = extended_setup(P, a, b)
    crit = criterion_residuals(P, q.antiderivative(a), a, b, path_ab(cx), ext, tol=1e-8)
    mom = moment_sequence(P, q, a, b, tol=1e-9)
    return crit, mom


def test_criterion_2_criterion_equivalence(record):
    agree = 0
    orth = orthogonal_instances()
    cases = [(inst, True) for inst in orth] + [(inst, False) for inst in non_orthogonal_instances()]
    failures = []
    for k, (inst, expected) in enumerate(cases):
        crit, mom = _criterion_and_moments(*inst)
        if crit.passed == mom.vanishes == expected:
            agree += 1
        else:
            failures.append(k)
    record(2, agree == len(cases), f"{agree}/{len(cases)} agree")
    assert len(cases) >= 20
    assert not failures, f"disagreement on instances {failures}"


def test_criterion_3_monodromy_structure(record):
    good = 0
    for P in structure_polynomials():
        n = P.degree
        md = monodromy(P)
        product = perms.product(*md.generators)
        hurwitz = sum(perms.ramification(g) for g in md.generators)
        if perms.is_full_cycle(product) and hurwitz == n - 1:
            good += 1
    record(3, good == 25, f"{good}/25")
    assert good == 25


def test_criterion_4_cactus_counts(record):
    good = 0
    for P in structure_polynomials():
        n = P.degree
        md = monodromy(P)
        cx = build_cactus(md)
        k = md.n_critical
        stars = [v for v in cx.vertices() if v[0] == "star"]
        edges = cx.edges()
        verts = cx.vertices()
        # connected and acyclic: BFS reaches everything and |E| = |V| - 1
        seen, todo = {verts[0]}, [verts[0]]
        while todo:
            for w in cx.neighbors(todo.pop()):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        if len(stars) == n and len(edges) == n * k and len(seen) == len(verts) and len(edges) == len(verts) - 1:
            good += 1
    record(4, good == 25, f"{good}/25")
    assert good == 25


def _arrangement(P, a, b):
    _, _, ext = extended_setup(P, a, b)
    return circle_sets(P, ext, infinity_alignment(P, ext), a, b).verdict


def test_criterion_5_circle_set_arrangement(record):
    g = rng(50)
    equal = []
    for _ in range(9):
        P = random_poly(g, int(g.integers(3, 8)))
        equal.append((P, *equal_value_endpoints(g, P)))
    equal += [chebyshev_critical_pair(g, True) for _ in range(6)]
    distinct = [(random_poly(g, int(g.integers(3, 8))), random_point(g), random_point(g)) for _ in range(4)]
    distinct += [chebyshev_critical_pair(g, False) for _ in range(6)]
    n_eq = sum(_arrangement(*inst) == Arrangement.DISJOINTED for inst in equal)
    n_ne = sum(_arrangement(*inst) in (Arrangement.DISJOINTED, Arrangement.ALMOST_DISJOINTED)
               for inst in distinct)
    record(5, n_eq == 15 and n_ne == 10, f"equal values {n_eq}/15, distinct values {n_ne}/10")
    assert n_eq == 15
    assert n_ne == 10


def test_criterion_6_gcd_vanishing(record):
    passed, coprime_degrees = 0, 0
    insts = [t6_instance()] + list(orthogonal_instances())
    for P, q, a, b in insts:
        Q = q.antiderivative(a)
        n, m = P.degree, Q.degree
        u = composed_expansion(P, Q, default_depth(n, m))
        passed += gcd_vanishing_report(u).passed
        coprime_degrees += math.gcd(n, m) == 1
    z2 = Polynomial([0, 0, 1])
    neg = gcd_vanishing_report(composed_expansion(z2, Polynomial([0, 1]), default_depth(2, 1)))
    ok = passed == len(insts) and coprime_degrees == 0 and not neg.passed and neg.violations[0] == -1
    record(6, ok, f"{passed}/{len(insts)} pass; z^2, Q = z first violation at k = {neg.violations[:1]}")
    assert passed == len(insts)
    assert coprime_degrees == 0
    assert not neg.passed and neg.violations[0] == -1


def test_criterion_7_puiseux_self_consistency(record):
    g = rng(70)
    good = 0
    worst = [0.0, 0.0, 0.0]
    for _ in range(10):
        P = random_poly(g, int(g.integers(2, 8)))
        Q = random_poly(g, int(g.integers(1, 6)))
        n, m = P.degree, Q.degree
        inv = inverse_puiseux(P, default_depth(n, m))
        recomp = float(recomposition_residual(P, inv).max())
        u = composed_expansion(P, Q, default_depth(n, m))
        lead = abs(u.coeff(-m) - Q.lead * inv.coeff(-1) ** m) / abs(Q.lead * inv.coeff(-1) ** m)
        md = monodromy(P)
        sigma, tracked, series_vals = infinity_alignment(P, md, return_values=True)
        match = max(abs(tracked[i] - series_vals[sigma[i]]) / max(1.0, abs(tracked[i])) for i in range(n))
        worst = [max(worst[0], recomp), max(worst[1], lead), max(worst[2], match)]
        good += recomp <= 1e-9 and lead <= 1e-10 and match <= 1e-6
    record(7, good == 10, f"{good}/10; worst recomposition {worst[0]:.1e}, leading {worst[1]:.1e}, "
                          f"branch match {worst[2]:.1e}")
    assert good == 10


def test_criterion_8_decomposition_round_trip(record):
    g = rng(80)
    good = 0
    for _ in range(20):
        A = random_poly(g, int(g.integers(2, 5)))
        B = random_poly(g, int(g.integers(2, 5)))
        found = right_divisors(A.compose(B))
        good += any(W.degree == B.degree and linear_relation(W, B) is not None for W, _ in found)
    t6_degrees = sorted(W.degree for W, _ in right_divisors(chebyshev(6)))
    record(8, good == 20 and t6_degrees == [2, 3, 6], f"{good}/20; T6 divisor degrees {t6_degrees}")
    assert good == 20
    assert t6_degrees == [2, 3, 6]


def test_criterion_9_classification(record):
    c7 = [math.cos(k * math.pi / 7) for k in (1, 3)]
    v7 = classify(chebyshev(7), *c7)
    c8 = [math.cos(k * math.pi / 8) for k in (1, 4)]
    v8 = classify(chebyshev(8), *c8)
    vreg = classify(chebyshev(6), 0.3, SQRT3_2)
    P = chebyshev(6)
    v6 = classify(P, -SQRT3_2, SQRT3_2)
    fit = math.inf
    if v6.L1 is not None:
        fit = (v6.L2.compose(P.compose(v6.L1)) - chebyshev(6)).norm()
    ok = (v7.verdict == "DEFINITE" and "prime-power-degree" in v7.reasons
          and v8.verdict == "DEFINITE" and "prime-power-degree" in v8.reasons
          and vreg.verdict == "DEFINITE" and "regular-endpoint" in vreg.reasons
          and v6.verdict == "EXCEPTIONAL_T6" and fit <= 1e-7)
    record(9, ok, f"deg 7 {v7.verdict}, deg 8 {v8.verdict}, regular {vreg.verdict}, "
                  f"T6 {v6.verdict} with fit {fit:.1e}")
    assert v7.verdict == "DEFINITE" and v7.reasons == ("prime-power-degree",)
    assert v8.verdict == "DEFINITE" and v8.reasons == ("prime-power-degree",)
    assert vreg.verdict == "DEFINITE" and vreg.reasons == ("regular-endpoint",)
    assert v6.verdict == "EXCEPTIONAL_T6"
    assert fit <= 1e-7


def test_criterion_10_truncation_bound(record):
    values = (truncation_bound(2, 4), truncation_bound(3, 6), truncation_bound(6, 5))
    types_ok = all(type(v) is int for v in values)
    record(10, values == (5, 65, 1) and types_ok, f"values {values}")
    assert values == (5, 65, 1)
    assert types_ok
