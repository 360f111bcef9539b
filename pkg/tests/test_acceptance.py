"""Acceptance criteria, one test each.  Every test prints a single PASS/FAIL line."""
import time
from fractions import Fraction
from itertools import combinations_with_replacement

import pytest

from orbcalc.bounds import (
    GroupData,
    additive_example,
    counting_lower_bound,
    genus_from_char,
    lift_by_group,
    upper_bound_equiv,
    upper_bound_orb,
)
from orbcalc.campaign import finite_config, run_enumeration, run_fuzz
from orbcalc.constructions import sixth_sharp_decomposition, superadd_decomposition
from orbcalc.decomposition import net_iota, net_x
from orbcalc.generators import FuzzConfig
from orbcalc.moves import replay, run_script
from orbcalc.oracles import is_listed_spherical_triple, orb_char_by_integers
from orbcalc.orbifold import INF, orb_char, vertex_char

F = Fraction


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}", flush=True)
        assert ok, detail

    return emit


def test_criterion_1_additive_torus_knot_sums(report):
    start = time.perf_counter()
    bad = []
    for q, k in [(5, 2), (7, 3), (9, 4)]:
        rep = additive_example(q, k)
        qs = rep.quantities
        candidate = 4 - F(2, k)
        if qs["x_omega(K_i)"] != 2 * (1 - F(1, k)) or qs["candidate x_omega(K)"] != candidate:
            bad.append((q, k, "values"))
        if not 2 * (q - 1) * (1 - F(1, k)) > candidate or not 2 * (2 * q - 1) * (1 - F(1, k)) - 2 > candidate:
            bad.append((q, k, "competitors"))
        if not rep.ok:
            bad.append((q, k, [c.text for c in rep.claims if not c.holds]))
    elapsed = time.perf_counter() - start
    report(1, not bad and elapsed < 1, f"3 (q,k) cases, {len(bad)} failures, {elapsed:.3f}s (limit 1s)")


def test_criterion_2_superadditive_end_to_end(report):
    start = time.perf_counter()
    bad = []
    for t, w in [(1, 2), (1, 3), (2, 2)]:
        d = superadd_decomposition(t, w)
        if net_x(d) != 4 * t + F(2, w) or net_iota(d) != -2:
            bad.append((t, w, "netX/netiota"))
        seq = run_script(
            d,
            [
                ("create_removable", {"piece": "B1", "ghost_arc": 0}),
                ("amalgamate", {"thick1": "H1", "thick2": "H2", "thin": "S"}),
            ],
        )
        final = replay(seq)
        x_final = orb_char(final.thick[0].component)
        if len(final.thick) != 1 or final.thin or x_final != 4 * t + 2:
            bad.append((t, w, "amalgamated surface"))
        g = GroupData(w)
        x_factors = sum(orb_char(s.component) for s in d.thick)
        gap = genus_from_char(lift_by_group(x_final, g), 1) - genus_from_char(lift_by_group(x_factors, g), 2)
        if gap != w - 1:
            bad.append((t, w, f"gap {gap}"))
    elapsed = time.perf_counter() - start
    report(2, not bad and elapsed < 1, f"3 (t,w) cases, {len(bad)} failures, {elapsed:.3f}s (limit 1s)")


def test_criterion_3_sixth_sharp_family(report):
    bad = []
    for a in list(range(2, 25)) + [INF]:
        inv = F(0) if a is INF else F(1, a)
        d = sixth_sharp_decomposition(a)
        thin = orb_char(d.surface("S").component)
        if net_x(d) != F(1, 6) + inv or thin != F(1, 6) - inv:
            bad.append(a)
        if thin != orb_char_by_integers(0, (2, 3, a)):
            bad.append(a)
        if (a is INF or a >= 7) and not thin > 0:
            bad.append(a)
    report(3, not bad, f"24 values of a, failures {bad}")


def test_criterion_4_identity_fuzz(report):
    start = time.perf_counter()
    rep = run_fuzz(FuzzConfig(seed=1, count=10_000, max_pieces=6, max_weight=12, inf_prob=0.1), moves=False)
    elapsed = time.perf_counter() - start
    ok = rep.cases == 10_000 and not rep.identity_failures and elapsed < 10
    report(4, ok, f"{rep.cases} cases, {len(rep.identity_failures)} identity failures, {elapsed:.2f}s (limit 10s)")


def test_criterion_5_low_n_enumeration(report):
    start = time.perf_counter()
    rep = run_enumeration(3, [2, 3, 5, INF])
    elapsed = time.perf_counter() - start
    ok = rep.ok and elapsed < 30
    report(
        5,
        ok,
        f"{rep.cases} structures, {len(rep.negative_not_trivial)} negative non-trivial, "
        f"{len(rep.zero_unclassified)} zero unclassified, {len(rep.mismatches)} oracle mismatches, "
        f"{elapsed:.2f}s (limit 30s)",
    )


def test_criterion_6_move_monotonicity(report):
    rep = run_fuzz(FuzzConfig(seed=1, count=3500))
    ok = rep.moves_applied >= 10_000 and not rep.move_violations
    report(6, ok, f"{rep.moves_applied} moves over {rep.cases} cases, {len(rep.move_violations)} violations")


def test_criterion_7_spherical_triples(report):
    finite = list(combinations_with_replacement(range(2, 101), 3))
    with_inf = [t + (INF,) * (3 - len(t)) for r in range(3) for t in combinations_with_replacement(range(2, 101), r)]
    mismatches = [t for t in finite + with_inf if vertex_char(t)[1] != is_listed_spherical_triple(t)]
    report(7, not mismatches, f"{len(finite) + len(with_inf)} triples, {len(mismatches)} mismatches")


def test_criterion_8_bound_pins(report):
    bad = []
    for t in range(1, 6):
        for w in range(2, 9):
            x_s = 2 * (1 - F(1, w)) - 2
            if upper_bound_orb(4 * t, x_s, 1, 1) != 4 * t + 2:
                bad.append(("orb", t, w))
    if counting_lower_bound(2, GroupData(12)) != 3:
        bad.append("counting")
    for g in range(10):
        for order in range(1, 11):
            for cyclic in (True, False):
                if upper_bound_equiv(g, 1, GroupData(order, cyclic)) != g:
                    bad.append(("equiv", g, order, cyclic))
    report(8, not bad, f"35 orb pins, counting pin, 200 equivariant pins, failures {bad}")


def test_criterion_9_integrality(report):
    rep = run_fuzz(finite_config(FuzzConfig(seed=1, count=1000)), moves=False)
    ok = rep.integrality_checked == 1000 and not rep.integrality_failures
    report(9, ok, f"{rep.integrality_checked} finite-weight cases, {len(rep.integrality_failures)} violations")
