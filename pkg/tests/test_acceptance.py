"""Acceptance criteria 1-9, one test each, each printing a single PASS/FAIL line."""

from __future__ import annotations

import time
from fractions import Fraction

import numpy as np
import pytest

from codedpir.code import (
    direct_sum_decompose,
    generalized_hamming_weight,
    paper_codes,
    parity_code,
    repetition_code,
)
from codedpir.dss import encode_store, generate_files
from codedpir.field import gf
from codedpir.protocols import audit_privacy, bundled_schedule, plan_protocolB, verify_schedule
from codedpir.protocols.directsum import required_beta as b_required_beta
from codedpir.ratematrix import (
    Verdict,
    build_interference_pair,
    check_interference_pair,
    find_min_ratio,
    is_capacity_achieving,
)
from codedpir.rates import (
    INF,
    mds_pir_capacity,
    proposition1_check,
    rate_asymmetric,
    rate_direct_sum,
    rate_symmetric,
    render,
)
from helpers import expected_rate, family, recovers
from test_code import naive_weight
from test_ratematrix import random_code, random_valid_lambdas

CODES = paper_codes()
NAMES = ("C1", "C2", "C3", "C4")


@pytest.fixture
def report(capsys):
    def emit(number: int, checks: dict[str, bool], detail: str = "") -> None:
        ok = all(checks.values())
        failed = [name for name, v in checks.items() if not v]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f" ({detail})"
        if failed:
            line += " failed: " + ", ".join(failed)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


def test_criterion_1_capacity(report):
    caps = [render(mds_pir_capacity(c.n, c.k, INF)) for c in CODES.values()]
    report(
        1,
        {
            "C_2[5,3] = 5/8": mds_pir_capacity(5, 3, 2) == Fraction(5, 8),
            "asymptotic capacities": caps == ["0.4", "0.4444", "0.4286", "0.4545"],
        },
        f"C(5,3,2) = {mds_pir_capacity(5, 3, 2)}, C_inf = {caps}",
    )


def test_criterion_2_table_one(report):
    ratios, times, rs, ra = {}, {}, {}, {}
    for name in NAMES:
        code = CODES[name]
        t = time.perf_counter()
        best = find_min_ratio(code, nu_max=8)
        times[name] = time.perf_counter() - t
        ratios[name] = best.ratio
        rs[name] = rate_symmetric(best.kappa, best.nu, code.k, code.n, INF)
        ra[name] = rate_asymmetric(best.kappa, best.nu, INF)
    parts = direct_sum_decompose(CODES["C1"]).shapes
    rb = rate_direct_sum(parts, 3, INF)
    # The reference value 0.3810 renders as 0.381: trailing zeros are dropped.
    table_s = {"C1": "0.3", "C2": "0.2778", "C3": "0.381", "C4": "0.1818"}
    table_a = {"C1": "0.3333", "C2": "0.3333", "C3": "0.4", "C4": "0.25"}
    report(
        2,
        {
            "min kappa/nu": [ratios[n] for n in NAMES]
            == [Fraction(2, 3), Fraction(2, 3), Fraction(3, 5), Fraction(3, 4)],
            "R_inf,S": {n: render(v) for n, v in rs.items()} == table_s,
            "R_inf,A": {n: render(v) for n, v in ra.items()} == table_a,
            "R_inf,B(C1)": rb == Fraction(3, 8) and render(rb) == "0.375",
            "search < 60 s": all(t < 60 for t in times.values()),
        },
        "slowest search %.2f s" % max(times.values()),
    )


def test_criterion_3_example1(report):
    code = CODES["C1"]
    rm = find_min_ratio(code).matrix
    downloads, rates, recovered, private = set(), set(), True, True
    for seed in range(20):
        for protocol in ("p1", "a"):
            files, store, plans = family(code, rm, protocol, 2, seed)
            assert store.beta == 9
            for plan in plans.values():
                downloads.add((protocol, plan.total_download))
                rates.add((protocol, plan.rate))
                recovered &= recovers(files, store, plan)
            verdict = audit_privacy(plans)
            private &= verdict.passed and sorted(verdict.nodes) == [1, 2, 3, 4, 5] and all(verdict.nodes.values())
    report(
        3,
        {
            "download": downloads == {("p1", 50), ("a", 45)},
            "rate": rates == {("p1", Fraction(27, 50)), ("a", Fraction(3, 5))},
            "recovery": recovered,
            "privacy": private,
        },
        "P1 D=50 rate 27/50, A D=45 rate 3/5 over 20 seeds x m in {1,2}",
    )


def test_criterion_4_example2(report):
    code = CODES["C1"]
    d = direct_sum_decompose(code)
    verdicts = [is_capacity_achieving(sub).verdict for _, sub in d.parts]
    f = 2
    beta = b_required_beta(d, f, "P2")
    files = generate_files(f, beta, code.k, code.field, 0)
    store = encode_store(files, code)
    plans = {m: plan_protocolB(store, d, m, "P2", 0) for m in (1, 2)}
    report(
        4,
        {
            "parts [3,2]+[2,1]": d.shapes == [(3, 2), (2, 1)],
            "parts capacity-achieving": verdicts == [Verdict.YES, Verdict.YES],
            "rate 3/8": all(p.rate == Fraction(3, 8) for p in plans.values()),
            "recovery": all(recovers(files, store, p) for p in plans.values()),
            "privacy": audit_privacy(plans).passed,
        },
        f"parts {[c for c, _ in d.parts]}, measured rate {plans[1].rate}",
    )


def test_criterion_5_table_two(report):
    code = CODES["C2"]
    schedule = bundled_schedule("table2_c2")
    v = verify_schedule(code, schedule, f=2)
    broken = verify_schedule(code, schedule.without(9, 2), f=2)
    report(
        5,
        {
            "d_2(C2) = 3": generalized_hamming_weight(code, 2) == 3,
            "schedule verifies": (v.recoverable, v.private, v.download, v.rate) == (True, True, 14, Fraction(5, 14)),
            "deleting node 9 sum 2 breaks recovery": not broken.recoverable,
        },
        f"D = {v.download}, rate = {v.rate}",
    )


def test_criterion_6_weights(report):
    timings = {}
    values = {}
    for name, s in (("C3", 3), ("C4", 3)):
        t = time.perf_counter()
        values[name] = generalized_hamming_weight(CODES[name], s)
        timings[name] = time.perf_counter() - t
    oracle = all(
        generalized_hamming_weight(CODES[n], s) == naive_weight(CODES[n], s) for n in NAMES for s in (1, 2)
    )
    report(
        6,
        {
            "d_3(C3) = 5": values["C3"] == 5,
            "d_3(C4) = 4": values["C4"] == 4,
            "< 30 s each": all(t < 30 for t in timings.values()),
            "naive pair oracle agrees for s <= 2": oracle,
        },
        "timings " + ", ".join(f"{n} {t:.2f} s" for n, t in timings.items()),
    )


def test_criterion_7_properties(report):
    chain, equality = True, True
    cases = [(c, find_min_ratio(c).matrix) for c in CODES.values()]
    cases += [(c, find_min_ratio(c).matrix) for c in (parity_code(3), repetition_code(2))]
    for code, rm in cases:
        for f in range(1, 11):
            p = proposition1_check(code.k, code.n, rm.kappa, rm.nu, f)
            chain &= p.chain_holds
            # Equality throughout the chain (R_S = C_f) exactly when kappa/nu = k/n.
            equality &= (p.symmetric == p.capacity) == (rm.ratio == Fraction(code.k, code.n)) == p.equality
    claim1 = all(
        check_interference_pair(build_interference_pair(rm), rm.code)[0] for rm in random_valid_lambdas(50, seed=2024)
    )
    rng = np.random.default_rng(99)
    searched = [rm for _, rm in cases] + [find_min_ratio(random_code(rng), nu_max=5).matrix for _ in range(30)]
    lemma1 = all(rm.ratio >= Fraction(rm.code.k, rm.code.n) for rm in searched)
    report(
        7,
        {"R_S <= R_A <= C_f": chain, "equality case": equality, "interference pairs": claim1, "kappa/nu >= k/n": lemma1},
        f"{len(cases)} codes x f in 1..10, 50 random Lambda, {len(searched)} search results",
    )


def test_criterion_8_rate_consistency(report):
    rng = np.random.default_rng(8)
    pool = dict(CODES)
    pool["[3,2]"] = parity_code(3)
    pool["[2,1]"] = repetition_code(2)
    from codedpir.code import LinearCode

    pool["GF3[4,2]"] = LinearCode(np.array([[1, 0, 1, 1], [0, 1, 1, 2]]), gf(3))
    matrices = {name: find_min_ratio(c).matrix for name, c in pool.items()}
    c1_parts = direct_sum_decompose(CODES["C1"])
    runs, mismatches, failures = 0, [], []
    while runs < 100:
        protocol = str(rng.choice(["p1", "a", "p2", "a-inf", "b-p1", "b-p2"]))
        f = int(rng.integers(1, 4))
        seed = int(rng.integers(0, 2**32))
        if protocol.startswith("b-"):
            sub = protocol[2:].upper()
            beta = b_required_beta(c1_parts, f, sub)
            files = generate_files(f, beta, 3, CODES["C1"].field, seed)
            store = encode_store(files, CODES["C1"])
            m = int(rng.integers(1, f + 1))
            plan = plan_protocolB(store, c1_parts, m, sub, seed)
            want = rate_direct_sum(c1_parts.shapes, 3, f if sub == "P1" else INF)
            name = "C1"
        else:
            name = str(rng.choice(list(pool)))
            rm = matrices[name]
            files, store, plans = family(pool[name], rm, protocol, f, seed)
            plan = plans[int(rng.integers(1, f + 1))]
            want = expected_rate(rm, protocol, f)
        if Fraction(plan.beta * plan.code.k, plan.total_download) != want:
            mismatches.append((protocol, name, f, seed))
        if not recovers(files, store, plan):
            failures.append((protocol, name, f, seed))
        runs += 1
    report(
        8,
        {"beta k / D equals closed form": not mismatches, "recovery": not failures},
        f"{runs} randomized runs",
    )


def test_criterion_9_per_node_download(report):
    checks = {}
    for code in (parity_code(3), repetition_code(2)):
        n, k = code.n, code.k
        rm = find_min_ratio(code).matrix
        for f in (1, 2, 3):
            _, _, plans = family(code, rm, "p1", f, seed=f)
            D = plans[1].per_node_download()
            checks[f"P1 [{n},{k}] f={f}"] = len(set(D)) == 1 and Fraction(n * D[0], plans[1].beta) == k / mds_pir_capacity(n, k, f)
        _, _, plans = family(code, rm, "p2", 2, seed=0)
        D = plans[1].per_node_download()
        checks[f"P2 [{n},{k}]"] = len(set(D)) == 1 and Fraction(n * D[0], plans[1].beta) == k / mds_pir_capacity(n, k, INF)
    report(9, checks, "n D / beta = k / C with D the per-node download")
