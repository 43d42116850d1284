from __future__ import annotations

import itertools
import json
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codedpir.code import LinearCode, parity_code, rate_matrix_ratio_bound, repetition_code
from codedpir.field import gf
from codedpir.ratematrix import (
    RateMatrix,
    RateMatrixError,
    SearchStatus,
    Verdict,
    build_interference_pair,
    check_interference_pair,
    find_min_ratio,
    find_rate_matrix,
    is_capacity_achieving,
    validate_rate_matrix,
)

EX1 = [[0, 1, 1, 1, 1], [1, 0, 0, 1, 1], [1, 1, 1, 0, 0]]
EX3 = [
    [0, 1, 0, 0, 0, 1, 1, 1, 1],
    [1, 0, 1, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, 1, 0, 0, 0, 0],
]


def random_code(rng, n_max=8, k_max=4, n_min=2) -> LinearCode:
    F = gf(2)
    n = int(rng.integers(n_min, n_max + 1))
    k = int(rng.integers(1, min(k_max, n) + 1))
    while True:
        G = F.random(rng, (k, n))
        if F.rank(G) == k:
            return LinearCode(G, F)


def spans(code: LinearCode, mask: tuple[int, ...]) -> bool:
    cols = [j for j, b in enumerate(mask) if b]
    return bool(cols) and code.field.rank(code.generator[:, cols]) == code.k


def brute_force(code: LinearCode, kappa: int, nu: int):
    """Lexicographically smallest sorted-row valid matrix over all 2^(nu*n) candidates, or None."""
    n = code.n
    rows = [r for r in itertools.product((0, 1), repeat=n) if spans(code, r)]
    best = None
    for M in itertools.product(rows, repeat=nu):
        if all(sum(r[j] for r in M) == kappa for j in range(n)):
            key = tuple(sorted(M))
            if best is None or key < best:
                best = key
    return best


def test_validate_examples(C1, C2):
    assert validate_rate_matrix(C1, EX1) == (True, "")
    assert validate_rate_matrix(C2, EX3) == (True, "")
    assert validate_rate_matrix(C1, [[1] * 5]) == (True, "")
    ok, why = validate_rate_matrix(C1, [[1, 1, 1, 1, 1], [0, 1, 1, 1, 1]])
    assert not ok and "column 2" in why
    ok, why = validate_rate_matrix(C1, [[0, 0, 1, 1, 1], [1, 1, 0, 0, 0]])
    assert not ok and "row 1" in why
    with pytest.raises(RateMatrixError):
        validate_rate_matrix(C1, [[1, 1, 1]])
    with pytest.raises(RateMatrixError):
        RateMatrix(np.array([[1, 1, 1, 1, 0]]), C1)


def test_find_examples(C1, rep2):
    res = find_rate_matrix(C1, 2, 3)
    assert res.found and validate_rate_matrix(C1, res.matrix.matrix)[0]
    res = find_rate_matrix(C1, 1, 2)
    assert res.status is SearchStatus.NONE and "k/n" in res.reason
    res = find_rate_matrix(rep2, 1, 2)
    assert res.found and res.matrix.matrix.tolist() == [[0, 1], [1, 0]]
    with pytest.raises(RateMatrixError):
        find_rate_matrix(C1, 3, 2)


def test_budget_is_reported(codes):
    res = find_rate_matrix(codes["C2"], 5, 7, budget=3)
    assert res.status is SearchStatus.BUDGET and not res.found


@pytest.mark.parametrize("name,ratio", [("C1", (2, 3)), ("C2", (2, 3)), ("C3", (3, 5)), ("C4", (3, 4))])
def test_min_ratio_of_examples(codes, name, ratio):
    t = time.perf_counter()
    best = find_min_ratio(codes[name], nu_max=8)
    assert time.perf_counter() - t < 60
    assert (best.kappa, best.nu) == ratio and best.certified
    assert validate_rate_matrix(codes[name], best.matrix.matrix)[0]


def test_min_ratio_trivial(rep2, C1):
    best = find_min_ratio(rep2, nu_max=2)
    assert best.ratio == Fraction(1, 2) and best.matrix.is_capacity_achieving()
    # kappa = nu = 1 (the all-ones row) always exists, so a short search falls back to it.
    assert find_min_ratio(C1, nu_max=2).ratio == 1
    with pytest.raises(RateMatrixError):
        find_min_ratio(C1, nu_max=0)


def test_capacity_verdicts(C1, rep2, codes):
    from codedpir.code import direct_sum_decompose

    assert is_capacity_achieving(C1).verdict is Verdict.NO
    G1 = direct_sum_decompose(C1).parts[0][1]
    assert bool(is_capacity_achieving(G1))
    assert bool(is_capacity_achieving(rep2))
    assert bool(is_capacity_achieving(parity_code(3)))
    for name in ("C2", "C3", "C4"):
        assert is_capacity_achieving(codes[name]).verdict is Verdict.NO


def test_interference_pair_example(C1):
    pair = build_interference_pair(RateMatrix(np.array(EX1), C1))
    assert pair.A.T.tolist() == [[2, 3], [1, 3], [1, 3], [1, 2], [1, 2]]
    assert pair.B.tolist() == [[1, 2, 2, 3, 3]]
    assert pair.S(1) == (2, 3, 4, 5)
    assert check_interference_pair(pair, C1) == (True, "")
    full = build_interference_pair(RateMatrix(np.ones((2, 5), dtype=int), C1))
    assert full.B.shape == (0, 5)


def test_json_round_trip(C1, C2):
    rm = RateMatrix(np.array(EX1), C1)
    back = RateMatrix.from_json(rm.to_json(), C1)
    assert np.array_equal(back.matrix, rm.matrix) and (back.kappa, back.nu) == (2, 3)
    with pytest.raises(RateMatrixError):
        RateMatrix.from_json(rm.to_json(), C2)
    bad = json.loads(rm.to_json())
    bad["kappa"] = 1
    with pytest.raises(RateMatrixError):
        RateMatrix.from_json(json.dumps(bad), C1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_search_agrees_with_brute_force(seed, nu):
    code = random_code(np.random.default_rng(seed), n_max=6 if nu < 3 else 5, k_max=3)
    for kappa in range(1, nu + 1):
        res = find_rate_matrix(code, kappa, nu)
        expected = brute_force(code, kappa, nu)
        if expected is None:
            assert res.status is SearchStatus.NONE
        else:
            assert res.found
            assert tuple(map(tuple, res.matrix.matrix.tolist())) == expected


def random_valid_lambdas(count: int, seed: int):
    """Random constant-column-weight matrices on random codes, kept when valid."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        code = random_code(rng)
        nu = int(rng.integers(1, 6))
        kappa = int(rng.integers(1, nu + 1))
        M = np.zeros((nu, code.n), dtype=np.int64)
        for l in range(code.n):
            M[rng.choice(nu, size=kappa, replace=False), l] = 1
        if validate_rate_matrix(code, M)[0]:
            out.append(RateMatrix(M, code))
    return out


def test_interference_pairs_on_random_lambdas():
    for rm in random_valid_lambdas(50, seed=7):
        assert check_interference_pair(build_interference_pair(rm), rm.code) == (True, "")


def test_ratio_bounds_on_search_results(codes):
    rng = np.random.default_rng(11)
    found = [find_min_ratio(c, nu_max=6).matrix for c in codes.values()]
    found += [find_min_ratio(random_code(rng, n_max=7), nu_max=4).matrix for _ in range(20)]
    for rm in found:
        k, n = rm.code.k, rm.code.n
        assert rm.ratio >= Fraction(k, n)
        assert rm.ratio >= rate_matrix_ratio_bound(rm.code)
        if rm.is_capacity_achieving():
            assert all(len(rm.row_support(u)) == k for u in range(1, rm.nu + 1))


def test_repetition_over_larger_field():
    code = repetition_code(3, q=3)
    best = find_min_ratio(code, nu_max=3)
    assert best.ratio == Fraction(1, 3)
