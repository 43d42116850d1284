from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codedpir.field import FieldElement, FieldError, field_arith, gf, gf2_rank, pack_rows, sample_uniform

SMALL_ORDERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]


def _tables(q):
    F = gf(q)
    a, b = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    return F, F.add(a, b), F.mul(a, b)


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_field_axioms_exhaustive(q):
    F, add, mul = _tables(q)
    r = np.arange(q)
    assert np.array_equal(add, add.T) and np.array_equal(mul, mul.T)
    assert np.array_equal(add[0], r) and np.array_equal(mul[1], r)
    for a, b, c in itertools.product(range(q), repeat=3):
        assert add[add[a, b], c] == add[a, add[b, c]]
        assert mul[mul[a, b], c] == mul[a, mul[b, c]]
        assert mul[a, add[b, c]] == add[mul[a, b], mul[a, c]]
    for a in range(q):
        assert (add[a] == 0).sum() == 1
    for a in range(1, q):
        assert sorted(mul[a]) == list(range(q))


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_division_undoes_multiplication(q):
    F = gf(q)
    a, b = np.meshgrid(np.arange(q), np.arange(1, q), indexing="ij")
    assert np.array_equal(F.mul(F.div(a, b), b), a)
    assert np.array_equal(F.sub(F.add(a, b), b), a)


@pytest.mark.parametrize("q", [32, 64, 128, 256, 25, 27, 49, 81, 125, 243])
def test_larger_fields_have_invertible_multiplication(q):
    F = gf(q)
    a = np.arange(1, q)
    assert np.array_equal(F.mul(a, F.inv(a)), np.ones(q - 1, dtype=np.int64))
    table = F.mul(a[:, None], a[None, :])
    assert all(len(set(row)) == q - 1 for row in table.tolist())


def test_spec_examples():
    two = gf(2)
    assert field_arith(FieldElement(two, 1), FieldElement(two, 1), "add") == FieldElement(two, 0)
    assert field_arith(FieldElement(two, 1), FieldElement(two, 1), "mul") == FieldElement(two, 1)
    five = gf(5)
    brute = {b: next(x for x in range(5) if (x * b) % 5 == 3) for b in range(1, 5)}
    assert int(field_arith(FieldElement(five, 3), FieldElement(five, 4), "div")) == brute[4] == 2


def test_extension_encoding_is_low_degree_first():
    F = gf(8)
    # x * x = x^2: 2 * 2 = 4, and x^3 = x + 1 under x^3 + x + 1
    assert int(F.mul(2, 2)) == 4
    assert int(F.mul(4, 2)) == 3


def test_errors():
    five, seven = gf(5), gf(7)
    with pytest.raises(ZeroDivisionError):
        field_arith(FieldElement(five, 1), FieldElement(five, 0), "div")
    with pytest.raises(FieldError):
        field_arith(FieldElement(five, 1), FieldElement(seven, 1), "add")
    with pytest.raises(FieldError):
        FieldElement(five, 5)
    with pytest.raises(FieldError):
        gf(6)


def test_sampling_is_reproducible_and_uniform():
    rng_a, rng_b = np.random.default_rng(11), np.random.default_rng(11)
    assert np.array_equal(sample_uniform(gf(2), rng_a, 64), sample_uniform(gf(2), rng_b, 64))
    bits = sample_uniform(gf(2), np.random.default_rng(0), 100_000)
    assert abs(bits.mean() - 0.5) < 0.01
    vals = sample_uniform(gf(4), np.random.default_rng(1), 100_000)
    freqs = np.bincount(vals, minlength=4) / vals.size
    assert np.all(np.abs(freqs - 0.25) < 0.01)
    assert isinstance(sample_uniform(gf(3), np.random.default_rng(2)), FieldElement)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_packed_gf2_rank_matches_elimination(rows, cols, seed):
    M = np.random.default_rng(seed).integers(0, 2, size=(rows, cols))
    assert gf2_rank(pack_rows(M), cols) == len(gf(2).rref(M)[1])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 4, 5, 8, 9]), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_inverse_of_random_invertible_matrix(q, n, seed):
    F = gf(q)
    rng = np.random.default_rng(seed)
    M = F.random(rng, (n, n))
    if F.rank(M) < n:
        with pytest.raises(FieldError):
            F.inverse(M)
        return
    assert np.array_equal(F.matmul(M, F.inverse(M)), np.eye(n, dtype=np.int64))
