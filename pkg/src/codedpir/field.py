"""Finite field arithmetic and small dense linear algebra over GF(q).

Elements are canonical integers in ``[0, q)``. For an extension field GF(p^e)
an element is the coefficient vector of its polynomial-basis representation,
read low degree first as base-``p`` digits, so ``1 + x^2`` in GF(8) is ``5``.

GF(2) has a bit-packed fast path for rank computations (rows as Python ints);
prime fields use modular arithmetic; extension fields use log/antilog tables
built from a fixed primitive polynomial per degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Sequence

import numpy as np

# Primitive polynomials over GF(2), encoded with bit i = coefficient of x^i.
BINARY_PRIMITIVE_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}

MAX_ORDER = 1 << 16


class FieldError(ValueError):
    """Raised for invalid field parameters or undefined field operations."""


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise FieldError(f"field order must be a prime power >= 2, got {q}")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, rest = 0, q
    while rest % p == 0:
        rest //= p
        e += 1
    if rest != 1:
        raise FieldError(f"field order {q} is not a prime power")
    return p, e


def _digits(value: int, p: int, e: int) -> list[int]:
    out = []
    for _ in range(e):
        out.append(value % p)
        value //= p
    return out


def _undigits(digits: Sequence[int], p: int) -> int:
    value = 0
    for d in reversed(digits):
        value = value * p + d
    return value


def _poly_mulmod(a: list[int], b: list[int], modulus: list[int], p: int) -> list[int]:
    """Multiply digit vectors a*b mod a monic modulus (all low-degree-first)."""
    e = len(modulus) - 1
    prod = [0] * (2 * e - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for deg in range(len(prod) - 1, e - 1, -1):
        c = prod[deg]
        if c:
            for i in range(e + 1):
                prod[deg - e + i] = (prod[deg - e + i] - c * modulus[i]) % p
    return prod[:e]


def _exp_table(p: int, e: int, modulus: list[int]) -> list[int] | None:
    """Powers of x modulo ``modulus``; None if x is not primitive."""
    q = p**e
    x = [0] * e
    if e == 1:
        return None
    x[1] = 1
    cur = [1] + [0] * (e - 1)
    table = []
    for _ in range(q - 1):
        table.append(_undigits(cur, p))
        cur = _poly_mulmod(cur, x, modulus, p)
    if cur != [1] + [0] * (e - 1) or len(set(table)) != q - 1:
        return None
    return table


def _primitive_modulus(p: int, e: int) -> list[int]:
    if p == 2 and e in BINARY_PRIMITIVE_POLYS:
        return _digits(BINARY_PRIMITIVE_POLYS[e], 2, e + 1)
    # Smallest monic primitive polynomial in integer order of its low digits.
    for low in range(1, p**e):
        modulus = _digits(low, p, e) + [1]
        if _exp_table(p, e, modulus) is not None:
            return modulus
    raise FieldError(f"no primitive polynomial found for GF({p}^{e})")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """GF(q) with q = p^e.  Build through :func:`gf` to share tables."""

    q: int
    p: int = dc_field(init=False)
    e: int = dc_field(init=False)
    modulus: tuple[int, ...] = dc_field(init=False)
    _exp: np.ndarray = dc_field(init=False, repr=False)
    _log: np.ndarray = dc_field(init=False, repr=False)
    _inv: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self) -> None:
        p, e = _factor_prime_power(self.q)
        if self.q > MAX_ORDER:
            raise FieldError(f"field order {self.q} exceeds supported maximum {MAX_ORDER}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "e", e)
        q = self.q
        if e == 1:
            modulus: tuple[int, ...] = (0, 1)
            inv = np.zeros(q, dtype=np.int64)
            for a in range(1, q):
                inv[a] = pow(a, q - 2, q)
            exp = log = np.zeros(0, dtype=np.int64)
        else:
            mod = _primitive_modulus(p, e)
            modulus = tuple(mod)
            exp = np.array(_exp_table(p, e, mod), dtype=np.int64)
            log = np.zeros(q, dtype=np.int64)
            log[exp] = np.arange(q - 1)
            inv = np.zeros(q, dtype=np.int64)
            inv[exp] = exp[(-np.arange(q - 1)) % (q - 1)]
        for name, arr in (("_exp", exp), ("_log", log), ("_inv", inv)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "modulus", modulus)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldSpec) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("GF", self.q))

    def __repr__(self) -> str:
        return f"GF({self.q})"

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def degree(self) -> int:
        return self.e

    @property
    def is_prime(self) -> bool:
        return self.e == 1

    # -- elementwise arithmetic on integer arrays ------------------------------

    def array(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.q):
            raise FieldError(f"values outside [0, {self.q}) for GF({self.q})")
        return arr

    def _digitwise(self, a, b, op) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        scale = 1
        for _ in range(self.e):
            out += (op(a // scale % self.p, b // scale % self.p) % self.p) * scale
            scale *= self.p
        return out

    def add(self, a, b) -> np.ndarray:
        if self.e == 1:
            return (np.asarray(a, dtype=np.int64) + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(np.asarray(a, dtype=np.int64), b)
        return self._digitwise(a, b, np.add)

    def sub(self, a, b) -> np.ndarray:
        if self.e == 1:
            return (np.asarray(a, dtype=np.int64) - b) % self.p
        if self.p == 2:
            return np.bitwise_xor(np.asarray(a, dtype=np.int64), b)
        return self._digitwise(a, b, np.subtract)

    def neg(self, a) -> np.ndarray:
        return self.sub(np.zeros_like(np.asarray(a, dtype=np.int64)), a)

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return (a * b) % self.p
        zero = (a == 0) | (b == 0)
        prod = self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return np.where(zero, 0, prod)

    def inv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError(f"inverse of zero in GF({self.q})")
        return self._inv[a]

    def div(self, a, b) -> np.ndarray:
        return self.mul(a, self.inv(b))

    # -- vectors and matrices ---------------------------------------------------

    def dot(self, u, v) -> int:
        return int(self.sum(self.mul(u, v)))

    def sum(self, a, axis=None):
        a = np.asarray(a, dtype=np.int64)
        if self.e == 1:
            return a.sum(axis=axis) % self.p
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        return _digit_sum(self, a, axis)

    def matmul(self, A, B) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if self.e == 1:
            return (A @ B) % self.p
        vec = B.ndim == 1
        if vec:
            B = B[:, None]
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for j in range(A.shape[1]):
            out = self.add(out, self.mul(A[:, j, None], B[None, j, :]))
        return out[:, 0] if vec else out

    def rref(self, M) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and pivot columns."""
        R = np.array(M, dtype=np.int64, copy=True)
        if R.ndim != 2:
            raise FieldError("rref expects a 2-D matrix")
        rows, cols = R.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(R[r:, c])[0]
            if nz.size == 0:
                continue
            piv = r + int(nz[0])
            if piv != r:
                R[[r, piv]] = R[[piv, r]]
            R[r] = self.mul(R[r], self.inv(R[r, c]))
            for i in range(rows):
                if i != r and R[i, c]:
                    R[i] = self.sub(R[i], self.mul(R[i, c], R[r]))
            pivots.append(c)
            r += 1
        return R, pivots

    def rank(self, M) -> int:
        M = np.asarray(M, dtype=np.int64)
        if M.size == 0:
            return 0
        if self.q == 2:
            return gf2_rank(pack_rows(M), M.shape[1])
        return len(self.rref(M)[1])

    def inverse(self, M) -> np.ndarray:
        M = np.asarray(M, dtype=np.int64)
        n = M.shape[0]
        if M.shape != (n, n):
            raise FieldError("only square matrices are invertible")
        R, piv = self.rref(np.hstack([M, np.eye(n, dtype=np.int64)]))
        if piv[:n] != list(range(n)):
            raise FieldError("matrix is singular")
        return R[:, n:]

    def solve_left(self, A, b) -> np.ndarray:
        """Solve ``x @ A = b`` for square invertible ``A``."""
        return self.matmul(np.asarray(b, dtype=np.int64), self.inverse(A))

    def random(self, rng: np.random.Generator, size=None) -> np.ndarray:
        return rng.integers(0, self.q, size=size, dtype=np.int64)


def _digit_sum(F: FieldSpec, a: np.ndarray, axis) -> np.ndarray:
    out = 0
    scale = 1
    for _ in range(F.e):
        out = out + ((a // scale % F.p).sum(axis=axis) % F.p) * scale
        scale *= F.p
    return np.asarray(out, dtype=np.int64)


@lru_cache(maxsize=None)
def gf(q: int) -> FieldSpec:
    """Shared :class:`FieldSpec` instance for GF(q)."""
    return FieldSpec(q)


# -- GF(2) bit-packed helpers ---------------------------------------------------


def pack_rows(M) -> list[int]:
    """Pack each 0/1 row into an int, bit j = column j."""
    M = np.asarray(M)
    weights = 1 << np.arange(M.shape[1], dtype=object)
    return [int((np.asarray(row, dtype=object) * weights).sum()) for row in M]


def gf2_rank(rows: list[int], n_cols: int) -> int:
    """Rank over GF(2) of rows given as bitsets."""
    work = [r for r in rows if r]
    rank = 0
    for col in range(n_cols):
        bit = 1 << col
        pivot = next((i for i in range(rank, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for i in range(len(work)):
            if i != rank and work[i] & bit:
                work[i] ^= work[rank]
        rank += 1
        if rank == len(work):
            break
    return rank


# -- scalar element type --------------------------------------------------------


@dataclass(frozen=True)
class FieldElement:
    """A single element of a finite field with operator overloading."""

    field: FieldSpec
    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.field.q:
            raise FieldError(f"{self.value} is not an element of {self.field!r}")

    def _check(self, other: FieldElement) -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")
        if other.field != self.field:
            raise FieldError(f"mismatched fields {self.field!r} and {other.field!r}")

    def __add__(self, other: FieldElement) -> FieldElement:
        return field_arith(self, other, "add")

    def __sub__(self, other: FieldElement) -> FieldElement:
        return field_arith(self, other, "sub")

    def __mul__(self, other: FieldElement) -> FieldElement:
        return field_arith(self, other, "mul")

    def __truediv__(self, other: FieldElement) -> FieldElement:
        return field_arith(self, other, "div")

    def __neg__(self) -> FieldElement:
        return FieldElement(self.field, int(self.field.neg(self.value)))

    def __int__(self) -> int:
        return self.value


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Apply ``op`` in {"add", "sub", "mul", "div"} to two elements of one field."""
    a._check(b)
    F = a.field
    if op == "div" and b.value == 0:
        raise ZeroDivisionError(f"division by zero in {F!r}")
    try:
        fn = {"add": F.add, "sub": F.sub, "mul": F.mul, "div": F.div}[op]
    except KeyError:
        raise FieldError(f"unknown field operation {op!r}") from None
    return FieldElement(F, int(fn(a.value, b.value)))


def sample_uniform(spec: FieldSpec, rng: np.random.Generator, size=None):
    """Uniform element(s) of ``spec`` drawn from a seeded numpy Generator."""
    if size is None:
        return FieldElement(spec, int(rng.integers(0, spec.q)))
    return spec.random(rng, size)
