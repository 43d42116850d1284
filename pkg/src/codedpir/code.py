"""Linear storage codes and their analytics.

Coordinates are 1-based throughout the public API, matching how nodes are
numbered in a storage system: ``(2, 3, 4)`` names the second, third and fourth
columns of the generator matrix.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .field import FieldSpec, gf

CoordSet = tuple[int, ...]

INFO_SET_CAP = 10**6
CODEWORD_CAP = 2**20


class CodeError(ValueError):
    """Invalid code construction or an analysis request outside its limits."""


class EnumerationCapError(CodeError):
    """An exhaustive enumeration would exceed its configured cap."""


@dataclass(frozen=True, eq=False)
class LinearCode:
    """An [n, k] code over GF(q) given by a full-rank k x n generator matrix.

    ``coord_map`` records, for punctured codes, which coordinate of the parent
    code each column came from (1-based).
    """

    generator: np.ndarray
    field: FieldSpec
    name: str = ""
    coord_map: CoordSet | None = None

    def __post_init__(self) -> None:
        G = self.field.array(self.generator)
        if G.ndim != 2 or G.shape[0] < 1 or G.shape[1] < G.shape[0]:
            raise CodeError(f"generator must be k x n with 1 <= k <= n, got shape {G.shape}")
        if self.field.rank(G) != G.shape[0]:
            raise CodeError(
                f"generator has rank {self.field.rank(G)} < {G.shape[0]} rows; "
                "remove dependent rows first"
            )
        if self.coord_map is not None and len(self.coord_map) != G.shape[1]:
            raise CodeError("coord_map length must equal the blocklength")
        G = G.copy()
        G.setflags(write=False)
        object.__setattr__(self, "generator", G)

    @classmethod
    def from_rows(cls, rows, q: int = 2, name: str = "") -> LinearCode:
        return cls(np.asarray(rows, dtype=np.int64), gf(q), name)

    @classmethod
    def from_decimal_columns(cls, columns: Sequence[int], k: int, q: int = 2, name: str = "") -> LinearCode:
        """Each integer is one column; its base-q digits fill rows 1..k, least significant first.

        For q = 2 the column (1, 0, 1, 1)^T is written ``13``.
        """
        G = np.zeros((k, len(columns)), dtype=np.int64)
        for j, value in enumerate(columns):
            if value < 0 or value >= q**k:
                raise CodeError(f"column value {value} does not fit in {k} base-{q} digits")
            for i in range(k):
                G[i, j] = value % q
                value //= q
        return cls(G, gf(q), name)

    @property
    def n(self) -> int:
        return self.generator.shape[1]

    @property
    def k(self) -> int:
        return self.generator.shape[0]

    @property
    def q(self) -> int:
        return self.field.q

    def decimal_columns(self) -> list[int]:
        weights = self.q ** np.arange(self.k, dtype=np.int64)
        return [int(v) for v in weights @ self.generator]

    def encode(self, messages) -> np.ndarray:
        """Encode message rows (..., k) into codewords (..., n)."""
        msgs = np.atleast_2d(np.asarray(messages, dtype=np.int64))
        if msgs.shape[-1] != self.k:
            raise CodeError(f"messages must have length k={self.k}, got {msgs.shape[-1]}")
        return self.field.matmul(msgs, self.generator)

    def columns(self, coords: Sequence[int]) -> np.ndarray:
        return self.generator[:, _zero_based(self, coords)]

    def decode_from(self, coords: Sequence[int], values) -> np.ndarray:
        """Messages from codeword values on an information set ``coords``."""
        values = np.atleast_2d(np.asarray(values, dtype=np.int64))
        return self.field.solve_left(self.columns(coords), values)

    def digest(self) -> str:
        payload = json.dumps({"q": self.q, "generator": self.generator.tolist()})
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def same_code_as(self, other: LinearCode) -> bool:
        """Codeword-set equality (same field, same coordinates)."""
        if other.field != self.field or other.n != self.n or other.k != self.k:
            return False
        stacked = np.vstack([self.generator, other.generator])
        return self.field.rank(stacked) == self.k

    def __repr__(self) -> str:
        label = f"{self.name} " if self.name else ""
        return f"<LinearCode {label}[{self.n},{self.k}] over GF({self.q})>"


def _zero_based(code: LinearCode, coords: Sequence[int]) -> list[int]:
    idx = [int(c) - 1 for c in coords]
    if len(set(idx)) != len(idx):
        raise CodeError(f"coordinates must be distinct: {tuple(coords)}")
    if any(i < 0 or i >= code.n for i in idx):
        raise CodeError(f"coordinates {tuple(coords)} outside [1, {code.n}]")
    return idx


def rank(code_or_matrix, field: FieldSpec | None = None) -> int:
    """Row rank of a code's generator or of a raw matrix over ``field`` (GF(2) default)."""
    if isinstance(code_or_matrix, LinearCode):
        return code_or_matrix.field.rank(code_or_matrix.generator)
    return (field or gf(2)).rank(np.asarray(code_or_matrix, dtype=np.int64))


def contains_information_set(code: LinearCode, coords: Sequence[int]) -> bool:
    """True iff the columns ``coords`` span GF(q)^k."""
    if len(coords) < code.k:
        return False
    return code.field.rank(code.columns(coords)) == code.k


def is_information_set(code: LinearCode, coords: Sequence[int]) -> bool:
    if len(coords) != code.k:
        raise CodeError(f"an information set has exactly k={code.k} coordinates, got {len(coords)}")
    return contains_information_set(code, coords)


def enumerate_information_sets(code: LinearCode, cap: int = INFO_SET_CAP) -> list[CoordSet]:
    """All information sets in lexicographic order."""
    total = comb(code.n, code.k)
    if total > cap:
        raise EnumerationCapError(
            f"C({code.n},{code.k}) = {total} candidate sets exceeds cap {cap}; "
            "test specific sets with is_information_set instead"
        )
    return [
        I
        for I in itertools.combinations(range(1, code.n + 1), code.k)
        if contains_information_set(code, I)
    ]


def first_information_set(code: LinearCode, within: Sequence[int]) -> CoordSet | None:
    """Lexicographically smallest information set inside ``within``."""
    for I in itertools.combinations(sorted(within), code.k):
        if contains_information_set(code, I):
            return I
    return None


# -- codewords and subspaces ----------------------------------------------------


def all_messages(k: int, field: FieldSpec, cap: int = CODEWORD_CAP) -> np.ndarray:
    total = field.q**k
    if total > cap:
        raise EnumerationCapError(f"q^k = {total} exceeds enumeration cap {cap}")
    grid = np.array(list(itertools.product(range(field.q), repeat=k)), dtype=np.int64)
    return grid.reshape(total, k)


def codewords(code: LinearCode, cap: int = CODEWORD_CAP) -> np.ndarray:
    """Every codeword, one per row (q^k rows)."""
    return code.encode(all_messages(code.k, code.field, cap))


def iter_subspaces(k: int, s: int, field: FieldSpec) -> Iterator[np.ndarray]:
    """Yield every s-dimensional subspace of GF(q)^k once, as its RREF basis (s x k)."""
    q = field.q
    for pivots in itertools.combinations(range(k), s):
        free = [(r, c) for r in range(s) for c in range(pivots[r] + 1, k) if c not in pivots]
        for values in itertools.product(range(q), repeat=len(free)):
            B = np.zeros((s, k), dtype=np.int64)
            for r, c in enumerate(pivots):
                B[r, c] = 1
            for (r, c), v in zip(free, values):
                B[r, c] = v
            yield B


def gaussian_binomial(k: int, s: int, q: int) -> int:
    num = den = 1
    for i in range(s):
        num *= q ** (k - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def generalized_hamming_weight(code: LinearCode, s: int, cap: int = CODEWORD_CAP) -> int:
    """d_s: smallest support size of an s-dimensional subcode.

    Enumerates all s-dimensional message subspaces; the support of a subcode is
    the union of the supports of the images of any basis.
    """
    if not 1 <= s <= code.k:
        raise CodeError(f"s must lie in [1, {code.k}], got {s}")
    if code.q**code.k > cap:
        raise EnumerationCapError(f"q^k = {code.q ** code.k} exceeds enumeration cap {cap}")
    best = code.n
    for basis in iter_subspaces(code.k, s, code.field):
        images = code.field.matmul(basis, code.generator)
        size = int(np.count_nonzero(images.any(axis=0)))
        if size < best:
            best = size
    return best


def weight_hierarchy(code: LinearCode, cap: int = CODEWORD_CAP) -> list[int]:
    """[d_1, ..., d_k]."""
    return [generalized_hamming_weight(code, s, cap) for s in range(1, code.k + 1)]


def mds_pir_necessary_check(code: LinearCode, cap: int = CODEWORD_CAP) -> tuple[bool, int | None]:
    """Check d_s >= (n/k) s for all s; return the first failing s otherwise."""
    for s in range(1, code.k + 1):
        if generalized_hamming_weight(code, s, cap) * code.k < code.n * s:
            return False, s
    return True, None


def rate_matrix_ratio_bound(code: LinearCode, cap: int = CODEWORD_CAP) -> Fraction:
    """Lower bound max_s s/d_s on kappa/nu for any PIR achievable rate matrix.

    Every row support of such a matrix holds an information set, which meets
    the support of any s-dimensional subcode in at least s coordinates; summing
    over rows and counting by columns gives kappa * d_s >= nu * s.
    """
    return max(Fraction(s, d) for s, d in enumerate(weight_hierarchy(code, cap), start=1))


# -- puncturing and direct sums ---------------------------------------------------


def puncture(code: LinearCode, coords: Sequence[int]) -> LinearCode:
    """Restrict to ``coords`` and drop dependent rows (result is in RREF)."""
    if not coords:
        raise CodeError("cannot puncture to an empty coordinate set")
    coords = tuple(sorted(int(c) for c in coords))
    R, pivots = code.field.rref(code.columns(coords))
    parent = code.coord_map
    mapped = tuple(parent[c - 1] for c in coords) if parent else coords
    name = f"{code.name}|{list(coords)}" if code.name else ""
    return LinearCode(R[: len(pivots)], code.field, name, mapped)


@dataclass(frozen=True)
class Decomposition:
    """A partition of coordinates with the punctured code on each block."""

    code: LinearCode
    parts: tuple[tuple[CoordSet, LinearCode], ...]

    def __post_init__(self) -> None:
        coords = sorted(c for cs, _ in self.parts for c in cs)
        if coords != list(range(1, self.code.n + 1)):
            raise CodeError("decomposition blocks must partition the coordinates")
        if sum(sub.k for _, sub in self.parts) != self.code.k:
            raise CodeError("block dimensions must sum to k")

    @property
    def num_parts(self) -> int:
        return len(self.parts)

    @property
    def shapes(self) -> list[tuple[int, int]]:
        return [(sub.n, sub.k) for _, sub in self.parts]

    def block_generator(self) -> np.ndarray:
        """Block-diagonal generator placed back on the original coordinates."""
        G = np.zeros((self.code.k, self.code.n), dtype=np.int64)
        row = 0
        for coords, sub in self.parts:
            G[row : row + sub.k, [c - 1 for c in coords]] = sub.generator
            row += sub.k
        return G


def direct_sum_decompose(code: LinearCode, cap: int = CODEWORD_CAP) -> Decomposition:
    """Finest coordinate partition into a direct sum of punctured codes.

    Two coordinates are linked when some minimal-support codeword is nonzero
    on both; the connected components are the blocks. Minimality matters: a
    sum of codewords from two blocks is nonzero on both blocks.
    """
    words = codewords(code, cap)
    if not words.any(axis=0).all():
        raise CodeError("code has all-zero coordinates; they belong to no block")
    weights = 1 << np.arange(code.n, dtype=object)
    masks = sorted({int((w != 0).astype(object) @ weights) for w in words} - {0}, key=lambda m: bin(m).count("1"))
    minimal: list[int] = []
    for m in masks:
        if not any(s & m == s for s in minimal):
            minimal.append(m)

    parent = list(range(code.n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for m in minimal:
        support = [i for i in range(code.n) if m >> i & 1]
        for other in support[1:]:
            ra, rb = find(support[0]), find(other)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    blocks: dict[int, list[int]] = {}
    for c in range(code.n):
        blocks.setdefault(find(c), []).append(c + 1)
    parts = tuple((tuple(b), puncture(code, b)) for b in sorted(blocks.values()))
    return Decomposition(code, parts)


# -- the codes used throughout the examples and tests -----------------------------


def paper_codes() -> dict[str, LinearCode]:
    """C1 [5,3], C2 [9,5], C3 [7,4], C4 [11,6] binary codes."""
    C1 = LinearCode.from_rows([[1, 0, 0, 1, 0], [0, 1, 0, 1, 0], [0, 0, 1, 0, 1]], name="C1")
    C2 = LinearCode.from_rows(
        [
            [1, 0, 0, 0, 0, 0, 0, 0, 1],
            [0, 1, 0, 0, 0, 0, 0, 0, 1],
            [0, 0, 1, 0, 0, 0, 1, 1, 0],
            [0, 0, 0, 1, 0, 1, 0, 1, 1],
            [0, 0, 0, 0, 1, 1, 1, 1, 1],
        ],
        name="C2",
    )
    C3 = LinearCode.from_decimal_columns([1, 2, 4, 8, 8, 14, 5], k=4, name="C3")
    C4 = LinearCode.from_decimal_columns([1, 2, 4, 8, 16, 32, 48, 40, 24, 56, 55], k=6, name="C4")
    return {"C1": C1, "C2": C2, "C3": C3, "C4": C4}


def repetition_code(n: int = 2, q: int = 2) -> LinearCode:
    return LinearCode(np.ones((1, n), dtype=np.int64), gf(q), f"rep{n}")


def parity_code(n: int = 3, q: int = 2) -> LinearCode:
    """[n, n-1] single-parity-check code, e.g. the [3,2] block of C1."""
    F = gf(q)
    G = np.hstack([np.eye(n - 1, dtype=np.int64), np.full((n - 1, 1), int(F.neg(1)))])
    return LinearCode(G, F, f"spc{n}")
