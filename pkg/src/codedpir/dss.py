"""In-memory coded distributed storage: files, the encoded array, and node responses.

A store holds ``f`` files of ``beta`` stripes each. Stripe ``i`` of file ``m``
(both 1-based) is encoded into row ``(m-1)*beta + i`` of a ``beta*f x n``
array, and node ``l`` stores column ``l``. A query to a node is a list of
coefficient vectors over its ``beta*f`` stored symbols.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .code import LinearCode
from .field import FieldSpec, gf


class StoreError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FileSet:
    """``f`` files, each a ``beta x k`` matrix over the field; shape (f, beta, k)."""

    files: np.ndarray
    field: FieldSpec

    def __post_init__(self) -> None:
        arr = self.field.array(self.files)
        if arr.ndim != 3 or 0 in arr.shape:
            raise StoreError(f"files must have shape (f, beta, k) with positive sizes, got {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "files", arr)

    @property
    def f(self) -> int:
        return self.files.shape[0]

    @property
    def beta(self) -> int:
        return self.files.shape[1]

    @property
    def k(self) -> int:
        return self.files.shape[2]

    def file(self, m: int) -> np.ndarray:
        """File ``m`` (1-based) as a beta x k matrix."""
        if not 1 <= m <= self.f:
            raise StoreError(f"file index {m} outside [1, {self.f}]")
        return self.files[m - 1]


def generate_files(f: int, beta: int, k: int, field: FieldSpec, seed: int) -> FileSet:
    """Uniform random files, reproducible from ``seed``."""
    if min(f, beta, k) < 1:
        raise StoreError("f, beta and k must be positive")
    rng = np.random.default_rng(seed)
    return FileSet(field.random(rng, (f, beta, k)), field)


@dataclass(frozen=True, eq=False)
class CodedStore:
    """The encoded array; row ``(m-1)*beta + i`` is the codeword of stripe i of file m."""

    code: LinearCode
    array: np.ndarray
    f: int
    beta: int

    def __post_init__(self) -> None:
        arr = self.code.field.array(self.array)
        if arr.shape != (self.f * self.beta, self.code.n):
            raise StoreError(f"array shape {arr.shape} != (beta*f, n) = ({self.f * self.beta}, {self.code.n})")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "array", arr)

    @property
    def field(self) -> FieldSpec:
        return self.code.field

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def rows(self) -> int:
        return self.f * self.beta

    def row_index(self, m: int, i: int) -> int:
        """0-based array row of stripe ``i`` of file ``m`` (both 1-based)."""
        if not (1 <= m <= self.f and 1 <= i <= self.beta):
            raise StoreError(f"(file {m}, stripe {i}) outside [1,{self.f}] x [1,{self.beta}]")
        return (m - 1) * self.beta + (i - 1)

    def node_column(self, l: int) -> np.ndarray:
        """Everything node ``l`` (1-based) stores."""
        if not 1 <= l <= self.n:
            raise StoreError(f"node {l} outside [1, {self.n}]")
        return self.array[:, l - 1]

    def to_json(self) -> str:
        return json.dumps(
            {
                "q": self.field.q,
                "generator": self.code.generator.tolist(),
                "f": self.f,
                "beta": self.beta,
                "rows": [_pack_row(r, self.field.q) for r in self.array],
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> CodedStore:
        data = json.loads(text)
        field = gf(data["q"])
        code = LinearCode(np.asarray(data["generator"]), field)
        rows = [_unpack_row(r, field.q, code.n) for r in data["rows"]]
        store = cls(code, np.asarray(rows, dtype=np.int64).reshape(-1, code.n), data["f"], data["beta"])
        if not np.array_equal(store.array, _encode_rows(store)):
            raise StoreError("stored rows are not codewords of the stored generator")
        return store


def _pack_row(row: np.ndarray, q: int):
    if q == 2:
        return format(int("".join(map(str, row.tolist())) or "0", 2), "x")
    return row.tolist()


def _unpack_row(value, q: int, n: int) -> list[int]:
    if q == 2:
        return [int(b) for b in format(int(value, 16), f"0{n}b")]
    return list(value)


def _encode_rows(store: CodedStore) -> np.ndarray:
    # Systematic positions are not assumed: recover messages via an information set.
    from .code import first_information_set

    I = first_information_set(store.code, range(1, store.n + 1))
    msgs = store.code.decode_from(I, store.array[:, [c - 1 for c in I]])
    return store.code.encode(msgs)


def encode_store(files: FileSet, code: LinearCode) -> CodedStore:
    if files.k != code.k:
        raise StoreError(f"files have k={files.k} symbols per stripe but the code has k={code.k}")
    if files.field != code.field:
        raise StoreError(f"files are over GF({files.field.q}) but the code is over GF({code.q})")
    flat = files.files.reshape(files.f * files.beta, files.k)
    return CodedStore(code, code.encode(flat), files.f, files.beta)


@dataclass(frozen=True, eq=False)
class NodeQuery:
    """Coefficient vectors (one per row of ``combinations``) over a node's stored symbols.

    A zero vector is rejected unless ``allow_zero`` is set: a uniform mask can
    be zero, and excluding it would bias the mask distribution.
    """

    node: int
    combinations: np.ndarray
    allow_zero: bool = False

    def __post_init__(self) -> None:
        C = np.atleast_2d(np.asarray(self.combinations, dtype=np.int64))
        if C.size and not self.allow_zero and not C.any(axis=1).all():
            raise StoreError(f"node {self.node}: query contains an all-zero coefficient vector")
        C = C.copy()
        C.setflags(write=False)
        object.__setattr__(self, "combinations", C)

    def __len__(self) -> int:
        return 0 if self.combinations.size == 0 else self.combinations.shape[0]


@dataclass(frozen=True, eq=False)
class NodeResponse:
    node: int
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def respond(column: np.ndarray, combinations: np.ndarray, field: FieldSpec) -> np.ndarray:
    """The whole of a node's computation: inner products with its own column."""
    if combinations.size == 0:
        return np.zeros(0, dtype=np.int64)
    if combinations.shape[1] != column.shape[0]:
        raise StoreError(
            f"coefficient vectors have length {combinations.shape[1]}, node stores {column.shape[0]} symbols"
        )
    return field.matmul(combinations, column)


def node_respond(store: CodedStore, query: NodeQuery) -> NodeResponse:
    return NodeResponse(query.node, respond(store.node_column(query.node), query.combinations, store.field))


def respond_all(store: CodedStore, queries: Sequence[NodeQuery]) -> list[NodeResponse]:
    return [node_respond(store, q) for q in queries]
