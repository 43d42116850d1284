"""Hand-written asymmetric download schedules (e.g. the bundled 14-symbol layout for the [9,5] code).

Schedule JSON schema::

    {
      "name": "...",
      "code": {"q": 2, "format": "matrix" | "decimal", "k": 5, "payload": ...},
      "beta": 1,
      "nodes": {"1": [[{"I": 1}, {"x": [1, 1]}], [{"I": 6}]], ...}
    }

Each node maps to a list of sums and each sum to a list of terms. A term may
carry an optional ``"coef"`` (default 1):

* ``{"I": j}``: interference symbol I_j = z_{h,h'} with j = k(h-1) + h',
  coordinate h' of the h-th mask applied to the stored files;
* ``{"x": [i, h]}``: symbol h of stripe i of the wanted file;
* ``{"c": [file, i]}``: the node's stored symbol of stripe i of ``file``.

A node can only return combinations of what it stores, so per mask h the
I-coefficients must be a multiple of the node's generator column, and so must
the x-coefficients per stripe. Otherwise the term is unresolvable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from ..code import LinearCode
from ..dss import CodedStore, encode_store, generate_files
from ..field import FieldSpec
from .audit import audit_privacy
from .plan import Block, PlanBuilder, ProtocolError, QueryPlan, check_target


class ScheduleError(ProtocolError):
    pass


@dataclass(frozen=True)
class Term:
    kind: str
    index: tuple[int, ...]
    coef: int = 1


@dataclass(frozen=True)
class Schedule:
    name: str
    beta: int
    nodes: dict[int, tuple[tuple[Term, ...], ...]]
    code_spec: dict | None = None

    @property
    def download(self) -> int:
        return sum(len(s) for s in self.nodes.values())

    def masks(self, k: int) -> int:
        js = [t.index[0] for sums in self.nodes.values() for s in sums for t in s if t.kind == "I"]
        return max((j - 1) // k + 1 for j in js) if js else 0

    def without(self, node: int, position: int) -> Schedule:
        """A copy with sum number ``position`` (1-based) removed from ``node``."""
        nodes = dict(self.nodes)
        sums = list(nodes[node])
        del sums[position - 1]
        nodes[node] = tuple(sums)
        return Schedule(self.name + f"-minus-{node}.{position}", self.beta, nodes, self.code_spec)

    @classmethod
    def from_dict(cls, data: dict) -> Schedule:
        nodes = {}
        for key, sums in data["nodes"].items():
            parsed = []
            for s in sums:
                terms = []
                for t in s:
                    coef = int(t.get("coef", 1))
                    kinds = [k for k in ("I", "x", "c") if k in t]
                    if len(kinds) != 1:
                        raise ScheduleError(f"node {key}: term {t} must have exactly one of I, x, c")
                    raw = t[kinds[0]]
                    index = (int(raw),) if kinds[0] == "I" else tuple(int(v) for v in raw)
                    terms.append(Term(kinds[0], index, coef))
                if not terms:
                    raise ScheduleError(f"node {key}: empty sum")
                parsed.append(tuple(terms))
            nodes[int(key)] = tuple(parsed)
        return cls(data.get("name", ""), int(data.get("beta", 1)), nodes, data.get("code"))

    @classmethod
    def load(cls, path) -> Schedule:
        return cls.from_dict(json.loads(Path(path).read_text()))


def bundled_schedule(name: str) -> Schedule:
    """Schedules shipped with the package: ``table2_c2``, ``c1`` and ``c3``."""
    text = resources.files("codedpir.data").joinpath(f"schedule_{name}.json").read_text()
    return Schedule.from_dict(json.loads(text))


@dataclass(frozen=True)
class ResolvedSum:
    """mask coefficients (per mask h), wanted-file stripe offsets, and absolute stored-row offsets."""

    node: int
    masks: dict[int, int]
    wanted: dict[int, int]
    stored: dict[tuple[int, int], int]


def _scalar(field: FieldSpec, vec: np.ndarray, col: np.ndarray, what: str, node: int) -> int:
    nz = np.flatnonzero(col)
    if nz.size == 0:
        raise ScheduleError(f"node {node}: unresolvable term, {what} on a node with a zero generator column")
    s = int(field.div(vec[nz[0]], col[nz[0]]))
    if not np.array_equal(field.mul(s, col), vec):
        raise ScheduleError(
            f"node {node}: unresolvable term, {what} coefficients {vec.tolist()} "
            f"are not a multiple of the node's generator column {col.tolist()}"
        )
    return s


def resolve(schedule: Schedule, code: LinearCode) -> list[ResolvedSum]:
    F, k = code.field, code.k
    out = []
    for node in sorted(schedule.nodes):
        if not 1 <= node <= code.n:
            raise ScheduleError(f"schedule names node {node} outside [1, {code.n}]")
        col = code.generator[:, node - 1]
        for terms in schedule.nodes[node]:
            by_mask: dict[int, np.ndarray] = {}
            by_stripe: dict[int, np.ndarray] = {}
            stored: dict[tuple[int, int], int] = {}
            for t in terms:
                if t.kind == "I":
                    h, hp = divmod(t.index[0] - 1, k)
                    vec = by_mask.setdefault(h + 1, np.zeros(k, dtype=np.int64))
                    vec[hp] = F.add(vec[hp], t.coef)
                elif t.kind == "x":
                    i, hp = t.index
                    if not (1 <= i <= schedule.beta and 1 <= hp <= k):
                        raise ScheduleError(f"node {node}: unresolvable term x{t.index}")
                    vec = by_stripe.setdefault(i, np.zeros(k, dtype=np.int64))
                    vec[hp - 1] = F.add(vec[hp - 1], t.coef)
                else:
                    stored[t.index] = int(F.add(stored.get(t.index, 0), t.coef))
            masks = {h: _scalar(F, v, col, f"I-terms of mask {h}", node) for h, v in by_mask.items() if v.any()}
            wanted = {i: _scalar(F, v, col, f"x-terms of stripe {i}", node) for i, v in by_stripe.items() if v.any()}
            stored = {key: a for key, a in stored.items() if a}
            if not (masks or wanted or stored):
                raise ScheduleError(f"node {node}: a sum cancels to zero")
            out.append(ResolvedSum(node, masks, wanted, stored))
    return out


def _equations(resolved: list[ResolvedSum], code: LinearCode, beta: int, f: int, m: int, H: int) -> np.ndarray:
    """Rows over unknowns [I_1..I_{kH} | x of file 1 | ... | x of file f] (beta*k each)."""
    F, k = code.field, code.k
    width = k * H + f * beta * k
    E = np.zeros((len(resolved), width), dtype=np.int64)
    for r, s in enumerate(resolved):
        col = code.generator[:, s.node - 1]
        for h, a in s.masks.items():
            E[r, k * (h - 1) : k * h] = F.add(E[r, k * (h - 1) : k * h], F.mul(a, col))
        offsets = {((m, i)): a for i, a in s.wanted.items()}
        for key, a in s.stored.items():
            offsets[key] = int(F.add(offsets.get(key, 0), a))
        for (file, i), a in offsets.items():
            if not (1 <= file <= f and 1 <= i <= beta):
                raise ScheduleError(f"node {s.node}: unresolvable term c{(file, i)} with f={f}, beta={beta}")
            start = k * H + ((file - 1) * beta + (i - 1)) * k
            E[r, start : start + k] = F.add(E[r, start : start + k], F.mul(a, col))
    return E


def _decoder(E: np.ndarray, targets: list[int], field: FieldSpec) -> np.ndarray | None:
    """Matrix D with D @ E = unit rows for ``targets``, or None if some target is not determined."""
    rows, width = E.shape
    rhs = np.zeros((width, len(targets)), dtype=np.int64)
    for j, t in enumerate(targets):
        rhs[t, j] = 1
    R, pivots = field.rref(np.hstack([E.T, rhs]))
    if any(p >= rows for p in pivots):
        return None
    D = np.zeros((len(targets), rows), dtype=np.int64)
    for r, p in enumerate(pivots):
        D[:, p] = R[r, rows:]
    return D


@dataclass(frozen=True)
class ScheduleVerdict:
    recoverable: bool
    private: bool
    download: int
    rate: Fraction
    violations: tuple[str, ...] = ()


def plan_schedule(store: CodedStore, schedule: Schedule, m: int, seed: int) -> QueryPlan:
    """Turn a schedule into a concrete plan with fresh uniform masks."""
    check_target(store, m)
    if store.beta != schedule.beta:
        raise ScheduleError(f"schedule is written for beta = {schedule.beta}, store has beta = {store.beta}")
    code = store.code
    resolved = resolve(schedule, code)
    H = schedule.masks(code.k)
    rng = np.random.default_rng(seed)
    builder = PlanBuilder(store)
    masks = [builder.mask(rng) for _ in range(H)]
    for s in resolved:
        parts, coeffs = [], []
        for h, a in sorted(s.masks.items()):
            parts.append(masks[h - 1])
            coeffs.append(a)
        offsets = {store.row_index(m, i): a for i, a in s.wanted.items()}
        for (file, i), a in s.stored.items():
            if not (1 <= file <= store.f and 1 <= i <= store.beta):
                raise ScheduleError(f"node {s.node}: unresolvable term c{(file, i)}")
            row = store.row_index(file, i)
            offsets[row] = int(code.field.add(offsets.get(row, 0), a))
        for row, a in sorted(offsets.items()):
            if a:
                parts.append(builder.unit(row))
                coeffs.append(a)
        builder.download(s.node, parts, (0, 0, 0), coeffs)
    E = _equations(resolved, code, store.beta, store.f, m, H)
    base = code.k * H + (m - 1) * store.beta * code.k
    decoder = _decoder(E, list(range(base, base + store.beta * code.k)), code.field)
    blocks = (Block(tuple(range(1, code.n + 1)), code),)
    meta = {"schedule": schedule.name, "masks": H}
    return builder.build("schedule", m, blocks, meta, decoder)


def verify_schedule(code: LinearCode, schedule: Schedule, f: int, seed: int = 0) -> ScheduleVerdict:
    """Symbolic recoverability (masks as free unknowns), privacy audit, download and rate."""
    if f < 1:
        raise ScheduleError("f must be positive")
    resolved = resolve(schedule, code)
    H = schedule.masks(code.k)
    recoverable = True
    for m in range(1, f + 1):
        E = _equations(resolved, code, schedule.beta, f, m, H)
        base = code.k * H + (m - 1) * schedule.beta * code.k
        if _decoder(E, list(range(base, base + schedule.beta * code.k)), code.field) is None:
            recoverable = False
            break
    store = encode_store(generate_files(f, schedule.beta, code.k, code.field, seed), code)
    verdict = audit_privacy({m: plan_schedule(store, schedule, m, seed) for m in range(1, f + 1)})
    download = schedule.download
    return ScheduleVerdict(
        recoverable, verdict.passed, download, Fraction(schedule.beta * code.k, download), tuple(verdict.violations)
    )
