"""Recover the wanted file from node responses.

Recovery alternates two steps until nothing changes:

1. a component whose symbols are known on an information set of a block's
   code has its whole codeword on that block filled in;
2. a download whose components are all known except one yields that
   component's symbol at the download's node.

The wanted stripes are unit components, so the file is read off their
codewords. Schedule plans carry a precomputed decoder matrix instead.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

import numpy as np

from ..code import LinearCode
from ..dss import NodeResponse
from .plan import QueryPlan, RecoveryError, UNIT


class _InfoSets:
    """Greedy (lexicographically smallest) information set inside a coordinate set, cached."""

    def __init__(self, code: LinearCode):
        self.code = code
        self._cache: dict[frozenset, tuple[int, ...] | None] = {}
        self._inverse: dict[tuple[int, ...], np.ndarray] = {}

    def find(self, coords) -> tuple[int, ...] | None:
        key = frozenset(coords)
        if key not in self._cache:
            F, G = self.code.field, self.code.generator
            chosen: list[int] = []
            for c in sorted(key):
                if F.rank(G[:, [x - 1 for x in chosen + [c]]]) == len(chosen) + 1:
                    chosen.append(c)
                    if len(chosen) == self.code.k:
                        break
            self._cache[key] = tuple(chosen) if len(chosen) == self.code.k else None
        return self._cache[key]

    def codeword(self, I: tuple[int, ...], values: np.ndarray) -> np.ndarray:
        """Full codeword from its values on information set ``I`` (local coordinates)."""
        if I not in self._inverse:
            self._inverse[I] = self.code.field.matmul(self.code.field.inverse(self.code.columns(I)), self.code.generator)
        return self.code.field.matmul(values, self._inverse[I])


def response_vector(plan: QueryPlan, responses: Sequence[NodeResponse]) -> np.ndarray:
    """Responses re-ordered to align with ``plan.downloads``."""
    y = np.zeros(plan.total_download, dtype=np.int64)
    by_node = {r.node: r for r in responses}
    for l in range(1, plan.n + 1):
        idx = plan.downloads_at(l)
        if not idx:
            continue
        if l not in by_node or len(by_node[l].values) != len(idx):
            raise RecoveryError(f"node {l}: expected {len(idx)} response values")
        y[idx] = by_node[l].values
    return y


def recover(plan: QueryPlan, responses: Sequence[NodeResponse]) -> np.ndarray:
    """The wanted file as a beta x k matrix."""
    F = plan.field
    y = response_vector(plan, responses)
    if plan.decoder is not None:
        return F.matmul(plan.decoder, y).reshape(plan.beta, plan.code.k)

    blocks = [(b.nodes, _InfoSets(b.code)) for b in plan.blocks]
    node_block = {l: i for i, (nodes, _) in enumerate(blocks) for l in nodes}
    known: dict[int, dict[int, int]] = defaultdict(dict)
    filled: set[tuple[int, int]] = set()
    pending: list[int] = []
    dirty: set[int] = set()
    for i, d in enumerate(plan.downloads):
        if len(d.parts) == 1:
            known[d.parts[0]][d.node] = int(F.div(y[i], d.coeffs[0]))
            dirty.add(d.parts[0])
        else:
            pending.append(i)

    while dirty:
        for comp in sorted(dirty):
            touched = {node_block[l] for l in known[comp]}
            for bi in touched:
                if (comp, bi) in filled:
                    continue
                nodes, infos = blocks[bi]
                local = [j + 1 for j, l in enumerate(nodes) if l in known[comp]]
                I = infos.find(local)
                if I is None:
                    continue
                values = np.array([known[comp][nodes[j - 1]] for j in I], dtype=np.int64)
                word = infos.codeword(I, values)
                for j, l in enumerate(nodes):
                    known[comp][l] = int(word[j])
                filled.add((comp, bi))
        dirty = set()
        still = []
        for i in pending:
            d = plan.downloads[i]
            unknown = [j for j, c in enumerate(d.parts) if d.node not in known[c]]
            if len(unknown) > 1:
                still.append(i)
                continue
            if not unknown:
                continue
            j = unknown[0]
            rest = y[i]
            for c, a in zip(d.parts, d.coeffs):
                if c != d.parts[j]:
                    rest = F.sub(rest, F.mul(a, known[c][d.node]))
            known[d.parts[j]][d.node] = int(F.div(rest, d.coeffs[j]))
            dirty.add(d.parts[j])
        pending = still

    code = plan.code
    whole = _InfoSets(code)
    unit_of = {int(np.flatnonzero(plan.components[c])[0]): c for c, kind in enumerate(plan.kinds) if kind == UNIT}
    out = np.zeros((plan.beta, code.k), dtype=np.int64)
    for b in range(plan.beta):
        row = (plan.target - 1) * plan.beta + b
        comp = unit_of.get(row)
        if comp is None:
            raise RecoveryError(f"stripe {b + 1} of file {plan.target} is never requested")
        I = whole.find(known[comp].keys())
        if I is None:
            raise RecoveryError(
                f"stripe {b + 1} of file {plan.target} is known only on nodes {sorted(known[comp])}, "
                "which hold no information set"
            )
        values = np.array([[known[comp][l] for l in I]], dtype=np.int64)
        out[b] = code.decode_from(I, values)[0]
    return out
