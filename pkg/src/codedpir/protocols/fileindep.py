"""Protocol 2 (symmetric) and its asymmetric variant, both file-independent.

Every query is a uniform random mask vector over all stored rows, optionally
shifted by one wanted row. The plan uses V virtual rows h, each tagged with a
row u of Lambda and owning a fresh mask. Node l answers:

* the bare mask, when l lies in chi(lambda_u), so that the user can decode
  the mask's codeword from an information set;
* mask plus one wanted stripe row, when l is outside chi(lambda_u) and the
  layout assigns that slot to a stripe;
* the bare mask again for an unused slot (symmetric variant only).

A stripe is recovered from its symbols on one information set, so the layout
picks beta information sets whose node usage fits the slot supply. With
g = gcd(kappa, nu) the scan tries V = t kappa / g and beta = t (nu - kappa) / g
for t = 1, 2, ..., which fixes the rate at (nu-kappa) k / (kappa n)
(symmetric, n symbols per virtual row) or 1 - kappa/nu (asymmetric, only an
information set per bare mask plus the used slots). At t = nu a tagged layout
always fits: a stripe tagged u uses I_u.

The asymmetric variant downloads bare masks only on I_u, the smallest
information set inside chi(lambda_u).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Sequence

import numpy as np

from ..code import CoordSet, LinearCode, enumerate_information_sets, first_information_set
from ..dss import CodedStore
from ..ratematrix import RateMatrix
from .plan import PlanBuilder, ProtocolError, QueryPlan, check_target, whole_code_block

PACKING_BUDGET = 200_000


@dataclass(frozen=True)
class MaskedLayout:
    """A file-independent download pattern for ``beta`` stripes over ``len(tags)`` virtual rows."""

    tags: tuple[int, ...]
    stripe_sets: tuple[CoordSet, ...]
    slots: tuple[tuple[tuple[int, int], ...], ...]
    bare: tuple[CoordSet, ...]

    @property
    def beta(self) -> int:
        return len(self.stripe_sets)

    @property
    def virtual_rows(self) -> int:
        return len(self.tags)

    def assignment(self) -> dict[tuple[int, int], int]:
        """(virtual row, local node) -> stripe, both 0-based rows / 1-based nodes."""
        return {(h, l): b for b, pairs in enumerate(self.slots) for h, l in pairs}


def _slot_supply(rm: RateMatrix, tags: Sequence[int]) -> dict[int, list[int]]:
    supply: dict[int, list[int]] = {l: [] for l in range(1, rm.code.n + 1)}
    for h, u in enumerate(tags):
        chi = set(rm.row_support(u))
        for l in supply:
            if l not in chi:
                supply[l].append(h)
    return supply


def _pack(candidates: list[CoordSet], capacity: dict[int, int], count: int, k: int, budget: int):
    """Choose ``count`` sets (with repetition, non-decreasing index) within node capacities."""
    chosen: list[int] = []
    left = dict(capacity)
    steps = 0

    def dfs(start: int) -> bool:
        nonlocal steps
        if len(chosen) == count:
            return True
        steps += 1
        if steps > budget:
            return False
        if sum(left.values()) < (count - len(chosen)) * k:
            return False
        for i in range(start, len(candidates)):
            I = candidates[i]
            if all(left[l] > 0 for l in I):
                for l in I:
                    left[l] -= 1
                chosen.append(i)
                if dfs(i):
                    return True
                chosen.pop()
                for l in I:
                    left[l] += 1
        return False

    return [candidates[i] for i in chosen] if dfs(0) else None


def _assign(stripe_sets: Sequence[CoordSet], supply: dict[int, list[int]]):
    slots: list[list[tuple[int, int]]] = [[] for _ in stripe_sets]
    for l, hs in supply.items():
        users = [b for b, I in enumerate(stripe_sets) if l in I]
        for b, h in zip(users, hs):
            slots[b].append((h, l))
    return tuple(tuple(sorted(s)) for s in slots)


def masked_layout(rm: RateMatrix, asymmetric: bool, budget: int = PACKING_BUDGET) -> MaskedLayout:
    return _cached_layout(rm.code, rm.matrix.tobytes(), rm.matrix.shape, asymmetric, budget)


@lru_cache(maxsize=64)
def _cached_layout(code: LinearCode, lam: bytes, shape, asymmetric: bool, budget: int) -> MaskedLayout:
    rm = RateMatrix(np.frombuffer(lam, dtype=np.int64).reshape(shape), code)
    kappa, nu, k = rm.kappa, rm.nu, code.k
    g = gcd(kappa, nu)
    infos = [first_information_set(code, rm.row_support(u)) for u in range(1, nu + 1)]
    candidates = enumerate_information_sets(code)
    for t in range(1, nu + 1):
        V, beta = t * kappa // g, t * (nu - kappa) // g
        tags = tuple(h % nu + 1 for h in range(V))
        supply = _slot_supply(rm, tags)
        if t == nu:
            per_tag = beta // nu
            sets = [infos[u - 1] for u in range(1, nu + 1) for _ in range(per_tag)]
        else:
            sets = _pack(candidates, {l: len(hs) for l, hs in supply.items()}, beta, k, budget)
            if sets is None:
                continue
        slots = _assign(sets, supply)
        if any(len(s) != k for s in slots):
            raise ProtocolError("internal: slot assignment does not cover the chosen information sets")
        bare = tuple(infos[u - 1] if asymmetric else rm.row_support(u) for u in tags)
        return MaskedLayout(tags, tuple(sets), slots, bare)
    raise ProtocolError("internal: no masked layout found even with the tagged fallback")


def run_masked(
    builder: PlanBuilder,
    layout: MaskedLayout,
    code: LinearCode,
    nodes: Sequence[int],
    stripe_rows: Sequence[int],
    rng: np.random.Generator,
    asymmetric: bool,
    run: int = 0,
) -> None:
    """Append one run of the layout; ``stripe_rows[b]`` is the global row of wanted stripe b."""
    assign = layout.assignment()
    for h in range(layout.virtual_rows):
        mask = builder.mask(rng)
        bare = set(layout.bare[h])
        for l in range(1, code.n + 1):
            b = assign.get((h, l))
            if b is not None:
                builder.download(nodes[l - 1], [mask, builder.unit(stripe_rows[b])], (run, h + 1, 0))
            elif l in bare or not asymmetric:
                builder.download(nodes[l - 1], [mask], (run, h + 1, 0))


def _plan(store: CodedStore, rm: RateMatrix, m: int, seed: int, asymmetric: bool, name: str) -> QueryPlan:
    check_target(store, m)
    if not rm.code.same_code_as(store.code):
        raise ProtocolError("rate matrix was built for a different code than the store's")
    if rm.kappa == rm.nu:
        raise ProtocolError("kappa = nu gives no private retrieval (rate 0)")
    layout = masked_layout(rm, asymmetric)
    if store.beta % layout.beta:
        raise ProtocolError(
            f"{name} needs beta to be a multiple of {layout.beta} for this rate matrix, store has beta = {store.beta}"
        )
    rng = np.random.default_rng(seed)
    builder = PlanBuilder(store)
    nodes = list(range(1, store.n + 1))
    for r in range(store.beta // layout.beta):
        rows = [store.row_index(m, r * layout.beta + b + 1) for b in range(layout.beta)]
        run_masked(builder, layout, store.code, nodes, rows, rng, asymmetric, r)
    meta = {
        "lambda": rm.matrix.tolist(),
        "kappa": rm.kappa,
        "nu": rm.nu,
        "layout_beta": layout.beta,
        "tags": list(layout.tags),
        "stripe_sets": [list(s) for s in layout.stripe_sets],
    }
    return builder.build(name, m, whole_code_block(store.code), meta)


def plan_protocol2(store: CodedStore, rm: RateMatrix, m: int, seed: int) -> QueryPlan:
    return _plan(store, rm, m, seed, asymmetric=False, name="p2")


def plan_protocolA_inf(store: CodedStore, rm: RateMatrix, m: int, seed: int) -> QueryPlan:
    return _plan(store, rm, m, seed, asymmetric=True, name="a-inf")


def required_beta(rm: RateMatrix, asymmetric: bool = False) -> int:
    """Stripes per file the file-independent layout for ``rm`` uses."""
    return masked_layout(rm, asymmetric).beta
