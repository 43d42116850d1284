"""Protocol B: run a capacity-achieving subprotocol on every direct-sum part.

Part p is a punctured [n_p, k_p] code on its own node block. Its subprotocol
(Protocol 1 or 2) needs beta_p stripes, so the whole plan uses
beta = LCM(beta_1, ..., beta_P) and repeats part p's subprotocol
beta / beta_p times on consecutive stripe groups. Each run returns the wanted
stripes restricted to the part's nodes, and together the blocks give every
coordinate. Parts draw randomness from independent child seeds.
"""

from __future__ import annotations

from math import lcm

import numpy as np

from ..code import Decomposition
from ..dss import CodedStore
from ..ratematrix import RateMatrix, find_min_ratio
from .fileindep import masked_layout, run_masked
from .filedep import run_file_dependent
from .plan import Block, PlanBuilder, ProtocolError, QueryPlan, check_target

SUBPROTOCOLS = ("P1", "P2")


def part_rate_matrices(decomposition: Decomposition, nu_max: int = 8) -> list[RateMatrix]:
    """A capacity-achieving Lambda for every part, or an explicit error."""
    out = []
    for coords, sub in decomposition.parts:
        if sub.k == sub.n:
            raise ProtocolError(f"part on nodes {coords} is an [{sub.n},{sub.k}] code with no redundancy")
        best = find_min_ratio(sub, nu_max=nu_max)
        rm = best.matrix
        if not rm.is_capacity_achieving():
            raise ProtocolError(
                f"part on nodes {coords} ([{sub.n},{sub.k}]) is not MDS-PIR capacity-achieving "
                f"(best kappa/nu = {best.kappa}/{best.nu})"
            )
        out.append(rm)
    return out


def part_betas(decomposition: Decomposition, f: int, subprotocol: str, nu_max: int = 8) -> list[int]:
    rms = part_rate_matrices(decomposition, nu_max)
    if subprotocol == "P1":
        return [rm.nu**f for rm in rms]
    if subprotocol == "P2":
        return [masked_layout(rm, asymmetric=False).beta for rm in rms]
    raise ProtocolError(f"subprotocol must be one of {SUBPROTOCOLS}, got {subprotocol!r}")


def required_beta(decomposition: Decomposition, f: int, subprotocol: str, nu_max: int = 8) -> int:
    return lcm(*part_betas(decomposition, f, subprotocol, nu_max))


def plan_protocolB(
    store: CodedStore, decomposition: Decomposition, m: int, subprotocol: str, seed: int, nu_max: int = 8
) -> QueryPlan:
    check_target(store, m)
    if not decomposition.code.same_code_as(store.code):
        raise ProtocolError("decomposition was computed for a different code than the store's")
    rms = part_rate_matrices(decomposition, nu_max)
    betas = part_betas(decomposition, store.f, subprotocol, nu_max)
    beta = lcm(*betas)
    if store.beta % beta:
        raise ProtocolError(f"Protocol B needs beta to be a multiple of LCM{tuple(betas)} = {beta}, store has {store.beta}")
    builder = PlanBuilder(store)
    children = np.random.SeedSequence(seed).spawn(len(rms))
    for (coords, sub), rm, beta_p, child in zip(decomposition.parts, rms, betas, children):
        rng = np.random.default_rng(child)
        nodes = list(coords)
        for r in range(store.beta // beta_p):
            offset = r * beta_p
            if subprotocol == "P1":
                stripes = [
                    [store.row_index(x, offset + i + 1) for i in range(beta_p)] for x in range(1, store.f + 1)
                ]
                run_file_dependent(builder, rm, sub, nodes, stripes, m, rng, asymmetric=False, run=r)
            else:
                layout = masked_layout(rm, asymmetric=False)
                rows = [store.row_index(m, offset + b + 1) for b in range(beta_p)]
                run_masked(builder, layout, sub, nodes, rows, rng, asymmetric=False, run=r)
    blocks = tuple(Block(tuple(coords), sub) for coords, sub in decomposition.parts)
    meta = {
        "subprotocol": subprotocol,
        "parts": [list(c) for c, _ in decomposition.parts],
        "part_beta": betas,
        "part_lambda": [rm.matrix.tolist() for rm in rms],
    }
    return builder.build(f"b-{subprotocol.lower()}", m, blocks, meta)
