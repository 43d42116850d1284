"""Protocol 1 (symmetric) and Protocol A (asymmetric), both file-dependent.

With beta = nu^f stripes per file, every row u of Lambda is served by the
nodes in chi(lambda_u). Writing a_l = kappa^(f-l) (nu-kappa)^(l-1) and
T_l = kappa^(f-l-1) (nu-kappa)^l, the plan downloads, for each row u:

* round 1: kappa^(f-1) stripes of the wanted file, each from every node of
  chi(lambda_u);
* round l: for every l-subset M of the other files, a_l sums of one stripe
  from each file in M. Such a sum is downloaded on chi(lambda_u), which
  holds an information set, so the user learns the whole codeword sum. Its
  symbols at the nodes outside chi(lambda_u) become side information;
* round l+1: for every such M, T_l further stripes of the wanted file. A
  node adds one side-information sum of type M to each symbol.

Each node sees, per repetition and round, the same number of sums for every
file combination whichever file is wanted. Stripe indices of every file are
drawn through an independent random permutation.

Protocol A keeps for row u only the lexicographically smallest information
set I_u inside chi(lambda_u) and drops every download at the other nodes of
chi(lambda_u). That removes kappa*n - nu*k entries of D_entry sums each.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

import numpy as np

from ..code import LinearCode, first_information_set
from ..dss import CodedStore
from ..ratematrix import InterferencePair, RateMatrix, build_interference_pair
from .plan import PlanBuilder, ProtocolError, QueryPlan, check_target, whole_code_block


def _retained(rm: RateMatrix, code: LinearCode, asymmetric: bool) -> list[tuple[int, ...]]:
    """Local coordinates queried for each row of Lambda."""
    keep = []
    for u in range(1, rm.nu + 1):
        chi = rm.row_support(u)
        keep.append(first_information_set(code, chi) if asymmetric else chi)
    return keep


def run_file_dependent(
    builder: PlanBuilder,
    rm: RateMatrix,
    code: LinearCode,
    nodes: Sequence[int],
    stripes: Sequence[Sequence[int]],
    m: int,
    rng: np.random.Generator,
    asymmetric: bool,
    run: int = 0,
) -> dict:
    """Append one run of Protocol 1/A to ``builder``.

    ``nodes[j]`` is the global node of local coordinate j+1; ``stripes[m'-1]``
    lists the nu^f global rows of file m' this run may use. Returns the run's
    metadata.
    """
    kappa, nu = rm.kappa, rm.nu
    f = len(stripes)
    d = nu - kappa
    pair = build_interference_pair(rm)
    keep = _retained(rm, code, asymmetric)
    perms = [rng.permutation(len(s)) for s in stripes]
    used = [0] * f

    def draw(file: int) -> int:
        slot = used[file - 1]
        used[file - 1] += 1
        return int(stripes[file - 1][perms[file - 1][slot]])

    def rep(u: int, l: int) -> int:
        return int(np.flatnonzero(pair.A[:, l - 1] == u)[0]) + 1

    others = [x for x in range(1, f + 1) if x != m]
    pools: dict[tuple[int, tuple[int, ...]], list[int]] = {}
    for u in range(1, nu + 1):
        for _ in range(kappa ** (f - 1)):
            comp = builder.unit(draw(m))
            for l in keep[u - 1]:
                builder.download(nodes[l - 1], [comp], (run, rep(u, l), 1))
    for size in range(1, f):
        alpha = kappa ** (f - size) * d ** (size - 1)
        for M in combinations(others, size):
            for u in range(1, nu + 1):
                chi = set(rm.row_support(u))
                for _ in range(alpha):
                    comp = builder.row_sum([draw(x) for x in M])
                    for l in keep[u - 1]:
                        builder.download(nodes[l - 1], [comp], (run, rep(u, l), size))
                    for l in range(1, code.n + 1):
                        if l not in chi:
                            pools.setdefault((l, M), []).append(comp)
    for size in range(1, f):
        T = kappa ** (f - size - 1) * d**size
        for M in combinations(others, size):
            for u in range(1, nu + 1):
                for _ in range(T):
                    comp = builder.unit(draw(m))
                    for l in keep[u - 1]:
                        side = pools[(l, M)].pop(0)
                        builder.download(nodes[l - 1], [comp, side], (run, rep(u, l), size + 1))
    return {
        "permutations": [p.tolist() for p in perms],
        "retained": [list(k) for k in keep],
    }


def _plan(store: CodedStore, rm: RateMatrix, m: int, seed: int, asymmetric: bool, name: str) -> QueryPlan:
    check_target(store, m)
    if not rm.code.same_code_as(store.code):
        raise ProtocolError("rate matrix was built for a different code than the store's")
    if rm.kappa == rm.nu:
        raise ProtocolError("kappa = nu gives no private retrieval (rate 0)")
    base = rm.nu**store.f
    if store.beta % base:
        raise ProtocolError(f"{name} needs beta to be a multiple of nu^f = {base}, store has beta = {store.beta}")
    rng = np.random.default_rng(seed)
    builder = PlanBuilder(store)
    nodes = list(range(1, store.n + 1))
    runs = []
    for r in range(store.beta // base):
        stripes = [[(x - 1) * store.beta + r * base + i for i in range(base)] for x in range(1, store.f + 1)]
        runs.append(run_file_dependent(builder, rm, store.code, nodes, stripes, m, rng, asymmetric, r))
    pair: InterferencePair = build_interference_pair(rm)
    meta = {
        "lambda": rm.matrix.tolist(),
        "kappa": rm.kappa,
        "nu": rm.nu,
        "A": pair.A.tolist(),
        "B": pair.B.tolist(),
        "runs": runs,
    }
    return builder.build(name, m, whole_code_block(store.code), meta)


def plan_protocol1(store: CodedStore, rm: RateMatrix, m: int, seed: int) -> QueryPlan:
    """Symmetric file-dependent plan; total download (kappa n / (nu-kappa)) (nu^f - kappa^f) per nu^f stripes."""
    return _plan(store, rm, m, seed, asymmetric=False, name="p1")


def plan_protocolA(store: CodedStore, rm: RateMatrix, m: int, seed: int) -> QueryPlan:
    """Protocol 1 restricted to one information set per row of Lambda."""
    return _plan(store, rm, m, seed, asymmetric=True, name="a")

