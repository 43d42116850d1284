"""Shared helpers: build a plan family, check recovery, look up the closed-form rate."""

from __future__ import annotations

import numpy as np

from codedpir.dss import encode_store, generate_files, respond_all
from codedpir.protocols import (
    masked_layout,
    plan_protocol1,
    plan_protocol2,
    plan_protocolA,
    plan_protocolA_inf,
    recover,
)
from codedpir.rates import INF, rate_asymmetric, rate_symmetric

PLANNERS = {"p1": plan_protocol1, "a": plan_protocolA, "p2": plan_protocol2, "a-inf": plan_protocolA_inf}


def base_beta(rm, protocol, f):
    if protocol in ("p1", "a"):
        return rm.nu**f
    return masked_layout(rm, asymmetric=(protocol == "a-inf")).beta


def family(code, rm, protocol, f, seed, beta=None):
    """Files, store and one plan per wanted file, all from ``seed``."""
    beta = beta or base_beta(rm, protocol, f)
    files = generate_files(f, beta, code.k, code.field, seed)
    store = encode_store(files, code)
    plans = {m: PLANNERS[protocol](store, rm, m, seed) for m in range(1, f + 1)}
    return files, store, plans


def recovers(files, store, plan) -> bool:
    out = recover(plan, respond_all(store, plan.queries()))
    return bool(np.array_equal(out, files.file(plan.target)))


def expected_rate(rm, protocol, f):
    k, n = rm.code.k, rm.code.n
    if protocol == "p1":
        return rate_symmetric(rm.kappa, rm.nu, k, n, f)
    if protocol == "a":
        return rate_asymmetric(rm.kappa, rm.nu, f)
    if protocol == "p2":
        return rate_symmetric(rm.kappa, rm.nu, k, n, INF)
    return rate_asymmetric(rm.kappa, rm.nu, INF)
