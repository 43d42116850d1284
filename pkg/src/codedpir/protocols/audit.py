"""Structural privacy audit over a family of plans, one per wanted file.

Two checks, both exact:

* combinatorial: per node, the multiset of (label, signature) pairs must not
  depend on the wanted file. The signature of an unmasked download is the set
  of files its coefficient vector touches; a masked download has signature
  ``("mask",)``. Unmasked downloads at one node must also never reuse a
  stored row, since the row index itself would then leak structure;
* distributional: at every node the mask coefficients of the downloads must
  be linearly independent. Masks are uniform over all stored rows, so the
  node then sees independent uniform vectors whatever offsets the wanted
  file adds.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .plan import MASK, QueryPlan


@dataclass
class PrivacyVerdict:
    passed: bool
    violations: list[str] = field(default_factory=list)
    nodes: dict[int, bool] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed


def _signature(plan: QueryPlan, vec: np.ndarray) -> tuple:
    files = {int(r) // plan.beta + 1 for r in np.flatnonzero(vec)}
    return tuple(sorted(files))


def node_profile(plan: QueryPlan, node: int) -> tuple[Counter, list[str]]:
    """Counter of (label, signature) at ``node`` plus any within-plan problems."""
    F = plan.field
    counts: Counter = Counter()
    problems: list[str] = []
    masks = [c for c, kind in enumerate(plan.kinds) if kind == MASK]
    mask_pos = {c: i for i, c in enumerate(masks)}
    mask_rows = []
    seen_rows: set[int] = set()
    for i in plan.downloads_at(node):
        d = plan.downloads[i]
        mask_coef = np.zeros(len(masks), dtype=np.int64)
        for c, a in zip(d.parts, d.coeffs):
            if c in mask_pos:
                mask_coef[mask_pos[c]] = a
        if mask_coef.any():
            counts[(d.label, ("mask",))] += 1
            mask_rows.append(mask_coef)
            continue
        vec = plan.vector(d)
        counts[(d.label, _signature(plan, vec))] += 1
        rows = set(np.flatnonzero(vec).tolist())
        if rows & seen_rows:
            problems.append(f"node {node}: unmasked downloads reuse stored rows {sorted(rows & seen_rows)}")
        seen_rows |= rows
    if mask_rows and F.rank(np.array(mask_rows)) < len(mask_rows):
        problems.append(f"node {node}: mask coefficients of its {len(mask_rows)} masked downloads are dependent")
    return counts, problems


def audit_privacy(plans: Mapping[int, QueryPlan]) -> PrivacyVerdict:
    """Audit plans generated for every wanted file m (keys) from the same seed."""
    verdict = PrivacyVerdict(True)
    ms = sorted(plans)
    if not ms:
        return verdict
    n = plans[ms[0]].n
    for l in range(1, n + 1):
        ok = True
        profiles = {}
        for m in ms:
            counts, problems = node_profile(plans[m], l)
            profiles[m] = counts
            for p in problems:
                verdict.violations.append(f"m={m}: {p}")
                ok = False
        ref = profiles[ms[0]]
        for m in ms[1:]:
            if profiles[m] != ref:
                diff = (profiles[m] - ref) + (ref - profiles[m])
                keys = sorted(diff, key=repr)[:3]
                verdict.violations.append(
                    f"node {l}: download profile for m={m} differs from m={ms[0]} at (label, signature) {keys}"
                )
                ok = False
        verdict.nodes[l] = ok
        verdict.passed &= ok
    return verdict
