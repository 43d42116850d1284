"""Closed-form PIR capacities and protocol rates in exact rational arithmetic.

``f`` (the number of stored files) may be ``math.inf`` for the asymptotic
values. Decimal rendering happens only in :func:`render`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence, Union

Files = Union[int, float]
INF = math.inf


class RateError(ValueError):
    pass


def _check_files(f: Files) -> None:
    if f != INF and (not float(f).is_integer() or f < 1):
        raise RateError(f"number of files must be a positive integer or inf, got {f}")


def _geometric_tail(ratio: Fraction, f: Files) -> Fraction:
    """1 - ratio^f, with ratio^inf = 0 for ratio < 1."""
    return Fraction(1) if f == INF else 1 - ratio ** int(f)


def mds_pir_capacity(n: int, k: int, f: Files) -> Fraction:
    """((n-k)/n) / (1 - (k/n)^f)."""
    _check_files(f)
    if not 1 <= k <= n:
        raise RateError(f"need 1 <= k <= n, got n={n}, k={k}")
    if k == n:
        raise RateError("k = n storage has no redundancy; the capacity formula is degenerate (unsupported)")
    return Fraction(n - k, n) / _geometric_tail(Fraction(k, n), f)


def rate_symmetric(kappa: int, nu: int, k: int, n: int, f: Files) -> Fraction:
    """Rate of the symmetric protocols for a Lambda_{kappa,nu}."""
    _check_files(f)
    if not 1 <= kappa < nu:
        raise RateError(f"need 1 <= kappa < nu, got kappa={kappa}, nu={nu}")
    return Fraction((nu - kappa) * k, kappa * n) / _geometric_tail(Fraction(kappa, nu), f)


def rate_asymmetric(kappa: int, nu: int, f: Files) -> Fraction:
    """Rate of Protocol A: (1 - kappa/nu) / (1 - (kappa/nu)^f)."""
    _check_files(f)
    if not 1 <= kappa < nu:
        raise RateError(f"need 1 <= kappa < nu, got kappa={kappa}, nu={nu}")
    r = Fraction(kappa, nu)
    return (1 - r) / _geometric_tail(r, f)


def rate_asymmetric_series(kappa: int, nu: int, f: int) -> Fraction:
    """[1 + r + ... + r^(f-1)]^-1 with r = kappa/nu."""
    r = Fraction(kappa, nu)
    return 1 / sum((r**i for i in range(f)), Fraction(0))


def rate_direct_sum(parts: Sequence[tuple[int, int]], k: int, f: Files) -> Fraction:
    """Protocol B: inverse of sum_p (k_p/k) / C_f^{[n_p,k_p]} over the (n_p, k_p) blocks."""
    if sum(kp for _, kp in parts) != k:
        raise RateError(f"block dimensions {[kp for _, kp in parts]} do not sum to k={k}")
    total = sum((Fraction(kp, k) / mds_pir_capacity(np_, kp, f) for np_, kp in parts), Fraction(0))
    return 1 / total


@dataclass(frozen=True)
class StripeCost:
    beta: int
    per_node: int
    total: int


def stripe_and_download(n: int, k: int, f: Files, protocol: str) -> StripeCost:
    """Minimal stripes and download for Protocol 1 ("P1") or 2 ("P2") on a capacity-achieving code.

    Uses n * D_node / beta = k / C, with C the finite-f capacity for P1 and
    the asymptotic one for P2.
    """
    g = math.gcd(n, k)
    nu = n // g
    if protocol == "P1":
        if f == INF:
            raise RateError("Protocol 1 needs a finite number of files")
        beta = nu ** int(f)
        cap = mds_pir_capacity(n, k, f)
    elif protocol == "P2":
        beta = math.lcm(k, n - k) // k
        cap = mds_pir_capacity(n, k, INF)
    else:
        raise RateError(f"protocol must be 'P1' or 'P2', got {protocol!r}")
    per_node = Fraction(beta * k) / (n * cap)
    if per_node.denominator != 1:
        raise RateError(f"internal inconsistency: per-node download {per_node} is not integral")
    return StripeCost(beta, int(per_node), int(per_node) * n)


@dataclass(frozen=True)
class Proposition1:
    symmetric: Fraction
    asymmetric: Fraction
    capacity: Fraction
    chain_holds: bool
    equality: bool


def proposition1_check(k: int, n: int, kappa: int, nu: int, f: Files) -> Proposition1:
    """R_S <= R_A <= C_f, with equality throughout exactly when kappa/nu = k/n."""
    rs = rate_symmetric(kappa, nu, k, n, f)
    ra = rate_asymmetric(kappa, nu, f)
    c = mds_pir_capacity(n, k, f)
    eq = Fraction(kappa, nu) == Fraction(k, n)
    return Proposition1(rs, ra, c, rs <= ra <= c, eq)


def render(x: Fraction | None, digits: int = 4) -> str:
    """Table-style decimal: rounded, trailing zeros dropped, '-' for missing."""
    if x is None:
        return "-"
    s = f"{float(x):.{digits}f}".rstrip("0").rstrip(".")
    return s or "0"


@dataclass
class RateReport:
    """One row of a rate table for a code, with the closed-form values."""

    code: str
    n: int
    k: int
    f: Files
    kappa: int
    nu: int
    capacity: Fraction
    capacity_inf: Fraction
    rate_s: Fraction
    rate_a: Fraction
    rate_b: Fraction | None = None
    rate_c: Fraction | None = None
    beta_p1: int | None = None
    beta_p2: int | None = None
    download_p1: int | None = None
    download_p2: int | None = None

    def __post_init__(self) -> None:
        if not self.rate_s <= self.rate_a <= self.capacity:
            raise RateError("rate ordering R_S <= R_A <= C_f violated")

    @classmethod
    def build(
        cls,
        name: str,
        n: int,
        k: int,
        kappa: int,
        nu: int,
        f: Files,
        parts: Sequence[tuple[int, int]] | None = None,
        rate_c: Fraction | None = None,
    ) -> RateReport:
        capacity_achieving = Fraction(kappa, nu) == Fraction(k, n)
        extra = {}
        if capacity_achieving:
            if f != INF:
                p1 = stripe_and_download(n, k, f, "P1")
                extra.update(beta_p1=p1.beta, download_p1=p1.total)
            p2 = stripe_and_download(n, k, f, "P2")
            extra.update(beta_p2=p2.beta, download_p2=p2.total)
        return cls(
            code=name,
            n=n,
            k=k,
            f=f,
            kappa=kappa,
            nu=nu,
            capacity=mds_pir_capacity(n, k, f),
            capacity_inf=mds_pir_capacity(n, k, INF),
            rate_s=rate_symmetric(kappa, nu, k, n, f),
            rate_a=rate_asymmetric(kappa, nu, f),
            rate_b=rate_direct_sum(parts, k, f) if parts else None,
            rate_c=rate_c,
            **extra,
        )

    def to_dict(self) -> dict:
        out = {}
        for key, value in asdict(self).items():
            if isinstance(value, Fraction):
                value = str(value)
            elif value == INF:
                value = "inf"
            out[key] = value
        return out

    def table_row(self) -> dict[str, str]:
        return {
            "code": f"{self.code}:[{self.n},{self.k}]",
            "kappa/nu": f"{self.kappa}/{self.nu}",
            "R_S": render(self.rate_s),
            "R_A": render(self.rate_a),
            "R_B": render(self.rate_b),
            "R_C": render(self.rate_c),
            "C": render(self.capacity),
        }


TABLE_COLUMNS = ["code", "kappa/nu", "R_S", "R_A", "R_B", "R_C", "C"]


def reports_to_csv(reports: Sequence[RateReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.table_row())
    return buf.getvalue()


def reports_to_json(reports: Sequence[RateReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True)
