"""PIR achievable rate matrices: validation, exhaustive search, interference matrices.

A nu x n binary matrix is a PIR achievable rate matrix for an [n, k] code when
every column has weight kappa and every row support contains an information
set. The smaller kappa/nu, the better the PIR rate of the protocols built on it.

Rows are handled as bitmasks with column 1 as the most significant bit, so
integer order on masks is lexicographic order on the 0/1 rows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .code import (
    CoordSet,
    EnumerationCapError,
    LinearCode,
    contains_information_set,
    enumerate_information_sets,
    rate_matrix_ratio_bound,
)

DEFAULT_NU_MAX = 8
DEFAULT_BUDGET = 2_000_000
MAX_SEARCH_N = 20


class RateMatrixError(ValueError):
    """A matrix that does not certify the code, or a malformed request."""


class SearchBudgetExceeded(RuntimeError):
    pass


class RateMatrixNotFound(LookupError):
    """No rate matrix exists (or none was found) in the searched range."""


def _row_mask(row: Sequence[int]) -> int:
    mask = 0
    for bit in row:
        mask = (mask << 1) | int(bool(bit))
    return mask


def _mask_row(mask: int, n: int) -> list[int]:
    return [(mask >> (n - 1 - j)) & 1 for j in range(n)]


def _mask_coords(mask: int, n: int) -> CoordSet:
    return tuple(j + 1 for j in range(n) if (mask >> (n - 1 - j)) & 1)


def support(row: Sequence[int]) -> CoordSet:
    """1-based support of a 0/1 vector."""
    return tuple(j + 1 for j, v in enumerate(row) if v)


def validate_rate_matrix(code: LinearCode, M) -> tuple[bool, str]:
    """Check both rate-matrix conditions; the message names the first violation."""
    M = np.asarray(M, dtype=np.int64)
    if M.ndim != 2 or M.shape[0] < 1:
        raise RateMatrixError(f"rate matrix must be nu x n with nu >= 1, got shape {M.shape}")
    if M.shape[1] != code.n:
        raise RateMatrixError(f"rate matrix has {M.shape[1]} columns but the code has n={code.n}")
    if not np.isin(M, (0, 1)).all():
        return False, "entries must be 0 or 1"
    weights = M.sum(axis=0)
    kappa = int(weights[0])
    for col, w in enumerate(weights, start=1):
        if w != kappa:
            return False, f"column {col} has weight {int(w)}, column 1 has weight {kappa}"
    if kappa == 0:
        return False, "columns have weight 0"
    for i, row in enumerate(M, start=1):
        if not contains_information_set(code, support(row)):
            return False, f"row {i} support {support(row)} contains no information set"
    return True, ""


@dataclass(frozen=True, eq=False)
class RateMatrix:
    """A validated Lambda_{kappa,nu} for ``code``."""

    matrix: np.ndarray
    code: LinearCode

    def __post_init__(self) -> None:
        M = np.array(self.matrix, dtype=np.int64)
        ok, why = validate_rate_matrix(self.code, M)
        if not ok:
            raise RateMatrixError(why)
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def nu(self) -> int:
        return self.matrix.shape[0]

    @property
    def kappa(self) -> int:
        return int(self.matrix[:, 0].sum())

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.kappa, self.nu)

    def row_support(self, u: int) -> CoordSet:
        """Support of row ``u`` (1-based)."""
        return support(self.matrix[u - 1])

    def is_capacity_achieving(self) -> bool:
        return self.ratio == Fraction(self.code.k, self.code.n)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kappa": self.kappa,
                "nu": self.nu,
                "code": self.code.digest(),
                "matrix": self.matrix.tolist(),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str, code: LinearCode) -> RateMatrix:
        data = json.loads(text)
        if data.get("code") not in (None, code.digest()):
            raise RateMatrixError("rate matrix was certified for a different code")
        rm = cls(np.asarray(data["matrix"]), code)
        if (rm.kappa, rm.nu) != (data["kappa"], data["nu"]):
            raise RateMatrixError("kappa/nu header does not match the matrix")
        return rm


# -- search ----------------------------------------------------------------------


class SearchStatus(str, Enum):
    FOUND = "found"
    NONE = "none"  # exhaustive: no such matrix exists
    BUDGET = "budget"  # gave up; existence undecided


@dataclass
class SearchResult:
    status: SearchStatus
    matrix: RateMatrix | None = None
    nodes: int = 0
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.status is SearchStatus.FOUND


def spanning_masks(code: LinearCode) -> list[int]:
    """Row masks whose support contains an information set, ascending."""
    if code.n > MAX_SEARCH_N:
        raise EnumerationCapError(f"rate-matrix search supports n <= {MAX_SEARCH_N}, got {code.n}")
    info = [_row_mask(_indicator(I, code.n)) for I in enumerate_information_sets(code)]
    return [m for m in range(1 << code.n) if any(I & m == I for I in info)]


def _indicator(coords: Sequence[int], n: int) -> list[int]:
    row = [0] * n
    for c in coords:
        row[c - 1] = 1
    return row


def find_rate_matrix(
    code: LinearCode,
    kappa: int,
    nu: int,
    budget: int = DEFAULT_BUDGET,
    *,
    _candidates: list[int] | None = None,
    _bound: Fraction | None = None,
) -> SearchResult:
    """Exhaustive backtracking for a Lambda_{kappa,nu}; the first hit is lexicographically smallest.

    Rows are chosen in non-decreasing order from the masks containing an
    information set. With ``r`` rows left, a column already at weight
    ``kappa - r`` must appear in every remaining row and a column at ``kappa``
    in none, which fixes the last row outright.
    """
    if not 1 <= kappa <= nu:
        raise RateMatrixError(f"need 1 <= kappa <= nu, got kappa={kappa}, nu={nu}")
    n, k = code.n, code.k
    if kappa * n < nu * k:
        return SearchResult(SearchStatus.NONE, reason=f"kappa/nu < k/n = {Fraction(k, n)}")
    bound = _bound if _bound is not None else rate_matrix_ratio_bound(code)
    if Fraction(kappa, nu) < bound:
        return SearchResult(SearchStatus.NONE, reason=f"kappa/nu below the subcode bound {bound}")
    cands = _candidates if _candidates is not None else spanning_masks(code)
    cand_set = set(cands)
    full = (1 << n) - 1
    col_bits = [1 << (n - 1 - j) for j in range(n)]
    counts = [0] * n
    rows: list[int] = []
    nodes = 0

    def dfs(start: int) -> bool:
        nonlocal nodes
        remaining = nu - len(rows)
        forced = banned = 0
        for j in range(n):
            if counts[j] == kappa:
                banned |= col_bits[j]
            elif counts[j] == kappa - remaining:
                forced |= col_bits[j]
            elif counts[j] < kappa - remaining:
                return False
        if remaining == 1:
            nodes += 1
            if forced in cand_set and forced >= cands[start] and forced | banned == full:
                rows.append(forced)
                return True
            return False
        for idx in range(start, len(cands)):
            r = cands[idx]
            if r & forced != forced or r & banned:
                continue
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded
            for j in range(n):
                if r & col_bits[j]:
                    counts[j] += 1
            rows.append(r)
            if dfs(idx):
                return True
            rows.pop()
            for j in range(n):
                if r & col_bits[j]:
                    counts[j] -= 1
        return False

    if not cands:
        return SearchResult(SearchStatus.NONE, reason="no row support contains an information set")
    try:
        hit = dfs(0)
    except SearchBudgetExceeded:
        return SearchResult(SearchStatus.BUDGET, nodes=nodes, reason=f"budget of {budget} nodes exhausted")
    if not hit:
        return SearchResult(SearchStatus.NONE, nodes=nodes, reason="search space exhausted")
    M = np.array([_mask_row(r, n) for r in rows], dtype=np.int64)
    return SearchResult(SearchStatus.FOUND, RateMatrix(M, code), nodes)


def candidate_ratios(code: LinearCode, nu_max: int) -> list[tuple[int, int]]:
    """(kappa, nu) pairs with nu <= nu_max and kappa/nu >= k/n, ascending by value then nu."""
    pairs = []
    for nu in range(1, nu_max + 1):
        kappa_min = -(-nu * code.k // code.n)
        pairs.extend((kappa, nu) for kappa in range(kappa_min, nu + 1))
    return sorted(pairs, key=lambda p: (Fraction(p[0], p[1]), p[1]))


@dataclass
class MinRatio:
    kappa: int
    nu: int
    matrix: RateMatrix
    certified: bool  # False if some smaller ratio ran out of budget
    undecided: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.kappa, self.nu)


def find_min_ratio(code: LinearCode, nu_max: int = DEFAULT_NU_MAX, budget: int = DEFAULT_BUDGET) -> MinRatio:
    """Smallest kappa/nu (ties: smallest nu) admitting a rate matrix with nu <= nu_max."""
    if nu_max < 1:
        raise RateMatrixError("nu_max must be at least 1")
    bound = rate_matrix_ratio_bound(code)
    cands = spanning_masks(code)
    undecided = []
    for kappa, nu in candidate_ratios(code, nu_max):
        if Fraction(kappa, nu) < bound:
            continue
        res = find_rate_matrix(code, kappa, nu, budget, _candidates=cands, _bound=bound)
        if res.found:
            return MinRatio(kappa, nu, res.matrix, not undecided, undecided)
        if res.status is SearchStatus.BUDGET:
            undecided.append((kappa, nu))
    raise RateMatrixNotFound(f"no PIR achievable rate matrix found with nu <= {nu_max}")


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


@dataclass
class CapacityVerdict:
    verdict: Verdict
    matrix: RateMatrix | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.verdict is Verdict.YES


def is_capacity_achieving(
    code: LinearCode, nu_max: int = DEFAULT_NU_MAX, budget: int = DEFAULT_BUDGET
) -> CapacityVerdict:
    """Does a rate matrix with kappa/nu = k/n exist?

    ``NO`` is definitive when the subcode bound already rules out k/n;
    otherwise it means every multiple of the reduced fraction up to ``nu_max``
    was searched exhaustively.
    """
    target = Fraction(code.k, code.n)
    bound = rate_matrix_ratio_bound(code)
    if bound > target:
        s_d = f"some s has s/d_s = {bound} > k/n"
        return CapacityVerdict(Verdict.NO, reason=f"impossible for every nu: {s_d}")
    cands = spanning_masks(code)
    inconclusive = False
    mult = 1
    while target.denominator * mult <= nu_max:
        kappa, nu = target.numerator * mult, target.denominator * mult
        res = find_rate_matrix(code, kappa, nu, budget, _candidates=cands, _bound=bound)
        if res.found:
            return CapacityVerdict(Verdict.YES, res.matrix)
        inconclusive |= res.status is SearchStatus.BUDGET
        mult += 1
    if inconclusive:
        return CapacityVerdict(Verdict.INCONCLUSIVE, reason="search budget exhausted")
    return CapacityVerdict(Verdict.NO, reason=f"none with nu <= {nu_max}")


# -- interference matrices ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class InterferencePair:
    """A (kappa x n) and B ((nu-kappa) x n) with 1-based row labels of Lambda.

    Column l of A lists, ascending, the rows u with Lambda[u, l] = 1; column l
    of B lists the rows with Lambda[u, l] = 0.
    """

    A: np.ndarray
    B: np.ndarray
    nu: int

    def S(self, a: int) -> CoordSet:
        """Columns of A holding the value ``a``."""
        return tuple(int(l) + 1 for l in np.flatnonzero((self.A == a).any(axis=0)))


def build_interference_pair(rm: RateMatrix) -> InterferencePair:
    M = rm.matrix
    n = M.shape[1]
    A = np.zeros((rm.kappa, n), dtype=np.int64)
    B = np.zeros((rm.nu - rm.kappa, n), dtype=np.int64)
    for l in range(n):
        A[:, l] = np.flatnonzero(M[:, l] == 1) + 1
        B[:, l] = np.flatnonzero(M[:, l] == 0) + 1
    return InterferencePair(A, B, rm.nu)


def check_interference_pair(pair: InterferencePair, code: LinearCode) -> tuple[bool, str]:
    """Column partition property plus both halves of the information-set claim."""
    kappa, n = pair.A.shape
    for l in range(n):
        values = sorted(pair.A[:, l].tolist() + pair.B[:, l].tolist())
        if values != list(range(1, pair.nu + 1)):
            return False, f"column {l + 1} does not split 1..{pair.nu}"
    for a in range(1, pair.nu + 1):
        if not contains_information_set(code, pair.S(a)):
            return False, f"S({a}|A) = {pair.S(a)} contains no information set"
    for i, l in np.ndindex(pair.B.shape):
        if (l + 1) in pair.S(int(pair.B[i, l])):
            return False, f"S(b[{i + 1},{l + 1}]|A) contains column {l + 1}"
    return True, ""
