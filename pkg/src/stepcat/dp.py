"""Dynamic-programming families of schedules.

``pri_dp`` builds the primitive family (best ConPP split for every length),
``dom_pp`` the dominant family (best ConPD split) and ``tri_family`` the
g-bounded family obtained by reversing the dominant one.

Only sums and split indices are tabulated; explicit schedules are rebuilt on
demand from the split table, so memory stays O(N).
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .errors import ConjectureViolation, ConsistencyError
from .schedule import (
    Kind,
    Schedule,
    con_gp,
    con_pd,
    con_pp,
    empty,
    phi,
    phi_array,
    psi_array,
    reverse,
)

log = logging.getLogger(__name__)

TIE_RTOL = 1e-12
MIDPOINT_GATE = 4096
MIDPOINT_RTOL = 1e-9
TRI_ATOL = 1e-12


class Family(str, enum.Enum):
    CIRC = "circ"
    BULLET = "bullet"
    TRIANGLE = "triangle"


@dataclass(frozen=True, eq=False)
class SumTable:
    """``r[n]`` is the sum of the family's length-n schedule; ``split[n]`` its best k."""

    family: Family
    r: np.ndarray
    split: np.ndarray
    label: str = "full-dp"

    @property
    def N(self) -> int:
        return len(self.r) - 1

    def __len__(self):
        return len(self.r)


def _last_max(s: np.ndarray) -> int:
    """Index of the last entry within TIE_RTOL of the maximum."""
    m = s.max()
    hits = np.flatnonzero(s >= m - TIE_RTOL * abs(m))
    return int(hits[-1])


def _circ_sums(N: int):
    r = np.zeros(N + 1)
    split = np.full(N + 1, -1, dtype=np.int64)
    for n in range(1, N + 1):
        # s(k) == s(n-1-k) exactly, so scan the lower half only
        half = (n - 1) // 2 + 1
        a = r[:half]
        b = r[n - half : n][::-1]
        s = (a + b) + phi_array(a, b)
        m = s.max()
        hits = np.flatnonzero(s >= m - TIE_RTOL * abs(m))
        k_first = int(hits[0])
        if len(hits) > 1:
            log.debug("circ n=%d: %d tied splits in lower half", n, len(hits))
        split[n] = n - 1 - k_first
        r[n] = s[k_first]
    return r, split


def _bullet_sums(rc: np.ndarray, N: int):
    r = np.zeros(N + 1)
    split = np.full(N + 1, -1, dtype=np.int64)
    for n in range(1, N + 1):
        a = rc[:n]
        b = r[n - 1 :: -1]
        s = (a + b) + psi_array(a, b)
        k = _last_max(s)
        split[n] = k
        r[n] = s[k]
    return r, split


def sum_recursion(family, N: int, circ: Optional[SumTable] = None) -> SumTable:
    """Sums of the primitive (``circ``) or dominant (``bullet``) family up to ``N``.

    O(N^2) time, O(N) memory.  ``triangle`` shares the bullet sums.
    """
    family = Family(family)
    if N < 0:
        raise ValueError("N must be >= 0")
    if family is Family.CIRC:
        r, split = _circ_sums(N)
        return SumTable(Family.CIRC, r, split)
    if circ is None or circ.N < N:
        circ = sum_recursion(Family.CIRC, N)
    r, split = _bullet_sums(circ.r[: N + 1], N)
    return SumTable(family, r, split)


def midpoint_recursion(N: int, check_upto: int = MIDPOINT_GATE, reference: Optional[SumTable] = None) -> SumTable:
    """O(N) primitive-family sums using the fixed split ``k = (n-1)//2``.

    Relies on the conjectured optimality of the midpoint split, so before
    returning it is compared against the full DP on ``n <= min(N, check_upto)``;
    any disagreement raises :class:`ConjectureViolation`.
    """
    r = np.zeros(N + 1)
    split = np.full(N + 1, -1, dtype=np.int64)
    rl = [0.0] * (N + 1)
    for n in range(1, N + 1):
        k = (n - 1) // 2
        a, b = rl[k], rl[n - 1 - k]
        rl[n] = (a + b) + phi(a, b)
        split[n] = k
    r[:] = rl
    m = min(N, check_upto)
    if reference is None or reference.N < m:
        reference = sum_recursion(Family.CIRC, m)
    full = reference.r[: m + 1]
    gap = np.abs(r[: m + 1] - full) / np.maximum(np.abs(full), 1.0)
    bad = np.flatnonzero(gap > MIDPOINT_RTOL)
    if len(bad):
        n = int(bad[0])
        raise ConjectureViolation(n, float(r[n]), float(full[n]))
    return SumTable(Family.CIRC, r, split, label="conjecture-accelerated")


class FamilyStore:
    """Lazily materialized schedules of one family, backed by a :class:`SumTable`."""

    def __init__(self, table: SumTable, circ: Optional["FamilyStore"] = None, bullet: Optional["FamilyStore"] = None):
        self.table = table
        self.family = table.family
        self._circ = circ
        self._bullet = bullet
        self._cache: Dict[int, Schedule] = {0: self._empty()}

    def _empty(self) -> Schedule:
        kind = {Family.CIRC: Kind.PRIMITIVE, Family.BULLET: Kind.DOMINANT, Family.TRIANGLE: Kind.GBOUNDED}
        return empty(kind[self.family])

    @property
    def N(self) -> int:
        return self.table.N

    @property
    def sums(self) -> np.ndarray:
        return self.table.r

    def __len__(self):
        return self.N + 1

    def __getitem__(self, n: int) -> Schedule:
        return self.schedule(n)

    def __iter__(self):
        for n in range(self.N + 1):
            yield self.schedule(n)

    def schedule(self, n: int) -> Schedule:
        if not 0 <= n <= self.N:
            raise IndexError(f"n={n} outside 0..{self.N}")
        h = self._cache.get(n)
        if h is None:
            h = self._build(n)
            self._cache[n] = h
        return h

    def split(self, n: int) -> int:
        return int(self.table.split[n])

    def _build(self, n: int) -> Schedule:
        k = self.split(n)
        if self.family is Family.CIRC:
            return con_pp(self.schedule(k), self.schedule(n - k - 1))
        if self.family is Family.BULLET:
            return con_pd(self._circ.schedule(k), self.schedule(n - k - 1))
        h = reverse(self._bullet.schedule(n))
        # rebuild through ConGP over the mirrored split and compare
        alt = con_gp(self.schedule(n - k - 1), reverse(self._circ.schedule(k)))
        if len(alt) != len(h) or np.max(np.abs(alt.steps - h.steps), initial=0.0) > TRI_ATOL * max(1.0, h.total):
            raise ConsistencyError(f"reversed dominant and ConGP recursion disagree at n={n}")
        return h

    def clear_cache(self):
        self._cache = {0: self._cache[0]}


def pri_dp(N: int) -> FamilyStore:
    """Primitive family ``h_circ^(n)`` for ``n <= N`` (last maximizer wins ties)."""
    return FamilyStore(sum_recursion(Family.CIRC, N))


def dom_pp(N: int, circ: Optional[FamilyStore] = None) -> FamilyStore:
    """Dominant family ``h_bullet^(n)`` for ``n <= N``."""
    if circ is None or circ.N < N:
        circ = pri_dp(N)
    return FamilyStore(sum_recursion(Family.BULLET, N, circ.table), circ=circ)


def tri_family(N: int, bullet: Optional[FamilyStore] = None) -> FamilyStore:
    """G-bounded family: reversed dominant schedules, cross-checked against ConGP."""
    if bullet is None or bullet.N < N:
        bullet = dom_pp(N)
    t = bullet.table
    table = SumTable(Family.TRIANGLE, t.r, t.split, t.label)
    return FamilyStore(table, circ=bullet._circ, bullet=bullet)


def families(N: int):
    """``(circ, bullet, triangle)`` stores sharing one primitive table."""
    circ = pri_dp(N)
    bullet = dom_pp(N, circ)
    return circ, bullet, tri_family(N, bullet)


def silver_sum(l: int) -> float:
    """``(1+sqrt2)**l - 1``: the primitive-family sum at ``n = 2**l - 1``."""
    return (1.0 + math.sqrt(2.0)) ** l - 1.0
