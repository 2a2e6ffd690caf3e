"""Anytime stepsize sequences and literature baselines.

A dynamic sequence keeps appending ``[joint, block]`` to the schedule, where
``block`` is a fixed primitive schedule.  With an empty base and empty block
the two variants reduce to the Teboulle-Vaisbourd (objective) and Rotaru
(gradient) sequences.
"""
from __future__ import annotations

import math
from typing import List, Optional

import numpy as np

from .errors import ClassificationError
from .schedule import Kind, Schedule, con_pd, con_pp, empty, phi, psi


class DynamicSequence:
    """Incrementally grown schedule ``h^(k) = Con(h^(k-1), block)``.

    Only the running sum and the block are needed to produce the next joint
    step, so extension costs O(len(block)) per concatenation.
    """

    def __init__(self, variant: str, base: Schedule, block: Schedule):
        variant = variant.lower()
        if variant == "pp":
            if base.kind is not Kind.PRIMITIVE or block.kind is not Kind.PRIMITIVE:
                raise ClassificationError("dynamic_pp needs primitive base and block")
        elif variant == "gp":
            if base.kind is not Kind.GBOUNDED or block.kind is not Kind.PRIMITIVE:
                raise ClassificationError("dynamic_gp needs a g-bounded base and primitive block")
        else:
            raise ValueError(f"unknown variant {variant!r}")
        self.variant = variant
        self.base = base
        self.block = block
        self.k = 0
        self._steps: List[float] = base.tolist()
        self._sum = base.total
        self._block_list = block.tolist()
        self._block_sum = block.total
        self.joints: List[float] = []
        self.prefix_lengths: List[int] = [len(base)]
        self.prefix_sums: List[float] = [self._sum]

    @property
    def m(self) -> int:
        return len(self.block)

    @property
    def kind(self) -> Kind:
        return Kind.PRIMITIVE if self.variant == "pp" else Kind.GBOUNDED

    @property
    def total(self) -> float:
        return self._sum

    def __len__(self):
        return len(self._steps)

    def next_joint(self) -> float:
        if self.variant == "pp":
            return phi(self._sum, self._block_sum)
        return psi(self._block_sum, self._sum)

    def extend(self, count: int = 1) -> "DynamicSequence":
        for _ in range(count):
            a = self.next_joint()
            self._steps.append(a)
            self._steps.extend(self._block_list)
            self._sum = (self._sum + a) + self._block_sum
            self.joints.append(a)
            self.k += 1
            self.prefix_lengths.append(len(self._steps))
            self.prefix_sums.append(self._sum)
        return self

    def schedule(self) -> Schedule:
        return Schedule(np.asarray(self._steps), self.kind)

    @property
    def steps(self) -> np.ndarray:
        return np.asarray(self._steps)

    def prefix_bounds(self) -> list:
        """``(n_k, 1/(2 1^T h^(k) + 1))`` for every completed concatenation."""
        return [(n, 1.0 / (2.0 * s + 1.0)) for n, s in zip(self.prefix_lengths, self.prefix_sums)]

    def limit_ratio(self) -> float:
        """Asymptotic ``1^T h^(k) / n_k``: ``2 (1^T block + 1) / (m + 1)``."""
        return 2.0 * (self._block_sum + 1.0) / (self.m + 1)


def dynamic_pp(base: Optional[Schedule] = None, block: Optional[Schedule] = None, K: int = 0) -> DynamicSequence:
    base = empty(Kind.PRIMITIVE) if base is None else base
    block = empty(Kind.PRIMITIVE) if block is None else block
    return DynamicSequence("pp", base, block).extend(K)


def dynamic_gp(base: Optional[Schedule] = None, block: Optional[Schedule] = None, K: int = 0) -> DynamicSequence:
    base = empty(Kind.GBOUNDED) if base is None else base
    block = empty(Kind.PRIMITIVE) if block is None else block
    return DynamicSequence("gp", base, block).extend(K)


def teboulle_vaisbourd(n: int) -> Schedule:
    """Teboulle-Vaisbourd dynamic steps ``h_j = (-S + sqrt(S^2 + 8S + 8)) / 2``.

    ``S`` is the running sum.  Evaluated as ``4(S+1) / (S + sqrt(S^2+8S+8))``.
    """
    steps = []
    S = 0.0
    for _ in range(n):
        h = 4.0 * (S + 1.0) / (S + math.sqrt(S * S + 8.0 * S + 8.0))
        steps.append(h)
        S += h
    return Schedule(np.asarray(steps), Kind.PRIMITIVE)


def rotaru(n: int) -> Schedule:
    """Rotaru et al. sequence ``h_j = (3 - 2h + sqrt(9 - 4h)) / (2(2 - h))``, ``h_0 = 3/2``.

    ``h`` is the previous step.  Evaluated as ``2h / (2h - 3 + sqrt(9 - 4h))``,
    which has no ``2 - h`` division as the steps approach 2.
    """
    steps = []
    h = 1.5
    for j in range(n):
        if j:
            h = 2.0 * h / (2.0 * h - 3.0 + math.sqrt(9.0 - 4.0 * h))
        steps.append(h)
    return Schedule(np.asarray(steps), Kind.GBOUNDED)


def silver(l: int) -> Schedule:
    """Silver schedule of length ``2**l - 1``: ConPP of two copies of ``silver(l-1)``."""
    if l < 0:
        raise ValueError("l must be >= 0")
    h = empty(Kind.PRIMITIVE)
    for _ in range(l):
        h = con_pp(h, h)
    return h


def grimmer_recursion(l: int) -> Schedule:
    """Dominant schedule ``h^(2^l-1) = ConPD(silver(l-1), h^(2^(l-1)-1))``, ``h^(0) = []``."""
    if l < 0:
        raise ValueError("l must be >= 0")
    h = empty(Kind.DOMINANT)
    s = empty(Kind.PRIMITIVE)
    for _ in range(l):
        h = con_pd(s, h)
        s = con_pp(s, s)
    return h


def grimmer_length_index(n: int) -> Optional[int]:
    """``l`` with ``n == 2**l - 1``, or None when no Grimmer schedule has length ``n``."""
    if n < 0 or (n + 1) & n:
        return None
    return (n + 1).bit_length() - 1
