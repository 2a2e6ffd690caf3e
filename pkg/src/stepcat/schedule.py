"""Stepsize schedules, joint-step formulas and concatenation operators.

A schedule is a finite sequence of step multipliers ``h`` (already scaled by
``1/L``) carrying a classification tag.  Longer schedules are built by gluing
two shorter ones around a single closed-form joint step:

* ``con_pp``: primitive + primitive -> primitive, joint step ``phi``
* ``con_pd``: primitive + dominant  -> dominant,  joint step ``psi``
* ``con_gp``: g-bounded + primitive -> g-bounded, joint step ``psi``

Every produced schedule records a :class:`Node` construction tree, from which
the dominance certificate can be rebuilt.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Union

import numpy as np

from .errors import CertificateError, ClassificationError, DomainError

SQRT2 = math.sqrt(2.0)

CERT_RTOL = 1e-10


class Kind(str, enum.Enum):
    PRIMITIVE = "primitive"
    DOMINANT = "dominant"
    GBOUNDED = "gbounded"
    UNCLASSIFIED = "unclassified"


_REVERSED_KIND = {
    Kind.PRIMITIVE: Kind.PRIMITIVE,
    Kind.DOMINANT: Kind.GBOUNDED,
    Kind.GBOUNDED: Kind.DOMINANT,
    Kind.UNCLASSIFIED: Kind.UNCLASSIFIED,
}


# ---------------------------------------------------------------------------
# joint-step formulas


def _check_args(x, y):
    for v in (x, y):
        if not math.isfinite(v) or v < 0:
            raise DomainError(f"joint-step arguments must be finite and >= 0, got ({x!r}, {y!r})")


def phi(x: float, y: float) -> float:
    """Joint step of ``con_pp`` for two primitive blocks with sums ``x`` and ``y``.

    Positive root of ``a**2 + (x+y)*a - (x*y + 2x + 2y + 2) = 0``, i.e.
    ``(-x - y + sqrt((x+y+2)**2 + 4(x+1)(y+1))) / 2``.  Evaluated in the
    rationalized form, which avoids cancellation when ``x + y`` is large.
    """
    x = float(x)
    y = float(y)
    _check_args(x, y)
    s = x + y
    c = x * y + 2.0 * s + 2.0  # symmetric in (x, y) bit for bit
    return 2.0 * c / (s + math.sqrt(s * s + 4.0 * c))


def psi(x: float, y: float) -> float:
    """Joint step of ``con_pd`` / ``con_gp``.

    ``x`` is the sum of the primitive block and ``y`` the sum of the
    dominant (or g-bounded) block.  Equals
    ``(3 - 2y + sqrt((2y+1)(2y+8x+9))) / 4``, the positive root of
    ``2b**2 - (3-2y)*b - (2xy + x + 4y) = 0``.
    """
    x = float(x)
    y = float(y)
    _check_args(x, y)
    t = 3.0 - 2.0 * y
    root = math.sqrt((2.0 * y + 1.0) * (2.0 * y + 8.0 * x + 9.0))
    if t >= 0.0:
        return (t + root) / 4.0
    c = 2.0 * x * y + x + 4.0 * y
    return 2.0 * c / (root - t)


def phi_array(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized :func:`phi` without argument validation (same operation order)."""
    s = x + y
    c = x * y + 2.0 * s + 2.0  # symmetric in (x, y) bit for bit
    return 2.0 * c / (s + np.sqrt(s * s + 4.0 * c))


def psi_array(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized :func:`psi` without argument validation (same operation order)."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    t = 3.0 - 2.0 * y
    root = np.sqrt((2.0 * y + 1.0) * (2.0 * y + 8.0 * x + 9.0))
    c = 2.0 * x * y + x + 4.0 * y
    with np.errstate(divide="ignore", invalid="ignore"):
        far = 2.0 * c / (root - t)
    return np.where(t >= 0.0, (t + root) / 4.0, far)


def phi_residual(x: float, y: float, a: float) -> float:
    return a * a + (x + y) * a - (x * y + 2.0 * x + 2.0 * y + 2.0)


def psi_residual(x: float, y: float, b: float) -> float:
    return 2.0 * b * b - (3.0 - 2.0 * y) * b - (2.0 * x * y + x + 4.0 * y)


# ---------------------------------------------------------------------------
# construction trees


@dataclass(frozen=True, eq=False)
class Node:
    """Construction record.

    ``op`` is one of ``"leaf"`` (empty schedule), ``"given"`` (schedule supplied
    from outside with no construction history, ``steps`` holds its entries),
    ``"ConPP"``, ``"ConPD"`` or ``"ConGP"``.
    """

    op: str
    joint_step: Optional[float] = None
    left: Optional["Node"] = None
    right: Optional["Node"] = None
    steps: tuple = ()
    kind: Kind = Kind.PRIMITIVE

    def flatten(self) -> list:
        if self.op in ("leaf", "given"):
            return list(self.steps)
        return self.left.flatten() + [self.joint_step] + self.right.flatten()

    def mirrored(self) -> "Node":
        if self.op == "leaf":
            return self
        if self.op == "given":
            return Node("given", steps=tuple(reversed(self.steps)), kind=_REVERSED_KIND[self.kind])
        op = {"ConPP": "ConPP", "ConPD": "ConGP", "ConGP": "ConPD"}[self.op]
        return Node(op, self.joint_step, self.right.mirrored(), self.left.mirrored())

    def depth(self) -> int:
        if self.op in ("leaf", "given"):
            return 0
        return 1 + max(self.left.depth(), self.right.depth())


LEAF = Node("leaf")


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True, eq=False)
class Schedule:
    steps: np.ndarray
    kind: Kind = Kind.UNCLASSIFIED
    provenance: Optional[Node] = field(default=None, repr=False)

    def __post_init__(self):
        arr = np.array(self.steps, dtype=float).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "steps", arr)
        object.__setattr__(self, "kind", Kind(self.kind))

    @classmethod
    def of(cls, steps: Iterable[float] = (), kind: Union[Kind, str] = Kind.UNCLASSIFIED) -> "Schedule":
        return cls(np.asarray(list(steps), dtype=float), Kind(kind))

    @cached_property
    def total(self) -> float:
        """Correctly rounded ``1^T h`` (order independent)."""
        return math.fsum(self.steps)

    @property
    def tree(self) -> Node:
        if self.provenance is not None:
            return self.provenance
        if len(self.steps) == 0:
            return LEAF
        return Node("given", steps=tuple(self.steps.tolist()), kind=self.kind)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps.tolist())

    def tolist(self) -> list:
        return self.steps.tolist()

    def __repr__(self):
        body = ", ".join(f"{v:.6f}" for v in self.steps[:8])
        if len(self.steps) > 8:
            body += ", ..."
        return f"Schedule([{body}], kind={self.kind.value}, n={len(self)})"


def empty(kind: Union[Kind, str] = Kind.PRIMITIVE) -> Schedule:
    """The zero-iteration schedule; it is primitive, hence also dominant."""
    return Schedule(np.empty(0), Kind(kind), LEAF)


def _require(h: Schedule, *kinds: Kind, role: str) -> None:
    if h.kind not in kinds:
        names = " or ".join(k.value for k in kinds)
        raise ClassificationError(f"{role} must be {names}, got {h.kind.value}")


def _join(op, left: Schedule, joint: float, right: Schedule, kind: Kind) -> Schedule:
    steps = np.concatenate([left.steps, [joint], right.steps])
    return Schedule(steps, kind, Node(op, joint, left.tree, right.tree))


def con_pp(h_a: Schedule, h_b: Schedule) -> Schedule:
    _require(h_a, Kind.PRIMITIVE, role="first argument of con_pp")
    _require(h_b, Kind.PRIMITIVE, role="second argument of con_pp")
    return _join("ConPP", h_a, phi(h_a.total, h_b.total), h_b, Kind.PRIMITIVE)


def con_pd(h_a: Schedule, h_d: Schedule) -> Schedule:
    _require(h_a, Kind.PRIMITIVE, role="first argument of con_pd")
    _require(h_d, Kind.DOMINANT, role="second argument of con_pd")
    return _join("ConPD", h_a, psi(h_a.total, h_d.total), h_d, Kind.DOMINANT)


def con_gp(h_d: Schedule, h_b: Schedule) -> Schedule:
    _require(h_d, Kind.GBOUNDED, role="first argument of con_gp")
    _require(h_b, Kind.PRIMITIVE, role="second argument of con_gp")
    # the primitive sum goes first
    return _join("ConGP", h_d, psi(h_b.total, h_d.total), h_b, Kind.GBOUNDED)


def reverse(h: Schedule) -> Schedule:
    prov = None if h.provenance is None else h.provenance.mirrored()
    return Schedule(h.steps[::-1].copy(), _REVERSED_KIND[h.kind], prov)


def as_kind(h: Schedule, kind: Union[Kind, str]) -> Schedule:
    """Re-tag a schedule (e.g. view a primitive schedule as dominant)."""
    return Schedule(h.steps, Kind(kind), h.provenance)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True, eq=False)
class Certificate:
    """Multiplier vector ``u`` (length n+1) witnessing primitivity or dominance."""

    u: np.ndarray
    kind: Kind

    def __post_init__(self):
        arr = np.array(self.u, dtype=float).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "u", arr)

    @property
    def total(self) -> float:
        return math.fsum(self.u)


def certificate_primitive(h: Schedule) -> Certificate:
    _require(h, Kind.PRIMITIVE, role="schedule")
    return Certificate(np.append(h.steps, 0.0), Kind.PRIMITIVE)


def _rel_gap(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1.0)


def _dominant_u(node: Node, gaps: Optional[dict] = None) -> tuple:
    """Return ``(u, steps)`` for the dominant schedule built by ``node``.

    If ``gaps`` is given, the largest relative gap seen for each identity is
    recorded in it.
    """
    if node.op == "leaf" or (node.op == "given" and node.kind == Kind.PRIMITIVE) or node.op == "ConPP":
        # primitive => dominant with u = [h; 1^T h + 1]
        steps = node.flatten()
        return np.append(steps, math.fsum(steps) + 1.0), steps
    if node.op != "ConPD":
        raise ClassificationError(f"cannot build a dominance certificate from a {node.op} node")
    h_a = node.left.flatten()
    u_d, h_d = _dominant_u(node.right, gaps)
    gamma, lam1, lam2 = certificate_lambdas(math.fsum(h_a), math.fsum(u_d))
    gap = lam1 - lam2
    beta = node.joint_step
    u_e = np.concatenate([h_a, [gamma], gap * u_d])
    h_e = h_a + [beta] + h_d
    checks = {
        "lambda1 = (lambda1 - lambda2)^2": (lam1, gap * gap),
        "beta reconstruction": (beta, (gamma * gap + lam2) / lam1),
        "1^T u = 2 1^T h + 1": (math.fsum(u_e), 2.0 * math.fsum(h_e) + 1.0),
    }
    for name, (a, b) in checks.items():
        g = _rel_gap(a, b)
        if gaps is not None:
            gaps[name] = max(gaps.get(name, 0.0), g)
        if g > CERT_RTOL:
            raise CertificateError(f"{name} violated: {a!r} vs {b!r}")
    if np.any(u_e < 0):
        raise CertificateError("negative certificate entry")
    return u_e, h_e


def certificate_dominant(tree: Union[Node, Schedule], gaps: Optional[dict] = None) -> Certificate:
    """Rebuild the dominance multipliers ``u`` along a construction tree.

    Primitive subtrees are promoted with ``u = [h; 1^T h + 1]``; each ConPD
    node appends ``gamma`` and scales the right certificate by
    ``lambda1 - lambda2``.  The three defining identities are checked at every
    node to relative 1e-10; pass a dict as ``gaps`` to collect the worst gaps.
    """
    if isinstance(tree, Schedule):
        _require(tree, Kind.DOMINANT, Kind.PRIMITIVE, role="schedule")
        tree = tree.tree
    u, _ = _dominant_u(tree, gaps)
    return Certificate(u, Kind.DOMINANT)


def certificate_lambdas(sum_a: float, sum_u_d: float) -> tuple:
    """``(gamma, lambda1, lambda2)`` for a ConPD node with primitive sum ``sum_a``."""
    gamma = sum_a + 2.0
    lam2 = (2.0 * sum_a + 2.0) / sum_u_d
    lam1 = lam2 + 0.5 + math.sqrt(lam2 + 0.25)
    return gamma, lam1, lam2
