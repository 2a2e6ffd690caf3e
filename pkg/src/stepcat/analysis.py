"""Bound constants and asymptotic diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dp import Family, SumTable, sum_recursion
from .errors import ClassificationError, RangeError
from .schedule import Kind, Schedule

RHO = math.log2(1.0 + math.sqrt(2.0))
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def rho() -> float:
    """Silver exponent ``log2(1 + sqrt 2)``."""
    return RHO


def bound_constant(total: float) -> float:
    return 1.0 / (2.0 * total + 1.0)


def objective_bound(h: Schedule) -> float:
    """``C`` in ``f_n - f* <= C (L/2) ||x0 - x*||^2`` for primitive/dominant ``h``."""
    if h.kind not in (Kind.PRIMITIVE, Kind.DOMINANT):
        raise ClassificationError(f"objective bound needs a primitive or dominant schedule, got {h.kind.value}")
    return bound_constant(h.total)


def gradient_bound(h: Schedule) -> float:
    """``C`` in ``||g_n||^2 / (2L) <= C (f0 - f*)`` for g-bounded ``h``."""
    if h.kind is not Kind.GBOUNDED:
        raise ClassificationError(f"gradient bound needs a g-bounded schedule, got {h.kind.value}")
    return bound_constant(h.total)


@dataclass
class BoundReport:
    n: int
    sum: float
    objective_constant: Optional[float]
    gradient_constant: Optional[float]
    kind: Kind


def bound_report(h: Schedule) -> BoundReport:
    obj = bound_constant(h.total) if h.kind in (Kind.PRIMITIVE, Kind.DOMINANT) else None
    grad = bound_constant(h.total) if h.kind is Kind.GBOUNDED else None
    return BoundReport(len(h), h.total, obj, grad, h.kind)


# ---------------------------------------------------------------------------
# omega


def omega_objective(mu):
    mu = np.asarray(mu, dtype=float)
    return 2.0 * (1.0 - mu) ** RHO / (1.0 - mu ** (RHO / 2.0))


def golden_max(f, lo, hi, tol=1e-12, max_iter=200):
    """Golden-section search for the maximizer of a unimodal ``f`` on ``[lo, hi]``."""
    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol and it < max_iter:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
        it += 1
    x = 0.5 * (a + b)
    return x, f(x)


def omega(grid: int = 10_000, tol: float = 1e-12):
    """``max_{mu in (0,1)} 2(1-mu)^rho / (1 - mu^(rho/2))`` and its maximizer.

    Coarse grid scan, unimodality check on the grid, then golden-section
    refinement inside the bracketing cell pair.
    """
    mu = np.linspace(0.0, 1.0, grid + 2)[1:-1]
    g = omega_objective(mu)
    signs = np.sign(np.diff(g))
    signs = signs[signs != 0]
    changes = int(np.count_nonzero(np.diff(signs)))
    if changes != 1:
        raise RuntimeError(f"omega objective not unimodal on the grid ({changes} sign changes)")
    i = int(np.argmax(g))
    lo = mu[max(i - 1, 0)]
    hi = mu[min(i + 1, len(mu) - 1)]
    x, val = golden_max(lambda t: float(omega_objective(t)), lo, hi, tol=tol)
    return float(val), float(x)


# ---------------------------------------------------------------------------
# lower-bound and ratio diagnostics


def nu_table(table: SumTable, l_max: int) -> np.ndarray:
    """``nu_l = min_{2^l-1 <= n <= 2^(l+1)-2} (r_n + 1) / (n + 2)^rho`` for ``l <= l_max``."""
    if table.family is not Family.CIRC:
        raise ValueError("nu_table needs the primitive (circ) sum table")
    need = 2 ** (l_max + 1) - 2
    if table.N < need:
        raise RangeError(f"nu_{l_max} needs sums up to n={need}, table has N={table.N}")
    n = np.arange(need + 1)
    q = (table.r[: need + 1] + 1.0) / (n + 2.0) ** RHO
    nu = np.array([q[2**l - 1 : 2 ** (l + 1) - 1].min() for l in range(l_max + 1)])
    if abs(nu[0] - (math.sqrt(2.0) - 1.0)) > 1e-12:
        raise AssertionError(f"nu_0 = {nu[0]!r}, expected sqrt(2) - 1")
    if np.any(np.diff(nu) < 0):
        l = int(np.flatnonzero(np.diff(nu) < 0)[0]) + 1
        raise AssertionError(f"nu not monotone at l={l}")
    return nu


@dataclass
class RatioScan:
    family: Family
    n: np.ndarray
    ratio: np.ndarray
    min: float = field(init=False)
    max: float = field(init=False)
    argmin: int = field(init=False)
    argmax: int = field(init=False)

    def __post_init__(self):
        self.min = float(self.ratio.min())
        self.max = float(self.ratio.max())
        self.argmin = int(self.n[np.argmin(self.ratio)])
        self.argmax = int(self.n[np.argmax(self.ratio)])


def ratio_scan(family, n_lo: int, n_hi: int, table: Optional[SumTable] = None) -> RatioScan:
    """``1^T h^(n) / (n+1)^rho`` for ``n_lo <= n <= n_hi``."""
    family = Family(family)
    if n_lo < 1 or n_hi < n_lo:
        raise RangeError(f"bad scan range [{n_lo}, {n_hi}]")
    if table is None:
        table = sum_recursion(family, n_hi)
    if table.N < n_hi:
        raise RangeError(f"table covers n <= {table.N}, scan needs {n_hi}")
    n = np.arange(n_lo, n_hi + 1)
    return RatioScan(family, n, table.r[n_lo : n_hi + 1] / (n + 1.0) ** RHO)


# ---------------------------------------------------------------------------
# appendix inequalities


def product_bound(x: float, y: float) -> float:
    """``(1 + x/w)(1 + y/w)`` with ``w = (x^(1/rho) + y^(1/rho))^rho`` (<= 2).

    Uses ``x/w = (a/(a+b))^rho`` with ``a = x^(1/rho)``, ``b = y^(1/rho)``,
    which stays accurate for tiny arguments where ``w`` itself underflows.
    """
    a = x ** (1.0 / RHO)
    b = y ** (1.0 / RHO)
    if a + b == 0.0:
        return 1.0
    return (1.0 + (a / (a + b)) ** RHO) * (1.0 + (b / (a + b)) ** RHO)


def omega_threshold(mu: float) -> float:
    return float(omega_objective(mu))


def omega_lhs(mu: float, w: float) -> float:
    """Left side of the omega lemma; it is ``<= w`` exactly when ``w >= omega_threshold(mu)``."""
    a = mu**RHO
    b = (1.0 - mu) ** RHO
    return 2.0 * b + 0.5 * w * a + math.sqrt(2.0 * w * a * b + 0.25 * w * w * a * a)


@dataclass
class PropertyReport:
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, ok: bool, example=None):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.counterexamples) < 20:
                self.counterexamples.append(example)


def appendix_property_suite(samples: int, seed: int = 0, margin: float = 1e-9) -> dict:
    """Random checks of the product bound and both directions of the omega lemma.

    Returns ``{"product": PropertyReport, "omega_iff": PropertyReport}``.
    Pairs with ``w`` within ``margin`` (relative) of the threshold are skipped.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    prod = PropertyReport()
    for x, y in rng.uniform(0.0, 1e3, size=(samples, 2)):
        p = product_bound(x, y)
        prod.record(p <= 2.0 + margin, (x, y, p))
    iff = PropertyReport()
    mus = rng.uniform(0.0, 1.0, size=samples)
    scales = np.exp(rng.uniform(-2.0, 2.0, size=samples))
    for mu, sc in zip(mus, scales):
        if not 0.0 < mu < 1.0:
            iff.skipped += 1
            continue
        t = omega_threshold(mu)
        w = t * sc
        if abs(w - t) <= margin * t:
            iff.skipped += 1
            continue
        holds = omega_lhs(mu, w) <= w
        iff.record(holds == (w >= t), (mu, w, t))
    return {"product": prod, "omega_iff": iff}


# ---------------------------------------------------------------------------
# summary


@dataclass
class AsymptoticsReport:
    rho: float
    omega: float
    omega_argmax: float
    nu: np.ndarray
    ratio: dict
    gate: str
    partial: bool = False

    def rows(self):
        """``(name, value)`` pairs in a fixed order, for CSV output."""
        out = [("rho", self.rho), ("omega", self.omega), ("omega_argmax", self.omega_argmax)]
        out += [(f"nu_{l}", float(v)) for l, v in enumerate(self.nu)]
        for fam, sc in self.ratio.items():
            out += [(f"ratio_min_{fam}", sc.min), (f"ratio_max_{fam}", sc.max)]
        return out


def asymptotics(l_max: int = 12, n_max: int = 8192, scan_lo: int = 16, n_budget: int = 1 << 18) -> AsymptoticsReport:
    """rho, omega, nu_0..nu_l_max and ratio-scan extrema for the circ and bullet families.

    Full DP is used while ``2**(l_max+1) - 2 <= n_max``; beyond that the nu
    table comes from the midpoint recursion, gated against full DP.  If the
    window would exceed ``n_budget`` the nu table is truncated and the report
    is marked partial.
    """
    from .dp import MIDPOINT_GATE, midpoint_recursion
    from .errors import ConjectureViolation

    circ = sum_recursion(Family.CIRC, n_max)
    bullet = sum_recursion(Family.BULLET, n_max, circ)
    need = 2 ** (l_max + 1) - 2
    partial = False
    if need > n_budget:
        l_max = max(l for l in range(l_max + 1) if 2 ** (l + 1) - 2 <= n_budget)
        need = 2 ** (l_max + 1) - 2
        partial = True
    if need <= n_max:
        table, gate = circ, "full-dp"
    else:
        ref = circ if circ.N >= MIDPOINT_GATE else None
        try:
            table = midpoint_recursion(need, reference=ref)
            gate = f"midpoint gate passed (n <= {MIDPOINT_GATE})"
        except ConjectureViolation as exc:
            gate = f"midpoint gate FAILED at n={exc.n}"
            table = circ
            l_max = max(l for l in range(l_max + 1) if 2 ** (l + 1) - 2 <= n_max)
            partial = True
    nu = nu_table(table, l_max)
    w, mu = omega()
    lo = min(scan_lo, n_max)
    ratio = {
        "circ": ratio_scan(Family.CIRC, max(lo, 1), n_max, circ),
        "bullet": ratio_scan(Family.BULLET, max(lo, 1), n_max, bullet),
    }
    return AsymptoticsReport(RHO, w, mu, nu, ratio, gate, partial)
