"""Gradient descent runs, test oracles and trace-level checks.

Every oracle knows its minimizer, so the interpolation quantities ``Q`` and the
bound slacks can be evaluated on any trace.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .analysis import gradient_bound, objective_bound
from .errors import CapabilityError, ClassificationError, DivergenceError, DomainError, TightnessError
from .schedule import Certificate, Kind, Schedule

TIGHT_RTOL = 1e-10
SAFE_TOL = 1e-9


@dataclass
class FunctionOracle:
    """Convex L-smooth function with value/gradient callback and known minimizer."""

    fg: Callable[[np.ndarray], Tuple[float, np.ndarray]]
    L: float
    dim: int
    x_star: Optional[np.ndarray] = None
    f_star: Optional[float] = None
    name: str = "oracle"

    def __call__(self, x):
        return self.fg(np.asarray(x, dtype=float))

    @property
    def has_minimizer(self) -> bool:
        return self.x_star is not None and self.f_star is not None


# ---------------------------------------------------------------------------
# oracles


def quadratic_oracle(A: np.ndarray, c: Optional[np.ndarray] = None) -> FunctionOracle:
    """``f(x) = 1/2 (x-c)^T A (x-c)`` with symmetric PSD ``A``; ``L = lambda_max(A)``."""
    A = np.asarray(A, dtype=float)
    A = 0.5 * (A + A.T)
    d = A.shape[0]
    c = np.zeros(d) if c is None else np.asarray(c, dtype=float)
    L = float(np.linalg.eigvalsh(A).max())
    if L <= 0:
        raise DomainError("quadratic needs a nonzero PSD matrix")

    def fg(x):
        r = x - c
        g = A @ r
        return 0.5 * float(r @ g), g

    return FunctionOracle(fg, L, d, c.copy(), 0.0, "quadratic")


def random_quadratic(d: int, rng: np.random.Generator, rank: Optional[int] = None) -> FunctionOracle:
    B = rng.standard_normal((d, rank or d))
    c = rng.standard_normal(d)
    return quadratic_oracle(B @ B.T / d, c)


def logsumexp_oracle(A: np.ndarray, c: Optional[np.ndarray] = None) -> FunctionOracle:
    """``f(x) = log sum_i (exp(a_i.(x-c)) + exp(-a_i.(x-c)))``.

    The symmetric rows put the minimizer at ``c`` with ``f* = log(2m)``
    whenever the rows span the space.
    """
    A = np.asarray(A, dtype=float)
    m, d = A.shape
    c = np.zeros(d) if c is None else np.asarray(c, dtype=float)
    M = np.vstack([A, -A])
    # Hessian is bounded by max_i ||a_i||^2 and by ||A||_2^2-type spectral bound
    L = float(min(np.max(np.sum(A * A, axis=1)), np.linalg.norm(M, 2) ** 2))

    def fg(x):
        z = M @ (x - c)
        zmax = z.max()
        e = np.exp(z - zmax)
        s = e.sum()
        return float(zmax + math.log(s)), M.T @ (e / s)

    return FunctionOracle(fg, L, d, c.copy(), math.log(2 * m), "logsumexp")


def random_logsumexp(d: int, m: int, rng: np.random.Generator) -> FunctionOracle:
    return logsumexp_oracle(rng.standard_normal((m, d)) / math.sqrt(d), rng.standard_normal(d))


def logistic_oracle(X: np.ndarray, y: np.ndarray, ridge: float = 1e-2) -> FunctionOracle:
    """Mean logistic loss plus ``ridge/2 ||x||^2``; labels in {-1, +1}.

    The minimizer is found by Newton's method to near machine precision.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    m, d = X.shape
    Z = X * y[:, None]
    L = float(np.linalg.norm(X, 2) ** 2 / (4 * m) + ridge)

    def fg(x):
        t = Z @ x
        loss = np.logaddexp(0.0, -t).mean() + 0.5 * ridge * float(x @ x)
        s = -0.5 * (1.0 - np.tanh(0.5 * t))  # -sigmoid(-t), stable
        g = Z.T @ s / m + ridge * x
        return float(loss), g

    x = np.zeros(d)
    for _ in range(100):
        _, g = fg(x)
        t = Z @ x
        p = 0.5 * (1.0 + np.tanh(0.5 * t))
        H = (Z * (p * (1 - p))[:, None]).T @ Z / m + ridge * np.eye(d)
        step = np.linalg.solve(H, g)
        x = x - step
        if np.linalg.norm(step) <= 1e-15 * max(1.0, np.linalg.norm(x)):
            break
    f_star, _ = fg(x)
    return FunctionOracle(fg, L, d, x, f_star, "logistic")


def random_logistic(d: int, m: int, rng: np.random.Generator, ridge: float = 1e-2) -> FunctionOracle:
    X = rng.standard_normal((m, d))
    y = np.where(rng.uniform(size=m) < 0.5, -1.0, 1.0)
    return logistic_oracle(X, y, ridge)


class HuberVariant(str, enum.Enum):
    OBJECTIVE = "objective"
    GRADIENT = "gradient"


@dataclass(frozen=True)
class HuberSpec:
    """Worst-case Huber parameters; ``for_schedule`` picks ``w`` from the schedule sum."""

    w: float
    L: float = 1.0
    variant: HuberVariant = HuberVariant.OBJECTIVE

    @classmethod
    def for_schedule(cls, h: Schedule, variant, L: float = 1.0) -> "HuberSpec":
        variant = HuberVariant(variant)
        w = 2.0 * h.total + 1.0 if variant is HuberVariant.OBJECTIVE else h.total + 1.0
        return cls(w, L, variant)


def huber_oracle(spec: HuberSpec, d: int = 1) -> FunctionOracle:
    """``f = (L/w)||x|| - L/(2w^2)`` for ``||x|| >= 1/w``, else ``(L/2)||x||^2``.

    ``w = 1`` is accepted: it is the worst case of the empty schedule.
    """
    w, L = float(spec.w), float(spec.L)
    if not (w >= 1.0 and math.isfinite(w)):
        raise DomainError(f"Huber width w={w} must be >= 1")
    if not L > 0:
        raise DomainError("L must be positive")
    if d < 1:
        raise DomainError("dimension must be >= 1")
    r0 = 1.0 / w

    def fg(x):
        nx = float(np.linalg.norm(x))
        if nx >= r0:
            return L / w * nx - L / (2 * w * w), (L / w / nx) * x
        return 0.5 * L * nx * nx, L * x

    return FunctionOracle(fg, L, d, np.zeros(d), 0.0, f"huber(w={w:g})")


# ---------------------------------------------------------------------------
# gradient descent


@dataclass
class GDTrace:
    """Iterates ``x_0..x_n``, gradients ``G = [g_0..g_n]`` (rows) and values ``f_0..f_n``."""

    x: np.ndarray
    g: np.ndarray
    f: np.ndarray
    steps: np.ndarray
    oracle: FunctionOracle

    @property
    def n(self) -> int:
        return len(self.steps)


def run_gd(oracle: FunctionOracle, x0, h) -> GDTrace:
    """``x_{i+1} = x_i - (h_i / L) g_i`` for every step of ``h``."""
    steps = np.asarray(h.steps if isinstance(h, Schedule) else h, dtype=float)
    if not np.all(np.isfinite(steps)):
        raise DomainError("steps must be finite")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (oracle.dim,):
        raise ValueError(f"x0 has shape {x0.shape}, oracle dimension is {oracle.dim}")
    n = len(steps)
    X = np.empty((n + 1, oracle.dim))
    G = np.empty((n + 1, oracle.dim))
    F = np.empty(n + 1)
    X[0] = x0
    for i in range(n + 1):
        fi, gi = oracle(X[i])
        if not (math.isfinite(fi) and np.all(np.isfinite(gi))):
            raise DivergenceError(i)
        F[i], G[i] = fi, gi
        if i < n:
            X[i + 1] = X[i] - (steps[i] / oracle.L) * gi
    return GDTrace(X, G, F, steps, oracle)


# ---------------------------------------------------------------------------
# interpolation quantities


@dataclass
class QReport:
    Q: np.ndarray  # Q[i, j]
    to_star: np.ndarray  # Q_{i,*}
    from_star: np.ndarray  # Q_{*,i}
    scale: float
    tol: float = SAFE_TOL
    max_entry: float = field(init=False)

    def __post_init__(self):
        self.max_entry = float(max(self.Q.max(), self.to_star.max(), self.from_star.max()))

    @property
    def ok(self) -> bool:
        return self.max_entry <= self.tol * self.scale


def _require_minimizer(oracle: FunctionOracle):
    if not oracle.has_minimizer:
        raise CapabilityError(f"{oracle.name} does not provide x* and f*")


def q_report(trace: GDTrace, tol: float = SAFE_TOL) -> QReport:
    """All ``Q_{i,j}``, ``Q_{i,*}``, ``Q_{*,i}``; each is <= 0 for smooth convex ``f``."""
    o = trace.oracle
    _require_minimizer(o)
    X, G, F, L = trace.x, trace.g, trace.f, o.L
    xs, fs = o.x_star, o.f_star
    gx = np.einsum("id,id->i", G, X)
    # <g_i, x_j - x_i> = (G X^T)_{ij} - gx_i
    inner = G @ X.T - gx[:, None]
    gg = np.einsum("id,id->i", G, G)
    dist = gg[:, None] + gg[None, :] - 2.0 * (G @ G.T)
    Q = F[:, None] - F[None, :] + inner + np.maximum(dist, 0.0) / (2 * L)
    to_star = F - fs - (gx - G @ xs) + gg / (2 * L)
    from_star = fs - F + gg / (2 * L)
    scale = abs(F[0]) + 1.0
    return QReport(Q, to_star, from_star, scale, tol)


# ---------------------------------------------------------------------------
# tightness on the Huber worst cases


def tightness_objective(h: Schedule, rtol: float = TIGHT_RTOL):
    """``(f_n - f*, C/2)`` on the 1-d Huber worst case; raises if they differ."""
    C = objective_bound(h)
    spec = HuberSpec.for_schedule(h, HuberVariant.OBJECTIVE)
    tr = run_gd(huber_oracle(spec), [1.0], h)
    achieved = float(tr.f[-1])
    bound = 0.5 * C
    w = spec.w
    x_expect = (w + 1.0) / (2.0 * w)
    if abs(achieved - bound) > rtol * bound:
        raise TightnessError(f"objective worst case {achieved!r} != bound {bound!r} (n={len(h)})")
    if abs(tr.x[-1, 0] - x_expect) > rtol * x_expect:
        raise TightnessError(f"x_n = {tr.x[-1, 0]!r}, expected {x_expect!r}")
    return achieved, bound


def tightness_gradient(h: Schedule, rtol: float = TIGHT_RTOL):
    """``(||g_n||^2 / 2L, C (f0 - f*))`` on the 1-d Huber worst case; raises if they differ."""
    C = gradient_bound(h)
    spec = HuberSpec.for_schedule(h, HuberVariant.GRADIENT)
    tr = run_gd(huber_oracle(spec), [1.0], h)
    achieved = float(tr.g[-1] @ tr.g[-1]) / 2.0
    bound = C * float(tr.f[0])
    x_expect = 1.0 / spec.w
    if abs(achieved - bound) > rtol * bound:
        raise TightnessError(f"gradient worst case {achieved!r} != bound {bound!r} (n={len(h)})")
    if abs(tr.x[-1, 0] - x_expect) > rtol * x_expect:
        raise TightnessError(f"x_n = {tr.x[-1, 0]!r}, expected {x_expect!r}")
    return achieved, bound


def tightness(h: Schedule, rtol: float = TIGHT_RTOL):
    """Dispatch on the schedule's kind."""
    if h.kind is Kind.GBOUNDED:
        return tightness_gradient(h, rtol)
    if h.kind in (Kind.PRIMITIVE, Kind.DOMINANT):
        return tightness_objective(h, rtol)
    raise ClassificationError(f"no tightness claim for kind {h.kind.value}")


# ---------------------------------------------------------------------------
# bound and dominance checks on arbitrary traces


def objective_slack(trace: GDTrace, h: Schedule) -> float:
    """``C (L/2)||x0-x*||^2 - (f_n - f*)`` (>= 0 when the bound holds)."""
    o = trace.oracle
    _require_minimizer(o)
    r0 = trace.x[0] - o.x_star
    return objective_bound(h) * 0.5 * o.L * float(r0 @ r0) - (trace.f[-1] - o.f_star)


def gradient_slack(trace: GDTrace, h: Schedule) -> float:
    """``C (f0 - f*) - ||g_n||^2 / 2L`` (>= 0 when the bound holds)."""
    o = trace.oracle
    _require_minimizer(o)
    gn = trace.g[-1]
    return gradient_bound(h) * (trace.f[0] - o.f_star) - float(gn @ gn) / (2 * o.L)


def dominance_check(trace: GDTrace, h: Schedule, u) -> float:
    """Slack of the dominance inequality on one trace.

    ``(L/2)||x0-x*||^2 + <u, v> - (1^T u)(f_n - f*) - M`` with ``v_i = Q_{i,*}``.
    For dominant certificates ``M = (L/2)||x0 - x* - G^T u / L||^2``; for primitive
    ones ``M = (L/2)||x_n - x*||^2 + r(r+1)/(2L) ||g_n||^2`` with ``r = 1^T h``.
    A negative slack falsifies the certificate; a nonnegative one proves nothing.
    """
    o = trace.oracle
    _require_minimizer(o)
    kind = u.kind if isinstance(u, Certificate) else (Kind.PRIMITIVE if h.kind is Kind.PRIMITIVE else Kind.DOMINANT)
    u = np.asarray(u.u if isinstance(u, Certificate) else u, dtype=float)
    if u.shape != (len(h) + 1,) or trace.n != len(h):
        raise ValueError(f"certificate length {u.shape} does not match n={len(h)}")
    L = o.L
    X, G, F = trace.x, trace.g, trace.f
    xs, fs = o.x_star, o.f_star
    gg = np.einsum("id,id->i", G, G)
    v = F - fs - np.einsum("id,id->i", G, X - xs) + gg / (2 * L)
    r0 = X[0] - xs
    base = 0.5 * L * float(r0 @ r0) + float(u @ v) - u.sum() * (F[-1] - fs)
    if kind is Kind.PRIMITIVE:
        rn = X[-1] - xs
        r = float(h.total)
        M = 0.5 * L * float(rn @ rn) + r * (r + 1.0) / (2 * L) * gg[-1]
    else:
        z = r0 - (G.T @ u) / L
        M = 0.5 * L * float(z @ z)
    return float(base - M)


def dominance_scale(trace: GDTrace, u) -> float:
    o = trace.oracle
    u = np.asarray(u.u if isinstance(u, Certificate) else u, dtype=float)
    r0 = trace.x[0] - o.x_star
    return 0.5 * o.L * float(r0 @ r0) + u.sum() * abs(trace.f[0] - o.f_star) + 1.0
