"""Verification suites driven by ``stepcat verify``.

Each suite returns a list of :class:`Check` records; a suite passes when every
record passes.  Failures are reported, not raised.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np

from . import analysis
from .dp import Family, dom_pp, families, sum_recursion
from .errors import StepcatError
from .gd import TIGHT_RTOL, tightness
from .schedule import (
    certificate_dominant,
    phi,
    phi_residual,
    psi,
    psi_residual,
)

SUITES = ("tightness", "identities", "bounds", "appendix")
DEFAULT_N_MAX = {"tightness": 64, "identities": 256, "bounds": 8192, "appendix": None}
IDENTITY_RTOL = 1e-10


@dataclass
class Check:
    suite: str
    name: str
    achieved: Optional[float]
    expected: Optional[float]
    tolerance: Optional[float]
    passed: bool
    detail: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)
        for f in ("achieved", "expected", "tolerance"):
            v = getattr(self, f)
            if v is not None:
                setattr(self, f, float(v))

    def to_dict(self):
        return asdict(self)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------------------


def tightness_suite(n_max: int = 64, threads: int = 1) -> List[Check]:
    """Huber equality for every circ/bullet/triangle schedule with ``n <= n_max``."""
    circ, bullet, tri = families(n_max)
    jobs = [(name, store, n) for name, store in (("circ", circ), ("bullet", bullet), ("triangle", tri)) for n in range(n_max + 1)]
    # materialize in order so the lazy caches are filled single-threaded
    scheds = [(name, n, store[n]) for name, store, n in jobs]

    def run(item):
        name, n, h = item
        try:
            a, b = tightness(h)
            return Check("tightness", f"{name}[{n}]", a, b, TIGHT_RTOL, True)
        except StepcatError as exc:
            return Check("tightness", f"{name}[{n}]", None, None, TIGHT_RTOL, False, str(exc))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            out = list(pool.map(run, scheds))
    else:
        out = [run(s) for s in scheds]
    gaps = [_rel(c.achieved, c.expected) for c in out if c.passed]
    out.append(Check("tightness", "max relative gap", max(gaps, default=0.0), 0.0, TIGHT_RTOL, all(c.passed for c in out)))
    return out


def joint_step_samples(samples: int, seed: int = 0):
    """Random argument pairs spanning several orders of magnitude."""
    rng = np.random.default_rng(seed)
    mag = 10.0 ** rng.uniform(-6, 6, size=(samples, 2))
    mag[rng.uniform(size=samples) < 0.05, 0] = 0.0
    mag[rng.uniform(size=samples) < 0.05, 1] = 0.0
    return mag


def identity_suite(n_max: int = 256, samples: int = 10_000, seed: int = 0) -> List[Check]:
    """phi/psi range lemmas and root residuals; certificate identities along the dominant family."""
    out = []
    worst = {"phi range": 0, "psi range": 0}
    res = {"phi residual": 0.0, "psi residual": 0.0}
    for x, y in joint_step_samples(samples, seed):
        a = phi(x, y)
        b = psi(x, y)
        worst["phi range"] += not (1.0 < a < y + 2.0)
        worst["psi range"] += not (1.0 < b < x + 2.0)
        sa = a * a + (x + y) * a + (x * y + 2 * x + 2 * y + 2)
        sb = 2 * b * b + abs(3 - 2 * y) * b + (2 * x * y + x + 4 * y)
        res["phi residual"] = max(res["phi residual"], abs(phi_residual(x, y, a)) / sa)
        res["psi residual"] = max(res["psi residual"], abs(psi_residual(x, y, b)) / sb)
    for k, v in worst.items():
        out.append(Check("identities", f"{k} violations", float(v), 0.0, 0.0, v == 0))
    for k, v in res.items():
        out.append(Check("identities", f"max {k} (relative)", v, 0.0, IDENTITY_RTOL, v <= IDENTITY_RTOL))

    bullet = dom_pp(n_max)
    gaps: dict = {}
    failures = []
    for n in range(n_max + 1):
        h = bullet[n]
        try:
            cert = certificate_dominant(h, gaps)
        except StepcatError as exc:
            failures.append(f"n={n}: {exc}")
            continue
        g = _rel(cert.total, 2.0 * h.total + 1.0)
        gaps["1^T u = 2 1^T h + 1"] = max(gaps.get("1^T u = 2 1^T h + 1", 0.0), g)
        if np.any(cert.u < 0):
            failures.append(f"n={n}: negative multiplier")
    for name, g in sorted(gaps.items()):
        out.append(Check("identities", name, g, 0.0, IDENTITY_RTOL, g <= IDENTITY_RTOL))
    out.append(Check("identities", f"certificates for n <= {n_max}", float(len(failures)), 0.0, 0.0, not failures, "; ".join(failures[:5])))
    return out


def bounds_suite(n_max: int = 8192) -> List[Check]:
    """Silver identity at ``n = 2^l - 1`` and the sum sandwiches for every ``n <= n_max``."""
    out = []
    circ = sum_recursion(Family.CIRC, n_max)
    bullet = sum_recursion(Family.BULLET, n_max, circ)
    rho = analysis.RHO
    l = 0
    while 2**l - 1 <= n_max:
        n = 2**l - 1
        got, want = circ.r[n] + 1.0, 2.0 ** (l * rho)
        out.append(Check("bounds", f"silver identity l={l}", got, want, 1e-9, _rel(got, want) <= 1e-9))
        l += 1
    n = np.arange(n_max + 1, dtype=float)
    lo = (math.sqrt(2.0) - 1.0) * (n + 2.0) ** rho
    hi = (n + 1.0) ** rho
    rc = circ.r + 1.0
    tol = 1e-12 * hi
    bad_lo = np.flatnonzero(rc < lo - tol)
    bad_hi = np.flatnonzero(rc > hi + tol)
    out.append(Check("bounds", "(sqrt2-1)(n+2)^rho <= r_circ+1", float((rc - lo).min()), 0.0, 0.0, len(bad_lo) == 0,
                     f"first failure n={bad_lo[0]}" if len(bad_lo) else ""))
    out.append(Check("bounds", "r_circ+1 <= (n+1)^rho", float((hi - rc).min()), 0.0, 0.0, len(bad_hi) == 0,
                     f"first failure n={bad_hi[0]}" if len(bad_hi) else ""))
    w, _ = analysis.omega()
    top = w * hi
    lhs = 2.0 * bullet.r + 1.0
    bad = np.flatnonzero(lhs > top + 1e-12 * top)
    out.append(Check("bounds", "2 r_bullet+1 <= omega (n+1)^rho", float((top - lhs).min()), 0.0, 0.0, len(bad) == 0,
                     f"first failure n={bad[0]}" if len(bad) else ""))
    return out


def appendix_suite(samples: int = 10_000, seed: int = 0) -> List[Check]:
    rep = analysis.appendix_property_suite(samples, seed)
    out = []
    for name, r in rep.items():
        detail = f"passed={r.passed} skipped={r.skipped}"
        if r.counterexamples:
            detail += f" first counterexample={r.counterexamples[0]}"
        out.append(Check("appendix", f"{name} violations", float(r.failed), 0.0, 1e-9, r.ok, detail))
    return out


def run_suite(name: str, n_max: Optional[int] = None, threads: int = 1) -> List[Check]:
    if name == "all":
        out = []
        for s in SUITES:
            out += run_suite(s, n_max, threads)
        return out
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    n = DEFAULT_N_MAX[name] if n_max is None else n_max
    if name == "tightness":
        return tightness_suite(n, threads)
    if name == "identities":
        return identity_suite(n)
    if name == "bounds":
        return bounds_suite(n)
    return appendix_suite()
