"""Accelerated gradient-descent stepsize schedules built by concatenation."""
from .analysis import (
    AsymptoticsReport,
    BoundReport,
    asymptotics,
    bound_report,
    gradient_bound,
    nu_table,
    objective_bound,
    omega,
    ratio_scan,
    rho,
)
from .dp import Family, FamilyStore, SumTable, dom_pp, families, midpoint_recursion, pri_dp, sum_recursion, tri_family
from .errors import (
    CapabilityError,
    CertificateError,
    ClassificationError,
    ConjectureViolation,
    ConsistencyError,
    DivergenceError,
    DomainError,
    RangeError,
    StepcatError,
    TightnessError,
)
from .gd import (
    FunctionOracle,
    GDTrace,
    HuberSpec,
    HuberVariant,
    QReport,
    dominance_check,
    huber_oracle,
    q_report,
    run_gd,
    tightness_gradient,
    tightness_objective,
)
from .schedule import (
    Certificate,
    Kind,
    Schedule,
    certificate_dominant,
    certificate_primitive,
    con_gp,
    con_pd,
    con_pp,
    empty,
    phi,
    psi,
    reverse,
)
from .sequences import DynamicSequence, dynamic_gp, dynamic_pp, grimmer_recursion, rotaru, silver, teboulle_vaisbourd

__version__ = "0.1.0"
