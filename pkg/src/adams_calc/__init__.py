"""Exact calculus for Adams operations, cannibalistic classes and
Riemann-Roch push-forwards on split model spaces."""

from .exact_arith import bernoulli, cyclo_trace_sum, vp
from .fgl import fgl_k_series, fgl_sum
from .graded_ring import (
    GradedElement,
    Relation,
    Ring,
    RingDescriptor,
    exp_nilpotent,
    filtration_cut,
    invert_unit,
    log_unit,
    make_space,
    normal_form,
)
from .k_calculus import (
    Bundle,
    HPClass,
    KClass,
    Pullback,
    Space,
    acgenus,
    adams,
    adams_H,
    adams_preimage,
    ch,
    point,
    product,
    projective_space,
    rho,
    zk_membership,
)
from .pushforward import (
    EPSILON,
    Fibration,
    compose_fibrations,
    make_projective_bundle,
    projective_fibration,
    push_H,
    push_K,
    verify_adams_rr,
)
from .torsion import (
    ClutchingClass,
    RhoSum,
    bernoulli_order,
    clutch_adams,
    e_order_bound,
    lens_rho,
)

__version__ = "0.1.0"
