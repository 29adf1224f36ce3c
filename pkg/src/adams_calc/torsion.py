"""Torsion invariants: the Z/l clutching model, e-invariant order bounds and
rho-invariants of lens spaces.

R/Z values are exact rationals; :func:`mod1` gives the representative in
[0, 1).
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import sympy

from .exact_arith import (
    RationalFunction,
    bernoulli,
    cyclo_trace_sum,
    divisor_levels,
    vp,
)

DEFAULT_SCAN_CEILING = 200


def scan_ceiling() -> int:
    value = os.environ.get("ADAMS_CALC_SCAN_CEILING")
    return int(value) if value else DEFAULT_SCAN_CEILING


def mod1(q) -> Fraction:
    q = Fraction(q)
    return q - (q.numerator // q.denominator)


def factor_denominator(q) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(sympy.factorint(Fraction(q).denominator).items()))


# ---------------------------------------------------------------------------
# clutching classes in K~^{-2g}(Z/l pseudo-plane) = Z/l

@dataclass(frozen=True)
class ClutchingClass:
    """Element ``m`` of ``K~^{-2g} = Z/l``.

    ``g`` counts Bott desuspensions away from degree 0, so ``g = 0`` is the
    group containing ``[L_m - L_0]``.
    """

    modulus: int
    m: int
    g: int = 0

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be at least 2")
        if not 0 <= self.m < self.modulus:
            raise ValueError("m must be reduced modulo l")

    @classmethod
    def make(cls, modulus: int, m: int, g: int = 0) -> "ClutchingClass":
        return cls(modulus, m % modulus, g)

    @classmethod
    def line_difference(cls, modulus: int, m: int) -> "ClutchingClass":
        """``[L_m - L_0]`` in degree 0."""
        return cls.make(modulus, m, 0)


def clutch_multiplier(k: int, g: int, modulus: int) -> int:
    """Composite multiplier ``k**(g+1)`` in Z/l.

    Degree 0 contributes ``m -> k*m`` and each desuspension one more factor
    ``k``. Exponents below zero need ``k`` invertible mod l.
    """
    e = g + 1
    if e >= 0:
        return pow(k, e, modulus)
    if gcd(k, modulus) != 1:
        raise ValueError(f"{k} is not invertible modulo {modulus}")
    return pow(pow(k, -1, modulus), -e, modulus)


def clutch_adams(k: int, x: ClutchingClass) -> ClutchingClass:
    mult = clutch_multiplier(k, x.g, x.modulus)
    return ClutchingClass(x.modulus, (x.m * mult) % x.modulus, x.g)


def line_power_degree(modulus: int, m: int, k: int) -> int:
    """Clutching degree of ``L_m**k`` by repeated tensoring (degrees add)."""
    if k < 0:
        return line_power_degree(modulus, -m, -k)
    deg = 0
    for _ in range(k):
        deg = (deg + m) % modulus
    return deg


# ---------------------------------------------------------------------------
# e-invariant order bounds

@dataclass(frozen=True)
class EOrderBound:
    m: int
    exponents: dict = field(hash=False)
    bound: int
    ceiling: int
    warning: str | None = None


def _support(m: int, ceiling: int) -> list[int]:
    # any other prime misses 2^m - 1 or 3^m - 1, so k = 2 or 3 gives exponent 0
    extra = sympy.primefactors(gcd(2 ** m - 1, 3 ** m - 1))
    return sorted(set(sympy.primerange(2, ceiling + 1)) | set(extra))


def e_order_bound(m: int, kmax: int | None = None) -> EOrderBound:
    """Largest N such that every ``k**L * (k**m - 1)`` kills Z/N.

    ``e_p`` is the minimum of ``v_p(k**m - 1)`` over ``2 <= k <= kmax`` with
    ``p`` not dividing ``k``.
    """
    if m < 1:
        raise ValueError("m must be positive")
    kmax = scan_ceiling() if kmax is None else kmax
    if kmax < 3:
        raise ValueError("scan ceiling must be at least 3")
    warning = None
    if kmax < 50:
        warning = f"scan ceiling {kmax} is below 50; exponents may be overestimated"
        warnings.warn(warning, stacklevel=2)
    values = {k: k ** m - 1 for k in range(2, kmax + 1)}
    exponents = {}
    bound = 1
    for p in _support(m, kmax):
        e = min(vp(p, v) for k, v in values.items() if k % p)
        if e:
            exponents[p] = e
            bound *= p ** e
    return EOrderBound(m, exponents, bound, kmax, warning)


def e_order_gcd(m: int, kmax: int | None = None) -> int:
    """``gcd`` of ``k**L * (k**m - 1)`` over ``2 <= k <= kmax``.

    Independent of the per-prime scan; ``L = 2m + 2`` exceeds every exponent
    reachable by a k coprime to p, since those are at most ``log2(3**m)``.
    """
    if m < 1:
        raise ValueError("m must be positive")
    kmax = scan_ceiling() if kmax is None else kmax
    n = 0
    for k in range(2, kmax + 1):
        n = gcd(n, k ** (2 * m + 2) * (k ** m - 1))
    return n


def bernoulli_order(t: int) -> int:
    """Denominator of ``B_{2t} / 4t``."""
    if t < 1:
        raise ValueError("t must be positive")
    return (bernoulli(2 * t) / (4 * t)).denominator


# ---------------------------------------------------------------------------
# lens-space rho invariants

@dataclass(frozen=True)
class RhoSum:
    """Lens space ``S^{2m-1}/(Z/l)`` with rotation numbers ``a`` and the
    character ``chi(g) = zeta**c``."""

    l: int
    c: int
    a: tuple[int, ...]

    def __post_init__(self):
        if self.l < 2:
            raise ValueError("l must be at least 2")
        if not 1 <= self.c < self.l:
            raise ValueError("the character must be non-trivial: 1 <= c < l")
        if not self.a:
            raise ValueError("at least one rotation number is needed")
        for ai in self.a:
            if gcd(ai, self.l) != 1:
                raise ValueError(f"rotation number {ai} is not coprime to {self.l}")


@dataclass(frozen=True)
class LensRho:
    value: Fraction
    mod1: Fraction
    denominator_factors: tuple[tuple[int, int], ...]


def _summand(s: RhoSum) -> RationalFunction:
    # (z^c - 1) / prod (1 - z^{-a_i})
    return RationalFunction({s.c: Fraction(1), 0: Fraction(-1)},
                            tuple({0: Fraction(1), -ai: Fraction(-1)} for ai in s.a))


def lens_rho(s: RhoSum) -> LensRho:
    """``(1/l) * sum_{j=1}^{l-1} (zeta^{cj} - 1) prod_i (1 - zeta^{-a_i j})^{-1}``,
    summed exactly as Galois traces over the divisor levels of ``l``."""
    f = _summand(s)
    total = sum((cyclo_trace_sum(d, f) for d in divisor_levels(s.l)), Fraction(0))
    value = total / s.l
    r = mod1(value)
    return LensRho(value, r, factor_denominator(r))


def lens_rho_group_ring(s: RhoSum) -> Fraction:
    """Same sum evaluated in Q[z]/(z^l - 1).

    On non-trivial l-th roots ``w``, ``1/(1 - w) = -(1/l) sum_s s w^s``; the
    summand vanishes at ``z = 1``, so the average over all roots is the
    constant coefficient.
    """
    l = s.l
    poly = [Fraction(0)] * l
    poly[s.c % l] += 1
    poly[0] -= 1
    for ai in s.a:
        q = [Fraction(0)] * l
        for t in range(l):
            q[(-ai * t) % l] -= Fraction(t, l)
        out = [Fraction(0)] * l
        for i, x in enumerate(poly):
            if x:
                for j, y in enumerate(q):
                    if y:
                        out[(i + j) % l] += x * y
        poly = out
    return poly[0]


def denominator_divides_power_of(q, n: int) -> bool:
    den = Fraction(q).denominator
    g = gcd(den, n)
    while g > 1:
        den //= g
        g = gcd(den, n)
    return den == 1
