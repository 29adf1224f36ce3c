"""Exact rational arithmetic helpers: Bernoulli numbers, p-adic valuations,
small dense-polynomial routines and cyclotomic field elements.

Rationals are :class:`fractions.Fraction` throughout; the module never
touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Iterable, Mapping, Sequence

import sympy

Rational = Fraction

__all__ = [
    "Rational",
    "CycloElement",
    "RationalFunction",
    "bernoulli",
    "bernoulli_akiyama_tanigawa",
    "cyclo_trace_sum",
    "cyclotomic_poly",
    "format_rational",
    "parse_rational",
    "nullspace",
    "rref",
    "solve_linear",
    "vp",
]


def format_rational(q) -> str:
    """Wire form of a rational: ``"p/q"``, or ``"p"`` when ``q == 1``."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    num, _, den = text.strip().partition("/")
    if den:
        return Fraction(int(num), int(den))
    return Fraction(int(num))


# ---------------------------------------------------------------------------
# Bernoulli numbers

@lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> tuple[Fraction, ...]:
    table = [Fraction(1)]
    for m in range(1, n + 1):
        # sum_{j=0}^{m} C(m+1, j) B_j = 0
        s = sum(comb(m + 1, j) * table[j] for j in range(m))
        table.append(-s / (m + 1))
    return tuple(table)


def bernoulli(n: int) -> Fraction:
    """B_n with the convention B_1 = -1/2."""
    if n < 0:
        raise ValueError("bernoulli index must be non-negative")
    return _bernoulli_table(n)[n]


def bernoulli_akiyama_tanigawa(n: int) -> Fraction:
    # Independent route (B_1 = +1/2 convention internally, flipped on exit).
    if n < 0:
        raise ValueError("bernoulli index must be non-negative")
    a = [Fraction(1, m + 1) for m in range(n + 1)]
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return -a[0] if n == 1 else a[0]


# ---------------------------------------------------------------------------
# valuations

def vp(p: int, q) -> int:
    """p-adic valuation of a nonzero rational."""
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    q = Fraction(q)
    if q == 0:
        raise ValueError("valuation of zero is undefined")
    return sympy.multiplicity(p, q.numerator) - sympy.multiplicity(p, q.denominator)


# ---------------------------------------------------------------------------
# linear algebra over Q

def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns (zero rows dropped)."""
    m = [[Fraction(v) for v in row] for row in rows]
    n_cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def solve_linear(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Return one solution of ``rows @ x = rhs`` or ``None`` if inconsistent.

    Free variables are set to zero.
    """
    n_cols = len(rows[0]) if rows else 0
    reduced, pivots = rref([list(row) + [b] for row, b in zip(rows, rhs)])
    if n_cols in pivots:
        return None
    x = [Fraction(0)] * n_cols
    for row, c in zip(reduced, pivots):
        x[c] = row[-1]
    return x


def nullspace(rows: Sequence[Sequence], n_cols: int) -> list[list[Fraction]]:
    """A basis of ``{x : rows @ x = 0}``."""
    reduced, pivots = rref(rows) if rows else ([], [])
    basis = []
    for free in (c for c in range(n_cols) if c not in pivots):
        v = [Fraction(0)] * n_cols
        v[free] = Fraction(1)
        for row, c in zip(reduced, pivots):
            v[c] = -row[free]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# dense polynomials over Q, lowest degree first

def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_sub(a, b) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim([Fraction(v) for v in out])


def poly_divmod(a, b) -> tuple[list[Fraction], list[Fraction]]:
    b = _trim([Fraction(v) for v in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = _trim([Fraction(v) for v in a])
    q = [Fraction(0)] * max(len(r) - len(b) + 1, 0)
    lead = b[-1]
    while len(r) >= len(b):
        shift = len(r) - len(b)
        f = r[-1] / lead
        q[shift] = f
        for i, v in enumerate(b):
            r[shift + i] -= f * v
        _trim(r)
    return _trim(q), r


def poly_inverse_mod(a, modulus) -> list[Fraction] | None:
    """Inverse of ``a`` modulo ``modulus`` by extended Euclid, or ``None``."""
    r0, r1 = _trim([Fraction(v) for v in modulus]), poly_divmod(a, modulus)[1]
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, rem = poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, poly_sub(s0, poly_mul(q, s1))
    if len(r0) != 1:
        return None
    c = r0[0]
    return [v / c for v in s0]


# ---------------------------------------------------------------------------
# cyclotomic fields

@lru_cache(maxsize=None)
def cyclotomic_poly(d: int) -> tuple[Fraction, ...]:
    """Coefficients of the d-th cyclotomic polynomial, lowest degree first."""
    z = sympy.Symbol("z")
    coeffs = sympy.Poly(sympy.cyclotomic_poly(d, z), z).all_coeffs()
    return tuple(Fraction(int(c)) for c in reversed(coeffs))


def _ramanujan_sum(d: int, i: int) -> int:
    # trace of zeta_d^i over Q
    g = gcd(i, d)
    return int(sum(int(sympy.mobius(d // e)) * e for e in sympy.divisors(g)))


@dataclass(frozen=True)
class CycloElement:
    """Element of Q(zeta_d) in the power basis 1, zeta, ..., zeta^{phi(d)-1}."""

    level: int
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        phi = len(cyclotomic_poly(self.level)) - 1
        if len(self.coords) != phi:
            raise ValueError(f"expected {phi} coordinates at level {self.level}")

    @classmethod
    def from_poly(cls, d: int, coeffs: Sequence) -> "CycloElement":
        mod = cyclotomic_poly(d)
        rem = poly_divmod([Fraction(c) for c in coeffs], mod)[1]
        phi = len(mod) - 1
        return cls(d, tuple(rem) + (Fraction(0),) * (phi - len(rem)))

    @classmethod
    def from_laurent(cls, d: int, terms: Mapping[int, Fraction]) -> "CycloElement":
        dense = [Fraction(0)] * d
        for e, c in terms.items():
            dense[e % d] += Fraction(c)
        return cls.from_poly(d, dense)

    def _check(self, other: "CycloElement"):
        if other.level != self.level:
            raise ValueError("cyclotomic levels differ")

    def __add__(self, other):
        self._check(other)
        return CycloElement(self.level, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return CycloElement(self.level, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElement(self.level, tuple(a * other for a in self.coords))
        self._check(other)
        return CycloElement.from_poly(self.level, poly_mul(self.coords, other.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def inverse(self) -> "CycloElement":
        inv = poly_inverse_mod(list(self.coords), cyclotomic_poly(self.level))
        if inv is None:
            raise ZeroDivisionError(f"not invertible at level {self.level}: {self}")
        return CycloElement.from_poly(self.level, inv)

    def trace(self) -> Fraction:
        return sum((c * _ramanujan_sum(self.level, i) for i, c in enumerate(self.coords)),
                   Fraction(0))


@dataclass(frozen=True)
class RationalFunction:
    """``numerator / prod(denominators)`` with Laurent polynomials given as
    ``{exponent: coefficient}`` maps (negative exponents allowed)."""

    numerator: Mapping[int, Fraction]
    denominators: tuple[Mapping[int, Fraction], ...] = ()

    def evaluate(self, d: int) -> CycloElement:
        value = CycloElement.from_laurent(d, self.numerator)
        for factor in self.denominators:
            den = CycloElement.from_laurent(d, factor)
            if den.is_zero():
                raise ZeroDivisionError(
                    f"denominator factor {dict(factor)} vanishes at a primitive {d}-th root")
            value = value * den.inverse()
        return value


def cyclo_trace_sum(d: int, f: RationalFunction) -> Fraction:
    """Sum of ``f(zeta)`` over all primitive d-th roots of unity."""
    if d < 1:
        raise ValueError("level must be positive")
    return f.evaluate(d).trace()


def divisor_levels(n: int) -> Iterable[int]:
    return (d for d in sympy.divisors(n) if d > 1)
