"""Truncated commutative polynomial algebras over Q in even-degree generators.

A ring is presented by generators of even positive degree, a truncation
degree ``2N`` and at most one relation per generator of the form
``g**e = tail``.  The tail may only involve ``g`` (to a power below ``e``)
and generators listed *before* ``g``.  With the lead terms being pure powers
of distinct generators this is a Groebner basis for the lexicographic order
in which later generators are more significant, so reduction terminates and
normal forms are unique.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from math import factorial
from typing import Callable, Iterable, Iterator, Mapping

from .exact_arith import format_rational

Exponents = tuple[int, ...]
Terms = dict[Exponents, Fraction]


class RingError(ValueError):
    pass


@dataclass(frozen=True)
class Relation:
    lead: str
    power: int
    tail: tuple[tuple[Exponents, Fraction], ...] = ()

    @classmethod
    def make(cls, lead: str, power: int, tail: Mapping[Exponents, object] | None = None):
        items = tuple(sorted((tuple(e), Fraction(c)) for e, c in (tail or {}).items() if c))
        return cls(lead, power, items)


@dataclass(frozen=True)
class RingDescriptor:
    generators: tuple[tuple[str, int], ...]
    truncation: int
    relations: tuple[Relation, ...] = ()

    @classmethod
    def make(cls, generators, truncation, relations=()):
        return cls(tuple((str(n), int(d)) for n, d in generators), int(truncation),
                   tuple(relations))


def make_space(descriptor: RingDescriptor) -> "Ring":
    return Ring(descriptor)


class Ring:
    """Handle for a truncated graded ring; elements are :class:`GradedElement`."""

    def __init__(self, descriptor: RingDescriptor):
        self.descriptor = descriptor
        names = [n for n, _ in descriptor.generators]
        if len(set(names)) != len(names):
            raise RingError("duplicate generator names")
        for name, deg in descriptor.generators:
            if deg <= 0 or deg % 2:
                raise RingError(f"generator {name!r} has degree {deg}; "
                                "only even positive degrees are supported")
        if descriptor.truncation < 0 or descriptor.truncation % 2:
            raise RingError("truncation must be a non-negative even integer")
        self.names: tuple[str, ...] = tuple(names)
        self.degrees: tuple[int, ...] = tuple(d for _, d in descriptor.generators)
        self.index = {n: i for i, n in enumerate(names)}
        self.truncation = descriptor.truncation
        self._powers: dict[int, tuple[int, Terms]] = {}
        for rel in descriptor.relations:
            self._add_relation(rel)
        self._nf_cache: dict[Exponents, Terms] = {}

    def _add_relation(self, rel: Relation):
        if rel.lead not in self.index:
            raise RingError(f"relation for unknown generator {rel.lead!r}")
        i = self.index[rel.lead]
        if i in self._powers:
            raise RingError(f"more than one relation for {rel.lead!r}")
        if rel.power < 1:
            raise RingError("relation power must be positive")
        target = rel.power * self.degrees[i]
        tail: Terms = {}
        for exps, c in rel.tail:
            if len(exps) != len(self.names):
                raise RingError("tail exponent vector has wrong length")
            if self.monomial_degree(exps) != target:
                raise RingError(f"relation tail for {rel.lead!r} is not of degree {target}")
            if exps[i] >= rel.power:
                raise RingError(f"relation for {rel.lead!r} is not monic: tail has "
                                f"{rel.lead}^{exps[i]}")
            if any(e for e in exps[i + 1:]):
                raise RingError(f"relation tail for {rel.lead!r} involves a later generator")
            tail[exps] = c
        self._powers[i] = (rel.power, tail)

    # -- basic structure ------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Ring) and other.descriptor == self.descriptor

    def __hash__(self):
        return hash(self.descriptor)

    def __repr__(self):
        return f"Ring({', '.join(self.names)}; trunc={self.truncation})"

    @property
    def ngens(self) -> int:
        return len(self.names)

    def monomial_degree(self, exps: Exponents) -> int:
        return sum(e * d for e, d in zip(exps, self.degrees))

    def zero_exps(self) -> Exponents:
        return (0,) * len(self.names)

    # -- normal form ------------------------------------------------------
    def _reduce_monomial(self, exps: Exponents) -> Terms:
        cached = self._nf_cache.get(exps)
        if cached is not None:
            return cached
        if self.monomial_degree(exps) > self.truncation:
            out: Terms = {}
        else:
            # reduce the most significant offending generator first
            offend = next((i for i in reversed(range(len(exps)))
                           if i in self._powers and exps[i] >= self._powers[i][0]), None)
            if offend is None:
                out = {exps: Fraction(1)}
            else:
                power, tail = self._powers[offend]
                rest = list(exps)
                rest[offend] -= power
                out = {}
                for texps, c in tail.items():
                    sub = tuple(a + b for a, b in zip(rest, texps))
                    for e2, c2 in self._reduce_monomial(sub).items():
                        v = out.get(e2, 0) + c * c2
                        if v:
                            out[e2] = v
                        else:
                            out.pop(e2, None)
        self._nf_cache[exps] = out
        return out

    def reduce(self, terms: Mapping[Exponents, object]) -> Terms:
        out: Terms = {}
        for exps, c in terms.items():
            c = Fraction(c)
            if not c:
                continue
            for e2, c2 in self._reduce_monomial(tuple(exps)).items():
                v = out.get(e2, 0) + c * c2
                if v:
                    out[e2] = v
                else:
                    out.pop(e2, None)
        return out

    def is_normal_monomial(self, exps: Exponents) -> bool:
        if self.monomial_degree(exps) > self.truncation:
            return False
        return all(exps[i] < p for i, (p, _) in self._powers.items())

    # -- constructors --------------------------------------------------------
    def element(self, terms: Mapping[Exponents, object] | None = None) -> "GradedElement":
        return GradedElement(self, self.reduce(terms or {}))

    def const(self, q) -> "GradedElement":
        return self.element({self.zero_exps(): Fraction(q)})

    @property
    def one(self) -> "GradedElement":
        return self.const(1)

    @property
    def zero(self) -> "GradedElement":
        return GradedElement(self, {})

    def gen(self, name: str) -> "GradedElement":
        if name not in self.index:
            raise RingError(f"unknown generator {name!r}")
        exps = [0] * self.ngens
        exps[self.index[name]] = 1
        return self.element({tuple(exps): 1})

    def gens(self) -> tuple["GradedElement", ...]:
        return tuple(self.gen(n) for n in self.names)

    def monomial_basis(self, degree: int | None = None) -> list[Exponents]:
        """Normal monomials (of the given degree, or all up to truncation)."""
        bounds = []
        for i, d in enumerate(self.degrees):
            top = self.truncation // d
            if i in self._powers:
                top = min(top, self._powers[i][0] - 1)
            bounds.append(range(top + 1))
        out = [e for e in iproduct(*bounds) if self.monomial_degree(e) <= self.truncation]
        if degree is not None:
            out = [e for e in out if self.monomial_degree(e) == degree]
        return sorted(out, key=lambda e: (self.monomial_degree(e), tuple(-x for x in e)))

    def hom(self, target: "Ring", images: Mapping[str, "GradedElement"]) -> "RingMap":
        return RingMap(self, target, dict(images))

    def format_monomial(self, exps: Exponents) -> str:
        parts = []
        for name, e in zip(self.names, exps):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        return "*".join(parts)


class GradedElement:
    """An element of a :class:`Ring`, always in normal form."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Terms):
        self.ring = ring
        self.terms = terms

    # -- coercion -------------------------------------------------------
    def _coerce(self, other) -> "GradedElement":
        if isinstance(other, GradedElement):
            if other.ring != self.ring:
                raise RingError("elements live in different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return GradedElement(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedElement(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q) -> "GradedElement":
        q = Fraction(q)
        if not q:
            return self.ring.zero
        return GradedElement(self.ring, {e: c * q for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        trunc = ring.truncation
        acc: Terms = {}
        right = [(e, c, ring.monomial_degree(e)) for e, c in other.terms.items()]
        for e1, c1 in self.terms.items():
            d1 = ring.monomial_degree(e1)
            for e2, c2, d2 in right:
                if d1 + d2 > trunc:
                    continue
                prod = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                for e3, c3 in ring._reduce_monomial(prod).items():
                    v = acc.get(e3, 0) + c * c3
                    if v:
                        acc[e3] = v
                    else:
                        acc.pop(e3, None)
        return GradedElement(ring, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return invert_unit(self) ** (-n)
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- grading -----------------------------------------------------------
    def augmentation(self) -> Fraction:
        return self.terms.get(self.ring.zero_exps(), Fraction(0))

    def degrees(self) -> set[int]:
        return {self.ring.monomial_degree(e) for e in self.terms}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        ds = self.degrees()
        if not ds:
            return True
        return len(ds) == 1 and (degree is None or ds == {degree})

    def component(self, j: int) -> "GradedElement":
        """Homogeneous part of degree ``2j``."""
        md = self.ring.monomial_degree
        return GradedElement(self.ring, {e: c for e, c in self.terms.items() if md(e) == 2 * j})

    def filtration_cut(self, l: int) -> "GradedElement":
        """Keep only components of degree ``>= l``."""
        md = self.ring.monomial_degree
        return GradedElement(self.ring, {e: c for e, c in self.terms.items() if md(e) >= l})

    def low_degree(self) -> int | None:
        ds = self.degrees()
        return min(ds) if ds else None

    def map_terms(self, fn: Callable[[Exponents, Fraction], Fraction]) -> "GradedElement":
        out = {}
        for e, c in self.terms.items():
            v = fn(e, c)
            if v:
                out[e] = v
        return GradedElement(self.ring, out)

    def coefficients(self) -> Iterator[Fraction]:
        return iter(self.terms.values())

    # -- display -------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        md = self.ring.monomial_degree
        return sorted(self.terms.items(), key=lambda t: (md(t[0]), tuple(-e for e in t[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for exps, c in self.sorted_terms():
            mono = self.ring.format_monomial(exps)
            mag = abs(c)
            if not mono:
                body = format_rational(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_rational(mag)}*{mono}"
            if not pieces:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append((" - " if c < 0 else " + ") + body)
        return "".join(pieces)

    def __repr__(self):
        return f"GradedElement({self})"


class RingMap:
    """Ring homomorphism determined by images of generators.

    Images of monomials are memoised, so repeated application is a sparse
    linear map.
    """

    def __init__(self, source: Ring, target: Ring, images: Mapping[str, GradedElement]):
        self.source = source
        self.target = target
        self.images = dict(images)
        missing = set(source.names) - set(self.images)
        if missing:
            raise RingError(f"no image for generators {sorted(missing)}")
        for name, img in self.images.items():
            if not isinstance(img, GradedElement) or img.ring != target:
                raise RingError(f"image of {name!r} must live in the target ring")
        self._gen_images = [self.images[n] for n in source.names]
        self._mono: dict[Exponents, GradedElement] = {source.zero_exps(): target.one}

    def _monomial(self, exps: Exponents) -> GradedElement:
        img = self._mono.get(exps)
        if img is None:
            i = next(i for i in reversed(range(len(exps))) if exps[i])
            lower = list(exps)
            lower[i] -= 1
            img = self._monomial(tuple(lower)) * self._gen_images[i]
            self._mono[exps] = img
        return img

    def __call__(self, x: GradedElement) -> GradedElement:
        if x.ring != self.source:
            raise RingError("element does not live in the source ring")
        acc: Terms = {}
        for exps, c in x.terms.items():
            for e, v in self._monomial(exps).terms.items():
                w = acc.get(e, 0) + c * v
                if w:
                    acc[e] = w
                else:
                    acc.pop(e, None)
        return GradedElement(self.target, acc)

    def respects_relations(self) -> bool:
        """True iff every defining relation maps to zero in the target."""
        free = Ring(RingDescriptor(self.source.descriptor.generators, self.source.truncation))
        lift = RingMap(free, self.target, self.images)
        for rel in self.source.descriptor.relations:
            exps = [0] * free.ngens
            exps[free.index[rel.lead]] = rel.power
            lhs = free.element({tuple(exps): 1}) - free.element(dict(rel.tail))
            if not lift(lhs).is_zero():
                return False
        return True

    def then(self, other: "RingMap") -> "RingMap":
        if other.source != self.target:
            raise RingError("maps are not composable")
        return RingMap(self.source, other.target, {n: other(img) for n, img in self.images.items()})


# ---------------------------------------------------------------------------
# unit and nilpotent series

def _nilpotent_series(n: GradedElement, coeff: Callable[[int], Fraction]) -> GradedElement:
    """sum_{i>=0} coeff(i) * n**i, finite because n has no constant term."""
    acc = n.ring.zero
    power = n.ring.one
    i = 0
    while not power.is_zero():
        c = coeff(i)
        if c:
            acc = acc + power.scale(c)
        power = power * n
        i += 1
    return acc


def normal_form(e: GradedElement) -> GradedElement:
    """Re-reduce ``e``; elements are kept reduced, so this is idempotent."""
    return GradedElement(e.ring, e.ring.reduce(e.terms))


def component(e: GradedElement, j: int) -> GradedElement:
    return e.component(j)


def filtration_cut(e: GradedElement, l: int) -> GradedElement:
    return e.filtration_cut(l)


def invert_unit(e: GradedElement) -> GradedElement:
    c = e.augmentation()
    if not c:
        raise RingError("non-unit: augmentation is zero")
    nil = e.scale(1 / c) - 1
    return _nilpotent_series(nil, lambda i: Fraction((-1) ** i)).scale(1 / c)


def exp_nilpotent(e: GradedElement) -> GradedElement:
    if e.augmentation():
        raise RingError("exp requires augmentation 0")
    return _nilpotent_series(e, lambda i: Fraction(1, factorial(i)))


def log_unit(e: GradedElement) -> GradedElement:
    if e.augmentation() != 1:
        raise RingError("log requires augmentation 1")
    return _nilpotent_series(e - 1, lambda i: Fraction((-1) ** (i + 1), i) if i else Fraction(0))


def power_series(e: GradedElement, coeffs: Callable[[int], Fraction]) -> GradedElement:
    """Evaluate ``sum coeffs(i) e**i`` for nilpotent ``e``."""
    if e.augmentation():
        raise RingError("series evaluation requires augmentation 0")
    return _nilpotent_series(e, coeffs)


def nilpotency_order(e: GradedElement) -> int:
    """Smallest ``n >= 1`` with ``e**n == 0`` (``e`` must have augmentation 0)."""
    if e.augmentation():
        raise RingError("element is not nilpotent")
    n, p = 1, e
    while not p.is_zero():
        p = p * e
        n += 1
    return n


def free_ring(generators: Iterable[tuple[str, int]], truncation: int) -> Ring:
    return Ring(RingDescriptor.make(generators, truncation))
