"""K-theory of split model spaces.

A :class:`Space` is a truncated cohomology ring together with named line
bundles, each given by its first Chern class (its *root*).  K-theory
classes are polynomials in the nilpotent coordinates ``u_L = [L] - 1``;
``u_L`` is killed at the nilpotency order of the root of ``L``, which is the
order forced on it by the truncation.  When several lines satisfy relations
this presentation has redundancy, so representatives are reduced modulo the
kernel of the Chern character; equal rational classes then have equal
representatives.

Bott periodicity is bookkeeping: a class of even degree ``d`` stands for
``b**(d/2) * x`` with ``x`` in degree zero, and a periodic cohomology class of
degree ``d`` with homogeneous parts ``h_{2j}`` stands for
``sum_j b**((d - 2j)/2) * h_{2j}``.  The Bott element ``b`` satisfies
``psi^k(b) = b / k``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd
from typing import Iterable, Mapping

from .exact_arith import bernoulli, nullspace, rref, solve_linear
from .graded_ring import (
    GradedElement,
    Relation,
    Ring,
    RingDescriptor,
    RingError,
    RingMap,
    exp_nilpotent,
    invert_unit,
    nilpotency_order,
    power_series,
)


class KTheoryError(ValueError):
    pass


# ---------------------------------------------------------------------------
# spaces and their K-rings

class Space:
    """Cohomology ring plus named line bundles ``name -> Chern root``."""

    def __init__(self, ring: Ring, lines: Mapping[str, GradedElement] | None = None,
                 name: str | None = None):
        self.ring = ring
        self.name = name or "X"
        self.lines: dict[str, GradedElement] = {}
        for line, root in (lines or {}).items():
            if root.ring != ring:
                raise KTheoryError(f"root of line {line!r} is not in the cohomology ring")
            if not root.is_homogeneous(2):
                raise KTheoryError(f"root of line {line!r} must be homogeneous of degree 2")
            self.lines[line] = root
        rels = []
        gens = []
        for line, root in self.lines.items():
            gens.append((f"u_{line}", 2))
            rels.append(Relation.make(f"u_{line}", nilpotency_order(root)))
        self.uring = Ring(RingDescriptor.make(gens, ring.truncation, rels))
        self._ch = RingMap(self.uring, ring, {
            f"u_{line}": exp_nilpotent(root) - 1 for line, root in self.lines.items()})
        self._kernel = self._ch_kernel()

    def _ch_kernel(self) -> list[tuple[tuple, dict]]:
        """Echelon basis of ``ker(ch)`` pivoting on the highest u-monomials."""
        umon = self.uring.monomial_basis()[::-1]
        hmon = self.ring.monomial_basis()
        images = [self._ch(self.uring.element({e: 1})).terms for e in umon]
        rows = [[img.get(h, 0) for img in images] for h in hmon]
        kernel = nullspace(rows, len(umon))
        if not kernel:
            return []
        reduced, pivots = rref(kernel)
        return [(umon[p], {umon[i]: c for i, c in enumerate(row) if c})
                for row, p in zip(reduced, pivots)]

    def canonical(self, upoly: GradedElement) -> GradedElement:
        """Representative of ``upoly`` modulo the kernel of ch."""
        if not self._kernel:
            return upoly
        terms = dict(upoly.terms)
        for pivot, vec in self._kernel:
            c = terms.get(pivot)
            if c:
                for e, v in vec.items():
                    w = terms.get(e, 0) - c * v
                    if w:
                        terms[e] = w
                    else:
                        terms.pop(e, None)
        return GradedElement(self.uring, terms)

    def __eq__(self, other):
        return (isinstance(other, Space) and other.ring == self.ring
                and other.lines.keys() == self.lines.keys()
                and all(other.lines[n] == r for n, r in self.lines.items()))

    def __hash__(self):
        return hash((self.ring, tuple(self.lines)))

    def __repr__(self):
        return f"Space({self.name}: {self.ring!r}, lines={list(self.lines)})"

    # -- elements -------------------------------------------------------
    def gen(self, name: str) -> GradedElement:
        return self.ring.gen(name)

    def u(self, line: str) -> GradedElement:
        return self.uring.gen(f"u_{line}")

    def kclass(self, upoly, degree: int = 0) -> "KClass":
        if isinstance(upoly, (int, Fraction)):
            upoly = self.uring.const(upoly)
        return KClass(self, upoly, degree)

    def k_one(self, degree: int = 0) -> "KClass":
        return self.kclass(1, degree)

    def line_coefficients(self, root: GradedElement) -> list[int]:
        """Integer ``c`` with ``root == sum c_i * root_i`` over the named lines."""
        if root.ring != self.ring or not root.is_homogeneous(2):
            raise KTheoryError("a line root must be a degree-2 class of this space")
        names = list(self.lines)
        for i, n in enumerate(names):
            if self.lines[n] == root:
                return [int(j == i) for j in range(len(names))]
        basis = self.ring.monomial_basis(2)
        if not basis:
            if root.is_zero():
                return [0] * len(names)
            raise KTheoryError("no degree-2 classes in this space")
        rows = [[self.lines[n].terms.get(b, 0) for n in names] for b in basis]
        sol = solve_linear(rows, [root.terms.get(b, 0) for b in basis]) if names else None
        if sol is None:
            if root.is_zero():
                return [0] * len(names)
            raise KTheoryError(f"{root} is not a combination of the named line roots")
        if any(c.denominator != 1 for c in sol):
            raise KTheoryError(f"{root} is not an integral combination of line roots")
        return [int(c) for c in sol]

    def line(self, root: GradedElement) -> "KClass":
        """K-class of the line bundle with first Chern class ``root``."""
        coeffs = self.line_coefficients(root)
        value = self.uring.one
        for name, c in zip(self.lines, coeffs):
            if c:
                value = value * (1 + self.u(name)) ** c
        return KClass(self, value, 0)

    def named_line(self, name: str) -> "KClass":
        if name not in self.lines:
            raise KTheoryError(f"unknown line bundle {name!r}")
        return KClass(self, 1 + self.u(name), 0)

    def ch_element(self, upoly: GradedElement) -> GradedElement:
        return self._ch(upoly)


def point() -> Space:
    return Space(Ring(RingDescriptor.make((), 0)), {}, name="pt")


def projective_space(n: int, generator: str = "h") -> Space:
    """CP^n with hyperplane class ``generator`` and its line bundle O(1)."""
    if n < 0:
        raise KTheoryError("dimension must be non-negative")
    ring = Ring(RingDescriptor.make([(generator, 2)], 2 * n,
                                    [Relation.make(generator, n + 1)]))
    return Space(ring, {generator: ring.gen(generator)}, name=f"CP{n}")


def product(*spaces: Space) -> Space:
    gens, rels, offsets = [], [], []
    total = sum(len(s.ring.names) for s in spaces)
    for s in spaces:
        offsets.append(len(gens))
        gens.extend(s.ring.descriptor.generators)
    for s, off in zip(spaces, offsets):
        pad = (off, total - off - s.ring.ngens)
        for rel in s.ring.descriptor.relations:
            tail = {(0,) * pad[0] + e + (0,) * pad[1]: c for e, c in rel.tail}
            rels.append(Relation.make(rel.lead, rel.power, tail))
    ring = Ring(RingDescriptor.make(gens, sum(s.ring.truncation for s in spaces), rels))
    lines = {}
    for s, off in zip(spaces, offsets):
        inc = s.ring.hom(ring, {n: ring.gen(n) for n in s.ring.names})
        for name, root in s.lines.items():
            if name in lines:
                raise KTheoryError(f"line name {name!r} occurs twice")
            lines[name] = inc(root)
    return Space(ring, lines, name="x".join(s.name for s in spaces))


# ---------------------------------------------------------------------------
# classes

class HPClass:
    """Periodic rational cohomology class of even degree ``degree``."""

    __slots__ = ("ring", "degree", "element")

    def __init__(self, ring: Ring, degree: int, element: GradedElement):
        if degree % 2:
            raise KTheoryError("only even degrees are modelled")
        if element.ring != ring:
            raise KTheoryError("element lives in a different ring")
        self.ring = ring
        self.degree = degree
        self.element = element

    @classmethod
    def from_components(cls, ring: Ring, degree: int, components: Mapping[int, GradedElement]):
        total = ring.zero
        for j, c in components.items():
            if not c.is_homogeneous(2 * j):
                raise KTheoryError(f"component {j} is not homogeneous of degree {2 * j}")
            total = total + c
        return cls(ring, degree, total)

    @property
    def components(self) -> dict[int, GradedElement]:
        return {d // 2: self.element.component(d // 2) for d in sorted(self.element.degrees())}

    def component(self, j: int) -> GradedElement:
        return self.element.component(j)

    def component_list(self) -> list[GradedElement]:
        return [self.element.component(j) for j in range(self.ring.truncation // 2 + 1)]

    def _coerce(self, other):
        if isinstance(other, HPClass):
            if other.ring != self.ring:
                raise KTheoryError("classes live on different spaces")
            return other
        if isinstance(other, (int, Fraction)):
            return HPClass(self.ring, self.degree, self.ring.const(other))
        if isinstance(other, GradedElement):
            return HPClass(self.ring, 0, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.degree != self.degree:
            if other.element.is_zero():
                return self
            if self.element.is_zero():
                return other
            raise KTheoryError(f"cannot add classes of degrees {self.degree} and {other.degree}")
        return HPClass(self.ring, self.degree, self.element + other.element)

    __radd__ = __add__

    def __neg__(self):
        return HPClass(self.ring, self.degree, -self.element)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return HPClass(self.ring, self.degree, self.element.scale(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return HPClass(self.ring, self.degree + other.degree, self.element * other.element)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = HPClass(self.ring, 0, self.ring.one)
        for _ in range(n):
            out = out * self
        return out

    def inverse(self) -> "HPClass":
        return HPClass(self.ring, -self.degree, invert_unit(self.element))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.degree == 0 and self.element == other
        if not isinstance(other, HPClass):
            return NotImplemented
        return (self.ring == other.ring and self.degree == other.degree
                and self.element == other.element)

    def __hash__(self):
        return hash((self.degree, self.element))

    def is_zero(self) -> bool:
        return self.element.is_zero()

    def __str__(self):
        return str(self.element)

    def __repr__(self):
        return f"HPClass(deg={self.degree}: {self.element})"

    def to_json(self) -> dict:
        return {"kind": "HP", "degree": self.degree,
                "components": [str(c) for c in self.component_list()]}


class KClass:
    """K-theory class ``b**(degree/2) * upoly``; its Chern character is
    computed once at construction."""

    __slots__ = ("space", "upoly", "degree", "_ch")

    def __init__(self, space: Space, upoly: GradedElement, degree: int = 0):
        if degree % 2:
            raise KTheoryError("odd K-groups are not modelled")
        if upoly.ring != space.uring:
            raise KTheoryError("u-polynomial does not belong to this space")
        self.space = space
        self.upoly = space.canonical(upoly)
        self.degree = degree
        self._ch = HPClass(space.ring, degree, space.ch_element(upoly))

    @property
    def ch(self) -> HPClass:
        return self._ch

    def _coerce(self, other):
        if isinstance(other, KClass):
            if other.space != self.space:
                raise KTheoryError("classes live on different spaces")
            return other
        if isinstance(other, (int, Fraction)):
            return KClass(self.space, self.space.uring.const(other), self.degree)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.degree != self.degree:
            if other.upoly.is_zero():
                return self
            if self.upoly.is_zero():
                return other
            raise KTheoryError(f"cannot add classes of degrees {self.degree} and {other.degree}")
        return KClass(self.space, self.upoly + other.upoly, self.degree)

    __radd__ = __add__

    def __neg__(self):
        return KClass(self.space, -self.upoly, self.degree)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return KClass(self.space, self.upoly.scale(other), self.degree)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return KClass(self.space, self.upoly * other.upoly, self.degree + other.degree)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return KClass(self.space, self.upoly ** n, self.degree * n)

    def inverse(self) -> "KClass":
        return KClass(self.space, invert_unit(self.upoly), -self.degree)

    def augmentation(self) -> Fraction:
        return self.upoly.augmentation()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.degree == 0 and self.upoly == other
        if not isinstance(other, KClass):
            return NotImplemented
        return (self.space == other.space and self.degree == other.degree
                and self.upoly == other.upoly)

    def __hash__(self):
        return hash((self.degree, self.upoly))

    def same_class(self, other: "KClass") -> bool:
        """Equality of Chern characters; agrees with ``==``."""
        return self.ch == other.ch

    def __str__(self):
        return str(self.upoly)

    def __repr__(self):
        return f"KClass(deg={self.degree}: {self.upoly})"

    def to_json(self) -> dict:
        return {"kind": "K", "degree": self.degree, "upoly": str(self.upoly)}


@dataclass(frozen=True)
class Bundle:
    """Complex vector bundle presented by its Chern roots plus trivial summands."""

    space: Space
    roots: tuple[GradedElement, ...]
    rank: int

    def __post_init__(self):
        for r in self.roots:
            if r.ring != self.space.ring or not r.is_homogeneous(2):
                raise KTheoryError("Chern roots must be degree-2 classes of the space")
        if self.rank < len(self.roots):
            raise KTheoryError("rank is smaller than the number of roots")

    @classmethod
    def of(cls, space: Space, roots: Iterable[GradedElement], rank: int | None = None):
        roots = tuple(roots)
        return cls(space, roots, len(roots) if rank is None else rank)

    @classmethod
    def trivial(cls, space: Space, rank: int) -> "Bundle":
        return cls(space, (), rank)

    def __add__(self, other: "Bundle") -> "Bundle":
        if other.space != self.space:
            raise KTheoryError("bundles live on different spaces")
        return Bundle(self.space, self.roots + other.roots, self.rank + other.rank)

    def is_negation_symmetric(self) -> bool:
        pool = list(self.roots)
        while pool:
            r = pool.pop()
            if r.is_zero():
                continue
            try:
                pool.remove(-r)
            except ValueError:
                return False
        return True


# ---------------------------------------------------------------------------
# maps between model spaces

class Pullback:
    """The map ``g^*`` induced by a map of model spaces ``g: target -> source``,
    given by the images of the source's cohomology generators."""

    def __init__(self, source: Space, target: Space, images: Mapping[str, GradedElement]):
        self.source = source
        self.target = target
        self.hmap = source.ring.hom(target.ring, images)
        self._umap = RingMap(source.uring, target.uring, {
            f"u_{n}": target.line(self.hmap(root)).upoly - 1
            for n, root in source.lines.items()})

    def __call__(self, x):
        if isinstance(x, GradedElement):
            return self.hmap(x)
        if isinstance(x, HPClass):
            return HPClass(self.target.ring, x.degree, self.hmap(x.element))
        if isinstance(x, KClass):
            if x.space != self.source:
                raise KTheoryError("class does not live on the source space")
            return KClass(self.target, self._umap(x.upoly), x.degree)
        if isinstance(x, Bundle):
            return Bundle(self.target, tuple(self.hmap(r) for r in x.roots), x.rank)
        raise TypeError(f"cannot pull back {type(x).__name__}")

    def then(self, other: "Pullback") -> "Pullback":
        return Pullback(self.source, other.target,
                        {n: other.hmap(img) for n, img in self.hmap.images.items()})


# ---------------------------------------------------------------------------
# operations

def ch(x: KClass) -> HPClass:
    return x.ch


def _check_k(k: int):
    if not isinstance(k, int) or isinstance(k, bool):
        raise KTheoryError("Adams index must be an integer")
    if k == 0:
        raise KTheoryError("k = 0 is not supported by localized Adams operations; "
                           "use augmentation() for psi^0")


@lru_cache(maxsize=256)
def adams_substitution(space: Space, k: int) -> RingMap:
    """The ring endomorphism ``u -> (1+u)**k - 1`` of the u-ring."""
    _check_k(k)
    uring = space.uring
    return RingMap(uring, uring, {g: (1 + uring.gen(g)) ** k - 1 for g in uring.names})


def adams(k: int, x: KClass) -> KClass:
    _check_k(k)
    if k == 1:
        return x
    upoly = adams_substitution(x.space, k)(x.upoly)
    return KClass(x.space, upoly.scale(Fraction(k) ** (-(x.degree // 2))), x.degree)


def psi0(x: KClass) -> Fraction:
    """The rank map (the degenerate Adams operation at k = 0)."""
    if x.degree:
        raise KTheoryError("rank is only defined in degree 0")
    return x.augmentation()


def adams_H(k: int, omega: HPClass) -> HPClass:
    """Scale the degree-2j component by ``k**(j - degree/2)``."""
    _check_k(k)
    if k == 1:
        return omega
    ring = omega.ring
    half = omega.degree // 2
    kk = Fraction(k)
    scaled = omega.element.map_terms(
        lambda e, c: c * kk ** (ring.monomial_degree(e) // 2 - half))
    return HPClass(ring, omega.degree, scaled)


def todd_coefficient(n: int) -> Fraction:
    # x / (1 - exp(-x)) = sum (-1)^n B_n x^n / n!
    return Fraction((-1) ** n) * bernoulli(n) / factorial(n)


def todd_factor(root: GradedElement) -> GradedElement:
    return power_series(root, todd_coefficient)


def acgenus(bundle: Bundle) -> HPClass:
    ring = bundle.space.ring
    value = ring.one
    for r in bundle.roots:
        value = value * todd_factor(r)
    return HPClass(ring, 0, value)


def _rho_line(k: int, line: KClass) -> GradedElement:
    L = line.upoly
    if k == 1:
        return L.ring.one
    if k == -1:
        return invert_unit(L)
    theta = L.ring.zero
    for i in range(k):
        theta = theta + L ** i
    return (L ** (k - 1) * invert_unit(theta)).scale(k)


def rho(k: int, bundle: Bundle) -> KClass:
    """Cannibalistic class, ``k * L**(k-1) / (1 + L + ... + L**(k-1))`` per line."""
    if k not in (-1,) and k < 1:
        raise KTheoryError("rho^k is defined for k = -1 and k >= 1")
    space = bundle.space
    value = space.uring.one
    if k != 1:
        for r in bundle.roots:
            value = value * _rho_line(k, space.line(r))
    return KClass(space, value, 0)


def zk_membership(x: KClass, k: int) -> bool:
    """True iff every coefficient of the representative lies in Z[1/k]."""
    k = abs(k)
    for c in x.upoly.coefficients():
        den = c.denominator
        if k > 1:
            g = gcd(den, k)
            while g > 1:
                den //= g
                g = gcd(den, k)
        if den != 1:
            return False
    return True


def adams_preimage(k: int, target: KClass, max_steps: int | None = None) -> KClass:
    """Solve ``adams(k, z) == target`` (rationally) for a unit target with
    augmentation 1, by descending the filtration: if ``adams(k, z) - target``
    starts in degree ``2n`` subtract ``1/k**n`` times it from ``z``."""
    if k < 2:
        raise KTheoryError("adams_preimage needs k >= 2")
    if target.degree != 0 or target.augmentation() != 1:
        raise KTheoryError("target must be a degree-0 class with augmentation 1")
    space = target.space
    z = space.k_one()
    steps = max_steps if max_steps is not None else space.ring.truncation // 2 + 2
    for _ in range(steps):
        d = adams(k, z) - target
        low = d.ch.element.low_degree()
        if low is None:
            return z
        n = low // 2
        z = z - d * Fraction(1, k ** n)
    raise KTheoryError("filtration descent did not terminate")


# ---------------------------------------------------------------------------
# sampling helpers shared by the CLI tasks and the test-suite

def random_kclass(space: Space, rng: random.Random, degree: int | None = None,
                  density: float = 0.6, coeff_range: int = 3) -> KClass:
    basis = space.uring.monomial_basis()
    terms = {}
    for e in basis:
        if rng.random() < density:
            num = rng.randint(-coeff_range, coeff_range)
            den = rng.choice((1, 1, 1, 2, 3))
            if num:
                terms[e] = Fraction(num, den)
    if degree is None:
        degree = 2 * rng.randint(-2, 2)
    return KClass(space, space.uring.element(terms), degree)


def random_unit(space: Space, rng: random.Random, coeff_range: int = 3) -> KClass:
    x = random_kclass(space, rng, 0, coeff_range=coeff_range)
    return x - x.augmentation() + 1


def random_root(space: Space, rng: random.Random, coeff_range: int = 2) -> GradedElement:
    root = space.ring.zero
    for root_i in space.lines.values():
        root = root + root_i.scale(rng.randint(-coeff_range, coeff_range))
    return root


def random_bundle(space: Space, rng: random.Random, max_roots: int = 4) -> Bundle:
    n = rng.randint(0, max_roots)
    roots = [random_root(space, rng) for _ in range(n)]
    return Bundle.of(space, roots, n + rng.randint(0, 2))


def kclass_basis(space: Space, degree: int = 0) -> list[KClass]:
    return [KClass(space, space.uring.element({e: 1}), degree)
            for e in space.uring.monomial_basis()]


def basis_label(x: KClass) -> str:
    return str(x.upoly)
