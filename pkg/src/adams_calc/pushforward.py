"""Projective-bundle fibrations, integration over the fibre and the
Adams-Riemann-Roch check.

The K-theoretic push-forward is defined rationally through the Chern
character: ``ch(pi_!(x)) = pi_!^H(Td(T_v) * ch(x))``.  Vertical bundles use
the ``T_v + 1`` presentation, i.e. the ``n + 1`` roots ``h + a_i`` of a
``CP^n``-bundle ``P(O(a_0) + ... + O(a_n))``; the Todd class and the
cannibalistic class do not see the extra trivial summand.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .graded_ring import GradedElement, Relation, Ring, RingDescriptor
from .k_calculus import (
    Bundle,
    HPClass,
    KClass,
    KTheoryError,
    Pullback,
    Space,
    acgenus,
    adams,
    adams_H,
    point,
    rho,
)

# Exponent of rho^k(T_v) in the Riemann-Roch identity, fixed by
# calibrate_epsilon() on CP^1 and frozen here.
EPSILON = 1


class FibrationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Fibration:
    base: Space
    total: Space
    fiber: tuple[tuple[str, int], ...]
    vertical_roots: tuple[GradedElement, ...]
    pullback: Pullback
    epsilon: int = EPSILON
    name: str = field(default="")

    @property
    def dim(self) -> int:
        """Complex fibre dimension."""
        return sum(n for _, n in self.fiber)

    @property
    def vertical(self) -> Bundle:
        return Bundle.of(self.total, self.vertical_roots)

    def with_epsilon(self, epsilon: int) -> "Fibration":
        return Fibration(self.base, self.total, self.fiber, self.vertical_roots,
                         self.pullback, epsilon, self.name)


def _pad(exps, before: int, after: int):
    return (0,) * before + tuple(exps) + (0,) * after


def make_projective_bundle(base: Space, twists: Sequence, generator: str = "h",
                           epsilon: int = EPSILON, name: str = "") -> Fibration:
    """``P(O(a_0) + ... + O(a_n)) -> base`` with fibre generator ``generator``."""
    if not twists:
        raise FibrationError("a projective bundle needs at least one twist")
    bring = base.ring
    if generator in bring.names:
        raise FibrationError(f"generator {generator!r} already used by the base")
    tw = []
    for a in twists:
        if isinstance(a, (int, Fraction)) and a == 0:
            a = bring.zero
        if not isinstance(a, GradedElement) or a.ring != bring or not a.is_homogeneous(2):
            raise FibrationError("twists must be degree-2 classes of the base")
        tw.append(a)
    n = len(tw) - 1
    gens = tuple(bring.descriptor.generators) + ((generator, 2),)
    trunc = bring.truncation + 2 * n
    base_rels = tuple(Relation.make(r.lead, r.power, {_pad(e, 0, 1): c for e, c in r.tail})
                      for r in bring.descriptor.relations)
    free_h = Ring(RingDescriptor.make(gens, trunc, base_rels))
    inc = bring.hom(free_h, {g: free_h.gen(g) for g in bring.names})
    h = free_h.gen(generator)
    poly = free_h.one
    for a in tw:
        poly = poly * (h + inc(a))
    top = _pad((), bring.ngens, 0) + (n + 1,)
    tail = {e: -c for e, c in poly.terms.items() if e != top}
    ring = Ring(RingDescriptor.make(gens, trunc, base_rels + (
        Relation.make(generator, n + 1, tail),)))
    up = bring.hom(ring, {g: ring.gen(g) for g in bring.names})
    lines = {ln: up(r) for ln, r in base.lines.items()}
    if generator in lines:
        raise FibrationError(f"line name {generator!r} already used by the base")
    lines[generator] = ring.gen(generator)
    total = Space(ring, lines, name=f"P({base.name})" if base.ring.ngens else f"CP{n}")
    hh = ring.gen(generator)
    roots = tuple(hh + up(a) for a in tw)
    pull = Pullback(base, total, {g: ring.gen(g) for g in bring.names})
    return Fibration(base, total, ((generator, n),), roots, pull, epsilon, name)


def projective_fibration(n: int, generator: str = "h") -> Fibration:
    """``CP^n -> pt``."""
    return make_projective_bundle(point(), [0] * (n + 1), generator)


def compose_fibrations(p: Fibration, q: Fibration) -> Fibration:
    """The composite ``E_p -> E_q -> B`` of ``p`` over ``q``'s total space."""
    if p.base != q.total:
        raise FibrationError("base of the first fibration is not the total space of the second")
    if p.epsilon != q.epsilon:
        raise FibrationError("fibrations use different orientation conventions")
    roots = p.vertical_roots + tuple(p.pullback(r) for r in q.vertical_roots)
    return Fibration(q.base, p.total, q.fiber + p.fiber, roots,
                     q.pullback.then(p.pullback), p.epsilon,
                     f"{p.name}o{q.name}" if p.name or q.name else "")


def push_H(f: Fibration, omega: HPClass) -> HPClass:
    """Integration over the fibre: coefficient of the top fibre monomial."""
    tring = f.total.ring
    if omega.ring != tring:
        raise FibrationError("class does not live on the total space")
    bring = f.base.ring
    fpos = [(tring.index[g], n) for g, n in f.fiber]
    bpos = [tring.index[g] for g in bring.names]
    terms = {}
    for exps, c in omega.element.terms.items():
        if all(exps[i] == n for i, n in fpos):
            key = tuple(exps[i] for i in bpos)
            terms[key] = terms.get(key, 0) + c
    return HPClass(bring, omega.degree - 2 * f.dim, bring.element(terms))


def push_K(f: Fibration, x: KClass) -> HPClass:
    """Chern character of ``pi_!(x)``, defined by the Riemann-Roch square."""
    if x.space != f.total:
        raise FibrationError("class does not live on the total space")
    return push_H(f, acgenus(f.vertical) * x.ch)


@dataclass(frozen=True)
class RRReport:
    identity: str
    k: int
    input: str
    lhs: HPClass
    rhs: HPClass
    status: str
    elapsed: float
    epsilon: int

    def to_dict(self) -> dict:
        return {"identity": self.identity, "k": self.k, "input": self.input,
                "lhs": str(self.lhs), "rhs": str(self.rhs), "status": self.status,
                "epsilon": self.epsilon}


def adams_rr_sides(f: Fibration, k: int, x: KClass, epsilon: int | None = None):
    eps = f.epsilon if epsilon is None else epsilon
    if eps not in (1, -1):
        raise FibrationError("epsilon must be +1 or -1")
    lhs = adams_H(k, push_K(f, x))
    r = rho(k, f.vertical)
    twist = r if eps == 1 else r.inverse()
    rhs = push_K(f, twist * adams(k, x))
    return lhs, rhs


def verify_adams_rr(f: Fibration, k: int, x: KClass, epsilon: int | None = None) -> RRReport:
    """Check ``psi^k(pi_! x) == pi_!(rho^k(T_v)**eps * psi^k(x))`` exactly."""
    t0 = time.perf_counter()
    lhs, rhs = adams_rr_sides(f, k, x, epsilon)
    status = "verified" if lhs == rhs else "counterexample"
    return RRReport("adams-rr", k, str(x.upoly), lhs, rhs, status,
                    time.perf_counter() - t0, f.epsilon if epsilon is None else epsilon)


def calibrate_epsilon() -> int:
    """Pick the exponent of rho that makes the identity hold on CP^1, k = 2, x = 1."""
    cp1 = projective_fibration(1)
    one = cp1.total.k_one()
    good = [eps for eps in (1, -1) if verify_adams_rr(cp1, 2, one, eps).status == "verified"]
    if len(good) != 1:
        raise KTheoryError(f"calibration is ambiguous: {good}")
    return good[0]
