"""The multiplicative formal group law ``x + y + b*x*y`` over Q[b, 1/b].

Series are truncated in the total (x, y)-degree and carry the exponent of
the Bott element ``b`` in each term.  The Adams operation acts on them by
``x -> k*x, b -> b/k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .exact_arith import format_rational

Key = tuple[int, int, int]  # (x-exponent, y-exponent, b-exponent)


def _binom(k, i: int) -> Fraction:
    out = Fraction(1)
    for j in range(i):
        out = out * (k - j) / (j + 1)
    return out


@dataclass(frozen=True)
class BSeries:
    terms: Mapping[Key, Fraction]
    order: int

    @classmethod
    def make(cls, terms, order: int) -> "BSeries":
        clean = {}
        for (i, j, e), c in terms.items():
            c = Fraction(c)
            if c and i + j <= order:
                clean[(i, j, e)] = clean.get((i, j, e), 0) + c
        return cls({k: v for k, v in clean.items() if v}, order)

    @classmethod
    def x(cls, order: int) -> "BSeries":
        return cls.make({(1, 0, 0): 1}, order)

    @classmethod
    def y(cls, order: int) -> "BSeries":
        return cls.make({(0, 1, 0): 1}, order)

    @classmethod
    def const(cls, c, order: int) -> "BSeries":
        return cls.make({(0, 0, 0): c}, order)

    def __add__(self, other: "BSeries") -> "BSeries":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BSeries.make(out, min(self.order, other.order))

    def __neg__(self):
        return BSeries({k: -c for k, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q) -> "BSeries":
        return BSeries.make({k: c * q for k, c in self.terms.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, BSeries):
            return self.scale(other)
        order = min(self.order, other.order)
        out: dict[Key, Fraction] = {}
        for (i1, j1, e1), c1 in self.terms.items():
            for (i2, j2, e2), c2 in other.terms.items():
                if i1 + j1 + i2 + j2 <= order:
                    key = (i1 + i2, j1 + j2, e1 + e2)
                    out[key] = out.get(key, 0) + c1 * c2
        return BSeries.make(out, order)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BSeries":
        out = BSeries.const(1, self.order)
        for _ in range(n):
            out = out * self
        return out

    def shift_b(self, n: int) -> "BSeries":
        return BSeries({(i, j, e + n): c for (i, j, e), c in self.terms.items()}, self.order)

    def substitute(self, x: "BSeries", y: "BSeries | None" = None) -> "BSeries":
        """Composition ``F(x(.), y(.))``; ``x`` and ``y`` must have no constant term."""
        for s in (x, y):
            if s is not None and any(i + j == 0 for i, j, _ in s.terms):
                raise ValueError("substituted series must vanish at the origin")
        order = min(self.order, x.order, y.order if y is not None else self.order)
        xp, yp = [BSeries.const(1, order)], [BSeries.const(1, order)]
        out = BSeries.make({}, order)
        for (i, j, e), c in self.terms.items():
            if j and y is None:
                raise ValueError("two-variable series needs a y substitution")
            while len(xp) <= i:
                xp.append(xp[-1] * x)
            while len(yp) <= j:
                yp.append(yp[-1] * y)
            out = out + (xp[i] * yp[j]).shift_b(e).scale(c)
        return out

    def psi(self, k: int) -> "BSeries":
        """Apply ``x -> kx, y -> ky, b -> b/k`` termwise."""
        kk = Fraction(k)
        return BSeries.make({(i, j, e): c * kk ** (i + j - e)
                             for (i, j, e), c in self.terms.items()}, self.order)

    def rescale_b(self, q) -> "BSeries":
        q = Fraction(q)
        return BSeries.make({(i, j, e): c * q ** e for (i, j, e), c in self.terms.items()},
                            self.order)

    def is_homogeneous(self) -> bool:
        """All terms have the same weight ``i + j - e`` (x, y weight 1, b weight 1)."""
        return len({i + j - e for i, j, e in self.terms}) <= 1

    def __str__(self):
        if not self.terms:
            return "0"
        out = ""
        for (i, j, e), c in sorted(self.terms.items(), key=lambda t: (t[0][0] + t[0][1], -t[0][0], t[0][2])):
            mono = "*".join(s for s in (_pw("b", e), _pw("x", i), _pw("y", j)) if s)
            mag = abs(c)
            body = format_rational(mag) if not mono else (
                mono if mag == 1 else f"{format_rational(mag)}*{mono}")
            if not out:
                out = body if c > 0 else f"-{body}"
            else:
                out += f" {'+' if c > 0 else '-'} {body}"
        return out


def _pw(name: str, e: int) -> str:
    if e == 0:
        return ""
    return name if e == 1 else f"{name}^{e}"


def fgl_sum(x: BSeries, y: BSeries) -> BSeries:
    b = BSeries.make({(0, 0, 1): 1}, min(x.order, y.order))
    return x + y + b * x * y


def fgl_law(order: int) -> BSeries:
    """``F_b(x, y) = x + y + bxy`` as a two-variable series."""
    return fgl_sum(BSeries.x(order), BSeries.y(order))


def fgl_k_series(k: int, order: int) -> BSeries:
    """``((1 + bx)**k - 1) / b`` truncated at x-degree ``order``."""
    return BSeries.make({(i, 0, i - 1): _binom(k, i) for i in range(1, order + 1)}, order)


def fgl_iterated_sum(k: int, order: int) -> BSeries:
    """k-fold formal sum ``x +_F ... +_F x`` (independent route to the k-series)."""
    if k < 1:
        raise ValueError("iterated sum needs k >= 1")
    x = BSeries.x(order)
    acc = x
    for _ in range(k - 1):
        acc = fgl_sum(acc, x)
    return acc


def morphism_holds(k: int, order: int) -> bool:
    """``F_{b/k}(kx, ky) == k * F_b(x, y)``."""
    law = fgl_law(order)
    lhs = law.rescale_b(Fraction(1, k)).substitute(BSeries.x(order).scale(k),
                                                   BSeries.y(order).scale(k))
    return lhs == law.scale(k) and law.psi(k) == law.scale(k)


def k_series_is_endomorphism(k: int, order: int) -> bool:
    """``[k](F(x, y)) == F([k]x, [k]y)``."""
    law = fgl_law(order)
    ks = fgl_k_series(k, order)
    lhs = ks.substitute(law)
    rhs = law.substitute(ks, ks.substitute(BSeries.y(order)))
    return lhs == rhs
