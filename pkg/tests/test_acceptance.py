"""Acceptance matrix: one test per criterion, each with its runtime bound.

Run ``pytest tests/test_acceptance.py`` (a PASS/FAIL line per criterion is
printed in the summary) or ``python tests/test_acceptance.py``.
"""

import itertools
import random
import sys
import time
from contextlib import contextmanager
from math import gcd

import pytest

from adams_calc.fgl import morphism_holds
from adams_calc.k_calculus import (
    Bundle,
    acgenus,
    adams,
    adams_H,
    adams_preimage,
    ch,
    kclass_basis,
    product,
    projective_space,
    random_bundle,
    random_kclass,
    random_unit,
    rho,
    zk_membership,
)
from adams_calc.pushforward import (
    EPSILON,
    calibrate_epsilon,
    compose_fibrations,
    make_projective_bundle,
    projective_fibration,
    push_K,
    verify_adams_rr,
)
from adams_calc.torsion import (
    ClutchingClass,
    RhoSum,
    bernoulli_order,
    clutch_adams,
    denominator_divides_power_of,
    e_order_bound,
    lens_rho,
    lens_rho_group_ring,
    line_power_degree,
)

RESULTS: list[str] = []
KS = [-1, 2, 3, 5]
SAMPLES = 200


@contextmanager
def criterion(n: int, title: str, limit: float):
    t0 = time.perf_counter()
    status = "FAIL"
    try:
        yield
        elapsed = time.perf_counter() - t0
        status = "PASS" if elapsed < limit else "FAIL"
        assert elapsed < limit, f"criterion {n} took {elapsed:.1f}s (limit {limit}s)"
    finally:
        elapsed = time.perf_counter() - t0
        RESULTS.append(f"criterion {n:2d} {status}: {title} [{elapsed:.2f}s < {limit:g}s]")


def _spaces():
    base = projective_space(1, "y")
    hirz = make_projective_bundle(base, [0, base.gen("y")]).total
    return {
        "CP1": projective_space(1),
        "CP2": projective_space(2),
        "CP3": projective_space(3),
        "CP1xCP1": product(projective_space(1, "a"), projective_space(1, "b")),
        "P(O+O(1))": hirz,
    }


def _fibrations():
    cp1, cp2 = projective_space(1, "y"), projective_space(2, "y")
    y1, y2 = cp1.gen("y"), cp2.gen("y")
    hirz = make_projective_bundle(cp1, [0, y1])
    tower = make_projective_bundle(hirz.total, [0, hirz.total.gen("h")], generator="g")
    return {
        "CP1": projective_fibration(1),
        "CP2": projective_fibration(2),
        "CP3": projective_fibration(3),
        "CP1 over CP1 (y, -2y)": make_projective_bundle(cp1, [y1, -2 * y1]),
        "CP1 over CP1 (0, y)": hirz,
        "CP1 over CP2": make_projective_bundle(cp2, [0, y2]),
        "CP2 over CP1": make_projective_bundle(cp1, [0, y1, -y1]),
        "CP2 over CP2": make_projective_bundle(cp2, [0, y2, 2 * y2]),
        "composite": compose_fibrations(tower, hirz),
    }


def test_criterion_01_adams_chern_commutation():
    with criterion(1, "ch o psi^k = psi^k_H o ch", 30):
        for i, space in enumerate(_spaces().values()):
            rng = random.Random(100 + i)
            xs = [random_kclass(space, rng) for _ in range(SAMPLES)]
            for k in KS:
                for x in xs:
                    assert ch(adams(k, x)) == adams_H(k, ch(x))


def test_criterion_02_composition_and_ring_laws():
    with criterion(2, "psi^k psi^l = psi^kl, ring homomorphism", 30):
        for i, space in enumerate(_spaces().values()):
            rng = random.Random(200 + i)
            xs = [random_kclass(space, rng) for _ in range(SAMPLES)]
            ys = [random_kclass(space, rng, degree=0) for _ in range(SAMPLES)]
            for k in KS:
                assert adams(k, space.k_one()) == space.k_one()
                for x, y in zip(xs, ys):
                    assert adams(k, x * y) == adams(k, x) * adams(k, y)
                    z = space.kclass(y.upoly, x.degree)
                    assert adams(k, x + z) == adams(k, x) + adams(k, z)
                for l in KS:
                    for x in xs:
                        assert adams(k, adams(l, x)) == adams(k * l, x)


def test_criterion_03_rho_properties():
    spaces = list(_spaces().values()) + [projective_space(6)]
    assert max(s.ring.truncation for s in spaces) == 12
    with criterion(3, "rho^k properties 1-4", 60):
        for i, space in enumerate(spaces):
            rng = random.Random(300 + i)
            for k in KS:
                for _ in range(40):
                    v, w = random_bundle(space, rng, 4), random_bundle(space, rng, 4)
                    assert rho(k, v + w) == rho(k, v) * rho(k, w)
                    assert rho(k, Bundle.trivial(space, v.rank)) == 1
                    r = rho(k, v)
                    assert r * r.inverse() == 1 and zk_membership(r, k)
                    assert ch(r) * acgenus(v) == adams_H(k, acgenus(v))


def test_criterion_04_adams_riemann_roch():
    with criterion(4, "Adams-Riemann-Roch on all fibrations, full basis", 300):
        assert calibrate_epsilon() == EPSILON
        f = projective_fibration(1)
        r = verify_adams_rr(f, 2, f.total.k_one())
        assert r.status == "verified" and str(r.lhs) == str(r.rhs) == "2"
        for name, f in _fibrations().items():
            for k in KS:
                for degree in (0, -2):
                    for x in kclass_basis(f.total, degree):
                        rep = verify_adams_rr(f, k, x)
                        assert rep.status == "verified", (name, k, str(x))


def test_criterion_05_push_forward_sanity():
    with criterion(5, "push_K against Todd genera", 5):
        cp1, cp2 = projective_fibration(1), projective_fibration(2)
        a = push_K(cp1, cp1.total.k_one())
        b = push_K(cp2, cp2.total.k_one())
        c = push_K(cp1, cp1.total.named_line("h"))
        assert (a.degree, str(a)) == (-2, "1")
        assert (b.degree, str(b)) == (-4, "1")
        assert (c.degree, str(c)) == (-2, "2")


def test_criterion_06_e_invariant_bounds():
    with criterion(6, "e_order_bound(2t) = bernoulli_order(t)", 10):
        expected = [24, 240, 504, 480, 264, 65520]
        assert [bernoulli_order(t) for t in range(1, 7)] == expected
        assert [e_order_bound(2 * t).bound for t in range(1, 7)] == expected


def test_criterion_07_clutching():
    with criterion(7, "clutching substitution, k^g scaling, composition", 5):
        for l in range(2, 25):
            for k in range(1, 8):
                gen0 = clutch_adams(k, ClutchingClass.make(l, 1, 0)).m
                for m in range(l):
                    x = ClutchingClass.line_difference(l, m)
                    assert clutch_adams(k, x).m == (k * m) % l == line_power_degree(l, m, k)
                for g in range(4):
                    assert clutch_adams(k, ClutchingClass.make(l, 1, g)).m == k ** g * gen0 % l
                    for k2 in range(1, 8):
                        for m in range(l):
                            x = ClutchingClass.make(l, m, g)
                            assert clutch_adams(k2, clutch_adams(k, x)) == clutch_adams(k * k2, x)


def test_criterion_08_lens_rho_torsion():
    with criterion(8, "lens rho denominators are powers of l", 60):
        for l in (2, 3, 4, 5, 8, 9):
            units = [a for a in range(1, l) if gcd(a, l) == 1]
            for m in (1, 2):
                for c in range(1, l):
                    for a in itertools.combinations_with_replacement(units, m):
                        s = RhoSum(l, c, a)
                        r = lens_rho(s)
                        assert denominator_divides_power_of(r.mod1, l)
                        if l <= 5:
                            assert r.value == lens_rho_group_ring(s)


def test_criterion_09_adams_preimage():
    with criterion(9, "psi^k(adams_preimage(k, t)) = t", 10):
        spaces = list(_spaces().values())
        rng = random.Random(900)
        count = 0
        for k in (2, 3):
            for i in range(60):
                t = random_unit(spaces[i % len(spaces)], rng)
                assert adams(k, adams_preimage(k, t)) == t
                count += 1
        assert count >= 100


def test_criterion_10_fgl_morphism():
    with criterion(10, "F_{b/k}(kx, ky) = k F_b(x, y) at order 10", 5):
        for k in (2, 3, 5):
            assert morphism_holds(k, 10)


if __name__ == "__main__":
    code = pytest.main([__file__, "-q"])
    print("\n".join(RESULTS))
    sys.exit(code)
