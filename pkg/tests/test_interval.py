"""Outward-rounded interval arithmetic and the rigorous enclosures of the
residual system and its certificate Jacobian."""

from fractions import Fraction

import numpy as np
import pytest

from ccbc import nbody
from ccbc.interval import (
    Interval,
    IntervalBox,
    IntervalCollisionError,
    IntervalDomainError,
    iv_jacobian_g,
    iv_residuals,
)
from ccbc.nbody import Problem

from .conftest import equilateral_triangle


class TestArithmetic:
    def test_add(self):
        r = Interval(1, 2) + Interval(3, 4)
        assert r.lo <= 4 <= 6 <= r.hi
        assert r.width - 2 < 4e-15

    def test_mul_case_analysis(self):
        r = Interval(-1, 2) * Interval(3, 4)
        assert r.lo <= -4 and r.hi >= 8
        assert r.width - 12 < 1e-14

    def test_sqrt(self):
        r = Interval(4, 9).sqrt()
        assert r.lo <= 2 <= 3 <= r.hi
        assert r.width - 1 < 1e-15

    def test_div_through_zero_rejected(self):
        with pytest.raises(IntervalDomainError):
            Interval(1, 2) / Interval(-1, 1)

    def test_sqrt_negative_rejected(self):
        with pytest.raises(IntervalDomainError):
            Interval(-1, 1).sqrt()

    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            Interval(2, 1)

    def test_width_monotone_under_widening(self):
        a, b = Interval(0.3, 0.7), Interval(1.1, 1.9)
        wide = Interval(0.2, 0.8)
        assert (wide * b).width >= (a * b).width
        assert (wide + b).width >= (a + b).width


def _rand_interval(rng):
    a, b = sorted(rng.uniform(-10, 10, size=2))
    return Interval(a, b)


class TestContainmentFuzz:
    def test_hundred_thousand_cases(self):
        """Exact rational results of random ops lie inside the float
        enclosures (soundness of the one-ulp outward rounding)."""
        rng = np.random.default_rng(42)
        violations = 0
        for _ in range(25_000):
            a = _rand_interval(rng)
            b = _rand_interval(rng)
            ta = Fraction(rng.uniform(a.lo, a.hi)).limit_denominator(10**12)
            tb = Fraction(rng.uniform(b.lo, b.hi)).limit_denominator(10**12)
            ta = min(max(ta, Fraction(a.lo)), Fraction(a.hi))
            tb = min(max(tb, Fraction(b.lo)), Fraction(b.hi))
            for res, exact in (
                (a + b, ta + tb),
                (a - b, ta - tb),
                (a * b, ta * tb),
                (a.sqr(), ta * ta),
            ):
                if not (Fraction(res.lo) <= exact <= Fraction(res.hi)):
                    violations += 1
        assert violations == 0

    def test_division_containment(self):
        rng = np.random.default_rng(7)
        for _ in range(2_000):
            a = _rand_interval(rng)
            lo = rng.uniform(0.1, 5.0)
            b = Interval(lo, lo + rng.uniform(0.0, 3.0))
            ta = Fraction(rng.uniform(a.lo, a.hi)).limit_denominator(10**12)
            ta = min(max(ta, Fraction(a.lo)), Fraction(a.hi))
            tb = Fraction(rng.uniform(b.lo, b.hi)).limit_denominator(10**12)
            tb = min(max(tb, Fraction(b.lo)), Fraction(b.hi))
            res = a / b
            assert Fraction(res.lo) <= ta / tb <= Fraction(res.hi)


class TestResidualEnclosure:
    def test_point_box_brackets_root(self):
        p = Problem(3)
        q = equilateral_triangle()
        comps = iv_residuals(p, IntervalBox.from_point(q))
        for c in comps:
            assert c.contains(0.0)
            assert c.width < 1e-12

    def test_point_box_brackets_point_evaluation(self):
        p = Problem(4, sigma_y=0.6)
        rng = np.random.default_rng(11)
        q = rng.uniform(-0.8, 0.8, size=8)
        f = nbody.residuals(p, q)
        for c, v in zip(iv_residuals(p, IntervalBox.from_point(q)), f):
            assert c.lo <= v <= c.hi

    def test_small_radius_contains_zero(self):
        p = Problem(3)
        box = IntervalBox.from_point_radius(equilateral_triangle(), 1e-8)
        assert all(c.contains(0.0) for c in iv_residuals(p, box))

    def test_width_monotone_in_radius(self):
        p = Problem(3)
        q = equilateral_triangle()
        w_small = [
            c.width for c in iv_residuals(p, IntervalBox.from_point_radius(q, 1e-8))
        ]
        w_large = [
            c.width for c in iv_residuals(p, IntervalBox.from_point_radius(q, 1e-6))
        ]
        assert all(wl >= ws for wl, ws in zip(w_large, w_small))

    def test_collision_inside_box(self):
        p = Problem(2)
        q = np.array([-1e-9, 0.0, 1e-9, 0.0])
        with pytest.raises(IntervalCollisionError):
            iv_residuals(p, IntervalBox.from_point_radius(q, 1e-8))


class TestJacobianEnclosure:
    def test_midpoint_matches_finite_differences(self):
        p = Problem(3)
        q = equilateral_triangle()
        jg = iv_jacobian_g(p, IntervalBox.from_point(q), mode="balanced")

        def g(x):
            jac = nbody.residual_jacobian(p, x)
            return jac.T @ nbody.residuals(p, x)

        h = 1e-6
        fd = np.empty((p.dim, p.dim))
        for i in range(p.dim):
            e = np.zeros(p.dim)
            e[i] = h
            fd[:, i] = (g(q + e) - g(q - e)) / (2 * h)
        assert np.abs(jg.midpoint - fd).max() / np.abs(fd).max() < 1e-6

    def test_zero_radius_delta_tiny(self):
        p = Problem(3)
        jg = iv_jacobian_g(
            p, IntervalBox.from_point(equilateral_triangle()), mode="balanced"
        )
        widths = [iv.width for row in jg.delta for iv in row]
        assert max(widths) < 1e-10

    def test_enclosure_monotone_in_radius(self):
        p = Problem(3)
        q = equilateral_triangle()
        small = iv_jacobian_g(p, IntervalBox.from_point_radius(q, 1e-9), mode="central")
        large = iv_jacobian_g(p, IntervalBox.from_point_radius(q, 1e-7), mode="central")
        for row_s, row_l in zip(small.enclosure, large.enclosure):
            for s, l in zip(row_s, row_l):
                assert l.lo <= s.lo + 1e-13 and l.hi >= s.hi - 1e-13
