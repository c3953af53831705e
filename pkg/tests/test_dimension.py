import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynrays import (BoxCount, CoverGeneration, DegenerateFit, DomainError, MapSpec,
                     OverflowGuard, ParabolaSpec, box_counting_dimension, box_counts,
                     cover_measure, cover_refinement, middle_third, product_square,
                     self_similarity_dimension)
from dynrays.dimension import cumulative_slopes

import oracles

SINH = MapSpec.sinh(1)
LOG2_LOG3 = float(mpmath.log(2) / mpmath.log(3))
LOG4_LOG3 = float(mpmath.log(4) / mpmath.log(3))
# gen1/gen0 ratio for p = 2, xi = seed = 20, d = 1.6; cross-checked against
# the continuum oracle (agreement 3e-5, the boundary-cell fraction)
RATIO_20_16 = 0.07067369684563317


class TestSelfSimilarity:
    def test_examples(self):
        assert abs(self_similarity_dimension(4, 1 / 3) - LOG4_LOG3) <= 1e-12
        assert self_similarity_dimension(2, 1 / 2) == 1.0
        assert abs(self_similarity_dimension(2, 1 / 3) - LOG2_LOG3) <= 1e-12
        assert abs(self_similarity_dimension(4, 1 / 3) - 1.26) < 0.005

    @pytest.mark.parametrize("n,s", [(1, 0.5), (2, 0), (2, 1), (2.5, 0.3), (3, -0.1)])
    def test_domain(self, n, s):
        with pytest.raises(DomainError):
            self_similarity_dimension(n, s)


def cantor_points(depth):
    return middle_third(depth).lo


def exact_cantor_points(depth):
    return [(lo,) for lo, _ in oracles.cantor_exact([Fraction(1, 3)] * depth, depth)]


class TestBoxCounts:
    def test_three_points(self):
        assert box_counts([0, 0.5, 1], [0.5]) == [BoxCount(0.5, 3)]

    def test_cantor_counts_exact(self):
        scales = [3.0 ** -m for m in range(1, 9)]
        counts = box_counts(cantor_points(8), scales)
        exact = exact_cantor_points(8)
        for m, c in enumerate(counts, start=1):
            assert c.count == 2 ** m
            assert c.count == oracles.box_count_exact(exact, Fraction(1, 3 ** m))

    def test_product_counts_exact(self):
        base = middle_third(8)
        corners = product_square(base).corners()
        scales = [3.0 ** -m for m in range(1, 9)]
        counts = box_counts(corners, scales)
        assert [c.count for c in counts] == [4 ** m for m in range(1, 9)]
        exact = [(x[0], y[0]) for x in exact_cantor_points(5) for y in exact_cantor_points(5)]
        assert all(oracles.box_count_exact(exact, Fraction(1, 3 ** m)) == 4 ** m
                   for m in range(1, 6))

    def test_input_validation(self):
        with pytest.raises(DomainError):
            box_counts([0.1], [0.5, 0.5])
        with pytest.raises(DomainError):
            box_counts([0.1], [0.1, 0.5])
        with pytest.raises(DomainError):
            box_counts([], [0.5])
        with pytest.raises(DomainError):
            box_counts([0.1], [0.0])

    @settings(max_examples=200)
    @given(st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10)), min_size=1, max_size=60),
           st.floats(1e-3, 1))
    def test_monotone_under_halving(self, pts, s):
        z = np.array([complex(x, y) for x, y in pts])
        a, b = box_counts(z, [s, s / 2])
        assert b.count >= a.count

    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=40), st.floats(1e-2, 5))
    def test_matches_exact_brute_force(self, xs, s):
        got = box_counts(xs, [s])[0].count
        want = oracles.box_count_exact([(Fraction(x),) for x in xs], Fraction(s))
        # the implementation snaps values within 1e-9 of a grid line onto it
        near = any(abs(x / s - round(x / s)) <= 1e-9 * max(1, abs(x / s)) for x in xs)
        assert got == want or near


class TestBoxDimension:
    def test_filled_segment(self):
        pts = np.arange(256) / 256
        counts = box_counts(pts, [2.0 ** -m for m in range(1, 9)])
        slope, r2 = box_counting_dimension(counts)
        assert abs(slope - 1) <= 1e-9 and abs(r2 - 1) <= 1e-12

    def test_cantor_slope(self):
        counts = box_counts(cantor_points(8), [3.0 ** -m for m in range(1, 9)])
        slope, r2 = box_counting_dimension(counts)
        assert abs(slope - LOG2_LOG3) <= 1e-9
        assert abs(slope - self_similarity_dimension(2, 1 / 3)) <= 1e-9

    def test_product_slope(self):
        corners = product_square(middle_third(8)).corners()
        slope, _ = box_counting_dimension(box_counts(corners, [3.0 ** -m for m in range(1, 9)]))
        assert abs(slope - LOG4_LOG3) <= 1e-9
        assert abs(slope - self_similarity_dimension(4, 1 / 3)) <= 1e-9

    def test_isolated_points_tail_slope_zero(self):
        rng = np.random.default_rng(2)
        pts = rng.uniform(0, 1, (10, 2))
        dmin = min(np.hypot(*(pts[i] - pts[j])) for i in range(10) for j in range(i))
        scales = [dmin / 2 ** (m + 1) for m in range(6)]
        counts = box_counts(pts, scales)
        assert all(c.count == 10 for c in counts)
        slope, _ = box_counting_dimension(counts)
        assert abs(slope) <= 1e-9

    def test_degenerate(self):
        with pytest.raises(DegenerateFit):
            box_counting_dimension([BoxCount(2.0 ** -m, 2 ** m) for m in range(3)])
        with pytest.raises(DegenerateFit):
            box_counting_dimension([BoxCount(0.5, 2)] * 4)
        with pytest.raises(DegenerateFit):
            box_counting_dimension([BoxCount(2.0 ** -m, 0) for m in range(5)])

    def test_cumulative(self):
        counts = box_counts(cantor_points(6), [3.0 ** -m for m in range(1, 7)])
        s = cumulative_slopes(counts)
        assert s[:3] == [None] * 3
        assert all(abs(v - LOG2_LOG3) <= 1e-9 for v in s[3:])


class TestCoverMeasure:
    def test_examples(self):
        assert cover_measure(CoverGeneration.from_boxes(0, 2.0, [0j], [1.0])) == 1.0
        four = CoverGeneration.from_boxes(1, LOG4_LOG3, [0j] * 4, [1 / 3] * 4)
        assert abs(cover_measure(four) - 1) <= 1e-12

    @given(st.lists(st.floats(1e-6, 10), min_size=1, max_size=50),
           st.floats(0.01, 100), st.floats(0.1, 3))
    def test_scaling(self, diams, t, d):
        a = cover_measure(CoverGeneration.from_boxes(0, d, [0j] * len(diams), diams))
        b = cover_measure(CoverGeneration.from_boxes(0, d, [0j] * len(diams),
                                                     [t * x for x in diams]))
        assert abs(b - t ** d * a) <= 1e-12 * b

    def test_rejects_nonpositive_diameter(self):
        with pytest.raises(DomainError):
            CoverGeneration.from_boxes(0, 1.5, [0j, 0j], [1.0, 0.0])


class TestCoverRefinement:
    def test_generation_zero(self):
        (g0,) = cover_refinement(SINH, ParabolaSpec(2, 20), 20, 0, 1.6)
        assert g0.n_boxes == 1
        assert abs(g0.measure_sum - (math.pi * math.sqrt(2)) ** 1.6) <= 1e-12 * g0.measure_sum
        c = g0.boxes[0][0]
        assert c.real == 20 + math.pi / 2 and abs(c.imag - math.pi) < 1e-15

    @pytest.mark.parametrize("d,below", [(1.6, True), (1.4, False)])
    def test_dichotomy(self, d, below):
        g0, g1 = cover_refinement(SINH, ParabolaSpec(2, 20), 20, 1, d)
        assert (g1.measure_sum < g0.measure_sum) == below

    def test_regression_and_continuum_oracle(self):
        g0, g1 = cover_refinement(SINH, ParabolaSpec(2, 20), 20, 1, 1.6)
        ratio = g1.measure_sum / g0.measure_sum
        assert abs(ratio - RATIO_20_16) <= 1e-9 * RATIO_20_16
        n_cont, r_cont = oracles.cover_ratio_oracle(20, 2, 1.6)
        assert abs(ratio / r_cont - 1) < 1e-4
        assert abs(g1.n_boxes / n_cont - 1) < 1e-4
        assert not g1.materialized

    @pytest.mark.parametrize("seed,p,xi", [(3, 2, 1), (2, 3, 0.5), (4, 2, 3)])
    def test_against_brute_force_grid(self, seed, p, xi):
        count, total = oracles.cover_grid_oracle(seed, p, xi, 1.6)
        _, g1 = cover_refinement(SINH, ParabolaSpec(p, xi), seed, 1, 1.6)
        assert g1.n_boxes == count
        assert abs(g1.measure_sum - total) <= 1e-12 * total

    def test_materialized_sum_invariant(self):
        gens = cover_refinement(SINH, ParabolaSpec(8, 0.1), 0.1, 2, 1.6)
        g1 = gens[1]
        assert g1.materialized and g1.n_boxes == 17
        direct = math.fsum(r ** 1.6 for _, r in g1.boxes)
        assert abs(g1.measure_sum - direct) <= 1e-12 * direct
        assert all(r > 0 for _, r in g1.boxes)
        assert gens[2].n_boxes > 10 ** 18 and not gens[2].materialized

    @pytest.mark.slow
    def test_ratio_decreases_with_seed(self):
        ratios = []
        for seed in (20, 25, 30):
            g0, g1 = cover_refinement(SINH, ParabolaSpec(2, 20), seed, 1, 1.6)
            ratios.append(g1.measure_sum / g0.measure_sum)
        assert ratios[0] > ratios[1] > ratios[2]

    def test_overflow_guard(self):
        with pytest.raises(OverflowGuard):
            cover_refinement(SINH, ParabolaSpec(2, 20), 20, 2, 1.6)
        with pytest.raises(OverflowGuard):
            cover_refinement(SINH, ParabolaSpec(2, 20), 698, 1, 1.6)

    @pytest.mark.parametrize("kw", [dict(seed=10), dict(gens=4), dict(d=1.0),
                                    dict(fmap=MapSpec.exponential(1))])
    def test_preconditions(self, kw):
        with pytest.raises(DomainError):
            cover_refinement(kw.get("fmap", SINH), ParabolaSpec(2, 20), kw.get("seed", 20),
                             kw.get("gens", 1), kw.get("d", 1.6))
