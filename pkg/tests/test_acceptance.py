"""End-to-end acceptance criteria, each under its wall-clock budget.

Every test is tagged ``acceptance(n, title)``; the conftest prints one
PASS/FAIL line per criterion at the end of the run.
"""
import math
import time
from contextlib import contextmanager

import mpmath
import numpy as np
import pytest

from dynrays import (Itinerary, MapSpec, ParabolaSpec, SampleSpec, box_counting_dimension,
                     box_counts, cover_refinement, escaping_density, exponential_survival,
                     fat_cantor, karpinska_generate, landing_point, middle_third,
                     product_square, self_similarity_dimension, strip_complement_measure,
                     trace_ray)
from dynrays.dynamics import evaluate_array
from dynrays.rays import forward_violations

SINH = MapSpec.sinh(1)
TWO_PI = 2 * math.pi
LOG2_LOG3 = float(mpmath.log(2) / mpmath.log(3))
LOG4_LOG3 = float(mpmath.log(4) / mpmath.log(3))


@contextmanager
def budget(seconds):
    t0 = time.perf_counter()
    yield
    elapsed = time.perf_counter() - t0
    assert elapsed < seconds, f"took {elapsed:.2f} s, limit {seconds} s"


@pytest.mark.acceptance(1, "self-similarity dimensions")
def test_self_similarity():
    with budget(1):
        d4 = self_similarity_dimension(4, 1 / 3)
        d2 = self_similarity_dimension(2, 1 / 3)
    assert abs(d4 - LOG4_LOG3) <= 1e-12
    assert abs(d2 - LOG2_LOG3) <= 1e-12
    assert round(d4, 2) == 1.26


@pytest.mark.acceptance(2, "box-counting exactness")
def test_box_counting():
    with budget(10):
        scales = [3.0 ** -m for m in range(1, 9)]
        base = middle_third(8)
        counts = box_counts(base.lo, scales)
        slope, _ = box_counting_dimension(counts)
        prod, _ = box_counting_dimension(box_counts(product_square(base).corners(), scales))
    assert [c.count for c in counts] == [2 ** m for m in range(1, 9)]
    assert abs(slope - LOG2_LOG3) <= 1e-9
    assert abs(prod - LOG4_LOG3) <= 1e-9


@pytest.mark.acceptance(3, "fat Cantor measure")
def test_fat_cantor():
    with budget(1):
        m = fat_cantor(10).total_length()
    assert abs(m - (1 - (1 - 1e-10) / 9)) <= 1e-12
    assert abs(m - 8 / 9) < 1e-10


@pytest.mark.acceptance(4, "Karpinska schedule")
def test_karpinska():
    keep = [1 - 4.0 ** -(g + 1) for g in range(8)]
    with budget(5):
        r = karpinska_generate(keep, 0.1, 8)
    want = float(mpmath.nprod(lambda g: 1 - mpmath.mpf(4) ** -g, [1, 8]))
    assert abs(r.square_area() - want) <= 1e-12
    assert r.square_area() > 0.5
    assert len(r.squares) == 4 ** 8


@pytest.mark.acceptance(5, "covering-refinement dichotomy")
def test_cover_dichotomy():
    with budget(60):
        lo = cover_refinement(SINH, ParabolaSpec(2, 20), 20, 1, 1.6)
        hi = cover_refinement(SINH, ParabolaSpec(2, 20), 20, 1, 1.4)
    assert lo[1].measure_sum / lo[0].measure_sum < 1
    assert hi[1].measure_sum / hi[0].measure_sum > 1


@pytest.mark.acceptance(6, "ray landing")
def test_ray_landing():
    with budget(5):
        zero = Itinerary.parse("0R*24")
        i_pi = Itinerary.parse("0R,-1L*23")
        a = landing_point(SINH, zero, 24, 1e-9)
        b = landing_point(SINH, i_pi, 24, 1e-9)
        bad = [forward_violations(SINH, trace_ray(SINH, it, depth=24)) for it in (zero, i_pi)]
    assert abs(a.point) <= 1e-9
    assert abs(b.point - 1j * math.pi) <= 1e-6
    assert bad == [[], []]


@pytest.mark.acceptance(7, "symmetry suite")
def test_symmetries():
    rng = np.random.default_rng(20240607)
    z = rng.uniform(-30, 30, 10_000) + 1j * rng.uniform(-30, 30, 10_000)
    with budget(5):
        f = evaluate_array(SINH, z)
        checks = [
            (evaluate_array(SINH, z + 2j * math.pi), f),
            (evaluate_array(SINH, z + 1j * math.pi), -f),
            (evaluate_array(SINH, -z), -f),
            (evaluate_array(SINH, z.conj()), f.conj()),
        ]
    for got, want in checks:
        rel = np.abs(got - want) / np.maximum(np.abs(got), np.abs(want))
        assert rel.max() <= 1e-12


@pytest.mark.acceptance(8, "escaping density")
def test_escaping_density():
    with budget(30):
        a = escaping_density(SINH, 6 + 0j, TWO_PI, SampleSpec(1, 100_000))
        b = escaping_density(SINH, 10 + 0j, TWO_PI, SampleSpec(1, 100_000))
    assert a.fraction >= 1 - 2 * math.exp(-3) - 3 * a.stderr
    assert b.fraction >= a.fraction - 3 * math.hypot(a.stderr, b.stderr)


@pytest.mark.acceptance(9, "exponential survival")
def test_survival():
    with budget(60):
        est = exponential_survival(1, 10, 5, SampleSpec(9, 1_000_000))
    steps = np.arange(1, 6)
    slope = np.polyfit(steps, np.log2([est[j].fraction for j in steps]), 1)[0]
    assert -1.2 <= slope <= -0.8


@pytest.mark.acceptance(10, "strip complement bound")
def test_strip_bound():
    with budget(60):
        r8 = strip_complement_measure(SINH, 8, (0, TWO_PI), SampleSpec(10, 100_000), 30)
        r12 = strip_complement_measure(SINH, 12, (0, TWO_PI), SampleSpec(10, 100_000), 30)
    assert r8.estimate <= 4 * math.pi * math.exp(-4) + 3 * r8.sigma
    assert r12.estimate <= 4 * math.pi * math.exp(-6) + 3 * r12.sigma


@pytest.mark.acceptance(11, "full-measure corollary")
def test_unit_squares():
    rng = np.random.default_rng(np.random.SeedSequence([2024, 0]))
    radius = 20 * np.sqrt(rng.random(20))
    centres = radius * np.exp(1j * rng.uniform(0, TWO_PI, 20))
    spec = SampleSpec(2024, 10_000, 200)
    with budget(60):
        fr = [escaping_density(SINH, c - (0.5 + 0.5j), 1.0, spec, stream=i).fraction
              for i, c in enumerate(centres)]
    assert min(fr) >= 0.95
