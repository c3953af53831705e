"""Monte-Carlo estimates of escaping-set measure.

Samples come from numpy's PCG64 seeded through ``SeedSequence([seed,
stream])``.  Each stratum or square draws from its own stream, so results do
not depend on evaluation order or thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .dynamics import ESCAPE_RE, TWO_PI, MapSpec, iterate_many
from .errors import DomainError

CHUNK = 1 << 18


@dataclass(frozen=True)
class SampleSpec:
    seed: int
    n_samples: int
    n_max: int = 50
    escape_re: float = ESCAPE_RE

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.n_samples < 1:
            raise DomainError("n_samples must be >= 1")
        if self.n_max < 1:
            raise DomainError("n_max must be >= 1")

    def rng(self, stream: int = 0) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence([self.seed, stream])))


@dataclass(frozen=True)
class DensityEstimate:
    fraction: float
    stderr: float
    n_samples: int

    @classmethod
    def from_count(cls, hits: int, n: int) -> "DensityEstimate":
        f = hits / n
        return cls(f, math.sqrt(f * (1.0 - f) / n), n)


def _uniform_square(rng, lo: complex, side: float, n: int) -> np.ndarray:
    u = rng.random((n, 2))
    return (lo.real + side * u[:, 0]) + 1j * (lo.imag + side * u[:, 1])


def _escaped_count(fmap, rng, lo, side, sample) -> int:
    hits = 0
    left = sample.n_samples
    while left:
        n = min(left, CHUNK)
        z = _uniform_square(rng, lo, side, n)
        hits += int(iterate_many(fmap, z, sample.n_max, sample.escape_re).escaped.sum())
        left -= n
    return hits


def escaping_density(fmap: MapSpec, square_lo: complex, side: float,
                     sample: SampleSpec, stream: int = 0) -> DensityEstimate:
    """Fraction of uniform samples in the square whose orbits escape."""
    if fmap.family == "exp":
        raise DomainError("escaping_density expects a sinh/sine/general map")
    if not side > 0:
        raise DomainError("side must be positive")
    hits = _escaped_count(fmap, sample.rng(stream), complex(square_lo), side, sample)
    return DensityEstimate.from_count(hits, sample.n_samples)


def exponential_survival(lam: complex, xi: float, n_steps: int,
                         sample: SampleSpec) -> list[DensityEstimate]:
    """Entry j: fraction of samples whose first j iterates under ``lam e^z`` have Re > xi.

    Samples are uniform in ``[xi, xi + 2 pi] x [0, 2 pi]``.  Once an orbit
    is too large for its imaginary part to fix the next phase (``|z| >
    1e12``), that phase is drawn uniformly instead.  This is exactly the
    independence assumption behind the ``2^-n`` survival heuristic.
    """
    lam = complex(lam)
    if lam == 0:
        raise DomainError("lambda must be nonzero")
    if n_steps < 0:
        raise DomainError("n_steps must be >= 0")
    if not abs(lam) * math.exp(xi) > xi + TWO_PI:
        raise DomainError("|lambda| e^xi must exceed xi + 2 pi")
    rng = sample.rng()
    alive = np.zeros(n_steps + 1, np.int64)
    left = sample.n_samples
    while left:
        n = min(left, CHUNK)
        z = _uniform_square(rng, complex(xi, 0.0), TWO_PI, n)
        phases = rng.random((n, n_steps))
        k = _kernels.survival(z.real, z.imag, lam, xi, n_steps, phases)
        alive += np.bincount(k, minlength=n_steps + 1)[: n_steps + 1]
        left -= n
    # survivors of at least j steps: reverse cumulative sum
    at_least = np.cumsum(alive[::-1])[::-1]
    return [DensityEstimate.from_count(int(c), sample.n_samples) for c in at_least]


class StripEstimate(NamedTuple):
    estimate: float
    paper_bound: float
    sigma: float


def strip_complement_measure(fmap: MapSpec, xi0: float, im_band: tuple[float, float],
                             sample: SampleSpec, re_cap: float) -> StripEstimate:
    """Stratified estimate of the non-escaping area in ``{xi0 < |Re| < re_cap} x im_band``.

    Strata are unit intervals of ``|Re|`` on each side; each draws
    ``sample.n_samples`` points from its own stream.  ``sigma`` is the
    standard error of the estimate and ``paper_bound = 4 pi e^(-xi0/2)``.
    """
    if not fmap.is_sinh_family or fmap.rotated:
        raise DomainError("strip_complement_measure expects a sinh-type map")
    y0, y1 = map(float, im_band)
    if not y1 > y0:
        raise DomainError("im_band must be increasing")
    if re_cap < xi0:
        raise DomainError("re_cap must be >= xi0")
    bound = 4.0 * math.pi * math.exp(-xi0 / 2.0)
    height = y1 - y0
    parts, var = [], []
    stream = 0
    x = xi0
    while x < re_cap:
        width = min(1.0, re_cap - x)
        for sign in (1.0, -1.0):
            rng = sample.rng(stream)
            stream += 1
            u = rng.random((sample.n_samples, 2))
            re = sign * (x + width * u[:, 0])
            z = re + 1j * (y0 + height * u[:, 1])
            esc = int(iterate_many(fmap, z, sample.n_max, sample.escape_re).escaped.sum())
            p = 1.0 - esc / sample.n_samples
            area = width * height
            parts.append(area * p)
            var.append(area * area * p * (1.0 - p) / sample.n_samples)
        x += 1.0
    return StripEstimate(math.fsum(parts), bound, math.sqrt(math.fsum(var)))
