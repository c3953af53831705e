"""Refining covers of points whose orbits stay in a parabola.

Generation 0 is one square ``Q0`` of side pi far to the right.  Each box of
generation g is mapped forward ``g+1`` times.  The image of a standard square
(side pi, columns ``[j pi, (j+1) pi]``, rows placed so that the image is a
half-annulus) is covered by the standard squares meeting ``image ∩ P``.  Each
of those pulls back to a box of diameter ``pi*sqrt(2) / |(f^(g+1))'|``.

Images are taken from the dominant exponential term: a square at real parts
``[x, x+pi]`` on the right maps to the half-annulus ``|a| e^x <= |w| <=
|a| e^(x+pi)``.  The neglected term is ``e^(-2x)`` relative, far below
rounding at the real parts used here.

Squares meeting the region are counted exactly, row by row.  For a row with
``l = min |Im|`` and ``L = max |Im|``, a column meets
``{r1 <= |w| <= r2} ∩ P`` iff it meets the interval of ``|Re w|``

    (max(xi, l^p, x_in), sqrt(r2^2 - l^2)]

where ``x_in`` solves ``u^2 + min(L, u^(1/p))^2 = r1^2``.  Per-row sums of
``|w^2 - 4ab|^(-d/2)`` (using ``f'^2 = f^2 - 4ab``) come from
``_kernels.row_sums``.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .dimension import CoverGeneration
from .dynamics import X_MAX, MapSpec, ParabolaSpec
from .errors import DomainError, OverflowGuard

SQRT2 = math.sqrt(2.0)
MATERIALIZE_MAX = 200_000  # boxes per generation kept explicitly
ROW_MAX = 60_000_000  # rows scanned per generation
ROW_CHUNK = 1_000_000


def _row_offset(fmap: MapSpec, side: int) -> float:
    """Lower edge (mod pi) of the standard rows on the given side."""
    if side > 0:
        y = -math.pi / 2 - cmath.phase(fmap.a)
    else:
        y = cmath.phase(fmap.b) - math.pi / 2
    return math.fmod(math.fmod(y, math.pi) + math.pi, math.pi)


def seed_square(fmap: MapSpec, seed_re: float) -> complex:
    """Lower-left corner of ``Q0``: real parts from ``seed_re``, the row holding Im = pi."""
    y0 = _row_offset(fmap, 1)
    m = math.floor((math.pi - y0) / math.pi)
    return complex(seed_re, y0 + m * math.pi)


def _image_annulus(fmap: MapSpec, corner: complex):
    """(r1, r2, image side) for the standard square with lower-left ``corner``."""
    x, y = corner.real, corner.imag
    if max(abs(x), abs(x + math.pi)) > X_MAX:
        raise OverflowGuard(f"square at Re {x:.6g} leaves the overflow guard")
    ymid = y + math.pi / 2
    if x >= 0:
        phi = cmath.phase(fmap.a) + ymid
        r1, r2 = abs(fmap.a) * math.exp(x), abs(fmap.a) * math.exp(x + math.pi)
    elif x + math.pi <= 0:
        phi = cmath.phase(fmap.b) - ymid
        r1, r2 = abs(fmap.b) * math.exp(-x - math.pi), abs(fmap.b) * math.exp(-x)
    else:
        raise DomainError("square straddles the imaginary axis")
    c = math.cos(phi)
    if abs(c) < 0.5:
        raise DomainError("square is not aligned with the standard rows")
    return r1, r2, (1 if c > 0 else -1)


def _rows(fmap: MapSpec, spec: ParabolaSpec, r1: float, r2: float, side: int):
    """Rows of standard squares meeting the half-annulus ∩ P on ``side``.

    Yields chunks ``(j0, j1, v)`` of column ranges (in |Re| columns) and row
    centres.
    """
    p, xi = spec.p, spec.xi
    y_top = min(r2, r2 ** (1.0 / p))
    y0 = _row_offset(fmap, side)
    m_lo = math.floor((-y_top - y0) / math.pi)
    m_hi = math.floor((y_top - y0) / math.pi)
    if m_hi - m_lo + 1 > ROW_MAX:
        raise OverflowGuard(f"{m_hi - m_lo + 1:.3g} rows exceed the scan limit")
    # u_star: u^2 + u^(2/p) = r1^2 (the inner circle meets the parabola)
    s = r1
    u_star = s * brentq(lambda t: t * t + (s * t) ** (2.0 / p) / (s * s) - 1.0, 0.0, 1.0,
                        xtol=1e-16, rtol=1e-15)
    for start in range(m_lo, m_hi + 1, ROW_CHUNK):
        m = np.arange(start, min(start + ROW_CHUNK, m_hi + 1), dtype=np.int64)
        ylo = y0 + m * math.pi
        yhi = ylo + math.pi
        ell = np.where((ylo <= 0) & (yhi >= 0), 0.0, np.minimum(np.abs(ylo), np.abs(yhi)))
        big = np.maximum(np.abs(ylo), np.abs(yhi))
        with np.errstate(invalid="ignore"):
            x_in = np.where(u_star ** (1.0 / p) <= big, u_star,
                            r1 * np.sqrt(np.clip(1.0 - (big / r1) ** 2, 0.0, None)))
            hi = r2 * np.sqrt(np.clip(1.0 - (ell / r2) ** 2, 0.0, None))
        lo = np.maximum(np.maximum(xi, ell ** p), x_in)
        ok = (lo < hi) & (ell < r2)
        if not ok.any():
            continue
        j0 = np.floor(lo[ok] / math.pi).astype(np.int64)
        j1 = np.floor(hi[ok] / math.pi).astype(np.int64)
        yield j0, j1, ylo[ok] + math.pi / 2


def _count(j0, j1) -> int:
    n = j1 - j0 + 1
    return sum(int(c.sum()) for c in np.array_split(n, max(1, len(n) // 1000)))


def _inverse_near(fmap: MapSpec, w: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Preimages of ``w`` under ``a e^z + b e^-z`` closest to ``target``."""
    a, b = fmap.a, fmap.b
    disc = np.sqrt(w * w - 4 * a * b)
    q = np.where(np.abs(w + disc) >= np.abs(w - disc), w + disc, w - disc) / 2
    best = None
    for t in (q / a, b / q):
        z = np.log(t)
        z = z + 2j * math.pi * np.round((target.imag - z.imag) / (2 * math.pi))
        best = z if best is None else np.where(np.abs(z - target) < np.abs(best - target), z, best)
    return best


class _Level:
    """An explicitly enumerated generation: square corners in the f^g-plane."""

    def __init__(self, corners, parent, chain_factor, orig_center):
        self.corners = corners          # lower-left corners in the f^g-plane
        self.parent = parent            # index into the previous level
        self.chain_factor = chain_factor  # prod 1/|f'| along the chain
        self.orig_center = orig_center  # box centre in the original plane


def _materialize(fmap, levels, parent_idx, chunks, img_side):
    """Enumerate the children of one parent square and their exact chains."""
    corners = []
    for j0, j1, v in chunks:
        for a, b, c in zip(j0, j1, v):
            js = np.arange(a, b + 1)
            lo = js * math.pi if img_side > 0 else -(js + 1) * math.pi
            corners.append(lo + 1j * (c - math.pi / 2))
    corners = np.concatenate(corners) if corners else np.empty(0, complex)
    w = corners + complex(math.pi / 2, math.pi / 2)
    factor = np.ones(w.shape[0])
    idx = np.full(w.shape[0], parent_idx)
    for lvl in reversed(levels):
        factor = factor / np.abs(np.sqrt(w * w - 4 * fmap.a * fmap.b))
        target = lvl.corners[idx] + complex(math.pi / 2, math.pi / 2)
        w = _inverse_near(fmap, w, target)
        if lvl.parent is not None:
            idx = lvl.parent[idx]
    return corners, factor, w


def cover_refinement(fmap: MapSpec, spec: ParabolaSpec, seed_square_re: float,
                     generations: int, d: float) -> list[CoverGeneration]:
    """Covers of generations ``0..generations`` and their d-measure sums.

    Generations with at most ``MATERIALIZE_MAX`` boxes are returned with
    explicit centres and diameters (diameters from the exact preimage chain).
    Larger ones are aggregated; their per-parent sums use the derivative of
    the chain through the parent square's centre.  A generation can only be
    refined if its predecessor was enumerated and stays inside the overflow
    guard; otherwise OverflowGuard is raised.
    """
    if not fmap.is_sinh_family or fmap.rotated:
        raise DomainError("cover_refinement needs a map a e^z - a e^-z with real a")
    if seed_square_re < spec.xi:
        raise DomainError("seed_square_re must be >= xi")
    if generations not in (0, 1, 2, 3):
        raise DomainError("generations must be 0, 1, 2 or 3")
    if not d > 1:
        raise DomainError("d must exceed 1")

    c = -4 * fmap.a * fmap.b
    base = (math.pi * SQRT2) ** d
    q0 = seed_square(fmap, seed_square_re)
    centre = q0 + complex(math.pi / 2, math.pi / 2)
    levels = [_Level(np.array([q0]), None, np.ones(1), np.array([centre]))]
    out = [CoverGeneration.from_boxes(0, d, [centre], [math.pi * SQRT2])]

    for g in range(1, generations + 1):
        prev = levels[-1]
        if prev is None:
            raise OverflowGuard(f"generation {g - 1} is too large to refine")
        per_parent = []
        pieces = []
        n_total = 0
        for i, corner in enumerate(prev.corners):
            r1, r2, img_side = _image_annulus(fmap, complex(corner))
            chunks = list(_rows(fmap, spec, r1, r2, img_side))
            n_i = sum(_count(j0, j1) for j0, j1, _ in chunks)
            n_total += n_i
            pieces.append((i, chunks, img_side))
            if n_total > MATERIALIZE_MAX:
                break
        if n_total <= MATERIALIZE_MAX:
            corners, parents, factors, centres = [], [], [], []
            for i, chunks, img_side in pieces:
                cs, fs, zs = _materialize(fmap, levels, i, chunks, img_side)
                corners.append(cs)
                parents.append(np.full(cs.shape[0], i))
                factors.append(fs)
                centres.append(zs)
            corners = np.concatenate(corners) if corners else np.empty(0, complex)
            factors = np.concatenate(factors) if factors else np.empty(0)
            centres = np.concatenate(centres) if centres else np.empty(0, complex)
            parents = np.concatenate(parents) if parents else np.empty(0, np.int64)
            levels.append(_Level(corners, parents, factors, centres))
            out.append(CoverGeneration.from_boxes(g, d, centres, math.pi * SQRT2 * factors))
            continue

        # aggregated: weight each parent's rows by its chain factor at the centre
        n_total = 0
        for i, corner in enumerate(prev.corners):
            r1, r2, img_side = _image_annulus(fmap, complex(corner))
            par = prev.chain_factor[i] ** d
            for j0, j1, v in _rows(fmap, spec, r1, r2, img_side):
                sgn = np.full(v.shape[0], float(img_side))
                per_parent.append(par * math.fsum(_kernels.row_sums(j0, j1, v, sgn, c, d)))
                n_total += _count(j0, j1)
        levels.append(None)
        out.append(CoverGeneration(g, d, base * math.fsum(per_parent), n_total))
    return out
