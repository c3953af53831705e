"""Dimension estimators: self-similarity, box counting, covering sums."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFit, DomainError

# a coordinate within this relative distance of a grid line counts as on it
SNAP_REL = 1e-9


def self_similarity_dimension(n_pieces: int, ratio: float) -> float:
    """``log N / log(1/s)`` for a set made of ``N`` copies scaled by ``s``."""
    if int(n_pieces) != n_pieces or n_pieces < 2:
        raise DomainError("n_pieces must be an integer >= 2")
    if not 0.0 < ratio < 1.0:
        raise DomainError("ratio must lie in (0, 1)")
    return math.log(n_pieces) / -math.log(ratio)


@dataclass(frozen=True)
class BoxCount:
    scale: float
    count: int


def _cell_index(x: np.ndarray, s: float) -> np.ndarray:
    # floor(x/s), except that coordinates a hair below a grid line (from
    # rounding, e.g. 2/9 / (1/9) = 1.9999999999999998) snap onto it
    q = x / s
    r = np.rint(q)
    snap = np.abs(q - r) <= SNAP_REL * np.maximum(1.0, np.abs(q))
    return np.where(snap, r, np.floor(q)).astype(np.int64)


def as_points(points) -> np.ndarray:
    """Normalise input to an ``(n, dim)`` float array (dim 1 or 2).

    Accepts a complex array (taken as planar points), a 1-D real array, or an
    ``(n, 1)`` / ``(n, 2)`` array.
    """
    arr = np.asarray(points)
    if np.iscomplexobj(arr):
        arr = arr.ravel()
        return np.column_stack([arr.real, arr.imag]).astype(float)
    arr = arr.astype(float)
    if arr.ndim == 1:
        return arr[:, None]
    if arr.ndim != 2 or arr.shape[1] not in (1, 2):
        raise DomainError("points must be complex, 1-D, or of shape (n, 1|2)")
    return arr


def box_counts(points, scales) -> list[BoxCount]:
    """Occupied cells of the origin-anchored grid ``[i s, (i+1) s) x [j s, (j+1) s)``."""
    pts = as_points(points)
    if pts.shape[0] == 0:
        raise DomainError("points must be nonempty")
    scales = [float(s) for s in scales]
    if any(not s > 0 for s in scales):
        raise DomainError("scales must be positive")
    if any(b >= a for a, b in zip(scales, scales[1:])):
        raise DomainError("scales must be strictly decreasing")
    out = []
    for s in scales:
        idx = np.column_stack([_cell_index(pts[:, k], s) for k in range(pts.shape[1])])
        out.append(BoxCount(s, int(np.unique(idx, axis=0).shape[0])))
    return out


def box_counting_dimension(counts) -> tuple[float, float]:
    """OLS slope of ``log N`` against ``log(1/s)`` and its ``r^2``.

    A constant count gives slope 0 with ``r^2 = 1`` (an isolated point set
    at scales below its separation); the fit is exact in that case.
    """
    counts = list(counts)
    scales = {c.scale for c in counts}
    if len(scales) < 4 or len(scales) != len(counts):
        raise DegenerateFit("need at least 4 entries with distinct scales")
    if any(c.count < 1 for c in counts):
        raise DegenerateFit("zero counts have no logarithm")
    x = np.array([-math.log(c.scale) for c in counts])
    y = np.array([math.log(c.count) for c in counts])
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ yc) / sxx
    ss_tot = float(yc @ yc)
    if ss_tot == 0.0:
        return 0.0, 1.0
    resid = yc - slope * xc
    return slope, 1.0 - float(resid @ resid) / ss_tot


def cumulative_slopes(counts) -> list[float | None]:
    """Slope of the fit over the first ``i+1`` scales (None below 4 scales)."""
    counts = list(counts)
    out = []
    for i in range(len(counts)):
        try:
            out.append(box_counting_dimension(counts[:i + 1])[0])
        except DegenerateFit:
            out.append(None)
    return out


@dataclass(frozen=True)
class CoverGeneration:
    """One generation of a cover: boxes with diameters and their d-measure sum.

    Small generations carry explicit ``centers`` and ``diameters``.  Large ones
    (around 1e19 boxes at desk-scale parameters) carry only ``n_boxes`` and the
    aggregated ``measure_sum``.
    """

    generation: int
    d: float
    measure_sum: float
    n_boxes: int
    centers: np.ndarray | None = None
    diameters: np.ndarray | None = None

    def __post_init__(self):
        if self.diameters is not None:
            if len(self.diameters) != self.n_boxes or len(self.centers) != self.n_boxes:
                raise DomainError("centers/diameters disagree with n_boxes")
            if self.n_boxes and not np.all(self.diameters > 0):
                raise DomainError("diameters must be positive")

    @property
    def materialized(self) -> bool:
        return self.diameters is not None

    @property
    def boxes(self) -> list[tuple[complex, float]]:
        if not self.materialized:
            raise DomainError(f"generation {self.generation} is aggregated ({self.n_boxes:.3g} boxes)")
        return [(complex(c), float(r)) for c, r in zip(self.centers, self.diameters)]

    @classmethod
    def from_boxes(cls, generation: int, d: float, centers, diameters) -> "CoverGeneration":
        centers = np.asarray(centers, dtype=complex)
        diameters = np.asarray(diameters, dtype=float)
        return cls(generation, d, _measure(diameters, d), len(diameters), centers, diameters)


def _measure(diameters, d):
    return math.fsum(float(r) ** d for r in diameters)


def cover_measure(cover: CoverGeneration) -> float:
    """``sum diam^d`` over the boxes of one generation."""
    if cover.materialized:
        return _measure(cover.diameters, cover.d)
    return cover.measure_sum


from .covering import cover_refinement  # noqa: E402  (re-export)

__all__ = ["BoxCount", "CoverGeneration", "box_counting_dimension", "box_counts",
           "cover_measure", "cover_refinement", "cumulative_slopes",
           "self_similarity_dimension"]
