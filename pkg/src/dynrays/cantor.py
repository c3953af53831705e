"""Cantor-type constructions: interval sets, product squares, squares with tubes."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GeometryError, InfeasibleRemoval

CANTOR_MAX_DEPTH = 30
FAT_MAX_DEPTH = 25
KARPINSKA_MAX_DEPTH = 8

SQUARE = 0
TUBE = 1


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise disjoint closed intervals ``[lo[i], hi[i]]``."""

    lo: np.ndarray
    hi: np.ndarray
    generation: int

    def __post_init__(self):
        if self.lo.shape != self.hi.shape:
            raise DomainError("lo and hi differ in shape")

    def __len__(self):
        return self.lo.shape[0]

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return list(zip(self.lo.tolist(), self.hi.tolist()))

    @property
    def lengths(self) -> np.ndarray:
        return self.hi - self.lo

    def total_length(self) -> float:
        return math.fsum(self.lengths.tolist())

    def is_valid(self) -> bool:
        return bool(np.all(self.lo < self.hi) and np.all(self.hi[:-1] < self.lo[1:]))


def _split(lo, hi, left_len, right_len):
    """Children ``[lo, lo+left_len]`` and ``[hi-right_len, hi]`` of every interval, interleaved."""
    out_lo = np.empty(2 * lo.shape[0])
    out_hi = np.empty_like(out_lo)
    out_lo[0::2] = lo
    out_hi[0::2] = lo + left_len
    out_lo[1::2] = hi - right_len
    out_hi[1::2] = hi
    return out_lo, out_hi


def cantor_generations(ratios: Sequence[float], depth: int,
                       max_depth: int = CANTOR_MAX_DEPTH) -> list[IntervalSet]:
    """Generations ``0..depth`` of the variable-ratio Cantor construction.

    Generation g keeps, inside each interval, the two end pieces of relative
    length ``ratios[g-1]``; every generation-g interval has length
    ``prod(ratios[:g])``.  Child ``i`` of generation g lies in parent ``i // 2``.
    """
    if depth < 0 or depth > len(ratios):
        raise DomainError(f"depth must lie in [0, {len(ratios)}]")
    if depth > max_depth:
        raise DomainError(f"depth {depth} exceeds the cap {max_depth}")
    for s in ratios[:depth]:
        if not 0.0 < s < 0.5:
            raise DomainError(f"ratio {s} is not in (0, 1/2)")
    lo, hi = np.zeros(1), np.ones(1)
    gens = [IntervalSet(lo, hi, 0)]
    length = 1.0
    for g in range(depth):
        length *= ratios[g]
        lo, hi = _split(lo, hi, length, length)
        gens.append(IntervalSet(lo, hi, g + 1))
    return gens


def cantor_intervals(ratios: Sequence[float], depth: int,
                     max_depth: int = CANTOR_MAX_DEPTH) -> IntervalSet:
    return cantor_generations(ratios, depth, max_depth)[-1]


def middle_third(depth: int) -> IntervalSet:
    return cantor_intervals([1.0 / 3.0] * depth, depth)


def fat_removal(j: int) -> float:
    """Length removed from each interval at generation ``j >= 1``."""
    return 0.1 * 0.05 ** (j - 1)


def fat_cantor_measure(depth: int) -> float:
    """Closed form ``1 - (1 - 10^-g) / 9``."""
    return 1.0 - (1.0 - 10.0 ** -depth) / 9.0


def fat_cantor_generations(depth: int, max_depth: int = FAT_MAX_DEPTH) -> list[IntervalSet]:
    """Remove a centred open interval of length ``(1/10)(1/20)^(j-1)`` from each interval."""
    if not 0 <= depth <= max_depth:
        raise DomainError(f"depth must lie in [0, {max_depth}]")
    lo, hi = np.zeros(1), np.ones(1)
    gens = [IntervalSet(lo, hi, 0)]
    for j in range(1, depth + 1):
        r = fat_removal(j)
        length = hi - lo
        if np.any(r >= length):
            raise InfeasibleRemoval(f"generation {j} removes {r} from an interval of length "
                                    f"{length.min()}")
        mid = 0.5 * (lo + hi)
        new_lo = np.empty(2 * lo.shape[0])
        new_hi = np.empty_like(new_lo)
        new_lo[0::2], new_hi[0::2] = lo, mid - r / 2
        new_lo[1::2], new_hi[1::2] = mid + r / 2, hi
        lo, hi = new_lo, new_hi
        gens.append(IntervalSet(lo, hi, j))
    return gens


def fat_cantor(depth: int, max_depth: int = FAT_MAX_DEPTH) -> IntervalSet:
    return fat_cantor_generations(depth, max_depth)[-1]


@dataclass(frozen=True)
class RectSet:
    """Axis-aligned rectangles ``(x_lo, x_hi, y_lo, y_hi)`` with interior-disjoint pieces.

    ``kinds`` marks squares and tube pieces.  For a tube piece ``owner`` is
    the row index of the square its tube ends on; for a square it is -1.
    """

    rects: np.ndarray
    kinds: np.ndarray
    owner: np.ndarray
    generation: int

    @property
    def squares(self) -> np.ndarray:
        return self.rects[self.kinds == SQUARE]

    @property
    def tubes(self) -> np.ndarray:
        return self.rects[self.kinds == TUBE]

    def square_area(self) -> float:
        sq = self.squares
        return math.fsum(((sq[:, 1] - sq[:, 0]) * (sq[:, 3] - sq[:, 2])).tolist())

    def corners(self, kind: int = SQUARE) -> np.ndarray:
        r = self.rects[self.kinds == kind]
        return r[:, 0] + 1j * r[:, 2]


def product_square(base: IntervalSet) -> RectSet:
    """All squares ``I x J`` with ``I, J`` in ``base``; row-major in ``J`` then ``I``."""
    xl, yl = np.meshgrid(base.lo, base.lo)
    xh, yh = np.meshgrid(base.hi, base.hi)
    rects = np.column_stack([xl.ravel(), xh.ravel(), yl.ravel(), yh.ravel()])
    n = rects.shape[0]
    return RectSet(rects, np.full(n, SQUARE, np.int8), np.full(n, -1, np.int64), base.generation)


# ---------------------------------------------------------------------------
# squares with tubes
# ---------------------------------------------------------------------------
#
# Every square carries one tube: a polyline of axis-aligned segments with a
# width, ending on the square's side.  Refining a square of side S puts four
# children of side T at its corners, leaving a cross-shaped corridor of
# width G = S - 2T.  The square's tube splits into four lanes; seen from the
# entry side they are ordered near-top, far-top, far-bottom, near-bottom.
# Each lane runs into the corridor, turns at a vertical line G/4 inside the
# corridor (near children) or G/4 from its far wall (far children), climbs to
# its child's mid-height and ends on the child's inner side.

LANE_UP = np.array([3.0, 1.0, -1.0, -3.0]) / 8.0


@dataclass(frozen=True)
class KarpinskaState:
    """Squares (lower-left corner, side) and their tube polylines."""

    corner: np.ndarray      # (n, 2)
    side: float
    paths: np.ndarray       # (n, k, 2) polyline vertices, ending on the square
    width: float
    generation: int


def _offset(paths: np.ndarray, off: np.ndarray) -> np.ndarray:
    """Offset polylines by ``off`` along the left normal (mitred joints)."""
    d = np.diff(paths, axis=1)
    d /= np.linalg.norm(d, axis=2, keepdims=True)
    n = np.stack([-d[..., 1], d[..., 0]], axis=2)
    shift = np.empty_like(paths)
    shift[:, 0] = n[:, 0]
    shift[:, -1] = n[:, -1]
    if paths.shape[1] > 2:
        n_in, n_out = n[:, :-1], n[:, 1:]
        dot = np.sum(n_in * n_out, axis=2, keepdims=True)
        shift[:, 1:-1] = (n_in + n_out) / (1.0 + dot)
    return paths + off[:, None, None] * shift


def _refine(state: KarpinskaState, keep: float, ratio: float) -> KarpinskaState:
    s = state.side
    t = s * math.sqrt(keep) / 2.0
    gap = s - 2.0 * t
    w = state.width
    w_new = w * ratio
    if not (w < gap and w_new < gap / 2.0):
        raise GeometryError(f"tubes of width {w:.3g}/{w_new:.3g} do not fit a corridor of {gap:.3g}")
    n = state.corner.shape[0]
    x0, y0 = state.corner[:, 0], state.corner[:, 1]
    xl, xr = x0 + t, x0 + s - t
    # direction of the last segment: -1 entering from the right, +1 from the left
    dx = np.sign(state.paths[:, -1, 0] - state.paths[:, -2, 0])
    from_right = dx < 0
    near_v = np.where(from_right, xr - gap / 4.0, xl + gap / 4.0)
    far_v = np.where(from_right, xl + gap / 4.0, xr - gap / 4.0)
    near_x0 = np.where(from_right, x0 + s - t, x0)   # near children's lower-left x
    far_x0 = np.where(from_right, x0, x0 + s - t)
    near_edge = np.where(from_right, xr, xl)
    far_edge = np.where(from_right, xl, xr)
    top_y, bot_y = y0 + s - t, y0

    corners, paths = [], []
    specs = [(near_v, near_x0, top_y, near_edge), (far_v, far_x0, top_y, far_edge),
             (far_v, far_x0, bot_y, far_edge), (near_v, near_x0, bot_y, near_edge)]
    for k, (xv, cx, cy, edge) in enumerate(specs):
        lane = _offset(state.paths, LANE_UP[k] * w * dx)
        h = lane[:, -1, 1]
        mid = cy + t / 2.0
        tail = np.stack([np.column_stack([xv, h]), np.column_stack([xv, mid]),
                         np.column_stack([edge, mid])], axis=1)
        paths.append(np.concatenate([lane[:, :-1], tail], axis=1))
        corners.append(np.column_stack([cx, cy]))
    # interleave so that the four children of square i are rows 4i..4i+3
    corner = np.stack(corners, axis=1).reshape(4 * n, 2)
    path = np.stack(paths, axis=1).reshape(4 * n, paths[0].shape[1], 2)
    return KarpinskaState(corner, t, path, w_new, state.generation + 1)


def _path_rects(paths: np.ndarray, width: float) -> np.ndarray:
    """Rectangles of the polylines: each joint's corner block goes to the incoming segment."""
    n, k, _ = paths.shape
    a, b = paths[:, :-1], paths[:, 1:]
    d = np.sign(b - a)
    h = width / 2.0
    start = a.copy()
    end = b.copy()
    start[:, 1:] += d[:, 1:] * h    # shrink past an incoming joint
    end[:, :-1] += d[:, :-1] * h    # extend over an outgoing joint
    if np.any(np.sum((end - start) * d, axis=2) <= 0):
        raise GeometryError("a tube segment is shorter than the tube width")
    lo = np.minimum(start, end)
    hi = np.maximum(start, end)
    horiz = d[..., 1] == 0
    x_lo = np.where(horiz, lo[..., 0], lo[..., 0] - h)
    x_hi = np.where(horiz, hi[..., 0], hi[..., 0] + h)
    y_lo = np.where(horiz, lo[..., 1] - h, lo[..., 1])
    y_hi = np.where(horiz, hi[..., 1] + h, hi[..., 1])
    return np.stack([x_lo, x_hi, y_lo, y_hi], axis=2).reshape(n * (k - 1), 4)


def _ratios(tube_width_ratio, depth):
    if isinstance(tube_width_ratio, (int, float)):
        r = float(tube_width_ratio)
        # lane width ratio^g * w0 / 4: a factor r/4 at the first split, r after
        return [r / 4.0] + [r] * (depth - 1)
    seq = [float(x) for x in tube_width_ratio]
    if len(seq) < depth:
        raise DomainError("tube_width_ratio schedule is shorter than depth")
    return [seq[0] / 4.0] + seq[1:depth]


def karpinska_states(keep_fraction: Sequence[float], tube_width_ratio, depth: int,
                     initial_width: float = 0.05, tube_length: float = 1.0,
                     max_depth: int = KARPINSKA_MAX_DEPTH) -> list[KarpinskaState]:
    if depth < 0 or depth > len(keep_fraction):
        raise DomainError(f"depth must lie in [0, {len(keep_fraction)}]")
    if depth > max_depth:
        raise DomainError(f"depth {depth} exceeds the cap {max_depth}")
    for k in keep_fraction[:depth]:
        if not 0.0 < k < 1.0:
            raise DomainError(f"keep fraction {k} is not in (0, 1)")
    factors = _ratios(tube_width_ratio, depth) if depth else []
    for f in factors:
        # four lanes of relative width f share their parent tube
        if not 0.0 < f <= 0.25:
            raise GeometryError(f"four lanes of relative width {f:.3g} do not fit their tube")
    start = KarpinskaState(np.zeros((1, 2)), 1.0,
                           np.array([[[1.0 + tube_length, 0.5], [1.0, 0.5]]]),
                           initial_width, 0)
    states = [start]
    for g in range(depth):
        states.append(_refine(states[-1], keep_fraction[g], factors[g]))
    return states


def _as_rectset(state: KarpinskaState) -> RectSet:
    n = state.corner.shape[0]
    sq = np.column_stack([state.corner[:, 0], state.corner[:, 0] + state.side,
                          state.corner[:, 1], state.corner[:, 1] + state.side])
    tubes = _path_rects(state.paths, state.width)
    per = state.paths.shape[1] - 1
    rects = np.concatenate([sq, tubes])
    kinds = np.concatenate([np.full(n, SQUARE, np.int8), np.full(tubes.shape[0], TUBE, np.int8)])
    owner = np.concatenate([np.full(n, -1, np.int64), np.repeat(np.arange(n), per)])
    return RectSet(rects, kinds, owner, state.generation)


def karpinska_generate(keep_fraction: Sequence[float], tube_width_ratio, depth: int,
                       initial_width: float = 0.05, tube_length: float = 1.0,
                       max_depth: int = KARPINSKA_MAX_DEPTH) -> RectSet:
    """Squares and tubes after ``depth`` refinements of the unit square.

    Each square of side S is replaced by four corner squares of side
    ``S*sqrt(keep)/2``.  The initial tube runs from ``x = 1 + tube_length`` to
    the unit square's right side at mid-height with width ``initial_width``.
    Generation-g lanes have width ``ratio^g * initial_width / 4``;
    ``tube_width_ratio`` may also be a per-generation schedule, the lane
    width then being ``prod(ratio[:g]) * initial_width / 4``.
    """
    return _as_rectset(karpinska_states(keep_fraction, tube_width_ratio, depth,
                                        initial_width, tube_length, max_depth)[-1])


def tube_section(rects: RectSet, x: float) -> IntervalSet:
    """Cross-section at abscissa ``x`` of the tube pieces crossing it, as y-intervals."""
    t = rects.tubes
    hit = t[(t[:, 0] < x) & (t[:, 1] > x)]
    order = np.argsort(hit[:, 2])
    return IntervalSet(hit[order, 2].copy(), hit[order, 3].copy(), rects.generation)
