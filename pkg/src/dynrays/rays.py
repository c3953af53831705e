"""Dynamic rays of ``k pi sinh z`` by pulling back along itineraries.

Each partition piece ``U_{n,R}`` / ``U_{n,L}`` is mapped conformally onto the
plane minus a slit, so every symbol has a unique inverse branch.  A ray with
itinerary ``s1 s2 ...`` is approximated by pulling an anchor point far out in
the piece of ``s_{m+1}`` back through ``s_m, ..., s_1``; as ``m`` grows the
pulled-back points run down the ray towards its landing point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

from .dynamics import (EPS_AXIS, TWO_PI, X_MAX, Itinerary, ItinerarySymbol, MapSpec,
                       evaluate)
from .errors import BranchDomainError, DomainError, VerificationError

ANCHOR_RE = 25.0
DEPTH = 24
LANDING_TOL = 1e-9
ROUND_TRIP_TOL = 1e-9


def _require_sinh(fmap: MapSpec):
    if fmap.family != "sinh":
        raise DomainError("rays are implemented for k*pi*sinh z only")


def on_slit(fmap: MapSpec, w: complex, side: str, eps: float = EPS_AXIS) -> bool:
    """Whether ``w`` lies within ``eps * |w|`` of the slit omitted by ``side``.

    For ``k > 0`` the branch onto the R pieces omits ``R+`` and the segment
    ``[-k pi i, k pi i]``; the L pieces omit ``R-`` and the same segment.
    """
    # relative: pullbacks towards a landing point at 0 shrink below eps itself
    tol = eps * abs(w)
    kpi = abs(fmap.k) * math.pi
    if abs(w.real) <= tol and abs(w.imag) <= kpi + tol:
        return True
    positive_ray = (side == "R") == (fmap.k > 0)
    if abs(w.imag) <= tol:
        return w.real >= -tol if positive_ray else w.real <= tol
    return False


def inverse_branch(fmap: MapSpec, w: complex, symbol: ItinerarySymbol,
                   eps: float = EPS_AXIS) -> complex:
    """The unique ``z`` in the open piece ``symbol`` with ``f(z) = w``."""
    _require_sinh(fmap)
    w = complex(w)
    if on_slit(fmap, w, symbol.side, eps):
        raise BranchDomainError(f"{w} lies on the slit of the {symbol.side} branch")
    z = cmath.asinh(w / (fmap.k * math.pi))
    if (z.real > 0) != (symbol.side == "R"):
        # f(i pi - z) = f(z) and the reflection flips the sign of the real part
        z = complex(-z.real, math.pi - z.imag)
    centre = TWO_PI * symbol.strip_index + math.pi
    z += 1j * TWO_PI * round((centre - z.imag) / TWO_PI)
    back = evaluate(fmap, z)
    if abs(back - w) > ROUND_TRIP_TOL * max(1.0, abs(w)):
        raise VerificationError(f"inverse branch {symbol} of {w} returned {z} (f = {back})")
    return z


@dataclass(frozen=True)
class RayApproximation:
    """Pulled-back points of one ray, far end first.

    ``depths[i]`` is the number of pullbacks that produced ``points[i]``.
    Consecutive duplicates (pullbacks that have converged to machine
    precision) are dropped, so ``depths`` can skip values.
    """

    itinerary: Itinerary
    points: tuple[complex, ...]
    depths: tuple[int, ...]
    landing_estimate: complex | None
    landing_gap: float | None

    def gaps(self) -> list[float]:
        return [abs(b - a) for a, b in zip(self.points, self.points[1:])]


def anchor(symbol: ItinerarySymbol, anchor_re: float) -> complex:
    """Mid-height point of the piece ``symbol`` at distance ``anchor_re`` from iR."""
    sign = 1.0 if symbol.side == "R" else -1.0
    return complex(sign * anchor_re, TWO_PI * symbol.strip_index + math.pi)


def pullback_chain(fmap: MapSpec, itin: Itinerary, m: int,
                   anchor_re: float = ANCHOR_RE) -> list[complex]:
    """``[w_0, ..., w_m]`` with ``w_m`` the anchor and ``w_j`` the preimage of
    ``w_{j+1}`` in the piece of symbol ``j+1``; ``w_0`` is the point ``z_m``.

    The anchor sits in the piece of symbol ``m+1``, or of the last symbol when
    the itinerary is exactly ``m`` long.
    """
    chain = [anchor(itin[min(m, len(itin) - 1)], anchor_re)]
    for j in range(m - 1, -1, -1):
        try:
            chain.append(inverse_branch(fmap, chain[-1], itin[j]))
        except BranchDomainError as exc:
            raise BranchDomainError(f"depth {m}: {exc}", depth=m) from None
    chain.reverse()
    return chain


def pullback(fmap: MapSpec, itin: Itinerary, m: int, anchor_re: float = ANCHOR_RE) -> complex:
    """``z_m``: the anchor pulled back ``m`` times along ``itin``."""
    return pullback_chain(fmap, itin, m, anchor_re)[0]


def _pullbacks(fmap, itin, depth, anchor_re):
    _require_sinh(fmap)
    if depth < 0:
        raise DomainError("depth must be >= 0")
    if depth > len(itin):
        raise DomainError(f"itinerary of length {len(itin)} is shorter than depth {depth}")
    if not 20.0 <= anchor_re <= X_MAX / 2:
        raise DomainError(f"anchor_re must lie in [20, {X_MAX / 2:g}]")
    return [pullback(fmap, itin, m, anchor_re) for m in range(1, depth + 1)]


def trace_ray(fmap: MapSpec, itin: Itinerary, anchor_re: float = ANCHOR_RE,
              depth: int = DEPTH) -> RayApproximation:
    """Approximate the ray with itinerary ``itin`` by ``depth`` pullbacks."""
    raw = _pullbacks(fmap, itin, depth, anchor_re)
    points, depths = [], []
    for m, z in enumerate(raw, start=1):
        if points and z == points[-1]:
            continue
        points.append(z)
        depths.append(m)
    gap = abs(raw[-1] - raw[-2]) if depth >= 2 else (math.inf if depth == 1 else None)
    return RayApproximation(itin, tuple(points), tuple(depths),
                            raw[-1] if raw else None, gap)


class Landing(NamedTuple):
    point: complex
    gap: float
    converged: bool


def landing_point(fmap: MapSpec, itin: Itinerary, depth: int = DEPTH,
                  tol: float = LANDING_TOL, anchor_re: float = ANCHOR_RE) -> Landing:
    """Estimate where the ray lands: the deepest pullback and its last step size.

    ``gap`` is ``inf`` for ``depth == 1``; ``converged`` is ``gap <= tol``.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if depth < 1:
        raise DomainError("depth must be >= 1")
    ray = trace_ray(fmap, itin, anchor_re, depth)
    return Landing(ray.landing_estimate, ray.landing_gap, ray.landing_gap <= tol)


def forward_violations(fmap: MapSpec, ray: RayApproximation, eps: float = EPS_AXIS,
                       anchor_re: float = ANCHOR_RE) -> list[tuple[int, int, complex]]:
    """Check that each traced point follows its itinerary forward.

    A point of depth ``m`` is checked along its pullback chain
    ``w_0 = z, ..., w_m``: ``w_j`` must lie in the closed piece of symbol
    ``j+1`` (slack ``eps * max(1, |w_j|)``) and ``f(w_j)`` must agree with
    ``w_{j+1}`` to the round-trip tolerance.  Plain forward iteration of a
    deep point is useless here: near a repelling landing point rounding
    errors grow by ``|f'|`` per step.  Returns the offending
    ``(point index, j, w_j)`` triples; empty means consistent.
    """
    bad = []
    itin = ray.itinerary
    for i, (z, m) in enumerate(zip(ray.points, ray.depths)):
        chain = pullback_chain(fmap, itin, m, anchor_re)
        if chain[0] != z:
            bad.append((i, 0, z))
            continue
        for j in range(min(m, len(itin) - 1) + 1):
            w = chain[j]
            ok = itin[j].contains(w, eps * max(1.0, abs(w)))
            if ok and j < m:
                ok = abs(evaluate(fmap, w) - chain[j + 1]) <= \
                    ROUND_TRIP_TOL * max(1.0, abs(chain[j + 1]))
            if not ok:
                bad.append((i, j, w))
                break
    return bad
