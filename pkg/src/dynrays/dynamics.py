"""Maps of the form ``a e^z + b e^-z`` and their orbits.

Points are plain Python ``complex`` values (numpy ``complex128`` for arrays).
The family includes ``k*pi*sinh z``, its rotated twin ``k*pi*sin z`` and the
exponential maps ``lam*e^z``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, OverflowGuard

X_MAX = 700.0
ESCAPE_RE = 50.0
EPS_AXIS = 1e-12
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MapSpec:
    """A member of the family ``f(z) = a e^z + b e^-z`` (or its rotation).

    Build instances with the constructors :meth:`sinh`, :meth:`sine`,
    :meth:`exponential` and :meth:`general`.  ``a`` and ``b`` are always the
    coefficients of the unrotated (hyperbolic) form; for the sine family the
    map is ``z -> -i * g(i z)`` with ``g = a e^z + b e^-z``.
    """

    family: str
    a: complex
    b: complex
    k: int | None = None

    @classmethod
    def sinh(cls, k: int = 1) -> "MapSpec":
        if int(k) != k or k == 0:
            raise DomainError("k must be a nonzero integer")
        return cls("sinh", complex(k * math.pi / 2), complex(-k * math.pi / 2), int(k))

    @classmethod
    def sine(cls, k: int = 1) -> "MapSpec":
        if int(k) != k or k == 0:
            raise DomainError("k must be a nonzero integer")
        return cls("sine", complex(k * math.pi / 2), complex(-k * math.pi / 2), int(k))

    @classmethod
    def exponential(cls, lam: complex) -> "MapSpec":
        if lam == 0:
            raise DomainError("lambda must be nonzero")
        return cls("exp", complex(lam), 0j)

    @classmethod
    def general(cls, a: complex, b: complex) -> "MapSpec":
        if a == 0 or b == 0:
            raise DomainError("a and b must be nonzero")
        return cls("general", complex(a), complex(b))

    @property
    def rotated(self) -> bool:
        return self.family == "sine"

    @property
    def odd_real(self) -> bool:
        """True when ``f`` is odd with real coefficients, i.e. a multiple of sinh.

        These maps fix 0 and send the imaginary axis onto a bounded segment.
        """
        return self.b == -self.a and self.a.imag == 0.0

    @property
    def is_sinh_family(self) -> bool:
        return self.family in ("sinh", "sine") or (self.family == "general" and self.odd_real)

    @property
    def segment_half_length(self) -> float:
        """Half length of the invariant segment ``f(iR)`` for odd real maps."""
        return 2.0 * abs(self.a.real)

    def __str__(self):
        if self.family in ("sinh", "sine"):
            return f"{self.family}:k={self.k}"
        if self.family == "exp":
            return f"exp:lambda={_fmt_complex(self.a)}"
        return f"general:a={_fmt_complex(self.a)},b={_fmt_complex(self.b)}"


def _fmt_complex(z):
    return f"{z.real!r}{z.imag:+}j" if z.imag else repr(z.real)


def parse_map(text: str) -> MapSpec:
    """Parse ``sinh:k=1``, ``sine:k=2``, ``exp:lambda=1+0.5j`` or ``general:a=..,b=..``."""
    name, _, rest = text.strip().partition(":")
    params = {}
    for part in filter(None, rest.split(",")):
        key, sep, value = part.partition("=")
        if not sep:
            raise DomainError(f"bad map parameter {part!r}")
        params[key.strip()] = value.strip()
    try:
        if name == "sinh":
            return MapSpec.sinh(int(params.get("k", 1)))
        if name in ("sin", "sine"):
            return MapSpec.sine(int(params.get("k", 1)))
        if name == "exp":
            return MapSpec.exponential(complex(params.get("lambda", "1")))
        if name == "general":
            return MapSpec.general(complex(params["a"]), complex(params["b"]))
    except (KeyError, ValueError) as exc:
        raise DomainError(f"bad map specification {text!r}: {exc}") from None
    raise DomainError(f"unknown map family {name!r}")


def _hyperbolic(a: complex, b: complex, z: complex) -> complex:
    x, y = z.real, z.imag
    if abs(x) > X_MAX:
        raise OverflowGuard(f"|Re z| = {abs(x):g} exceeds {X_MAX:g}")
    re, im = _kernels._step_np(x, y, a.real, a.imag, b.real, b.imag)
    return complex(float(re), float(im))


def evaluate(fmap: MapSpec, z: complex) -> complex:
    """Return ``f(z)``; raises :class:`OverflowGuard` when ``|Re z| > 700``."""
    z = complex(z)
    if fmap.rotated:
        return -1j * _hyperbolic(fmap.a, fmap.b, 1j * z)
    return _hyperbolic(fmap.a, fmap.b, z)


def derivative(fmap: MapSpec, z: complex) -> complex:
    """Return ``f'(z) = a e^z - b e^-z`` (rotated for the sine family)."""
    z = complex(z)
    if fmap.rotated:
        return _hyperbolic(fmap.a, -fmap.b, 1j * z)
    return _hyperbolic(fmap.a, -fmap.b, z)


def evaluate_array(fmap: MapSpec, z: np.ndarray) -> np.ndarray:
    """Vectorised :func:`evaluate`; the same overflow guard applies elementwise."""
    z = np.asarray(z, dtype=complex)
    w = 1j * z if fmap.rotated else z
    if np.any(np.abs(w.real) > X_MAX):
        raise OverflowGuard(f"|Re z| exceeds {X_MAX:g}")
    a, b = fmap.a, fmap.b
    re, im = _kernels._step_np(w.real, w.imag, a.real, a.imag, b.real, b.imag)
    out = re + 1j * im
    return -1j * out if fmap.rotated else out


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------


class Status(enum.Enum):
    ESCAPED = "Escaped"
    BOUNDED = "Bounded"
    HIT_INVARIANT_SET = "HitInvariantSet"


class InvariantSet(enum.Enum):
    REAL_AXIS = "RealAxis"
    IMAGINARY_AXIS = "ImaginaryAxis"
    FIXED_POINT_ZERO = "FixedPointZero"


_STATUS = {_kernels.ESCAPED: Status.ESCAPED, _kernels.BOUNDED: Status.BOUNDED,
           _kernels.HIT: Status.HIT_INVARIANT_SET}
_INVARIANT = {_kernels.INV_NONE: None, _kernels.INV_REAL: InvariantSet.REAL_AXIS,
              _kernels.INV_IMAG: InvariantSet.IMAGINARY_AXIS,
              _kernels.INV_ZERO: InvariantSet.FIXED_POINT_ZERO}


@dataclass(frozen=True)
class EscapeRecord:
    status: Status
    steps_taken: int
    last_point: complex
    max_abs_re: float
    invariant_set: InvariantSet | None = None

    @property
    def escaped(self) -> bool:
        return self.status is Status.ESCAPED


@dataclass(frozen=True)
class OrbitBatch:
    """Array form of :class:`EscapeRecord` for many starting points.

    ``status`` and ``invariant`` hold the integer codes from ``_kernels``.
    ``last_point`` is in the caller's frame; for the sine family ``max_abs_re``
    is measured in the rotated (hyperbolic) frame.
    """

    status: np.ndarray
    invariant: np.ndarray
    steps: np.ndarray
    last_point: np.ndarray
    max_abs_re: np.ndarray

    @property
    def escaped(self) -> np.ndarray:
        return self.status == _kernels.ESCAPED


def _check_iterate_args(n_max, escape_re):
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    if not 0.0 < escape_re <= X_MAX:
        raise DomainError(f"escape_re must lie in (0, {X_MAX:g}]")


def iterate_many(fmap: MapSpec, z, n_max: int, escape_re: float = ESCAPE_RE,
                 eps: float = EPS_AXIS) -> OrbitBatch:
    """Classify the orbits of every point in ``z`` (any shape, flattened)."""
    _check_iterate_args(n_max, escape_re)
    z = np.asarray(z, dtype=complex).ravel()
    w = 1j * z if fmap.rotated else z
    a, b = fmap.a, fmap.b
    status, inv, steps, lre, lim, mre = _kernels.escape_orbits(
        w.real, w.imag, a.real, a.imag, b.real, b.imag,
        n_max, escape_re, eps, fmap.is_sinh_family)
    last = lre + 1j * lim
    if fmap.rotated:
        last = -1j * last
    return OrbitBatch(status, inv, steps, last, mre)


def iterate(fmap: MapSpec, z: complex, n_max: int, escape_re: float = ESCAPE_RE,
            eps: float = EPS_AXIS) -> EscapeRecord:
    """Follow the orbit of ``z`` for at most ``n_max`` steps.

    The orbit stops as *Escaped* once ``|Re|`` exceeds ``escape_re``, and, for
    sinh-type maps, as *HitInvariantSet* when it comes within ``eps`` of the
    fixed point 0 or of the imaginary axis (whose image is the bounded
    invariant segment ``[-k pi i, k pi i]``).  The real axis escapes, so it is
    never a stopping condition.  For the sine family, ``max_abs_re`` is
    measured in the rotated (hyperbolic) frame.
    """
    batch = iterate_many(fmap, [z], n_max, escape_re, eps)
    return EscapeRecord(
        status=_STATUS[int(batch.status[0])],
        steps_taken=int(batch.steps[0]),
        last_point=complex(batch.last_point[0]),
        max_abs_re=float(batch.max_abs_re[0]),
        invariant_set=_INVARIANT[int(batch.invariant[0])],
    )


# ---------------------------------------------------------------------------
# symbolic dynamics
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class ItinerarySymbol:
    """The piece ``U_{n,side}``: real part of sign ``side``, Im in [2 pi n, 2 pi (n+1)]."""

    strip_index: int
    side: str

    def __post_init__(self):
        if self.side not in ("R", "L"):
            raise DomainError(f"side must be 'R' or 'L', got {self.side!r}")

    def __str__(self):
        return f"{self.strip_index}{self.side}"

    @classmethod
    def parse(cls, token: str) -> "ItinerarySymbol":
        token = token.strip()
        try:
            return cls(int(token[:-1].replace("_", "")), token[-1].upper())
        except (ValueError, IndexError):
            raise DomainError(f"bad itinerary symbol {token!r}") from None

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        """Closed-piece membership, widened by ``slack``."""
        lo = TWO_PI * self.strip_index
        if not lo - slack <= z.imag <= lo + TWO_PI + slack:
            return False
        return z.real >= -slack if self.side == "R" else z.real <= slack


@dataclass(frozen=True)
class Itinerary:
    symbols: tuple[ItinerarySymbol, ...]
    ambiguous_at: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "ambiguous_at", frozenset(self.ambiguous_at))
        if any(not 0 <= i < len(self.symbols) for i in self.ambiguous_at):
            raise DomainError("ambiguous_at indices out of range")

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def __str__(self):
        return ",".join(map(str, self.symbols))

    def shift(self, n: int = 1) -> "Itinerary":
        return Itinerary(self.symbols[n:], {i - n for i in self.ambiguous_at if i >= n})

    @classmethod
    def parse(cls, text: str) -> "Itinerary":
        """Parse comma/space separated symbols; ``tok*n`` repeats a token.

        ``"0R*24"`` is 24 copies of ``0R``; ``"0R,-1L*23"`` is ``0R`` followed
        by 23 copies of ``-1L``.
        """
        symbols = []
        for token in text.replace(",", " ").split():
            base, star, count = token.partition("*")
            n = 1
            if star:
                try:
                    n = int(count)
                except ValueError:
                    raise DomainError(f"bad repeat count in {token!r}") from None
            symbols.extend([ItinerarySymbol.parse(base)] * n)
        return cls(tuple(symbols))


def classify(z: complex, eps: float = EPS_AXIS) -> tuple[ItinerarySymbol, bool]:
    """Partition piece containing ``z`` and whether ``z`` sits on a boundary.

    Boundaries are the imaginary axis and the lines ``Im z = 2 pi m``.  Ties
    are broken deterministically: on a horizontal line the right half takes
    the strip above and the left half the strip below (so R+ is ``0R`` and
    R- is ``-1L``); on the imaginary axis the point is nudged by
    ``eps (1 + i)``.
    """
    x, y = z.real, z.imag
    if abs(x) <= eps:
        return ItinerarySymbol(math.floor((y + eps) / TWO_PI), "R"), True
    m = round(y / TWO_PI)
    if abs(y - TWO_PI * m) <= eps:
        return (ItinerarySymbol(m, "R") if x > 0 else ItinerarySymbol(m - 1, "L")), True
    return ItinerarySymbol(math.floor(y / TWO_PI), "R" if x > 0 else "L"), False


def classify_many(z, eps: float = EPS_AXIS) -> tuple[np.ndarray, np.ndarray]:
    """Array form of :func:`classify`: ``(strip_index, right)`` with ``right`` boolean."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    m = np.round(y / TWO_PI)
    on_line = np.abs(y - TWO_PI * m) <= eps
    strip = np.floor(y / TWO_PI)
    strip = np.where(on_line, np.where(x > 0, m, m - 1), strip)
    axis = np.abs(x) <= eps
    strip = np.where(axis, np.floor((y + eps) / TWO_PI), strip)
    right = axis | (x > 0)
    return strip.astype(np.int64), right


def itinerary(fmap: MapSpec, z: complex, depth: int, escape_re: float = ESCAPE_RE,
              eps: float = EPS_AXIS) -> Itinerary:
    """Symbols of ``z, f(z), ..., f^(depth-1)(z)``.

    The word stops early (after recording the symbol of the escaping point)
    once ``|Re|`` exceeds ``escape_re``.
    """
    if fmap.family != "sinh":
        raise DomainError("itineraries are defined for the sinh family")
    if depth < 1:
        raise DomainError("depth must be >= 1")
    symbols, ambiguous = [], set()
    z = complex(z)
    for j in range(depth):
        sym, amb = classify(z, eps)
        symbols.append(sym)
        if amb:
            ambiguous.add(j)
        if abs(z.real) > escape_re or j == depth - 1:
            break
        z = evaluate(fmap, z)
    return Itinerary(tuple(symbols), ambiguous)


# ---------------------------------------------------------------------------
# parabola condition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParabolaSpec:
    """The truncated parabola ``|Re z| > xi, |Im z| < |Re z|^(1/p)``."""

    p: float
    xi: float

    def __post_init__(self):
        if not self.p > 1:
            raise DomainError("p must exceed 1")
        if not self.xi > 0:
            raise DomainError("xi must be positive")


def in_parabola(z: complex, spec: ParabolaSpec) -> bool:
    x = abs(z.real)
    return x > spec.xi and abs(z.imag) < x ** (1.0 / spec.p)


def check_horizontal_expansion(fmap: MapSpec, z: complex, w: complex, spec: ParabolaSpec,
                               n_max: int) -> int | None:
    """Smallest ``N`` with ``f^k(z)`` in the parabola for all computed ``k >= N``.

    Both orbits advance in lockstep until ``n_max`` steps or until either
    orbit would trip the overflow guard.  Returns ``None`` when the last
    computed iterate of ``z`` is outside the parabola.
    """
    if not fmap.is_sinh_family:
        raise DomainError("horizontal expansion check needs a sinh-family map")
    z, w = complex(z), complex(w)
    if abs((z - w).imag) >= math.pi:
        raise DomainError("orbits must start with |Im(z - w)| < pi")
    orbit = [z]
    for _ in range(n_max):
        if abs(z.real) > X_MAX or abs(w.real) > X_MAX:
            break
        z, w = evaluate(fmap, z), evaluate(fmap, w)
        orbit.append(z)
    n = None
    for k in range(len(orbit) - 1, -1, -1):
        if not in_parabola(orbit[k], spec):
            break
        n = k
    return n


__all__ = [
    "X_MAX", "ESCAPE_RE", "EPS_AXIS", "MapSpec", "parse_map", "evaluate", "derivative",
    "evaluate_array", "Status", "InvariantSet", "EscapeRecord", "OrbitBatch", "iterate",
    "iterate_many", "ItinerarySymbol", "Itinerary", "classify", "itinerary", "ParabolaSpec",
    "in_parabola", "check_horizontal_expansion",
]
