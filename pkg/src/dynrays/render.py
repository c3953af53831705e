"""Raster images of the dynamical plane, written as binary PPM (P6).

Pixel ``(row, col)`` has centre ``re_min + (col + 1/2) dx`` and
``im_max - (row + 1/2) dy``; row 0 is the top (``im_max``) edge, so the
window corners are exactly the outer pixel corners.

Escape-time palette: an orbit escaping after ``n`` steps gets hue
``24 n`` degrees (mod 360), full saturation and value
``0.5 + 0.5 min(n, n_max) / n_max``; orbits that do not escape are black.
"""

from __future__ import annotations

import colorsys
import enum
from dataclasses import dataclass

import numpy as np

from .dynamics import ESCAPE_RE, Itinerary, MapSpec, classify_many, iterate_many
from .errors import DomainError
from .rays import ANCHOR_RE, DEPTH, trace_ray


class Coloring(enum.Enum):
    ESCAPE_TIME = "escape"
    FIRST_SYMBOL = "symbol"
    RAY_OVERLAY = "rays"


@dataclass(frozen=True)
class RenderSpec:
    window: tuple[float, float, float, float]
    width_px: int
    height_px: int
    coloring: Coloring = Coloring.ESCAPE_TIME
    n_max: int = 50
    escape_re: float = ESCAPE_RE

    def __post_init__(self):
        re_min, re_max, im_min, im_max = self.window
        if not (re_min < re_max and im_min < im_max):
            raise DomainError("window must satisfy re_min < re_max and im_min < im_max")
        if self.width_px < 1 or self.height_px < 1:
            raise DomainError("image size must be at least 1x1")

    @property
    def dx(self) -> float:
        return (self.window[1] - self.window[0]) / self.width_px

    @property
    def dy(self) -> float:
        return (self.window[3] - self.window[2]) / self.height_px

    def pixel_centres(self) -> np.ndarray:
        re = self.window[0] + (np.arange(self.width_px) + 0.5) * self.dx
        im = self.window[3] - (np.arange(self.height_px) + 0.5) * self.dy
        return re[None, :] + 1j * im[:, None]

    def to_pixel(self, z: complex) -> tuple[float, float]:
        """Continuous (col, row) coordinates of a point."""
        return (z.real - self.window[0]) / self.dx, (self.window[3] - z.imag) / self.dy


def escape_palette(n_max: int) -> np.ndarray:
    """``(n_max + 1, 3)`` uint8 table indexed by ``min(steps, n_max)``."""
    out = np.empty((n_max + 1, 3), np.uint8)
    for n in range(n_max + 1):
        h = (24 * n % 360) / 360.0
        v = 0.5 + 0.5 * n / max(n_max, 1)
        out[n] = [round(255 * c) for c in colorsys.hsv_to_rgb(h, 1.0, v)]
    return out


# strip_index mod 6, right half first then left half (darker)
SYMBOL_COLOURS = np.array([
    [230, 25, 75], [60, 180, 75], [255, 225, 25], [0, 130, 200], [245, 130, 48], [145, 30, 180],
    [115, 12, 37], [30, 90, 37], [128, 112, 12], [0, 65, 100], [122, 65, 24], [72, 15, 90],
], np.uint8)

RAY_COLOUR = np.array([255, 255, 255], np.uint8)


def render_escape(fmap: MapSpec, spec: RenderSpec) -> np.ndarray:
    z = spec.pixel_centres()
    batch = iterate_many(fmap, z, spec.n_max, spec.escape_re)
    pal = escape_palette(spec.n_max)
    img = pal[np.minimum(batch.steps, spec.n_max)]
    img[~batch.escaped] = 0
    return img.reshape(spec.height_px, spec.width_px, 3)


def render_symbol(spec: RenderSpec) -> np.ndarray:
    strip, right = classify_many(spec.pixel_centres())
    idx = np.mod(strip, 6) + np.where(right, 0, 6)
    return SYMBOL_COLOURS[idx]


def _line(img: np.ndarray, c0: int, r0: int, c1: int, r1: int, colour) -> None:
    """Bresenham segment, clipped to the image."""
    h, w = img.shape[:2]
    dc, dr = abs(c1 - c0), -abs(r1 - r0)
    sc = 1 if c0 < c1 else -1
    sr = 1 if r0 < r1 else -1
    err = dc + dr
    c, r = c0, r0
    for _ in range(dc - dr + 1):
        if 0 <= r < h and 0 <= c < w:
            img[r, c] = colour
        if c == c1 and r == r1:
            break
        e2 = 2 * err
        if e2 >= dr:
            err += dr
            c += sc
        if e2 <= dc:
            err += dc
            r += sr


def overlay_rays(img: np.ndarray, fmap: MapSpec, spec: RenderSpec, itineraries,
                 depth: int = DEPTH, anchor_re: float = ANCHOR_RE) -> np.ndarray:
    """Draw the traced points of each ray as a polyline (far end first)."""
    img = img.copy()
    limit = 4 * (spec.width_px + spec.height_px)
    for itin in itineraries:
        if isinstance(itin, str):
            itin = Itinerary.parse(itin)
        ray = trace_ray(fmap, itin, anchor_re, min(depth, len(itin)))
        pix = []
        for z in ray.points:
            c, r = spec.to_pixel(z)
            # keep far-off vertices finite for the line walk
            pix.append((int(np.clip(np.floor(c), -limit, limit)),
                        int(np.clip(np.floor(r), -limit, limit))))
        for (c0, r0), (c1, r1) in zip(pix, pix[1:]):
            _line(img, c0, r0, c1, r1, RAY_COLOUR)
        if len(pix) == 1:
            _line(img, *pix[0], *pix[0], RAY_COLOUR)
    return img


def render(fmap: MapSpec, spec: RenderSpec, rays=()) -> np.ndarray:
    """``(height, width, 3)`` uint8 image for the chosen colouring."""
    if spec.coloring is Coloring.FIRST_SYMBOL:
        return render_symbol(spec)
    img = render_escape(fmap, spec)
    if spec.coloring is Coloring.RAY_OVERLAY:
        img = overlay_rays(img, fmap, spec, rays)
    return img


def ppm_bytes(img: np.ndarray) -> bytes:
    img = np.ascontiguousarray(img, dtype=np.uint8)
    h, w = img.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def write_ppm(path, img: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(ppm_bytes(img))


def read_ppm(path) -> np.ndarray:
    """Read back a P6 file as written by :func:`write_ppm`."""
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6" or parts[2] != b"255":
        raise DomainError("not an 8-bit P6 file")
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], np.uint8).reshape(h, w, 3)
