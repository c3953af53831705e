"""``dyn`` command line: tables (CSV) and images (PPM) for every module.

Settings come from flags, then from ``--config FILE`` (``key = value``
lines, keys named like the long flags), then from built-in defaults.
Exit status: 0 on success, 2 for bad arguments, 1 for runtime errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

from . import _kernels
from .cantor import (cantor_intervals, fat_cantor_generations, fat_cantor_measure,
                     karpinska_states, middle_third, product_square, _as_rectset)
from .config import load_config
from .dimension import box_counts, cumulative_slopes, box_counting_dimension
from .covering import cover_refinement
from .dynamics import ESCAPE_RE, Itinerary, ParabolaSpec, parse_map
from .errors import ConfigError, DegenerateFit, DynError
from .measure import SampleSpec, escaping_density, exponential_survival, strip_complement_measure
from .rays import landing_point, trace_ray
from .render import Coloring, RenderSpec, render, write_ppm
from .tables import csv_text

# ---------------------------------------------------------------------------
# value parsers (argparse ``type=`` callables)
# ---------------------------------------------------------------------------


def _number(text: str) -> float:
    """Float, also accepting fractions such as ``1/3``."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        try:
            return float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _complex(text: str) -> complex:
    s = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        parts = s.split(",")
        if len(parts) == 2:
            return complex(_number(parts[0]), _number(parts[1]))
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _numbers(count: int | None = None):
    def parse(text: str) -> list[float]:
        vals = [_number(t) for t in text.split(",") if t.strip()]
        if count is not None and len(vals) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers")
        return vals
    return parse


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        w, h = int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 512x512, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("size must be at least 1x1")
    return w, h


def _itinerary(text: str) -> Itinerary:
    try:
        it = Itinerary.parse(text)
    except DynError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not len(it):
        raise argparse.ArgumentTypeError("empty itinerary")
    return it


def _itineraries(text: str) -> list[Itinerary]:
    return [_itinerary(t) for t in text.split(";") if t.strip()]


def _map(text: str):
    try:
        return parse_map(text)
    except DynError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


# ---------------------------------------------------------------------------
# subcommands; each returns (header, rows) or writes an image itself
# ---------------------------------------------------------------------------


def cmd_boxdim(a):
    if a.set == "cantor":
        pts = middle_third(a.depth).lo
    elif a.set == "product":
        pts = product_square(middle_third(a.depth)).corners()
    else:
        pts = cantor_intervals([a.ratio] * a.depth, a.depth).lo
    scales = [a.base ** -m for m in range(1, a.depth + 1)]
    counts = box_counts(pts, scales)
    slopes = cumulative_slopes(counts)
    r2 = []
    for i in range(len(counts)):
        try:
            r2.append(box_counting_dimension(counts[: i + 1])[1])
        except DegenerateFit:
            r2.append(None)
    rows = [(m, c.scale, c.count, s, r) for m, c, s, r in
            zip(range(1, a.depth + 1), counts, slopes, r2)]
    return ["level", "scale", "count", "slope", "r_squared"], rows


def cmd_cantor(a):
    ratios = a.ratios if a.ratios else [1.0 / 3.0] * a.depth
    s = cantor_intervals(ratios, a.depth)
    return ["index", "lo", "hi", "length"], [
        (i, lo, hi, hi - lo) for i, (lo, hi) in enumerate(s.intervals)]


def cmd_fatcantor(a):
    gens = fat_cantor_generations(a.depth)
    return ["generation", "intervals", "measure", "closed_form"], [
        (g.generation, len(g), g.total_length(), fat_cantor_measure(g.generation)) for g in gens]


def cmd_karpinska(a):
    keep = a.keep if a.keep else [1.0 - 4.0 ** -(g + 1) for g in range(a.depth)]
    states = karpinska_states(keep, a.tube_ratio, a.depth, a.initial_width)
    rows = []
    prod = 1.0
    for g, st in enumerate(states):
        if g:
            prod *= keep[g - 1]
        rs = _as_rectset(st)
        rows.append((g, len(rs.squares), rs.square_area(), prod, len(rs.tubes), st.width))
    return ["generation", "squares", "square_area", "keep_product", "tube_pieces",
            "tube_width"], rows


def cmd_density(a):
    spec = SampleSpec(a.seed, a.samples, a.n_max, a.escape_re)
    e = escaping_density(a.map, a.square_lo, a.side, spec)
    bound = 1.0 - 2.0 * math.exp(-a.square_lo.real / 2.0)
    return ["re_lo", "im_lo", "side", "n_samples", "fraction", "stderr", "bound"], [
        (a.square_lo.real, a.square_lo.imag, a.side, e.n_samples, e.fraction, e.stderr, bound)]


def cmd_survival(a):
    spec = SampleSpec(a.seed, a.samples)
    est = exponential_survival(a.lam, a.xi, a.steps, spec)
    rows = [(j, e.fraction, e.stderr, e.n_samples,
             math.log2(e.fraction) if e.fraction > 0 else None) for j, e in enumerate(est)]
    return ["step", "fraction", "stderr", "n_samples", "log2_fraction"], rows


def cmd_stripbound(a):
    spec = SampleSpec(a.seed, a.samples, a.n_max, a.escape_re)
    r = strip_complement_measure(a.map, a.xi0, tuple(a.band), spec, a.re_cap)
    return ["xi0", "re_cap", "estimate", "sigma", "paper_bound"], [
        (a.xi0, a.re_cap, r.estimate, r.sigma, r.paper_bound)]


def cmd_cover(a):
    gens = cover_refinement(a.map, ParabolaSpec(a.p, a.xi), a.seed_re, a.generations, a.d)
    rows = []
    for i, g in enumerate(gens):
        ratio = g.measure_sum / gens[i - 1].measure_sum if i else None
        rows.append((g.generation, g.n_boxes, g.measure_sum, ratio))
    return ["generation", "n_boxes", "measure_sum", "ratio_to_previous"], rows


def cmd_ray(a):
    ray = trace_ray(a.map, a.itinerary, a.anchor_re, min(a.depth, len(a.itinerary)))
    return ["depth", "re", "im"], [(m, z.real, z.imag) for m, z in zip(ray.depths, ray.points)]


def cmd_land(a):
    depth = min(a.depth, len(a.itinerary))
    z, gap, ok = landing_point(a.map, a.itinerary, depth, a.tol, a.anchor_re)
    return ["depth", "re", "im", "abs", "gap", "converged"], [
        (depth, z.real, z.imag, abs(z), gap, ok)]


def cmd_render(a):
    w, h = a.size
    spec = RenderSpec(tuple(a.window), w, h, Coloring(a.coloring), a.n_max, a.escape_re)
    img = render(a.map, spec, a.rays or ())
    write_ppm(a.out or "render.ppm", img)


TABLES = {
    "boxdim": cmd_boxdim, "cantor": cmd_cantor, "fatcantor": cmd_fatcantor,
    "karpinska": cmd_karpinska, "density": cmd_density, "survival": cmd_survival,
    "stripbound": cmd_stripbound, "cover": cmd_cover, "ray": cmd_ray, "land": cmd_land,
}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", type=_map, default="sinh:k=1",
                        help="sinh:k=N | sine:k=N | exp:lambda=Z | general:a=Z,b=Z")
    common.add_argument("--out", default=None, help="output path ('-' for stdout tables)")
    common.add_argument("--seed", type=_nonneg_int, default=0, help="sampling seed")
    common.add_argument("--config", default=None, help="key = value settings file")

    p = argparse.ArgumentParser(prog="dyn", description="Escaping sets of exponential-type maps.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, description=help_)

    s = add("render", "escape-time / partition / ray image (PPM)")
    s.add_argument("--window", type=_numbers(4), default="-8,8,-8,8",
                   help="re_min,re_max,im_min,im_max")
    s.add_argument("--size", type=_size, default="512x512", help="WIDTHxHEIGHT")
    s.add_argument("--coloring", choices=[c.value for c in Coloring], default="escape")
    s.add_argument("--n-max", type=_positive_int, default=50)
    s.add_argument("--escape-re", type=_number, default=ESCAPE_RE)
    s.add_argument("--rays", type=_itineraries, default="",
                   help="itineraries separated by ';' (for --coloring rays)")

    s = add("boxdim", "box counts and fitted slopes of Cantor sets")
    s.add_argument("--set", choices=["cantor", "product", "ratio"], default="cantor")
    s.add_argument("--depth", type=_positive_int, default=8)
    s.add_argument("--base", type=_number, default=3.0, help="scales are base^-m, m = 1..depth")
    s.add_argument("--ratio", type=_number, default=1.0 / 3.0, help="ratio for --set ratio")

    s = add("cantor", "intervals of a variable-ratio Cantor set")
    s.add_argument("--depth", type=_nonneg_int, default=2)
    s.add_argument("--ratios", type=_numbers(), default=None, help="comma-separated, e.g. 1/3,1/3")

    s = add("fatcantor", "measure of the fat Cantor construction by generation")
    s.add_argument("--depth", type=_nonneg_int, default=10)

    s = add("karpinska", "squares-with-tubes construction by generation")
    s.add_argument("--depth", type=_nonneg_int, default=8)
    s.add_argument("--keep", type=_numbers(), default=None,
                   help="keep fractions per generation (default 1 - 4^-(g+1))")
    s.add_argument("--tube-ratio", type=_number, default=0.1)
    s.add_argument("--initial-width", type=_number, default=0.05)

    s = add("density", "fraction of escaping points in a square")
    s.add_argument("--square-lo", type=_complex, default="6,0", help="lower-left corner re,im")
    s.add_argument("--side", type=_number, default=2 * math.pi)
    s.add_argument("--samples", type=_positive_int, default=100_000)
    s.add_argument("--n-max", type=_positive_int, default=50)
    s.add_argument("--escape-re", type=_number, default=ESCAPE_RE)

    s = add("survival", "survival of lambda*exp(z) in a half-plane")
    s.add_argument("--lambda", dest="lam", type=_complex, default="1")
    s.add_argument("--xi", type=_number, default=10.0)
    s.add_argument("--steps", type=_nonneg_int, default=6)
    s.add_argument("--samples", type=_positive_int, default=100_000)

    s = add("stripbound", "non-escaping area in a truncated strip")
    s.add_argument("--xi0", type=_number, default=8.0)
    s.add_argument("--band", type=_numbers(2), default=f"0,{2 * math.pi!r}")
    s.add_argument("--re-cap", type=_number, default=30.0)
    s.add_argument("--samples", type=_positive_int, default=100_000)
    s.add_argument("--n-max", type=_positive_int, default=50)
    s.add_argument("--escape-re", type=_number, default=ESCAPE_RE)

    s = add("cover", "covering-refinement measure sums")
    s.add_argument("--p", type=_number, default=2.0)
    s.add_argument("--xi", type=_number, default=20.0)
    s.add_argument("--seed-re", type=_number, default=20.0)
    s.add_argument("--generations", type=_nonneg_int, default=1)
    s.add_argument("--d", type=_number, default=1.6)

    for name, help_ in (("ray", "points of a traced ray"), ("land", "landing-point estimate")):
        s = add(name, help_)
        s.add_argument("--itinerary", type=_itinerary, default="0R*24")
        s.add_argument("--depth", type=_positive_int, default=24)
        s.add_argument("--anchor-re", type=_number, default=25.0)
        if name == "land":
            s.add_argument("--tol", type=_number, default=1e-9)
    return p


def _apply_config(parser: argparse.ArgumentParser, command: str, path: str) -> None:
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sp = sub.choices[command]
    actions = {a.dest: a for a in sp._actions if a.dest not in ("help", "config")}
    for key, (value, line) in load_config(path).items():
        act = actions.get(key)
        if act is None:
            raise ConfigError(f"unknown setting {key!r} for '{command}'", line=line)
        try:
            conv = act.type(value) if act.type else value
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise ConfigError(f"{key}: {exc}", line=line) from None
        if act.choices is not None and conv not in act.choices:
            raise ConfigError(f"{key}: {value!r} is not one of {list(act.choices)}", line=line)
        sp.set_defaults(**{key: conv})


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    _kernels.configure_threads()
    try:
        if args.config:
            _apply_config(parser, args.command, args.config)
            args = parser.parse_args(argv)
        if args.command == "render":
            cmd_render(args)
            return 0
        header, rows = TABLES[args.command](args)
        text = csv_text(header, rows)
        out = args.out or f"{args.command}.csv"
        if out == "-":
            sys.stdout.write(text)
        else:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except (DynError, OSError) as exc:
        print(f"dyn: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
