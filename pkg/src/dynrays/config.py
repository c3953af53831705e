"""Flat ``key = value`` configuration files with ``#`` comments."""

from __future__ import annotations

from .errors import ConfigError


def parse_config(text: str) -> dict[str, tuple[str, int]]:
    """Map each key (dashes folded to underscores) to ``(value, line number)``."""
    out = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not eq or not key:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=n)
        if not key.isidentifier():
            raise ConfigError(f"bad key {key!r}", line=n)
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", line=n)
        out[key] = (value.strip(), n)
    return out


def load_config(path) -> dict[str, tuple[str, int]]:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path}: not UTF-8 ({exc.reason})") from None
