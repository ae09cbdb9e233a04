"""Flat key-value experiment configs.

The format is one `dotted.key = value` per line, with blank lines and
`#` comments ignored. Values are typed by shape:

    model.a = -0.1              scalar (int or float)
    run.window = [5.0, 10.0]    list (comma separated)
    sweep.center = [0.0:2.0:0.05]  inclusive range start:stop:step
    filter.modes = full_adf, uniform_coding   bare comma list of words
    io.label = baseline         bare word

Parsing failures always name the offending key.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError


def _parse_scalar(token: str):
    token = token.strip()
    low = token.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token


def _parse_range(key: str, body: str) -> list[float]:
    parts = body.split(":")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"key '{key}': bad range '[{body}]': {exc}") from exc
    if step <= 0.0 or stop < start:
        raise ConfigError(
            f"key '{key}': range needs step > 0 and stop >= start, got [{body}]")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(count)]


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if not raw:
        raise ConfigError(f"key '{key}': empty value")
    if raw.startswith("["):
        if not raw.endswith("]"):
            raise ConfigError(f"key '{key}': unterminated '[' in '{raw}'")
        body = raw[1:-1].strip()
        if not body:
            raise ConfigError(f"key '{key}': empty list")
        if ":" in body:
            return _parse_range(key, body)
        return [_parse_scalar(tok) for tok in body.split(",")]
    if "," in raw:
        return [_parse_scalar(tok) for tok in raw.split(",")]
    return _parse_scalar(raw)


def parse_config(text: str) -> dict:
    """Parse config text into a flat {key: value} dict.

    Raises:
        ConfigError: on syntax errors, naming the key (or line) at fault.
    """
    out: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got '{stripped}'")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: missing key before '='")
        if key in out:
            raise ConfigError(f"key '{key}': duplicate assignment (line {lineno})")
        out[key] = _parse_value(key, raw)
    return out


def load_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def take(cfg: dict, key: str, kind, default=None, required: bool = False):
    """Fetch and type-check one config value.

    `kind` is float, int, bool, str, or list. Scalars found where a list is
    requested are wrapped; ints promote to float. Raises ConfigError naming
    the key on a type mismatch or a missing required key.
    """
    if key not in cfg:
        if required:
            raise ConfigError(f"key '{key}': required but missing")
        return default
    value = cfg[key]
    if kind is list:
        if not isinstance(value, list):
            value = [value]
        return value
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind is bool and isinstance(value, bool):
        return value
    if kind is str and isinstance(value, str):
        return value
    raise ConfigError(
        f"key '{key}': expected {kind.__name__}, got {value!r}")
