"""Flat ``key = value`` text format used for configs, scenarios and golden files.

One entry per line.  ``#`` starts a comment.  Lists are comma separated.
Values are kept as strings by :func:`loads`; callers convert them.
"""

from __future__ import annotations

from typing import Iterable, Mapping


class KVFormatError(ValueError):
    pass


def loads(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise KVFormatError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise KVFormatError(f"line {lineno}: empty key")
        if key in out:
            raise KVFormatError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load(path) -> dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(format_value(v) for v in value)
    if hasattr(value, "value"):  # enums
        return str(value.value)
    return str(value)


def dumps(entries: Mapping[str, object], header: Iterable[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines += [f"{k} = {format_value(v)}" for k, v in entries.items()]
    return "\n".join(lines) + "\n"


def parse_list(value: str, conv=str) -> list:
    return [conv(v.strip()) for v in value.split(",") if v.strip()]


def parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise KVFormatError(f"not a boolean: {value!r}")
