"""Reader/writer for the plain ``key = value`` text format.

Scenario files and experiment config files share this format: UTF-8,
one assignment per line, ``#`` starts a comment, blank lines ignored.
"""

from __future__ import annotations

from pathlib import Path


class KVFormatError(ValueError):
    """Raised on a malformed or inconsistent key/value file."""


def parse_kv(text: str, source: str = "<string>") -> dict[str, str]:
    """Parse ``key = value`` lines into an ordered dict of raw strings.

    Duplicate keys and lines without ``=`` are rejected with an error
    naming the offending line.
    """
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise KVFormatError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise KVFormatError(f"{source}:{lineno}: empty key")
        if key in out:
            raise KVFormatError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def read_kv(path: str | Path) -> dict[str, str]:
    path = Path(path)
    return parse_kv(path.read_text(encoding="utf-8"), source=str(path))


def format_kv(items: dict[str, object]) -> str:
    lines = []
    for key, value in items.items():
        if isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def get_float(kv: dict[str, str], key: str, source: str = "<string>") -> float:
    if key not in kv:
        raise KVFormatError(f"{source}: missing key {key!r}")
    try:
        return float(kv[key])
    except ValueError:
        raise KVFormatError(f"{source}: key {key!r} is not a number: {kv[key]!r}") from None


def get_int(kv: dict[str, str], key: str, source: str = "<string>") -> int:
    if key not in kv:
        raise KVFormatError(f"{source}: missing key {key!r}")
    try:
        return int(kv[key])
    except ValueError:
        raise KVFormatError(f"{source}: key {key!r} is not an integer: {kv[key]!r}") from None
