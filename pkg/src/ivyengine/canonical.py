"""Canonical JSON: strict parsing and byte-stable pretty printing.

Every on-disk format, CLI output, and service response flows through these
functions, so structurally equal values always serialize to equal bytes:
2-space indent, preserved key order, UTF-8, shortest round-trip numbers,
trailing newline.
"""

from __future__ import annotations

import hashlib
import json
import math

from .errors import JsonSyntaxError


def _reject_constant(name: str):
    raise JsonSyntaxError(f"non-finite number {name!r} is not allowed")


def _finite_float(text: str) -> float:
    value = float(text)
    # json.loads only calls parse_constant for literal NaN/Infinity tokens;
    # overflowing decimals like 1e999 arrive here as inf.
    if not math.isfinite(value):
        raise JsonSyntaxError(f"number {text!r} overflows to a non-finite value")
    return value


def _strict_pairs(pairs):
    out: dict = {}
    for key, value in pairs:
        if key in out:
            raise JsonSyntaxError(f"duplicate object key {key!r}")
        out[key] = value
    return out


def loads(data: bytes | str):
    """Parse JSON strictly: duplicate keys and non-finite numbers rejected."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise JsonSyntaxError(f"input is not valid UTF-8: {exc}") from exc
    try:
        return json.loads(
            data,
            object_pairs_hook=_strict_pairs,
            parse_float=_finite_float,
            parse_constant=_reject_constant,
        )
    except json.JSONDecodeError as exc:
        raise JsonSyntaxError(f"invalid JSON: {exc}", position=exc.pos) from exc


def dumps(value) -> str:
    """Canonical pretty-print; insertion order of dict keys is preserved."""
    return json.dumps(value, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def dump_bytes(value) -> bytes:
    return dumps(value).encode("utf-8")


def digest(value) -> str:
    """sha256 hex digest of the canonical bytes; used for stable file names."""
    return hashlib.sha256(dump_bytes(value)).hexdigest()


def atomic_text(value) -> str:
    """Splice form of an atomic: shortest round-trip numbers, true/false,
    Null as the empty string."""
    if value is None:
        return ""
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)):
        return ",".join(atomic_text(v) for v in value)
    raise TypeError(f"not an atomic value: {value!r}")
