"""Memo table of computed correlators and its text file format.

File layout (UTF-8, LF)::

    psicache v1
    <g>;<d1,d2,...>;<num>/<den>

Parts are sorted non-increasing, records are sorted by ``(g, parts)``.
"""
from __future__ import annotations

import os
import tempfile
from fractions import Fraction
from typing import IO, Iterator

from .arith import format_rational, kernel_number, parse_rational, to_exact
from .exceptions import CacheFormatError
from .partitions import CorrelatorKey, format_partition, parse_partition

HEADER = "psicache v1"

__all__ = ["MemoCache", "cache_save", "cache_load", "save_path", "load_path", "HEADER"]


class MemoCache:
    """Map from canonical keys to exact correlator values.

    ``table`` is the raw dict the recursion kernel writes into; its values
    are kernel numbers (mpq).  The accessors here convert to Fraction.
    """

    def __init__(self, table: dict | None = None):
        self.table: dict = {} if table is None else table
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self.table)

    def __contains__(self, key) -> bool:
        return tuple(key) in self.table

    def get(self, key) -> Fraction | None:
        v = self.table.get(tuple(key))
        return None if v is None else to_exact(v)

    def insert(self, key, value) -> None:
        """Insert a value; re-inserting a key must supply the identical value."""
        g, parts = key
        key = (int(g), tuple(int(x) for x in parts))
        if list(key[1]) != sorted(key[1], reverse=True):
            raise ValueError(f"key parts must be sorted non-increasing: {key[1]}")
        value = to_exact(value)
        old = self.table.get(key)
        if old is not None:
            if to_exact(old) != value:
                raise ValueError(f"conflicting values for {key}: {to_exact(old)} != {value}")
            return
        self.table[key] = kernel_number(value.numerator, value.denominator)

    def keys(self) -> list:
        return sorted(CorrelatorKey(g, d) for g, d in self.table)

    def items(self) -> Iterator[tuple[CorrelatorKey, Fraction]]:
        for key in self.keys():
            yield key, to_exact(self.table[key])

    def as_dict(self) -> dict:
        return dict(self.items())

    def update(self, other: "MemoCache") -> None:
        for key, value in other.items():
            self.insert(key, value)


def cache_save(cache: MemoCache, sink: IO[str]) -> int:
    """Write the cache to an open text stream; returns the record count."""
    sink.write(HEADER + "\n")
    count = 0
    for (g, parts), value in cache.items():
        sink.write(f"{g};{format_partition(parts)};{format_rational(value)}\n")
        count += 1
    return count


def save_path(cache: MemoCache, path: str | os.PathLike) -> int:
    """Write atomically: a temp file in the same directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".psicache-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            count = cache_save(cache, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return count


def cache_load(source: IO[str]) -> MemoCache:
    text = source.read()
    if not text:
        raise CacheFormatError("empty file, missing header", line=1)
    lines = text.split("\n")
    # a well-formed file ends with LF, so the final split element is empty
    truncated = lines[-1] != ""
    if not truncated:
        lines.pop()
    if lines[0] != HEADER:
        raise CacheFormatError(f"unsupported header {lines[0]!r}, expected {HEADER!r}", line=1)
    cache = MemoCache()
    for lineno, line in enumerate(lines[1:], start=2):
        if truncated and lineno == len(lines):
            raise CacheFormatError("truncated record (no line terminator)", line=lineno)
        fields = line.split(";")
        if len(fields) != 3:
            raise CacheFormatError(f"expected 3 ';'-separated fields, got {len(fields)}", line=lineno)
        try:
            g = int(fields[0])
            parts = parse_partition(fields[1])
            value = parse_rational(fields[2])
        except ValueError as exc:
            raise CacheFormatError(str(exc), line=lineno) from None
        if g < 0:
            raise CacheFormatError(f"negative genus {g}", line=lineno)
        try:
            cache.insert((g, parts), value)
        except ValueError as exc:
            raise CacheFormatError(str(exc), line=lineno) from None
    return cache


def load_path(path: str | os.PathLike) -> MemoCache:
    with open(path, encoding="utf-8", newline="") as fh:
        return cache_load(fh)
