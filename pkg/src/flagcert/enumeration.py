"""Isomorph-free enumeration of red/blue-colored graphs avoiding a forbidden family."""

from __future__ import annotations

import hashlib
import logging
import os
from itertools import product
from pathlib import Path

from .errors import CapacityError
from .graphs import ColoredGraph, ForbiddenFamily, get_family, is_family_free

__all__ = ["enumerate_colored_graphs", "MAX_ENUM_VERTICES", "cache_dir"]

log = logging.getLogger(__name__)

MAX_ENUM_VERTICES = 7
CACHE_FORMAT = "flagcert-graphs-v1"

_memo: dict[tuple[int, str], tuple[ColoredGraph, ...]] = {}


def cache_dir() -> Path | None:
    d = os.environ.get("FLAGCERT_CACHE_DIR")
    return Path(d) if d else None


def _family_name(family) -> str:
    fam = family if isinstance(family, ForbiddenFamily) or family is None else get_family(family)
    return "NONE" if fam is None else fam.name


def _extend(parent: ColoredGraph, row) -> ColoredGraph:
    """Append a vertex joined to ``parent``'s vertices with the given colors."""
    n = parent.n
    cols = parent.colors
    out = []
    start = 0
    for i in range(n):
        width = n - 1 - i
        out.extend(cols[start:start + width])
        out.append(row[i])
        start += width
    return ColoredGraph(n + 1, out)


def _from_key(key: bytes) -> ColoredGraph:
    g = ColoredGraph(key[0], key[1:])
    g._key = key
    return g


def enumerate_colored_graphs(n: int, family: ForbiddenFamily | str | None = None) -> list[ColoredGraph]:
    """One canonical representative per isomorphism class of family-free graphs.

    Graphs on ``n`` vertices are built by appending a vertex, with every
    possible color row, to the representatives on ``n - 1`` vertices;
    induced subgraphs of family-free graphs are family-free, so nothing is
    lost. Output is sorted by canonical key.
    """
    if n < 0 or n > MAX_ENUM_VERTICES:
        raise CapacityError(f"enumeration supports 0 <= n <= {MAX_ENUM_VERTICES}, got {n}")
    fam = family if isinstance(family, ForbiddenFamily) or family is None else get_family(family)
    name = _family_name(fam)
    memo_key = (n, name)
    if memo_key in _memo:
        return list(_memo[memo_key])
    cached = _load(n, name)
    if cached is not None:
        _memo[memo_key] = cached
        return list(cached)

    if n == 0:
        result = (ColoredGraph(0, ()),)
    else:
        parents = enumerate_colored_graphs(n - 1, fam)
        seen: dict[bytes, ColoredGraph | None] = {}
        for parent in parents:
            for row in product((0, 1, 2), repeat=n - 1):
                g = _extend(parent, row)
                key = g.canonical_key()
                if key in seen:
                    continue
                seen[key] = g if fam is None or is_family_free(g, fam) else None
        result = tuple(_from_key(k) for k in sorted(k for k, g in seen.items() if g is not None))
        log.debug("enumerated %d graphs on %d vertices (%s)", len(result), n, name)
    _memo[memo_key] = result
    _store(n, name, result)
    return list(result)


def _cache_path(n: int, name: str) -> Path | None:
    d = cache_dir()
    if d is None:
        return None
    return d / f"{CACHE_FORMAT}-{name}-{n}.txt"


def _digest(lines: list[str]) -> str:
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()


def _load(n: int, name: str):
    path = _cache_path(n, name)
    if path is None or not path.exists():
        return None
    try:
        header, *lines = path.read_text().splitlines()
        fmt, digest = header.split()
        if fmt != CACHE_FORMAT or digest != _digest(lines):
            raise ValueError("stale cache")
        graphs = tuple(ColoredGraph.decode(s) for s in lines)
    except (ValueError, OSError):
        log.info("regenerating cache file %s", path)
        return None
    if any(g.n != n for g in graphs):
        return None
    return tuple(_from_key(bytes([n]) + bytes(g.colors)) for g in graphs)


def _store(n: int, name: str, graphs) -> None:
    path = _cache_path(n, name)
    if path is None:
        return
    lines = [g.encode() for g in graphs]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(f"{CACHE_FORMAT} {_digest(lines)}\n" + "\n".join(lines) + "\n")
        tmp.replace(path)
    except OSError as exc:  # cache is best effort
        log.warning("could not write cache %s: %s", path, exc)
