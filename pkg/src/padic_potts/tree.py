"""Combinatorics of the rooted Cayley tree with branching ``k``.

Vertices are tuples of child indices in ``1..k``; the root is ``()``.  Every
finite slice is stored in *level order*: level 1 first, then level 2, and so
on, lexicographic inside a level.  ``V_n`` is levels ``1..n`` (the root is
not part of it) and the edges of ``V_n`` are the parent/child pairs with both
ends in ``V_n``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np

from .errors import EnumerationTooLarge

Vertex = tuple

DEFAULT_ENUMERATION_CAP = 2**24


class TreeCounts(NamedTuple):
    w: int
    v: int
    edges: int


def tree_counts(k: int, n: int) -> TreeCounts:
    if k < 1 or n < 0:
        raise ValueError("need k >= 1 and n >= 0")
    w = k**n
    v = sum(k**m for m in range(1, n + 1))
    return TreeCounts(w, v, max(v - k, 0))


def level(k: int, n: int) -> list[Vertex]:
    return list(itertools.product(range(1, k + 1), repeat=n))


def direct_successors(x: Vertex, k: int = 2) -> list[Vertex]:
    return [tuple(x) + (i,) for i in range(1, k + 1)]


def parent(x: Vertex) -> Vertex:
    if not x:
        raise ValueError("the root has no parent")
    return tuple(x[:-1])


@lru_cache(maxsize=None)
def vertices(k: int, n: int, first_level: int = 1) -> tuple[Vertex, ...]:
    return tuple(x for m in range(first_level, n + 1) for x in level(k, m))


@lru_cache(maxsize=None)
def vertex_index(k: int, n: int, first_level: int = 1) -> dict:
    return {x: i for i, x in enumerate(vertices(k, n, first_level))}


@lru_cache(maxsize=None)
def edges(k: int, n: int) -> tuple[tuple[int, int], ...]:
    """Edges of ``V_n`` as pairs of level-order indices (parent, child)."""
    index = vertex_index(k, n)
    return tuple(
        (index[parent(x)], index[x]) for x in vertices(k, n) if len(x) >= 2
    )


def vertex_label(x: Vertex) -> str:
    return ".".join(str(i) for i in x) if x else "0"


def parse_vertex(label: str) -> Vertex:
    if label in ("", "0", "()"):
        return ()
    return tuple(int(s) for s in label.split("."))


@dataclass(frozen=True)
class Configuration:
    """Spin assignment on levels ``first_level..depth`` of the tree.

    With ``first_level == 1`` this is an element of Omega_{V_n}; with
    ``first_level == depth`` it is an element of Omega_{W_n}.
    """

    depth: int
    q: int
    spins: tuple
    k: int = 2
    first_level: int = 1

    def __post_init__(self):
        size = len(vertices(self.k, self.depth, self.first_level))
        if len(self.spins) != size:
            raise ValueError(f"expected {size} spins, got {len(self.spins)}")
        if any(not 0 <= s <= self.q for s in self.spins):
            raise ValueError(f"spins must lie in 0..{self.q}")

    def __getitem__(self, x: Vertex) -> int:
        return self.spins[vertex_index(self.k, self.depth, self.first_level)[tuple(x)]]

    def leaf_spins(self) -> tuple:
        return self.spins[len(self.spins) - self.k**self.depth:]

    def restrict(self, depth: int) -> "Configuration":
        if self.first_level != 1 or depth > self.depth:
            raise ValueError("can only restrict a V_n configuration to a shallower V_m")
        size = tree_counts(self.k, depth).v
        return Configuration(depth, self.q, self.spins[:size], self.k)

    def to_json(self) -> dict:
        return {"depth": self.depth, "q": self.q, "spins": list(self.spins)}

    @classmethod
    def from_json(cls, data: dict, k: int = 2) -> "Configuration":
        return cls(data["depth"], data["q"], tuple(data["spins"]), k)

    @classmethod
    def constant(cls, depth: int, q: int, spin: int, k: int = 2) -> "Configuration":
        return cls(depth, q, (spin,) * tree_counts(k, depth).v, k)

    @classmethod
    def by_level(cls, q: int, level_spins, k: int = 2) -> "Configuration":
        """Configuration whose vertices at level ``m`` all carry ``level_spins[m-1]``."""
        spins = tuple(s for m, s in enumerate(level_spins, 1) for _ in range(k**m))
        return cls(len(level_spins), q, spins, k)


def concatenate(sigma: Configuration, omega: Configuration) -> Configuration:
    """``sigma ∨ omega`` for ``sigma`` on V_{n-1} and ``omega`` on W_n."""
    if omega.first_level != omega.depth or omega.depth != sigma.depth + 1:
        raise ValueError("omega must live on the level right below sigma")
    if sigma.q != omega.q or sigma.k != omega.k:
        raise ValueError("incompatible spin spaces")
    return Configuration(omega.depth, sigma.q, sigma.spins + omega.spins, sigma.k)


def configuration_count(n: int, q: int, on_levels: str = "V", k: int = 2) -> int:
    size = tree_counts(k, n).v if on_levels == "V" else k**n
    return (q + 1) ** size


def enumerate_configurations(
    n: int,
    q: int,
    on_levels: str = "V",
    k: int = 2,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Iterator[Configuration]:
    """Every configuration on V_n (``on_levels="V"``) or W_n (``"W"``), in
    lexicographic spin order."""
    if on_levels not in ("V", "W"):
        raise ValueError("on_levels must be 'V' or 'W'")
    count = configuration_count(n, q, on_levels, k)
    if count > cap:
        raise EnumerationTooLarge(count, cap)
    first = 1 if on_levels == "V" else n
    size = len(vertices(k, n, first))
    for spins in itertools.product(range(q + 1), repeat=size):
        yield Configuration(n, q, spins, k, first)


def matched_edges(spins, k: int, n: int) -> int:
    """Number of edges of V_n whose endpoints carry equal spins."""
    return sum(spins[a] == spins[b] for a, b in edges(k, n))


def leaf_one_count(spins, k: int, n: int, spin: int = 1) -> int:
    return sum(s == spin for s in spins[len(spins) - k**n:])


# -- vectorised class enumeration ----------------------------------------------


@dataclass(frozen=True)
class ConfigurationClass:
    """All configurations of Omega_{V_n} sharing a matched-edge count and leaf
    spins.  ``representative`` is the lexicographically first member."""

    matches: int
    leaves: tuple
    count: int
    representative: tuple


def configuration_classes(
    n: int,
    q: int,
    k: int = 2,
    cap: int = DEFAULT_ENUMERATION_CAP,
    chunk: int = 1 << 20,
) -> list[ConfigurationClass]:
    """Exhaustively enumerate Omega_{V_n}, grouping configurations by
    (number of matched edges, spins on W_n).

    Both the Hamiltonian and every boundary-field weight depend on a
    configuration only through this pair, so the classes carry everything a
    finite-volume sum needs.
    """
    size = tree_counts(k, n).v
    total = (q + 1) ** size
    if total > cap:
        raise EnumerationTooLarge(total, cap)
    base = q + 1
    nleaf = k**n
    pairs = np.array(edges(k, n), dtype=np.int64).reshape(-1, 2)
    weights = base ** np.arange(nleaf - 1, -1, -1, dtype=np.int64)
    npattern = base**nleaf
    counts: dict[int, int] = {}
    first: dict[int, int] = {}
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = np.empty((idx.size, size), dtype=np.int16)
        rest = idx.copy()
        for col in range(size - 1, -1, -1):
            rest, digits[:, col] = np.divmod(rest, base)
        if len(pairs):
            m = (digits[:, pairs[:, 0]] == digits[:, pairs[:, 1]]).sum(axis=1)
        else:
            m = np.zeros(idx.size, dtype=np.int64)
        pattern = digits[:, size - nleaf:].astype(np.int64) @ weights
        key = m.astype(np.int64) * npattern + pattern
        uniq, pos, cnt = np.unique(key, return_index=True, return_counts=True)
        for u, i, c in zip(uniq.tolist(), pos.tolist(), cnt.tolist()):
            if u not in counts:
                counts[u] = 0
                first[u] = start + i
            counts[u] += c
    out = []
    for key in sorted(counts):
        m, pat = divmod(key, npattern)
        leaves = _digits_of(pat, base, nleaf)
        out.append(ConfigurationClass(m, leaves, counts[key], _digits_of(first[key], base, size)))
    return out


def _digits_of(value: int, base: int, width: int) -> tuple:
    out = []
    for _ in range(width):
        value, d = divmod(value, base)
        out.append(d)
    return tuple(reversed(out))
