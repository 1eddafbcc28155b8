"""Arithmetic on the generalized symmetric group G_{m,n}.

An element is a pair ``(colors, perm)``: ``colors`` is a vector of exponents in
Z_m (one rotation per card) and ``perm`` is a permutation of the n positions.
Read as a deck, card ``i`` is sent to position ``perm(i)`` and its orientation
is advanced by ``colors[i]``.

Composition convention
----------------------
The product is

    (a * b).colors[i] = a.colors[i] + b.colors[a.perm(i)]   (mod m)
    (a * b).perm(i)   = b.perm(a.perm(i))

i.e. ``a`` is applied first and ``b`` second. With the color term indexed by
``a.perm(i)`` this is the only permutation convention for which the product
is associative once n >= 3 and m > 1; ``tests/test_group.py`` checks both
readings exhaustively on G_{2,3}.

Positions are 1-based wherever they cross the public surface (constructors,
``one_line``, text form, ``act_on_card``) and 0-based inside the tuples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError

__all__ = [
    "GroupParams",
    "GroupElement",
    "identity",
    "compose",
    "inverse",
    "project",
    "rank",
    "unrank",
    "act_on_card",
    "enumerate_group",
    "lehmer_rank",
    "lehmer_unrank",
    "compose_perm",
    "parse_element",
]


@dataclass(frozen=True)
class GroupParams:
    """Parameters of G_{m,n}: ``m`` orientations per card, ``n`` cards."""

    m: int
    n: int

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or not isinstance(self.n, (int, np.integer)):
            raise TypeError("m and n must be integers")
        if self.m < 1 or self.n < 1:
            raise ValueError(f"need m >= 1 and n >= 1, got m={self.m}, n={self.n}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))

    @property
    def n_colorings(self) -> int:
        return self.m**self.n

    @property
    def n_perms(self) -> int:
        return math.factorial(self.n)

    @property
    def order(self) -> int:
        """|G_{m,n}| = m^n * n!."""
        return self.n_colorings * self.n_perms

    def __str__(self) -> str:
        return f"G_{{{self.m},{self.n}}}"


@dataclass(frozen=True)
class GroupElement:
    params: GroupParams
    colors: tuple[int, ...]
    perm: tuple[int, ...]  # 0-based images

    def __post_init__(self):
        n, m = self.params.n, self.params.m
        colors = tuple(int(c) for c in self.colors)
        perm = tuple(int(p) for p in self.perm)
        if len(colors) != n or len(perm) != n:
            raise DimensionError(f"expected {n} colors and {n} images for {self.params}")
        if sorted(perm) != list(range(n)):
            raise ValueError(f"perm {perm} is not a permutation of 0..{n - 1}")
        if any(not 0 <= c < m for c in colors):
            raise ValueError(f"colors {colors} must lie in [0, {m})")
        object.__setattr__(self, "colors", colors)
        object.__setattr__(self, "perm", perm)

    @classmethod
    def from_one_line(cls, params: GroupParams, colors, images) -> GroupElement:
        """Build from colors and 1-based one-line permutation images."""
        return cls(params, tuple(colors), tuple(int(s) - 1 for s in images))

    def one_line(self) -> tuple[int, ...]:
        """Permutation images, 1-based."""
        return tuple(p + 1 for p in self.perm)

    def is_identity(self) -> bool:
        return not any(self.colors) and self.perm == tuple(range(self.params.n))

    def __mul__(self, other: GroupElement) -> GroupElement:
        return compose(self, other)

    def __str__(self) -> str:
        return format_element(self)


def identity(params: GroupParams) -> GroupElement:
    return GroupElement(params, (0,) * params.n, tuple(range(params.n)))


def _check_same(a: GroupElement, b: GroupElement) -> None:
    if a.params != b.params:
        raise DimensionError(f"cannot combine elements of {a.params} and {b.params}")


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    _check_same(a, b)
    m = a.params.m
    colors = tuple((a.colors[i] + b.colors[a.perm[i]]) % m for i in range(a.params.n))
    perm = tuple(b.perm[a.perm[i]] for i in range(a.params.n))
    return GroupElement(a.params, colors, perm)


def inverse(a: GroupElement) -> GroupElement:
    n, m = a.params.n, a.params.m
    perm = [0] * n
    colors = [0] * n
    for i, p in enumerate(a.perm):
        perm[p] = i
        colors[p] = (-a.colors[i]) % m
    return GroupElement(a.params, tuple(colors), tuple(perm))


def project(a: GroupElement) -> tuple[int, ...]:
    """Forget the colors; returns the 1-based one-line permutation."""
    return a.one_line()


def compose_perm(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """Product in S_n under the same convention as ``compose`` (p first, then q).

    Works on 1-based one-line tuples, so ``project(a * b) == compose_perm(project(a), project(b))``.
    """
    return tuple(q[x - 1] for x in p)


def lehmer_rank(perm) -> int:
    """Lexicographic rank of a 0-based permutation (identity has rank 0)."""
    n = len(perm)
    r = 0
    for i in range(n):
        smaller = sum(1 for x in perm[i + 1 :] if x < perm[i])
        r += smaller * math.factorial(n - 1 - i)
    return r


def lehmer_unrank(r: int, n: int) -> tuple[int, ...]:
    if not 0 <= r < math.factorial(n):
        raise IndexError(f"permutation rank {r} out of range for n={n}")
    pool = list(range(n))
    out = []
    for i in range(n - 1, -1, -1):
        digit, r = divmod(r, math.factorial(i))
        out.append(pool.pop(digit))
    return tuple(out)


def rank(a: GroupElement) -> int:
    """Dense index: ``lehmer_rank(perm) * m^n + sum(colors[i] * m^i)``."""
    m = a.params.m
    color_index = 0
    for c in reversed(a.colors):
        color_index = color_index * m + c
    return lehmer_rank(a.perm) * a.params.n_colorings + color_index


def unrank(index: int, params: GroupParams) -> GroupElement:
    if not 0 <= index < params.order:
        raise IndexError(f"rank {index} out of range for {params} (order {params.order})")
    perm_rank, color_index = divmod(int(index), params.n_colorings)
    colors = []
    for _ in range(params.n):
        color_index, c = divmod(color_index, params.m)
        colors.append(c)
    return GroupElement(params, tuple(colors), lehmer_unrank(perm_rank, params.n))


def act_on_card(a: GroupElement, card: tuple[int, int]) -> tuple[int, int]:
    """Image of the oriented card ``(i, k)`` (1-based position, exponent) under ``a``."""
    i, k = card
    if not 1 <= i <= a.params.n:
        raise IndexError(f"position {i} outside [1, {a.params.n}]")
    return a.perm[i - 1] + 1, (k + a.colors[i - 1]) % a.params.m


def enumerate_group(params: GroupParams):
    """Yield every element of G_{m,n} in rank order."""
    colorings = [tuple(reversed(c)) for c in itertools.product(range(params.m), repeat=params.n)]
    for perm in itertools.permutations(range(params.n)):
        for colors in colorings:
            yield GroupElement(params, colors, perm)


def format_element(a: GroupElement) -> str:
    """Canonical text form ``"k1,...,kn|s1,...,sn"`` with 1-based images."""
    return ",".join(map(str, a.colors)) + "|" + ",".join(map(str, a.one_line()))


def parse_element(text: str, m: int) -> GroupElement:
    colors_part, perm_part = text.strip().split("|")
    colors = [int(x) for x in colors_part.split(",")]
    images = [int(x) for x in perm_part.split(",")]
    return GroupElement.from_one_line(GroupParams(m, len(images)), colors, images)


# -- vectorized helpers used by the dense engine and the batch simulator ----


@lru_cache(maxsize=16)
def all_permutations(n: int) -> np.ndarray:
    """(n!, n) array of 0-based permutations in Lehmer-rank order."""
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    perms.setflags(write=False)
    return perms


def lehmer_rank_rows(perms: np.ndarray) -> np.ndarray:
    """Row-wise ``lehmer_rank`` of a (rows, n) array of 0-based permutations."""
    perms = np.asarray(perms)
    n = perms.shape[1]
    out = np.zeros(perms.shape[0], dtype=np.int64)
    for i in range(n - 1):
        smaller = (perms[:, i + 1 :] < perms[:, i : i + 1]).sum(axis=1)
        out += smaller * math.factorial(n - 1 - i)
    return out


def color_index_rows(colors: np.ndarray, m: int) -> np.ndarray:
    """Row-wise little-endian base-m value of a (rows, n) color array."""
    colors = np.asarray(colors, dtype=np.int64)
    weights = m ** np.arange(colors.shape[1], dtype=np.int64)
    return colors @ weights


@lru_cache(maxsize=16)
def all_colorings(m: int, n: int) -> np.ndarray:
    """(m^n, n) array; row c holds the base-m digits of c, least significant first."""
    idx = np.arange(m**n, dtype=np.int64)
    digits = (idx[:, None] // (m ** np.arange(n, dtype=np.int64))) % m
    digits.setflags(write=False)
    return digits


def rank_rows(params: GroupParams, colors: np.ndarray, perms: np.ndarray) -> np.ndarray:
    return lehmer_rank_rows(perms) * params.n_colorings + color_index_rows(colors, params.m)
