"""The one-sided transposition (OST) shuffle on G_{m,n}.

One step: draw a position ``j`` uniformly from ``[n]``, then ``i`` uniformly
from ``[j]``, then ``k`` uniformly from Z_m.  The cards at positions ``i`` and
``j`` are swapped and each is rotated by ``k``.  When ``i == j`` the single card
is rotated by ``k`` once (not twice), so the card drawn first always ends up in
a uniformly random orientation.
"""

from __future__ import annotations

import re
from itertools import groupby
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .group import GroupElement, GroupParams

__all__ = [
    "Generator",
    "GeneratorDistribution",
    "ost_generators",
    "generator_to_element",
    "identity_mass",
    "harmonic",
    "sample_step",
    "sample_steps",
]


class _Triple(NamedTuple):
    i: int
    j: int
    k: int


class Generator(_Triple):
    """One OST move: positions ``i <= j`` (1-based) and rotation ``k``."""

    __slots__ = ()

    def __new__(cls, i: int, j: int, k: int):
        if not (1 <= i <= j) or k < 0:
            raise ValueError(f"invalid generator {i}-{j}^{k}")
        return super().__new__(cls, i, j, k)

    def __str__(self) -> str:
        return f"{self.i}-{self.j}^{self.k}"

    @classmethod
    def parse(cls, text: str) -> Generator:
        match = re.fullmatch(r"\s*(\d+)-(\d+)\^(\d+)\s*", text)
        if match is None:
            raise ValueError(f"not a generator: {text!r}")
        return cls(*(int(g) for g in match.groups()))


@dataclass(frozen=True)
class GeneratorDistribution:
    """Support of OST_{m,n}: every (i, j, k) with its exact and float mass."""

    params: GroupParams
    generators: tuple[Generator, ...]
    exact: tuple[Fraction, ...]
    masses: np.ndarray

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(zip(self.generators, self.masses))

    def total_exact(self) -> Fraction:
        # masses come in runs of m*j equal values; sum run by run
        return sum((p * sum(1 for _ in run) for p, run in groupby(self.exact)), Fraction(0))

    def mass_of(self, gen: Generator) -> Fraction:
        return self.exact[self.generators.index(gen)]


def ost_generators(params: GroupParams) -> GeneratorDistribution:
    n, m = params.n, params.m
    gens, exact, masses = [], [], []
    for j in range(1, n + 1):
        p = Fraction(1, n * j * m)
        gens.extend(Generator(i, j, k) for i in range(1, j + 1) for k in range(m))
        exact.extend([p] * (j * m))
        masses.extend([float(p)] * (j * m))
    masses = np.array(masses)
    masses.setflags(write=False)
    return GeneratorDistribution(params, tuple(gens), tuple(exact), masses)


def generator_to_element(gen: Generator, params: GroupParams) -> GroupElement:
    n, m = params.n, params.m
    if gen.j > n or gen.k >= m:
        raise ValueError(f"generator {gen} does not belong to {params}")
    a, b = gen.i - 1, gen.j - 1
    colors = [0] * n
    colors[a] = gen.k
    colors[b] = gen.k
    perm = list(range(n))
    perm[a], perm[b] = perm[b], perm[a]
    return GroupElement(params, tuple(colors), tuple(perm))


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))


def identity_mass(params: GroupParams) -> Fraction:
    """Exact OST_{m,n} mass on the identity: H_n / (n m)."""
    return harmonic(params.n) / (params.n * params.m)


def sample_step(dist: GeneratorDistribution, rng: np.random.Generator) -> tuple[Generator, int]:
    """Draw one generator; also returns the first-draw position ``j``."""
    n, m = dist.params.n, dist.params.m
    j = int(rng.integers(1, n + 1))
    i = int(rng.integers(1, j + 1))
    k = int(rng.integers(0, m))
    return Generator(i, j, k), j


def sample_steps(params: GroupParams, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized ``sample_step``: arrays ``(i, j, k)`` of length ``size``; ``j`` is the first draw."""
    j = rng.integers(1, params.n + 1, size=size)
    i = rng.integers(0, j) + 1
    k = rng.integers(0, params.m, size=size)
    return i, j, k
