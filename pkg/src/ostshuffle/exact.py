"""Dense exact distributions over G_{m,n} and their distances to uniform.

A distribution is a float vector indexed by ``group.rank``.  Because the rank
is ``perm_rank * m^n + color_index``, the vector reshapes to an
``(n!, m^n)`` matrix whose rows are the fibers of the color-forgetting
projection onto S_n.

The walk multiplies fresh generators on the left, ``X_{t+1} = s X_t``, so one
step is ``out(g) = sum_s mass(s) p(s^{-1} g)``.  Left multiplication by the
element of ``(i, j, k)`` swaps entries ``i`` and ``j`` of both the permutation
and color arrays and adds ``k`` to those colors, so it factors into a row
permutation (acting on permutation ranks) and a column permutation (acting on
color indices) of the matrix view.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import group
from .errors import CapacityError, DimensionError, NotConvergedError
from .group import GroupParams
from .shuffle import GeneratorDistribution, ost_generators

logger = logging.getLogger(__name__)

DEFAULT_CAP = 2**24

__all__ = [
    "DEFAULT_CAP",
    "DenseDistribution",
    "DistanceCurve",
    "check_capacity",
    "delta_at_identity",
    "uniform",
    "convolve_step",
    "power",
    "powers",
    "tv_distance",
    "sep_distance",
    "mixing_time",
    "pushforward_projection",
    "distance_curve",
]


def check_capacity(params: GroupParams, cap: int = DEFAULT_CAP) -> None:
    if params.order > cap:
        raise CapacityError(params.order, cap)


@dataclass(frozen=True, eq=False)
class DenseDistribution:
    params: GroupParams
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.shape != (self.params.order,):
            raise DimensionError(
                f"mass vector has shape {mass.shape}, expected ({self.params.order},)"
            )
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    def total(self) -> float:
        return math.fsum(self.mass)

    def validate(self, tol: float = 1e-10) -> None:
        if self.mass.min() < 0:
            raise ValueError("negative mass")
        if abs(self.total() - 1.0) > tol:
            raise ValueError(f"mass sums to {self.total()!r}")

    def matrix(self) -> np.ndarray:
        """(n!, m^n) view; row r is the fiber over the permutation of rank r."""
        return self.mass.reshape(self.params.n_perms, self.params.n_colorings)

    def __getitem__(self, element) -> float:
        return float(self.mass[group.rank(element)])


def delta_at_identity(params: GroupParams, cap: int = DEFAULT_CAP) -> DenseDistribution:
    check_capacity(params, cap)
    mass = np.zeros(params.order)
    mass[0] = 1.0  # rank(identity) == 0
    return DenseDistribution(params, mass)


def uniform(params: GroupParams, cap: int = DEFAULT_CAP) -> DenseDistribution:
    check_capacity(params, cap)
    return DenseDistribution(params, np.full(params.order, 1.0 / params.order))


@dataclass(frozen=True)
class _LeftAction:
    """Index maps for left multiplication by each generator.

    ``row_src[p]`` and ``col_src[g]`` are gather indices: entry ``(r, c)`` of
    ``s * h`` comes from entry ``(row_src[p][r], col_src[g][c])`` of ``h``,
    where ``p`` indexes the position pair of generator ``g``.
    """

    pairs: tuple[tuple[int, int], ...]
    row_src: tuple[np.ndarray, ...]
    gen_pair: tuple[int, ...]
    col_src: tuple[np.ndarray, ...]


@lru_cache(maxsize=8)
def _left_action(params: GroupParams, generators: tuple) -> _LeftAction:
    n, m = params.n, params.m
    perms = group.all_permutations(n)
    colorings = group.all_colorings(m, n)

    pairs: list[tuple[int, int]] = []
    row_src: list[np.ndarray] = []
    pair_index: dict[tuple[int, int], int] = {}
    gen_pair, col_src = [], []
    for gen in generators:
        a, b = gen.i - 1, gen.j - 1
        if (a, b) not in pair_index:
            swapped = perms.copy()
            swapped[:, [a, b]] = swapped[:, [b, a]]
            # swapping twice is the identity, so the forward map is its own inverse
            pair_index[(a, b)] = len(pairs)
            pairs.append((a, b))
            row_src.append(group.lehmer_rank_rows(swapped))
        gen_pair.append(pair_index[(a, b)])

        # source coloring of target c: undo "+k at a, b" then swap back
        src = colorings.copy()
        src[:, a] -= gen.k
        if b != a:
            src[:, b] -= gen.k
        src %= m
        src[:, [a, b]] = src[:, [b, a]]
        col_src.append(group.color_index_rows(src, m))
    return _LeftAction(tuple(pairs), tuple(row_src), tuple(gen_pair), tuple(col_src))


def _action_for(gen: GeneratorDistribution) -> _LeftAction:
    return _left_action(gen.params, gen.generators)


def convolve_step(p: DenseDistribution, gen: GeneratorDistribution | None = None) -> DenseDistribution:
    if gen is None:
        gen = ost_generators(p.params)
    if gen.params != p.params:
        raise DimensionError(f"distribution on {p.params}, generators on {gen.params}")
    action = _action_for(gen)
    src = p.matrix()
    out = np.zeros_like(src)
    # accumulate all generators sharing a position pair before the row gather
    acc = [None] * len(action.pairs)
    for g, w in enumerate(gen.masses):
        part = w * src[:, action.col_src[g]]
        pi = action.gen_pair[g]
        if acc[pi] is None:
            acc[pi] = part
        else:
            acc[pi] += part
    for pi, block in enumerate(acc):
        if block is not None:
            out += block[action.row_src[pi]]
    return DenseDistribution(p.params, out.reshape(-1))


def powers(params: GroupParams, gen: GeneratorDistribution | None = None, cap: int = DEFAULT_CAP):
    """Yield P^0, P^1, P^2, ... indefinitely."""
    if gen is None:
        gen = ost_generators(params)
    p = delta_at_identity(params, cap)
    while True:
        yield p
        p = convolve_step(p, gen)


def power(params: GroupParams, gen: GeneratorDistribution | None, t: int, cap: int = DEFAULT_CAP) -> DenseDistribution:
    if t < 0:
        raise ValueError("t must be >= 0")
    it = powers(params, gen, cap)
    for _ in range(t):
        next(it)
    return next(it)


def tv_distance(p: DenseDistribution, q: DenseDistribution) -> float:
    if p.params != q.params:
        raise DimensionError(f"{p.params} vs {q.params}")
    return 0.5 * math.fsum(np.abs(p.mass - q.mass))


def tv_to_uniform(p: DenseDistribution) -> float:
    return 0.5 * math.fsum(np.abs(p.mass - 1.0 / p.params.order))


def sep_distance(p: DenseDistribution) -> float:
    """Separation from uniform for a walk started at the identity.

    The general form is ``1 - min_{g,h} P(h g^{-1}) / U(h)``.  As ``g`` and ``h``
    range over the group, ``h g^{-1}`` covers every element while ``U(h)`` is
    the constant ``1/|G|``, so this is ``1 - |G| * min_x P(x)``.
    """
    value = 1.0 - p.params.order * float(p.mass.min())
    return min(1.0, max(0.0, value))


def pushforward_projection(p: DenseDistribution) -> DenseDistribution:
    """Sum each fiber of the projection to S_n; the result lives on G_{1,n}."""
    return DenseDistribution(GroupParams(1, p.params.n), p.matrix().sum(axis=1))


@dataclass
class DistanceCurve:
    params: GroupParams
    times: list[int] = field(default_factory=list)
    tv: list[float] = field(default_factory=list)
    sep: list[float] = field(default_factory=list)

    def append(self, t: int, p: DenseDistribution) -> None:
        self.times.append(t)
        self.tv.append(tv_to_uniform(p))
        self.sep.append(sep_distance(p))

    def values(self, metric: str) -> list[float]:
        if metric not in ("tv", "sep"):
            raise ValueError(f"unknown metric {metric!r}")
        return self.tv if metric == "tv" else self.sep

    def mixing_time(self, eps: float, metric: str = "tv") -> int | None:
        """First recorded t with d(t) < eps, or None if the curve never gets there."""
        for t, d in zip(self.times, self.values(metric)):
            if d < eps:
                return t
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "tv", "sep"])
        for t, tv, sep in zip(self.times, self.tv, self.sep):
            writer.writerow([t, f"{tv:.17g}", f"{sep:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, params: GroupParams, text: str) -> DistanceCurve:
        curve = cls(params)
        for row in csv.DictReader(io.StringIO(text)):
            curve.times.append(int(row["t"]))
            curve.tv.append(float(row["tv"]))
            curve.sep.append(float(row["sep"]))
        return curve

    def summary(self, eps: float = 0.25) -> dict:
        return {
            "m": self.params.m,
            "n": self.params.n,
            "t_mix_quarter_tv": self.mixing_time(eps, "tv"),
            "t_mix_quarter_sep": self.mixing_time(eps, "sep"),
        }

    def summary_json(self, eps: float = 0.25) -> str:
        return json.dumps(self.summary(eps), sort_keys=True)


def distance_curve(params: GroupParams, t_max: int, gen: GeneratorDistribution | None = None, cap: int = DEFAULT_CAP) -> DistanceCurve:
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    curve = DistanceCurve(params)
    for t, p in zip(range(t_max + 1), powers(params, gen, cap)):
        curve.append(t, p)
    return curve


def mixing_time(
    params: GroupParams,
    eps: float,
    metric: str = "tv",
    gen: GeneratorDistribution | None = None,
    max_t: int = 10_000,
    cap: int = DEFAULT_CAP,
) -> int:
    """Smallest t with d(t) < eps, extending the chain one step at a time."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    dist_fn = tv_to_uniform if metric == "tv" else sep_distance
    if metric not in ("tv", "sep"):
        raise ValueError(f"unknown metric {metric!r}")
    last = float("nan")
    for t, p in zip(range(max_t + 1), powers(params, gen, cap)):
        last = dist_fn(p)
        if last < eps:
            return t
    raise NotConvergedError(eps, max_t, last)
