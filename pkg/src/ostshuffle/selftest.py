"""Exhaustive invariant checks on small groups, used by ``ostshuffle selftest``."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from . import group
from .group import GroupParams
from .shuffle import generator_to_element, identity_mass, ost_generators

DEFAULT_GROUPS = ((2, 2), (2, 3), (3, 3), (1, 4))
QUICK_GROUPS = ((2, 2),)

# above these sizes, triples / pairs are sampled with a fixed seed
_MAX_TRIPLES = 200_000
_MAX_PAIRS = 50_000
_SAMPLE = 20_000


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _triples(elements, rng):
    if len(elements) ** 3 <= _MAX_TRIPLES:
        return itertools.product(elements, repeat=3)
    return (tuple(rng.choice(elements) for _ in range(3)) for _ in range(_SAMPLE))


def _pairs(elements, rng):
    if len(elements) ** 2 <= _MAX_PAIRS:
        return itertools.product(elements, repeat=2)
    return (tuple(rng.choice(elements) for _ in range(2)) for _ in range(_SAMPLE))


def one_step_law(params: GroupParams, element_map=generator_to_element) -> dict[int, Fraction]:
    """Exact one-step law keyed by rank, built generator by generator."""
    law: dict[int, Fraction] = {}
    dist = ost_generators(params)
    for gen, p in zip(dist.generators, dist.exact):
        r = group.rank(element_map(gen, params))
        law[r] = law.get(r, Fraction(0)) + p
    return law


def check_group(params: GroupParams, element_map=generator_to_element) -> list[CheckResult]:
    rng = random.Random(0)
    elements = list(group.enumerate_group(params))
    e = group.identity(params)
    name = str(params)
    out = []

    distinct = len(set(elements))
    out.append(CheckResult(f"{name} order", distinct == params.order, f"{distinct} distinct, expected {params.order}"))

    bad = next(
        ((a, b, c) for a, b, c in _triples(elements, rng) if (a * b) * c != a * (b * c)),
        None,
    )
    out.append(CheckResult(f"{name} associativity", bad is None, "" if bad is None else f"fails at {tuple(map(str, bad))}"))

    bad = next((g for g in elements if e * g != g or g * e != g), None)
    out.append(CheckResult(f"{name} identity law", bad is None, "" if bad is None else str(bad)))

    bad = next(
        (g for g in elements if not (g * group.inverse(g)).is_identity() or not (group.inverse(g) * g).is_identity()),
        None,
    )
    out.append(CheckResult(f"{name} inverse law", bad is None, "" if bad is None else str(bad)))

    ranks = sorted(group.rank(g) for g in elements)
    ok = ranks == list(range(params.order)) and all(group.unrank(group.rank(g), params) == g for g in elements)
    out.append(CheckResult(f"{name} rank bijection", ok))

    bad = next(
        (
            (a, b)
            for a, b in _pairs(elements, rng)
            if group.project(a * b) != group.compose_perm(group.project(a), group.project(b))
        ),
        None,
    )
    out.append(CheckResult(f"{name} projection homomorphism", bad is None))

    dist = ost_generators(params)
    total = dist.total_exact()
    out.append(CheckResult(f"{name} generator masses sum to 1", total == 1, f"sum = {total}"))

    law = one_step_law(params, element_map)
    total = sum(law.values(), Fraction(0))
    got = law.get(0, Fraction(0))
    want = identity_mass(params)
    out.append(CheckResult(f"{name} one-step law sums to 1", total == 1, f"sum = {total}"))
    out.append(CheckResult(f"{name} identity mass H_n/(nm)", got == want, f"got {got}, expected {want}"))
    return out


def run_selftest(groups=DEFAULT_GROUPS, element_map=generator_to_element) -> list[CheckResult]:
    results = []
    for m, n in groups:
        results.extend(check_group(GroupParams(m, n), element_map))
    return results
