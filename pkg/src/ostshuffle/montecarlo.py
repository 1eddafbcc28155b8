"""Monte Carlo simulation of the OST chain and its strong stationary time.

The strong stationary time ``T`` is the first step at which every position
has been the shuffle's first draw; since first draws are uniform on ``[n]``,
``T`` is a coupon-collector waiting time and does not depend on ``m``.

Random streams: trials are split into fixed blocks of ``BLOCK_TRIALS``; block
``b`` draws from ``SeedSequence(seed, spawn_key=(b,))``.  Results therefore
depend only on ``(seed, trials)`` and never on how many workers process the
blocks or in which order.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import exact, group
from .group import GroupElement, GroupParams
from .shuffle import GeneratorDistribution, ost_generators, sample_step, sample_steps

logger = logging.getLogger(__name__)

BLOCK_TRIALS = 1 << 14
MIN_GROUP_SAMPLES = 30

__all__ = [
    "BLOCK_TRIALS",
    "ChainState",
    "TrialRecord",
    "ChainBatch",
    "TailEstimate",
    "SepBoundRow",
    "PjCheck",
    "derive_seed",
    "block_rng",
    "trial_rng",
    "simulate_chain",
    "simulate_batch",
    "SstSample",
    "sample_sst",
    "sample_sst_batch",
    "sst_threshold",
    "sst_tail",
    "sep_upper_bound_check",
    "empirical_law",
    "empirical_pj_check",
    "tail_csv",
]


def derive_seed(seed: int, *labels: float) -> list[int]:
    """Entropy for a sub-experiment: the master seed followed by integer labels."""
    return [int(seed)] + [int(round(x * 1_000_000)) for x in labels]


def block_rng(seed, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Stream for a single stand-alone trial (used by the scalar simulator)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x7472, trial)))


def _blocks(trials: int) -> list[tuple[int, int]]:
    return [
        (b, min(BLOCK_TRIALS, trials - b * BLOCK_TRIALS))
        for b in range(-(-trials // BLOCK_TRIALS))
    ]


def _map_blocks(fn, trials: int, seed: int, workers: int) -> list:
    """Run ``fn(rng, size)`` per block; results come back in block order."""
    jobs = _blocks(trials)
    if workers <= 1 or len(jobs) <= 1:
        return [fn(block_rng(seed, b), size) for b, size in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(block_rng(seed, job[0]), job[1]), jobs))


# -- single chain --------------------------------------------------------------


@dataclass(frozen=True)
class ChainState:
    element: GroupElement
    t: int
    uncollected: frozenset[int]  # 1-based positions never yet drawn first
    sst: int | None

    def __post_init__(self):
        if (self.sst is None) != bool(self.uncollected):
            raise ValueError("sst must be set exactly when every position has been drawn")


def simulate_chain(
    params: GroupParams,
    t: int,
    rng: np.random.Generator,
    gen: GeneratorDistribution | None = None,
    trace: list | None = None,
) -> ChainState:
    """Run ``t`` OST steps from the identity, tracking first draws.

    If ``trace`` is a list, each sampled generator is appended to it.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if gen is None:
        gen = ost_generators(params)
    m = params.m
    colors = [0] * params.n
    perm = list(range(params.n))
    uncollected = set(range(1, params.n + 1))
    sst = None
    for step in range(1, t + 1):
        g, first = sample_step(gen, rng)
        if trace is not None:
            trace.append(g)
        a, b = g.i - 1, g.j - 1
        # left multiplication by the generator: swap entries a, b then rotate them
        perm[a], perm[b] = perm[b], perm[a]
        colors[a], colors[b] = colors[b], colors[a]
        colors[a] = (colors[a] + g.k) % m
        if b != a:
            colors[b] = (colors[b] + g.k) % m
        uncollected.discard(first)
        if sst is None and not uncollected:
            sst = step
    return ChainState(GroupElement(params, tuple(colors), tuple(perm)), t, frozenset(uncollected), sst)


# -- batched chains --------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    element: GroupElement
    sst: int | None
    seed: int
    trial: int


@dataclass(frozen=True, eq=False)
class ChainBatch:
    """Final states of many independent chains after ``t`` steps."""

    params: GroupParams
    t: int
    seed: int
    colors: np.ndarray  # (trials, n)
    perms: np.ndarray  # (trials, n), 0-based
    sst: np.ndarray  # (trials,), -1 where not yet collected
    first_hit: np.ndarray  # (trials, n), step of first first-draw per position, -1 if none

    @property
    def trials(self) -> int:
        return len(self.sst)

    def ranks(self) -> np.ndarray:
        return group.rank_rows(self.params, self.colors, self.perms)

    def record(self, idx: int) -> TrialRecord:
        el = GroupElement(self.params, tuple(self.colors[idx]), tuple(self.perms[idx]))
        sst = int(self.sst[idx])
        return TrialRecord(el, None if sst < 0 else sst, self.seed, idx)

    def records(self) -> Iterable[TrialRecord]:
        return (self.record(i) for i in range(self.trials))


def _simulate_block(params: GroupParams, t: int, rng: np.random.Generator, size: int):
    n, m = params.n, params.m
    small = np.int16 if max(n, m) < 2**15 else np.int64
    colors = np.zeros((size, n), dtype=small)
    perms = np.tile(np.arange(n, dtype=small), (size, 1))
    first_hit = np.full((size, n), -1, dtype=np.int64)
    rows = np.arange(size)
    for step in range(1, t + 1):
        i, j, k = sample_steps(params, rng, size)
        k = k.astype(small)
        a, b = i - 1, j - 1
        pa, pb = perms[rows, a], perms[rows, b]
        perms[rows, a], perms[rows, b] = pb, pa
        ca, cb = colors[rows, a], colors[rows, b]
        # when a == b the second write lands on the same cell with the same value
        colors[rows, a] = (cb + k) % m
        colors[rows, b] = (ca + k) % m
        fresh = first_hit[rows, b] < 0
        first_hit[rows[fresh], b[fresh]] = step
    return colors, perms, first_hit


def simulate_batch(params: GroupParams, t: int, trials: int, seed: int, workers: int = 1) -> ChainBatch:
    if t < 0 or trials < 1:
        raise ValueError("need t >= 0 and trials >= 1")
    parts = _map_blocks(lambda rng, size: _simulate_block(params, t, rng, size), trials, seed, workers)
    colors = np.concatenate([p[0] for p in parts])
    perms = np.concatenate([p[1] for p in parts])
    first_hit = np.concatenate([p[2] for p in parts])
    sst = np.where((first_hit >= 0).all(axis=1), first_hit.max(axis=1), -1)
    return ChainBatch(params, t, seed, colors, perms, sst, first_hit)


def empirical_law(params: GroupParams, t: int, trials: int, seed: int, workers: int = 1) -> exact.DenseDistribution:
    """Empirical t-step law as a dense distribution (small groups only)."""
    exact.check_capacity(params)
    batch = simulate_batch(params, t, trials, seed, workers)
    counts = np.bincount(batch.ranks(), minlength=params.order)
    return exact.DenseDistribution(params, counts / trials)


# -- strong stationary time ------------------------------------------------------


@dataclass(frozen=True)
class SstSample:
    value: int  # equals t_cap + 1 when censored
    censored: bool


def sample_sst(params: GroupParams, rng: np.random.Generator, t_cap: int) -> SstSample:
    """Draw first-draw positions until all of ``[n]`` has appeared."""
    if t_cap < 1:
        raise ValueError("t_cap must be >= 1")
    n = params.n
    seen = np.zeros(n, dtype=bool)
    remaining = n
    for t in range(1, t_cap + 1):
        j = int(rng.integers(0, n))
        if not seen[j]:
            seen[j] = True
            remaining -= 1
            if remaining == 0:
                return SstSample(t, False)
    return SstSample(t_cap + 1, True)


def _sst_block_gaps(n: int, t_cap: int, rng: np.random.Generator, size: int) -> np.ndarray:
    # the wait for the (r+1)-th new position is geometric with success (n - r) / n
    total = np.zeros(size, dtype=np.int64)
    for r in range(n):
        total += rng.geometric((n - r) / n, size=size)
    return np.minimum(total, t_cap + 1)


def _sst_block_draws(n: int, t_cap: int, rng: np.random.Generator, size: int) -> np.ndarray:
    seen = np.zeros((size, n), dtype=bool)
    count = np.zeros(size, dtype=np.int64)
    out = np.full(size, t_cap + 1, dtype=np.int64)
    active = np.arange(size)
    for t in range(1, t_cap + 1):
        if active.size == 0:
            break
        j = rng.integers(0, n, size=active.size)
        new = ~seen[active, j]
        seen[active, j] = True
        count[active] += new
        done = count[active] == n
        out[active[done]] = t
        active = active[~done]
    return out


def sample_sst_batch(
    n: int,
    trials: int,
    seed: int,
    t_cap: int,
    method: str = "gaps",
    workers: int = 1,
) -> np.ndarray:
    """Sample ``trials`` strong stationary times; censored values are ``t_cap + 1``.

    ``method="draws"`` simulates every first draw; ``method="gaps"`` samples the
    geometric waiting times between new positions, which has the same law and
    costs O(n) per trial instead of O(n log n).
    """
    if t_cap < 1 or trials < 1:
        raise ValueError("need t_cap >= 1 and trials >= 1")
    block_fn = {"gaps": _sst_block_gaps, "draws": _sst_block_draws}.get(method)
    if block_fn is None:
        raise ValueError(f"unknown method {method!r}")
    parts = _map_blocks(lambda rng, size: block_fn(n, t_cap, rng, size), trials, seed, workers)
    return np.concatenate(parts)


def sst_threshold(n: int, c: float) -> int:
    """ceil(n ln n + c n), natural log."""
    return math.ceil(n * math.log(n) + c * n)


@dataclass(frozen=True)
class TailEstimate:
    n: int
    c: float
    t: int
    trials: int
    exceed_count: int

    @property
    def p_hat(self) -> float:
        return self.exceed_count / self.trials

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def bound(self) -> float:
        return math.exp(-self.c)

    def violates_bound(self, z: float = 4.0) -> bool:
        return self.p_hat > self.bound + z * self.stderr


def tail_from_samples(n: int, c: float, samples: np.ndarray, t_cap: int | None = None) -> TailEstimate:
    """Tail estimate from SST samples; values above ``t_cap`` are censored and always exceed."""
    t = sst_threshold(n, c)
    exceed = samples > t
    if t_cap is not None:
        exceed |= samples > t_cap
    return TailEstimate(n, c, t, len(samples), int(np.count_nonzero(exceed)))


def sst_tail(params: GroupParams, c: float, trials: int, seed: int, method: str = "gaps", workers: int = 1) -> TailEstimate:
    """Estimate P(T > ceil(n ln n + c n)); censored samples count as exceedances."""
    if c <= 0:
        raise ValueError("c must be positive")
    t = sst_threshold(params.n, c)
    samples = sample_sst_batch(params.n, trials, seed, t_cap=t, method=method, workers=workers)
    return tail_from_samples(params.n, c, samples, t_cap=t)


def tail_csv(rows: Iterable[TailEstimate]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "c", "t", "trials", "exceed", "p_hat", "stderr", "bound_e_minus_c"])
    for r in rows:
        writer.writerow([
            r.n, f"{r.c:g}", r.t, r.trials, r.exceed_count,
            f"{r.p_hat:.17g}", f"{r.stderr:.17g}", f"{r.bound:.17g}",
        ])
    return buf.getvalue()


@dataclass(frozen=True)
class SepBoundRow:
    t: int
    exact_sep: float
    p_hat: float
    stderr: float

    def holds(self, z: float = 4.0, slack: float = 1e-12) -> bool:
        # slack absorbs rounding in 1 - |G| min P once sep is ~0
        return self.exact_sep <= self.p_hat + z * self.stderr + slack


def sep_upper_bound_check(
    params: GroupParams,
    t_list: Iterable[int],
    trials: int,
    seed: int,
    cap: int = exact.DEFAULT_CAP,
    workers: int = 1,
) -> list[SepBoundRow]:
    """Exact separation at each t next to the Monte Carlo estimate of P(T > t)."""
    t_list = sorted(set(int(t) for t in t_list))
    exact.check_capacity(params, cap)
    t_cap = max(max(t_list), 1)
    samples = sample_sst_batch(params.n, trials, seed, t_cap=t_cap, method="draws", workers=workers)
    rows = []
    wanted = set(t_list)
    for t, p in zip(range(t_cap + 1), exact.powers(params, cap=cap)):
        if t in wanted:
            p_hat = float(np.count_nonzero(samples > t)) / trials
            stderr = math.sqrt(p_hat * (1 - p_hat) / trials)
            rows.append(SepBoundRow(t, exact.sep_distance(p), p_hat, stderr))
    return rows


# -- property P_j --------------------------------------------------------------------


@dataclass(frozen=True)
class PjCheck:
    j: int
    t: int
    trials: int
    conditioned: int  # trials with T_j <= t
    groups: int
    max_deviation: float
    max_z: float  # max |freq - 1/(mj)| / binomial stderr over groups and outcomes
    small_groups: int  # groups with fewer than MIN_GROUP_SAMPLES trials
    warnings: tuple[str, ...] = ()


def deck_view(batch: ChainBatch) -> tuple[np.ndarray, np.ndarray]:
    """Card and orientation at each position, read from the inverse chain.

    The inverse chain ``Y = X^{-1}`` sends card ``c`` to position ``Y.perm(c)``
    with orientation ``Y.colors[c]``.  Returns two (trials, n) arrays indexed
    by 0-based position.
    """
    # inverse(x): perm^-1, colors[perm[i]] = -colors[i]
    rows = np.arange(batch.trials)[:, None]
    y_perm = np.empty_like(batch.perms)
    y_colors = np.empty_like(batch.colors)
    y_perm[rows, batch.perms] = np.arange(batch.params.n)
    y_colors[rows, batch.perms] = (-batch.colors) % batch.params.m
    cards = np.empty_like(y_perm)
    orient = np.empty_like(y_colors)
    cards[rows, y_perm] = np.arange(batch.params.n)
    orient[rows, y_perm] = y_colors
    return cards, orient


def empirical_pj_check(
    params: GroupParams,
    j: int,
    t: int,
    trials: int,
    seed: int,
    workers: int = 1,
    batch: ChainBatch | None = None,
) -> PjCheck:
    """Conditional law of the card at position ``j`` given the cards above it.

    Keeps the trials where position ``j`` has already been a first draw, groups
    them by the exact (card, orientation) configuration at positions
    ``j+1..n``, and compares the frequencies of the ``m*j`` possible
    (card, orientation) outcomes at position ``j`` with ``1/(m j)``.
    """
    n, m = params.n, params.m
    if not 1 <= j <= n:
        raise ValueError(f"j must lie in [1, {n}]")
    if batch is None:
        batch = simulate_batch(params, t, trials, seed, workers)
    keep = (batch.first_hit[:, j - 1] >= 0) & (batch.first_hit[:, j - 1] <= t)
    cards, orient = deck_view(batch)
    cards, orient = cards[keep].astype(np.int64), orient[keep].astype(np.int64)
    conditioned = int(keep.sum())
    p = 1.0 / (m * j)

    if conditioned == 0:
        return PjCheck(j, t, batch.trials, 0, 0, float("nan"), float("nan"), 0, ("no trial has T_j <= t",))

    # encode the configuration above j as one integer (base m*n digits)
    oriented = cards * m + orient
    base = m * n
    key = np.zeros(conditioned, dtype=np.int64)
    for pos in range(j, n):
        key = key * base + oriented[:, pos]
    _, group_id, group_size = np.unique(key, return_inverse=True, return_counts=True)
    n_groups = len(group_size)

    # outcome at j: rank of its card among the cards not above j, times m, plus orientation
    below = np.sort(cards[:, :j], axis=1)
    slot = (below < cards[:, j - 1 : j]).sum(axis=1)
    outcome = slot * m + orient[:, j - 1]
    table = np.zeros((n_groups, m * j), dtype=np.int64)
    np.add.at(table, (group_id, outcome), 1)

    freq = table / group_size[:, None]
    dev = np.abs(freq - p)
    se = np.sqrt(p * (1 - p) / group_size)[:, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        z = np.where(se > 0, dev / se, 0.0)
    small = int(np.count_nonzero(group_size < MIN_GROUP_SAMPLES))
    warnings = ()
    if small:
        msg = f"{small} of {n_groups} conditioning groups have < {MIN_GROUP_SAMPLES} samples"
        logger.warning(msg)
        warnings = (msg,)
    return PjCheck(j, t, batch.trials, conditioned, n_groups, float(dev.max()), float(z.max()), small, warnings)
