"""Command-line entry point: ``ostshuffle <command> [options]``.

Every command writes one file named ``<cmd>_m<m>_n<n>_seed<seed>.<ext>`` into
``--out`` and exits with 0 when all checks pass, 1 when a mathematical check
fails, and 2 on capacity or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import exact, montecarlo, selftest
from .errors import CapacityError
from .group import GroupParams, format_element

DEFAULT_SEED = 20_240_229
DEFAULT_CAP = 2**20
DEFAULT_C_GRID = (0.5, 1.0, 2.0, 3.0, 5.0)
MIX_EPS = 0.25

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

CAVEAT = (
    "note: the cutoff at n ln n is an asymptotic statement; at this size the "
    "curve position is only a qualitative check"
)

@dataclass
class RunConfig:
    m: int = 2
    n: int = 4
    t_max: int = 60
    trials: int = 100_000
    c: list[float] = field(default_factory=lambda: list(DEFAULT_C_GRID))
    seed: int = DEFAULT_SEED
    out: Path = Path(".")
    format: str = "csv"
    cap: int = DEFAULT_CAP
    quick: bool = False

    def __post_init__(self):
        for name in ("m", "n", "trials"):
            if getattr(self, name) < 1:
                raise ValueError(f"--{name} must be positive")
        if self.t_max < 0:
            raise ValueError("--t-max must be >= 0")
        if any(c <= 0 for c in self.c):
            raise ValueError("--c values must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("--seed must fit in 64 bits")

    @property
    def params(self) -> GroupParams:
        return GroupParams(self.m, self.n)

    def output_path(self, cmd: str, ext: str | None = None) -> Path:
        ext = ext or self.format
        return self.out / f"{cmd}_m{self.m}_n{self.n}_seed{self.seed}.{ext}"


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def cmd_curve(cfg: RunConfig) -> int:
    params = cfg.params
    curve = exact.distance_curve(params, cfg.t_max, cap=cfg.cap)
    n_log_n = params.n * math.log(params.n)
    summary = curve.summary(MIX_EPS)
    summary["n_log_n"] = n_log_n
    if cfg.format == "json":
        text = json.dumps(summary, sort_keys=True, indent=2) + "\n"
    else:
        text = curve.to_csv()
    path = _write(cfg.output_path("curve"), text)

    def show(t):
        return "not reached" if t is None else str(t)

    print(f"{params}: |G| = {params.order}, t = 0..{cfg.t_max}")
    print(f"t_mix(1/4) tv  = {show(summary['t_mix_quarter_tv'])}")
    print(f"t_mix(1/4) sep = {show(summary['t_mix_quarter_sep'])}")
    print(f"n ln n         = {n_log_n:.4f}")
    print(CAVEAT)
    print(f"wrote {path}")

    ok = all(s >= v for s, v in zip(curve.sep, curve.tv)) and all(
        b <= a + 1e-12 for a, b in zip(curve.tv, curve.tv[1:])
    )
    if not ok:
        print("FAIL: sep >= tv or tv monotonicity violated", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def projection_discrepancies(params: GroupParams, t_max: int, cap: int) -> list[float]:
    """max_eta |sum over fiber of P^t_{m,n} - P^t_{1,n}(eta)| for t = 1..t_max."""
    base = GroupParams(1, params.n)
    exact.check_capacity(params, cap)
    exact.check_capacity(base, cap)
    out = []
    upstairs = exact.powers(params, cap=cap)
    downstairs = exact.powers(base, cap=cap)
    next(upstairs), next(downstairs)
    for _ in range(t_max):
        fiber = exact.pushforward_projection(next(upstairs)).mass
        out.append(float(abs(fiber - next(downstairs).mass).max()))
    return out


def cmd_projection_check(cfg: RunConfig) -> int:
    disc = projection_discrepancies(cfg.params, cfg.t_max, cfg.cap)
    worst = max(disc, default=0.0)
    if cfg.format == "json":
        text = json.dumps(
            {"m": cfg.m, "n": cfg.n, "t_max": cfg.t_max, "max_discrepancy": worst, "per_t": disc},
            indent=2,
        ) + "\n"
    else:
        text = "t,max_discrepancy\n" + "".join(f"{t},{d:.17g}\n" for t, d in enumerate(disc, 1))
    path = _write(cfg.output_path("projection-check"), text)
    print(f"{cfg.params} -> S_{cfg.n}: max fiber-sum discrepancy over t = 1..{cfg.t_max}: {worst:.3e}")
    print(f"wrote {path}")
    return EXIT_OK if worst < 1e-10 else EXIT_FAIL


def cmd_sst(cfg: RunConfig) -> int:
    rows = []
    for c in cfg.c:
        # each c gets its own stream so reordering --c does not change a row
        seed = montecarlo.derive_seed(cfg.seed, cfg.n, c)
        rows.append(montecarlo.sst_tail(cfg.params, c, cfg.trials, seed))
    if cfg.format == "json":
        payload = [
            {
                "n": r.n, "c": r.c, "t": r.t, "trials": r.trials, "exceed": r.exceed_count,
                "p_hat": r.p_hat, "stderr": r.stderr, "bound_e_minus_c": r.bound,
                "violates": r.violates_bound(),
            }
            for r in rows
        ]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = montecarlo.tail_csv(rows)
    path = _write(cfg.output_path("sst"), text)
    flagged = 0
    for r in rows:
        flag = "  FLAG" if r.violates_bound() else ""
        flagged += bool(flag)
        print(
            f"n={r.n} c={r.c:g} t={r.t}: p_hat={r.p_hat:.5f} +- {r.stderr:.5f}"
            f"  bound e^-c={r.bound:.5f}{flag}"
        )
    print(f"wrote {path}")
    return EXIT_FAIL if flagged else EXIT_OK


def cmd_selftest(cfg: RunConfig, element_map=None) -> int:
    groups = selftest.QUICK_GROUPS if cfg.quick else selftest.DEFAULT_GROUPS
    kwargs = {} if element_map is None else {"element_map": element_map}
    results = selftest.run_selftest(groups, **kwargs)
    if cfg.format == "json":
        text = json.dumps([r.__dict__ for r in results], indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["check", "passed", "detail"])
        writer.writerows([r.name, int(r.passed), r.detail] for r in results)
        text = buf.getvalue()
    _write(cfg.output_path("selftest"), text)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"{'ok  ' if r.passed else 'FAIL'} {r.name}" + (f"  ({r.detail})" if not r.passed else ""))
    if failed:
        print(f"first failing invariant: {failed[0].name}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_trace(cfg: RunConfig) -> int:
    trace = []
    state = montecarlo.simulate_chain(
        cfg.params, cfg.t_max, montecarlo.trial_rng(cfg.seed, 0), trace=trace
    )
    lines = [str(g) for g in trace]
    lines.append(f"# final {format_element(state.element)} sst={state.sst}")
    _write(cfg.output_path("trace", "txt"), "\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


COMMANDS = {
    "curve": cmd_curve,
    "projection-check": cmd_projection_check,
    "sst": cmd_sst,
    "selftest": cmd_selftest,
    "trace": cmd_trace,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, default=2, help="orientations per card (default 2)")
    common.add_argument("--n", type=int, default=4, help="number of cards (default 4)")
    common.add_argument("--t-max", type=int, default=60, help="largest step count (default 60)")
    common.add_argument("--trials", type=int, default=100_000, help="Monte Carlo trials (default 1e5)")
    common.add_argument(
        "--c", type=float, action="append", default=None,
        help=f"tail offset c, repeatable (default {' '.join(map(str, DEFAULT_C_GRID))})",
    )
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest group order for exact computation")
    common.add_argument("--quick", action="store_true", help="selftest: only G_{2,2}")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="ostshuffle",
        description="One-sided transposition shuffle on G_{m,n}: exact curves and Monte Carlo bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("curve", parents=[common], help="exact tv/sep distance curve")
    sub.add_parser("projection-check", parents=[common], help="fiber sums of P^t_{m,n} against P^t_{1,n}")
    sub.add_parser("sst", parents=[common], help="strong stationary time tail estimates")
    sub.add_parser("selftest", parents=[common], help="exhaustive invariant checks on small groups")
    sub.add_parser("trace", parents=[common], help="print one sampled chain, one generator per line")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig(
            m=args.m, n=args.n, t_max=args.t_max, trials=args.trials,
            c=args.c if args.c else list(DEFAULT_C_GRID), seed=args.seed,
            out=args.out, format=args.format, cap=args.cap, quick=args.quick,
        )
        return COMMANDS[args.command](cfg)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
