"""Command-line recipes for the takeover, niching and QAP experiments.

Every command writes its CSV/PGM files under ``--out`` (or
``$ANISOCGA_OUT``) and prints one summary line per result row.
"""

import argparse
import math
import os
import sys
from pathlib import Path

import numba

from . import io
from .grid import GridShape
from .niching import niching_replicates, run_niching
from .qap import CgaConfig, alpha_sweep, read_qaplib, run_cga
from .selection import AnisotropyParams
from .takeover import (
    TakeoverConfig,
    aggregate_curves,
    equivalent_alpha,
    fit_alpha_ratio_regression,
    mean_takeover,
    run_replicates,
    takeover_snapshots,
)


def parse_alphas(text: str) -> list:
    """``"0.1,0.5"`` or ``"start:end:step"`` (end excluded)."""
    if ":" in text:
        try:
            start, end, step = (float(v) for v in text.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad alpha range {text!r}, expected start:end:step") from None
        if step <= 0:
            raise argparse.ArgumentTypeError("alpha step must be positive")
        count = max(0, math.ceil((end - start) / step - 1e-9))
        return [round(start + i * step, 10) for i in range(count)]
    try:
        return [float(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha list {text!r}") from None


def parse_ints(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def parse_shape(text: str) -> GridShape:
    try:
        return GridShape.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_shapes(text: str) -> list:
    return [parse_shape(s) for s in text.split(",") if s]


def _common(p):
    p.add_argument("--seed", type=int, default=0, help="base seed (64-bit)")
    p.add_argument("--out", type=Path, default=None, help="output directory (default $ANISOCGA_OUT or .)")
    p.add_argument("--threads", type=int, default=None, help="cap on worker threads")
    p.add_argument("--k", type=int, default=2, help="tournament size in [1, 5]")
    p.add_argument("--without-replacement", action="store_true", help="draw distinct tournament directions")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anisocga", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("takeover", help="takeover time of one configuration")
    _common(p)
    p.add_argument("--shape", type=parse_shape, default=GridShape(64, 64))
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--max-generations", type=int, default=None)
    p.add_argument("--aggregate", action="store_true", help="one averaged growth curve instead of one per replicate")
    p.add_argument("--snapshots", type=parse_ints, default=[], help="generations to dump as PGM (replicate 0)")

    p = sub.add_parser("takeover-sweep", help="takeover summary over shapes or alphas")
    _common(p)
    p.add_argument("--shapes", type=parse_shapes, default=None)
    p.add_argument("--shape", type=parse_shape, default=GridShape(64, 64), help="grid used for an alpha sweep")
    p.add_argument("--alphas", type=parse_alphas, default=None)
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--max-generations", type=int, default=None)
    p.add_argument("--aggregate", action="store_true", help="also write each label's mean growth curve")

    p = sub.add_parser("equivalence", help="alpha giving the same takeover time as a rectangular grid")
    _common(p)
    p.add_argument("--shape", type=parse_shape, default=GridShape(64, 64), help="square grid searched over alpha")
    p.add_argument("--shapes", type=parse_shapes, default=None, help="rectangular grids whose takeover is matched")
    p.add_argument("--targets", type=lambda s: [float(v) for v in s.split(",") if v], default=None)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--tolerance", type=float, default=0.5)

    p = sub.add_parser("niching", help="two optima spreading on the grid")
    _common(p)
    p.add_argument("--shape", type=parse_shape, default=GridShape(64, 64))
    p.add_argument("--alpha", type=parse_alphas, default=[0.0], help="one value or a list")
    p.add_argument("--generations", type=int, default=1000)
    p.add_argument("--snapshots", type=parse_ints, default=[])
    p.add_argument("--replicates", type=int, default=1, help="> 1 adds a survival/mixing summary")

    p = sub.add_parser("qap", help="one cGA run on a QAPLIB instance")
    _common(p)
    _qap_args(p)
    p.add_argument("--alpha", type=float, default=0.86)
    p.add_argument("--replicate", type=int, default=0)
    p.add_argument("--trace", action="store_true", help="write the per-generation global best")

    p = sub.add_parser("qap-sweep", help="mean best cost over alpha")
    _common(p)
    _qap_args(p)
    p.add_argument("--alphas", type=parse_alphas, default=parse_alphas("0.0:1.0:0.02"))
    p.add_argument("--runs", type=int, default=50)
    return parser


def _qap_args(p):
    p.add_argument("--instance", type=Path, required=True, help="QAPLIB file")
    p.add_argument("--grid", type=parse_shape, default=GridShape(20, 20))
    p.add_argument("--generations", type=int, default=1500)
    p.add_argument("--crossover-rate", type=float, default=1.0)
    p.add_argument("--mutation-mean", type=float, default=1.0)
    p.add_argument("--fixed-mutation", action="store_true", help="exactly int(mean) swaps per offspring")


def _set_threads(n):
    if n is None:
        return
    if n < 1:
        raise ValueError("--threads must be >= 1")
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _takeover(args, out):
    cfg = TakeoverConfig(
        args.shape, AnisotropyParams(args.alpha), args.k, args.max_generations,
        args.replicates, args.seed, not args.without_replacement,
    )
    results = run_replicates(cfg)
    label = f"{args.shape}_a{io.alpha_tag(args.alpha)}"
    if args.aggregate or not any(r.reached for r in results):
        length = max(len(r.curve) for r in results)
        mean = sum(r.curve.padded(length).astype(float) for r in results) / len(results)
        io.write_growth_csv(out / f"growth_{label}.csv", mean)
    else:
        for r in results:
            io.write_growth_csv(out / f"growth_{label}_r{r.replicate}.csv", r.curve.n_of_t)
    _summary_row(out / f"takeover_{label}.csv", str(args.shape) if args.alpha == 0 else args.alpha, results)
    for t, grid in takeover_snapshots(cfg, args.snapshots).items():
        io.write_pgm(out / f"snap_g{t}.pgm", io.takeover_image(grid))


def _summary(label, results):
    try:
        s = aggregate_curves(results)
    except ValueError:
        final = results[0].curve.n_of_t[-1]
        print(f"{label}: takeover not reached in any of {len(results)} replicates (final N = {final})")
        return (label, math.nan, math.nan, math.nan, math.nan, len(results))
    print(f"{label}: avg {s.avg:.2f} std {s.std:.2f} min {s.min} max {s.max} ({s.reached}/{s.replicates} reached)")
    return (label, s.avg, s.std, s.min, s.max, s.replicates)


def _summary_row(path, label, results):
    io.write_summary_csv(path, [_summary(label, results)])


def _takeover_sweep(args, out):
    rows = []
    if args.alphas is not None:
        configs = [(a, args.shape, a) for a in args.alphas]
        name = f"takeover_sweep_{args.shape}.csv"
    else:
        shapes = args.shapes or parse_shapes("64x64,32x128,16x256,8x512,4x1024,2x2048")
        configs = [(str(s), s, 0.0) for s in shapes]
        name = "takeover_shapes.csv"
    for label, shape, alpha in configs:
        cfg = TakeoverConfig(
            shape, AnisotropyParams(alpha), args.k, args.max_generations,
            args.replicates, args.seed, not args.without_replacement,
        )
        results = run_replicates(cfg)
        rows.append(_summary(label, results))
        if args.aggregate:
            length = max(len(r.curve) for r in results)
            mean = sum(r.curve.padded(length).astype(float) for r in results) / len(results)
            io.write_growth_csv(out / f"growth_{io.fmt(label)}.csv", mean)
    io.write_summary_csv(out / name, rows)


def _equivalence(args, out):
    wr = not args.without_replacement
    rows = []
    if args.shapes:
        for shape in args.shapes:
            target, _, _ = mean_takeover(shape, 0.0, args.k, args.replicates, args.seed, with_replacement=wr)
            rows.append((str(shape), shape.ratio(), target))
    for target in args.targets or []:
        rows.append((f"target{io.fmt(target)}", math.nan, target))
    if not rows:
        raise ValueError("give --shapes and/or --targets")
    out_rows = []
    for label, ratio, target in rows:
        alpha = equivalent_alpha(target, args.shape, args.k, args.replicates, args.tolerance, args.seed,
                                 with_replacement=wr)
        print(f"{label}: takeover {target:.2f} -> alpha {alpha:.5f}")
        out_rows.append((label, ratio, target, alpha))
    io.write_rows(out / "equivalence.csv", io.EQUIVALENCE_HEADER, out_rows)
    pairs = [(r, a) for _, r, _, a in out_rows if not math.isnan(r)]
    if len({r for r, _ in pairs}) >= 2:
        fit = fit_alpha_ratio_regression(pairs)
        print(f"regression: alpha = {fit.slope:.4f} * l/L + {fit.intercept:.4f} (r = {fit.correlation:.5f})")


def _niching(args, out):
    wr = not args.without_replacement
    for alpha in args.alpha:
        params = AnisotropyParams(alpha)
        report = run_niching(args.shape, params, args.k, args.generations, args.snapshots, args.seed,
                             with_replacement=wr)
        tag = io.alpha_tag(alpha)
        io.write_niching_csv(out / f"niching_a{tag}.csv", report)
        for t, grid in report.snapshots.items():
            io.write_pgm(out / f"niche_a{tag}_g{t}.pgm", io.niching_image(grid))
        a, b, e = report.counts[-1]
        print(f"alpha {tag}: generation {report.generations} A={a} B={b} empty={e} mixing={report.mixing[-1]:.4f}")
        if args.replicates > 1:
            s = niching_replicates(args.shape, params, args.k, args.generations, args.replicates, args.seed,
                                   with_replacement=wr)
            print(f"alpha {tag}: both lineages survive in {s.survival_rate:.1%} of {args.replicates} replicates,"
                  f" mean mixing {s.final_mixing.mean():.4f}")


def _qap_cfg(args, alpha):
    return CgaConfig(
        grid=args.grid, params=AnisotropyParams(alpha), k=args.k, generations=args.generations,
        crossover_rate=args.crossover_rate, mutation_mean=args.mutation_mean,
        fixed_mutation=args.fixed_mutation, with_replacement=not args.without_replacement,
    )


def _qap(args, out):
    instance = read_qaplib(args.instance)
    stats = run_cga(instance, _qap_cfg(args, args.alpha), args.seed, args.replicate)
    perm = " ".join(str(v + 1) for v in stats.final_best_permutation)
    print(f"{instance.name} alpha {io.alpha_tag(args.alpha)}: best cost {io.fmt(stats.final_best_cost)} [{perm}]")
    if args.trace:
        io.write_trace_csv(out / f"trace_{instance.name}_a{io.alpha_tag(args.alpha)}.csv", stats.best_cost_per_generation)


def _qap_sweep(args, out):
    instance = read_qaplib(args.instance)
    rows = alpha_sweep(instance, args.alphas, args.runs, _qap_cfg(args, 0.0), args.seed)
    for r in rows:
        print(f"alpha {io.alpha_tag(r.alpha)}: mean {r.mean_best:.2f} std {r.std_best:.2f} min {io.fmt(r.min_best)} ({r.runs} runs)")
    io.write_sweep_csv(out / f"sweep_{instance.name}.csv", rows)


COMMANDS = {
    "takeover": _takeover,
    "takeover-sweep": _takeover_sweep,
    "equivalence": _equivalence,
    "niching": _niching,
    "qap": _qap,
    "qap-sweep": _qap_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out or Path(os.environ.get("ANISOCGA_OUT", "."))
    try:
        out.mkdir(parents=True, exist_ok=True)
        if not os.access(out, os.W_OK):
            raise PermissionError(f"output directory {out} is not writable")
        _set_threads(args.threads)
        COMMANDS[args.command](args, out)
    except (OSError, ValueError) as exc:
        print(f"anisocga {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
