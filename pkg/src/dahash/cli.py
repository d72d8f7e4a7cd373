"""Command-line entry point: ``dahash sweep|gen-corpus|gen-guesses|profile``."""
from __future__ import annotations

import argparse
import logging
import sys

from . import bench
from .corpus import f_epsilon, gen_zipf_corpus, gen_zipf_guess_numbers, good_turing


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _grid(text: str) -> tuple[float, ...] | str:
    if text in ("empirical", "montecarlo"):
        return text
    return _floats(text)


def cmd_sweep(args) -> int:
    grid = args.grid
    if grid == "empirical":
        grid = bench.EMPIRICAL_GRID
    elif grid == "montecarlo":
        grid = bench.MONTECARLO_GRID
    cfg = bench.SweepConfig(
        mode=args.mode, corpus=args.corpus, corpus_format=args.corpus_format,
        guess_train=args.guess_train, guess_eval=args.guess_eval, taus=args.tau,
        c_max=args.cmax, kmin_frac=args.kmin_frac, grid=grid, iters=args.iters,
        seed=args.seed, bins=args.bins, growth=args.growth, offset=args.offset, jobs=args.jobs)
    try:
        rows = bench.run_sweep(cfg)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    text = bench.rows_to_csv(rows)
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen_corpus(args) -> int:
    corpus = gen_zipf_corpus(args.support, args.exponent, args.samples, args.seed)
    fc = corpus.freq_counts()
    with open(args.out, "w", encoding="ascii", newline="\n") as fh:
        for f in sorted(fc, reverse=True):
            fh.write(f"{f} {fc[f]}\n")
    return 0


def cmd_gen_guesses(args) -> int:
    guesses = gen_zipf_guess_numbers(args.support, args.exponent, args.samples, args.seed)
    with open(args.out, "w", encoding="ascii", newline="\n") as fh:
        fh.writelines(f"{g}\n" for g in guesses)
    return 0


def cmd_profile(args) -> int:
    corpus = bench.load_corpus(args.corpus, args.corpus_format)
    prof = good_turing(corpus)
    print(f"N={corpus.N} distinct={corpus.distinct}")
    for f, u in enumerate(prof.U[: args.fmax + 1]):
        print(f"U_{f}\t{u:.6g}")
    print(f"f_0.1={f_epsilon(prof, 0.1)} f_0.01={f_epsilon(prof, 0.01)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dahash", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="attacker success rate vs v/C_max, as CSV")
    s.add_argument("--mode", choices=("empirical", "montecarlo"), default="empirical")
    s.add_argument("--corpus", help="plaintext passwords or 'f N_f' frequency list")
    s.add_argument("--corpus-format", choices=("auto", "passwords", "frequencies"), default="auto")
    s.add_argument("--guess-train")
    s.add_argument("--guess-eval")
    s.add_argument("--tau", type=_ints, default=(1, 3, 5), help="comma-separated group counts")
    s.add_argument("--cmax", type=float, default=1.0)
    s.add_argument("--kmin-frac", type=float, default=0.1)
    s.add_argument("--grid", type=_grid, default=None,
                   help="'empirical', 'montecarlo' or comma-separated v/C_max values")
    s.add_argument("--iters", type=int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bins", type=int, default=200)
    s.add_argument("--growth", type=float, default=1.15)
    s.add_argument("--offset", type=int, default=25)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_sweep)

    for name, func, what in (("gen-corpus", cmd_gen_corpus, "Zipf frequency list"),
                             ("gen-guesses", cmd_gen_guesses, "Zipf guessing numbers")):
        g = sub.add_parser(name, help=f"write a synthetic {what}")
        g.add_argument("--support", type=int, default=100000)
        g.add_argument("--exponent", type=float, default=0.9)
        g.add_argument("--samples", type=int, default=1000000)
        g.add_argument("--seed", type=int, default=0)
        g.add_argument("--out", required=True)
        g.set_defaults(func=func)

    pr = sub.add_parser("profile", help="Good-Turing error bounds of a corpus")
    pr.add_argument("corpus")
    pr.add_argument("--corpus-format", choices=("auto", "passwords", "frequencies"), default="auto")
    pr.add_argument("--fmax", type=int, default=10)
    pr.set_defaults(func=cmd_profile)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
