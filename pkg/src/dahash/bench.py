"""Sweeps of attacker success rate against the value-to-budget ratio v/C_max.

Every optimization runs in units of C_max (budget 1, value v/C_max, floor
k_min/C_max); costs and utilities are scaled back when reported. The game
is scale invariant, so this only fixes the units and keeps each row
independent of the absolute budget.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .adversary import AttackPlan
from .corpus import (Distribution, FrequencyCorpus, f_epsilon, good_turing,
                     guess_histogram, ingest_frequency_list, ingest_passwords, read_guess_numbers,
                     to_empirical_distribution)
from .stackelberg import FeasibleRegion, evaluate_defender, opt_hash_cost_vec
from .strength import Grouping, group_by_guess, partition_by_mass

log = logging.getLogger(__name__)

EMPIRICAL_GRID = tuple(float(i * 10 ** (2 + j)) for j in range(6) for i in range(1, 10))
MONTECARLO_GRID = tuple(float(j * 10 ** i) for i in range(3, 12) for j in (2, 4, 6, 8))

@dataclass(frozen=True)
class SweepRow:
    v_over_cmax: float
    tau: int
    p_adv: float
    u_adv: float
    b_star: int
    k: tuple[float, ...]
    group_mass: tuple[float, ...]
    cracked_mass: tuple[float, ...]
    min_cracked_freq: int | None
    uncertainty: str
    ic_violation: bool
    seed: int
    evals: int
    uniform_p_adv: float = field(default=float("nan"), compare=False)


@dataclass
class SweepConfig:
    mode: str = "empirical"
    corpus: str | None = None
    corpus_format: str = "auto"
    guess_train: str | None = None
    guess_eval: str | None = None
    taus: tuple[int, ...] = (1, 3, 5)
    c_max: float = 1.0
    kmin_frac: float = 0.1
    grid: tuple[float, ...] | None = None
    iters: int = 10000
    seed: int = 0
    bins: int = 200
    growth: float = 1.15
    offset: int = 25
    jobs: int = 1

    def resolved_grid(self) -> tuple[float, ...]:
        if self.grid is not None:
            return tuple(self.grid)
        return EMPIRICAL_GRID if self.mode == "empirical" else MONTECARLO_GRID


def uncertainty_flag(min_cracked_freq: int | None, f_01: int, f_001: int) -> str:
    """red: cracked passwords reach the 10%-error zone; yellow: the 1%-error zone."""
    if min_cracked_freq is None:
        return "none"
    if min_cracked_freq <= f_01:
        return "red"
    if min_cracked_freq <= f_001:
        return "yellow"
    return "none"


def _cracked_by_group(dist: Distribution, grouping: Grouping, plan: AttackPlan) -> tuple[float, ...]:
    parts: list[list[float]] = [[] for _ in range(grouping.tau)]
    for i in plan.order[: plan.n_sets].tolist():
        parts[int(grouping.labels[i])].append(float(dist.counts[i] * dist.probs[i]))
    return tuple(math.fsum(p) for p in parts)


def ic_violation(grouping: Grouping, plan: AttackPlan) -> bool:
    """True if some group j+1 password is cracked while a group j password survives."""
    cracked = plan.cracked
    labels = grouping.labels
    for j in range(grouping.tau - 1):
        weaker = labels == j
        if np.any(cracked[labels == j + 1]) and not np.all(cracked[weaker]):
            return True
    return False


@dataclass
class _Experiment:
    train: Distribution
    corpus_N: int | None = None
    f_01: int | None = None
    f_001: int | None = None


def _empirical_experiment(corpus: FrequencyCorpus) -> _Experiment:
    dist = to_empirical_distribution(corpus)
    profile = good_turing(corpus)
    return _Experiment(dist, corpus_N=corpus.N, f_01=f_epsilon(profile, 0.1),
                       f_001=f_epsilon(profile, 0.01))


def _row(exp: _Experiment, ratio: float, tau: int, cfg: SweepConfig,
         eval_pair: tuple[Distribution, Grouping] | None) -> SweepRow:
    grouping = partition_by_mass(exp.train, tau)
    res = opt_hash_cost_vec(ratio, 1.0, cfg.kmin_frac, exp.train, tau, iters=cfg.iters,
                            seed=cfg.seed, grouping=grouping)
    if eval_pair is None:
        dist, grp, plan = exp.train, grouping, res.plan
    else:
        dist, grp = eval_pair
        _, plan = evaluate_defender(res.k_star, ratio, dist, grp)
    min_freq = None
    flag = "none"
    if exp.corpus_N is not None and plan.n_sets:
        cracked_probs = dist.probs[plan.order[: plan.n_sets]]
        min_freq = int(round(float(cracked_probs.min()) * exp.corpus_N))
        flag = uncertainty_flag(min_freq, exp.f_01, exp.f_001)
    return SweepRow(
        v_over_cmax=float(ratio),
        tau=tau,
        p_adv=plan.lam,
        u_adv=plan.utility * cfg.c_max,
        b_star=plan.B_star,
        k=tuple(x * cfg.c_max for x in res.k_star.k),
        group_mass=grp.masses,
        cracked_mass=_cracked_by_group(dist, grp, plan),
        min_cracked_freq=min_freq,
        uncertainty=flag,
        ic_violation=ic_violation(grp, plan),
        seed=cfg.seed,
        evals=res.evals,
        uniform_p_adv=res.uniform_p_adv,
    )


def _validate(cfg: SweepConfig, exp: _Experiment) -> None:
    if not cfg.c_max > 0:
        raise ValueError("C_max must be positive")
    if not 0 < cfg.kmin_frac:
        raise ValueError("k_min fraction must be positive")
    for tau in cfg.taus:
        FeasibleRegion(partition_by_mass(exp.train, tau).masses, 1.0, cfg.kmin_frac)


def _run(exp: _Experiment, cfg: SweepConfig,
         eval_pairs: dict[int, tuple[Distribution, Grouping]] | None = None) -> list[SweepRow]:
    _validate(cfg, exp)
    points = [(r, t) for r in cfg.resolved_grid() for t in cfg.taus]
    log.info("sweeping %d points (%d grid values x tau %s)", len(points), len(points) // len(cfg.taus), cfg.taus)
    pairs = [eval_pairs[t] if eval_pairs else None for _, t in points]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            rows = list(pool.map(_row, [exp] * len(points), *zip(*points),
                                 [cfg] * len(points), pairs))
    else:
        rows = [_row(exp, r, t, cfg, pr) for (r, t), pr in zip(points, pairs)]
    return sorted(rows, key=lambda row: (row.v_over_cmax, row.tau))


def sweep_empirical(corpus: FrequencyCorpus, cfg: SweepConfig) -> list[SweepRow]:
    """Optimize and evaluate on the empirical distribution of one corpus."""
    return _run(_empirical_experiment(corpus), cfg)


def sweep_montecarlo(train_guesses: Sequence[int], eval_guesses: Sequence[int],
                     cfg: SweepConfig) -> list[SweepRow]:
    """Optimize on the training guessing numbers, report the attack on the evaluation sample."""
    train_hist = guess_histogram(train_guesses, cfg.bins, cfg.growth, cfg.offset)
    eval_hist = guess_histogram(eval_guesses, cfg.bins, cfg.growth, cfg.offset)
    exp = _Experiment(train_hist.to_distribution())
    eval_pairs = {}
    for tau in cfg.taus:
        eval_pairs[tau] = group_by_guess(train_hist, partition_by_mass(exp.train, tau), eval_hist)
    return _run(exp, cfg, eval_pairs)


def load_corpus(path: str, fmt: str = "auto") -> FrequencyCorpus:
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if fmt == "auto":
        fmt = "frequencies" if all(_is_int_pair(x) for x in lines if x.strip()) else "passwords"
    if fmt == "frequencies":
        return ingest_frequency_list(lines)
    if fmt == "passwords":
        return ingest_passwords(lines)
    raise ValueError(f"unknown corpus format {fmt!r}")


def _is_int_pair(line: str) -> bool:
    parts = line.split(" ")
    return len(parts) == 2 and all(p.isdigit() for p in parts)


def load_guess_numbers(path: str) -> list[int]:
    with open(path, encoding="ascii") as fh:
        return read_guess_numbers(fh)


def run_sweep(cfg: SweepConfig) -> list[SweepRow]:
    if cfg.mode == "empirical":
        if not cfg.corpus:
            raise ValueError("empirical mode needs a corpus")
        return sweep_empirical(load_corpus(cfg.corpus, cfg.corpus_format), cfg)
    if cfg.mode == "montecarlo":
        if not (cfg.guess_train and cfg.guess_eval):
            raise ValueError("montecarlo mode needs training and evaluation guessing-number files")
        return sweep_montecarlo(load_guess_numbers(cfg.guess_train),
                                load_guess_numbers(cfg.guess_eval), cfg)
    raise ValueError(f"unknown mode {cfg.mode!r}")


def csv_header(max_tau: int) -> list[str]:
    cols = ["v_over_cmax", "tau", "p_adv", "u_adv", "b_star"]
    for name in ("k", "group_mass", "cracked_mass"):
        cols += [f"{name}_{j}" for j in range(1, max_tau + 1)]
    return cols + ["min_cracked_freq", "uncertainty", "ic_violation", "seed", "evals"]


def _pad(values: tuple[float, ...], width: int) -> list[str]:
    return [repr(x) for x in values] + [""] * (width - len(values))


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    max_tau = max((r.tau for r in rows), default=1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(max_tau))
    for r in rows:
        w.writerow([repr(r.v_over_cmax), r.tau, repr(r.p_adv), repr(r.u_adv), r.b_star]
                   + _pad(r.k, max_tau) + _pad(r.group_mass, max_tau) + _pad(r.cracked_mass, max_tau)
                   + ["" if r.min_cracked_freq is None else r.min_cracked_freq, r.uncertainty,
                      int(r.ic_violation), r.seed, r.evals])
    return buf.getvalue()


def read_csv_rows(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))
