"""Defender side of the game: choose per-group hash costs under a workload budget.

The defender commits to a cost vector; the attacker best-responds. We search
cost vectors with differential evolution, scoring each candidate by the
attacker's best-response success rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .adversary import AttackPlan, best_lambdas, best_response
from .corpus import Distribution
from .strength import CostVector, Grouping, assign_costs, partition_by_mass


# a candidate must beat the incumbent by more than summation noise
IMPROVE_TOL = 1e-12


class InfeasibleRegion(ValueError):
    pass


@dataclass(frozen=True)
class FeasibleRegion:
    masses: tuple[float, ...]
    c_max: float
    k_min: float

    def __post_init__(self):
        object.__setattr__(self, "masses", tuple(float(m) for m in self.masses))
        if not self.masses or min(self.masses) < 0:
            raise InfeasibleRegion("group masses must be non-negative")
        if not self.k_min > 0:
            raise InfeasibleRegion("k_min must be positive")
        if self.k_min * math.fsum(self.masses) > self.c_max:
            raise InfeasibleRegion(
                f"k_min={self.k_min} exceeds the budget C_max={self.c_max} for total mass {math.fsum(self.masses)}")

    @property
    def tau(self) -> int:
        return len(self.masses)


def _project(W: np.ndarray, region: FeasibleRegion) -> np.ndarray:
    m = np.array(region.masses)
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    spend = W @ m
    W = np.where((spend == 0)[:, None], 1.0, W)
    spend = W @ m
    slack = region.c_max - region.k_min * math.fsum(region.masses)
    return region.k_min + (slack / spend)[:, None] * W


def project_feasible(weights: Sequence[float], region: FeasibleRegion) -> CostVector:
    """Map non-negative weights onto the budget hyperplane: k_j = k_min + alpha * w_j."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (region.tau,) or not np.all(np.isfinite(w)) or w.min() < 0:
        raise ValueError("weights must be finite, non-negative, one per group")
    k = _project(w, region)[0]
    return CostVector(tuple(k.tolist()), region.c_max, region.k_min)


@dataclass(frozen=True)
class OptResult:
    k_star: CostVector
    p_adv: float
    u_adv: float
    plan: AttackPlan
    grouping: Grouping
    evals: int
    seed: int
    uniform_p_adv: float


def uniform_costs(dist: Distribution, tau: int, c_max: float) -> np.ndarray:
    """The status-quo vector: every group gets C_max / total mass."""
    return np.full(tau, c_max / dist.mass)


def opt_hash_cost_vec(v: float, c_max: float, k_min: float, dist_train: Distribution, tau: int,
                      iters: int = 10000, seed: int = 0, popsize: int = 32,
                      mutation: float = 0.7, crossover: float = 0.9, log_bound: float = 3.0,
                      grouping: Grouping | None = None) -> OptResult:
    """Search per-group costs minimizing the attacker's best-response success rate.

    Candidates live in log-weight space u in [-log_bound, log_bound]^tau and map
    to costs through :func:`project_feasible` with w = 10**u. The uniform
    vector is evaluated first and the best candidate ever seen is returned,
    so the result is never worse than uniform hashing.
    """
    if grouping is None:
        grouping = partition_by_mass(dist_train, tau)
    elif grouping.tau != tau:
        raise ValueError("grouping has the wrong number of groups")
    region = FeasibleRegion(grouping.masses, c_max, k_min)
    if iters < 1:
        raise ValueError("iters must be positive")
    if tau > 1 and iters < popsize + 1:
        raise ValueError(f"iters={iters} is smaller than the initial population")
    counts, probs, labels = dist_train.counts, dist_train.probs, grouping.labels

    def fitness(K: np.ndarray) -> np.ndarray:
        return best_lambdas(v, counts, probs, K[:, labels])

    best_k = uniform_costs(dist_train, tau, c_max)
    best_f = fitness(best_k[None, :])[0]
    uniform_f = best_f
    evals = 1

    if tau > 1:
        rng = np.random.default_rng(seed)
        lo, hi = -log_bound, log_bound
        pop = rng.uniform(lo, hi, size=(popsize, tau))
        pop[0] = 0.0
        pop_k = _project(10.0 ** pop, region)
        pop_f = fitness(pop_k)
        evals += popsize
        i = int(np.argmin(pop_f))
        if pop_f[i] < best_f - IMPROVE_TOL:
            best_f, best_k = pop_f[i], pop_k[i]

        idx = np.arange(popsize)
        while evals < iters:
            # all trials of a generation are drawn before any is scored
            keys = rng.random((popsize, popsize))
            keys[idx, idx] = np.inf
            r = np.argsort(keys, axis=1)[:, :3]
            mutant = np.clip(pop[r[:, 0]] + mutation * (pop[r[:, 1]] - pop[r[:, 2]]), lo, hi)
            cross = rng.random((popsize, tau)) < crossover
            cross[idx, rng.integers(0, tau, popsize)] = True
            trial = np.where(cross, mutant, pop)
            n = min(popsize, iters - evals)
            trial_k = _project(10.0 ** trial[:n], region)
            trial_f = fitness(trial_k)
            evals += n
            keep = trial_f <= pop_f[:n]
            pop[:n][keep] = trial[:n][keep]
            pop_f[:n][keep] = trial_f[keep]
            i = int(np.argmin(trial_f))
            if trial_f[i] < best_f - IMPROVE_TOL:
                best_f, best_k = trial_f[i], trial_k[i]

    k_star = CostVector(tuple(best_k.tolist()), c_max, k_min)
    plan = best_response(v, assign_costs(dist_train, grouping, k_star))
    return OptResult(k_star, plan.lam, plan.utility, plan, grouping, evals, seed, float(uniform_f))


def evaluate_defender(k: CostVector | Sequence[float], v: float, dist_eval: Distribution,
                      grouping: Grouping) -> tuple[float, AttackPlan]:
    """Attacker success rate when ``k`` protects ``dist_eval`` (which may differ from the training data)."""
    plan = best_response(v, assign_costs(dist_eval, grouping, k))
    return plan.lam, plan
