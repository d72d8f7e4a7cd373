"""The rational offline attacker.

Given hash costs for every equivalence set, the attacker guesses sets in
order of bang-for-buck ratio prob/cost and stops at the set boundary that
maximizes expected value minus expected guessing cost.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .strength import CostedDistribution

# relative to max(1, v); utilities are bounded by v in magnitude
TIE_TOL = 1e-9


def _tolerance(v: float) -> float:
    return TIE_TOL * max(1.0, float(v))


def _sort_keys(probs: np.ndarray, costs: np.ndarray) -> np.ndarray:
    """lexsort permutation(s): ratio descending, then prob descending, then index."""
    costs = np.atleast_2d(costs)
    shape = costs.shape
    idx = np.broadcast_to(np.arange(shape[1]), shape)
    negp = np.broadcast_to(-probs, shape)
    return np.lexsort(np.stack([idx, negp, -(probs / costs)]), axis=-1)


def order_by_ratio(costed: CostedDistribution) -> np.ndarray:
    if len(costed) and not costed.costs.min() > 0:
        raise ValueError("hash costs must be positive")
    return _sort_keys(costed.probs, costed.costs)[0]


def _check_budget(costed: CostedDistribution, B: int) -> None:
    total = int(costed.counts.sum())
    if not 0 <= B <= total:
        raise ValueError(f"B={B} outside [0, {total}]")


def _split(costed: CostedDistribution, order, B: int):
    """Full sets covered by the first B guesses, plus the size of a trailing partial set."""
    c = costed.counts[order]
    ends = np.cumsum(c)
    full = int(np.searchsorted(ends, B, side="right"))
    partial = B - (int(ends[full - 1]) if full else 0)
    return full, partial


def success_rate(costed: CostedDistribution, order, B: int) -> float:
    """Mass of the first B passwords in ``order``; B need not be a set boundary."""
    _check_budget(costed, B)
    order = np.asarray(order)
    full, partial = _split(costed, order, B)
    lam = 0.0
    for i in order[:full]:
        lam += costed.counts[i] * costed.probs[i]
    if partial:
        lam += partial * costed.probs[order[full]]
    return float(lam)


def _set_gain(v, c, p, k, lam0):
    # guesses j = 0..c-1 of a set each cost k * (1 - lam0 - j*p); summed in closed form
    m = c * p
    return v * m - k * c * ((1.0 - lam0) - 0.5 * m) - 0.5 * k * m


def utility(v: float, costed: CostedDistribution, order, B: int) -> float:
    """Expected value minus expected cost of guessing the first B passwords in ``order``."""
    _check_budget(costed, B)
    order = np.asarray(order)
    full, partial = _split(costed, order, B)
    lam = 0.0
    u = 0.0
    for i in order[:full]:
        c, p, k = int(costed.counts[i]), float(costed.probs[i]), float(costed.costs[i])
        u += _set_gain(v, c, p, k, lam)
        lam += c * p
    if partial:
        i = order[full]
        u += _set_gain(v, partial, float(costed.probs[i]), float(costed.costs[i]), lam)
    return float(u)


def utility_per_guess(v: float, costed: CostedDistribution, order, B: int) -> float:
    """Reference evaluator: one term per guessed password, no set-level algebra."""
    _check_budget(costed, B)
    guessed = 0
    lam = 0.0
    cost = 0.0
    for i in np.asarray(order):
        for _ in range(int(costed.counts[i])):
            if guessed == B:
                return v * lam - cost
            cost += float(costed.costs[i]) * (1.0 - lam)
            lam += float(costed.probs[i])
            guessed += 1
    return v * lam - cost


@dataclass(frozen=True)
class AttackPlan:
    """The attacker's best response.

    ``order`` lists set indices by descending ratio; the attacker guesses the
    first ``n_sets`` of them completely (``B_star`` passwords) and stops.
    """

    order: np.ndarray
    n_sets: int
    B_star: int
    lam: float
    utility: float

    @property
    def positions(self) -> np.ndarray:
        pos = np.empty_like(self.order)
        pos[self.order] = np.arange(self.order.size)
        return pos

    @property
    def cracked(self) -> np.ndarray:
        """Boolean mask over the original set indices."""
        mask = np.zeros(self.order.size, dtype=bool)
        mask[self.order[: self.n_sets]] = True
        return mask


def _scan(v: float, counts: np.ndarray, probs: np.ndarray, costs: np.ndarray):
    """Greedy best response for a batch of cost assignments (one per row of ``costs``).

    Returns (order, n_sets, lam, util) per row. Rows are processed
    independently with sequential accumulation, so a row's result does not
    depend on the rest of the batch.
    """
    costs = np.atleast_2d(costs)
    P, n = costs.shape
    order = _sort_keys(probs, costs)
    c = counts[order].astype(np.float64)
    p = probs[order]
    k = np.take_along_axis(costs, order, axis=1)
    m = c * p
    lam = np.zeros((P, n + 1))
    np.cumsum(m, axis=1, out=lam[:, 1:])
    gain = v * m - k * c * ((1.0 - lam[:, :-1]) - 0.5 * m) - 0.5 * k * m
    util = np.zeros((P, n + 1))
    np.cumsum(gain, axis=1, out=util[:, 1:])
    best = util.max(axis=1)
    ok = util >= (best - _tolerance(v))[:, None]
    # largest optimal boundary: the attacker keeps guessing through ties
    n_sets = n - np.argmax(ok[:, ::-1], axis=1)
    rows = np.arange(P)
    return order, n_sets, lam[rows, n_sets], util[rows, n_sets]


def best_lambdas(v: float, counts: np.ndarray, probs: np.ndarray, costs: np.ndarray) -> np.ndarray:
    """Best-response cracked mass for each row of per-set costs."""
    return _scan(v, counts, probs, costs)[2]


def best_response(v: float, costed: CostedDistribution) -> AttackPlan:
    if v < 0:
        raise ValueError("v must be non-negative")
    if len(costed) == 0:
        return AttackPlan(np.zeros(0, dtype=np.int64), 0, 0, 0.0, 0.0)
    if not costed.costs.min() > 0:
        raise ValueError("hash costs must be positive")
    order, n_sets, _, util = _scan(v, costed.counts, costed.probs, costed.costs)
    order = order[0]
    n = int(n_sets[0])
    cracked = order[:n]
    B = int(costed.counts[cracked].sum())
    # correctly rounded, so lambda does not depend on the guessing order
    lam = math.fsum((costed.counts[cracked] * costed.probs[cracked]).tolist())
    return AttackPlan(order, n, B, lam, float(util[0]))
