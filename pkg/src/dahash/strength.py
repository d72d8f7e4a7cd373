"""GetHardness: split a distribution into strength groups and cost them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Distribution, GuessHistogram


@dataclass(frozen=True)
class Grouping:
    """Assignment of every equivalence set to one of ``tau`` strength groups.

    Group 0 is the weakest (highest probability). ``labels[i]`` is the group of
    set ``i``; ``masses[j]`` is the probability mass of group ``j``.
    """

    tau: int
    labels: np.ndarray
    masses: tuple[float, ...]

    @property
    def boundaries(self) -> tuple[int, ...] | None:
        """Set indices where groups 2..tau start, or None for a non-contiguous grouping."""
        lab = self.labels
        if lab.size and np.all(np.diff(lab) >= 0) and lab[0] == 0:
            return tuple(int(i) for i in np.flatnonzero(np.diff(lab)) + 1)
        return None

    @classmethod
    def from_labels(cls, dist: Distribution, labels: Sequence[int], tau: int) -> "Grouping":
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != dist.counts.shape:
            raise ValueError("one label per equivalence set required")
        if labels.min() < 0 or labels.max() >= tau:
            raise ValueError("labels out of range")
        labels.setflags(write=False)
        parts: list[list[float]] = [[] for _ in range(tau)]
        for lab, m in zip(labels.tolist(), dist.set_masses.tolist()):
            parts[lab].append(m)
        masses = tuple(math.fsum(p) for p in parts)
        return cls(tau, labels, masses)


def partition_by_mass(dist: Distribution, tau: int) -> Grouping:
    """Cut the descending set list into ``tau`` contiguous groups of near-equal mass.

    The j-th cut goes where the cumulative mass first reaches j/tau of the
    total; the set straddling the target joins whichever side leaves the
    cumulative mass closer to it, the earlier group on a tie.
    """
    n = len(dist)
    if not 1 <= tau <= n:
        raise ValueError(f"tau={tau} must lie in [1, {n}] (number of equivalence sets)")
    cum = np.cumsum(dist.set_masses)
    total = dist.mass
    cuts = []
    prev = 0
    for j in range(1, tau):
        target = j * total / tau
        i = int(np.searchsorted(cum, target, side="left"))
        i = min(i, n - 1)
        before = cum[i - 1] if i > 0 else 0.0
        cut = i + 1 if abs(cum[i] - target) <= abs(before - target) else i
        # every group keeps at least one set
        cut = max(cut, prev + 1)
        cut = min(cut, n - (tau - j))
        cuts.append(cut)
        prev = cut
    labels = np.zeros(n, dtype=np.int64)
    for c in cuts:
        labels[c:] += 1
    return Grouping.from_labels(dist, labels, tau)


def group_by_guess(train: GuessHistogram, train_grouping: Grouping,
                   target: GuessHistogram) -> tuple[Distribution, Grouping]:
    """Carry a grouping fitted on ``train`` over to another guessing-number sample.

    A password's group is decided by its guessing number: the training bin
    that contains it fixes the group. Guessing numbers beyond the training
    range, or in bins empty during training, go to the strongest group. Each
    target bin is classified by its lower edge; if merging equal
    probabilities puts bins of different groups into one set, the set takes
    the group holding most of its mass.
    """
    train_dist = train.to_distribution()
    if train_grouping.labels.size != len(train_dist):
        raise ValueError("grouping does not match the training histogram")
    tau = train_grouping.tau
    label_of_prob = dict(zip(train_dist.probs.tolist(), train_grouping.labels.tolist()))
    train_prob = {i: p for _, p, i in train.bin_sets()}

    def label(guess: int) -> int:
        b = train.bin_of(guess)
        if b < 0 or b not in train_prob:
            return tau - 1
        return label_of_prob[train_prob[b]]

    dist = target.to_distribution()
    votes: dict[float, dict[int, float]] = {}
    for count, prob, i in target.bin_sets():
        lab = label(target.edges[i])
        by_label = votes.setdefault(prob, {})
        by_label[lab] = by_label.get(lab, 0.0) + count * prob
    labels = [min(v, key=lambda lab: (-v[lab], lab)) for v in (votes[p] for p in dist.probs.tolist())]
    return dist, Grouping.from_labels(dist, labels, tau)


@dataclass(frozen=True)
class CostVector:
    """Per-group hash costs with the budget they were chosen under."""

    k: tuple[float, ...]
    c_max: float
    k_min: float

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(float(x) for x in self.k))
        if not self.k or min(self.k) <= 0:
            raise ValueError("hash costs must be positive")

    def __len__(self) -> int:
        return len(self.k)

    def is_feasible(self, masses: Sequence[float], tol: float = 1e-9) -> bool:
        cost = math.fsum(k * m for k, m in zip(self.k, masses))
        return min(self.k) >= self.k_min - tol and cost <= self.c_max + tol


@dataclass(frozen=True)
class CostedDistribution:
    """Equivalence sets with their hash cost: the attacker's view of the system."""

    counts: np.ndarray
    probs: np.ndarray
    costs: np.ndarray

    def __post_init__(self):
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        costs = np.ascontiguousarray(self.costs, dtype=np.float64)
        if not (counts.shape == probs.shape == costs.shape) or counts.ndim != 1:
            raise ValueError("counts, probs and costs must be equal-length vectors")
        if counts.size and counts.min() < 1:
            raise ValueError("counts must be >= 1")
        if costs.size and not costs.min() > 0:
            raise ValueError("hash costs must be positive")
        for a in (counts, probs, costs):
            a.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "costs", costs)

    @classmethod
    def from_triples(cls, triples: Sequence[tuple[int, float, float]]) -> "CostedDistribution":
        counts, probs, costs = zip(*triples) if triples else ((), (), ())
        return cls(np.array(counts, dtype=np.int64), np.array(probs, dtype=np.float64),
                   np.array(costs, dtype=np.float64))

    @property
    def sets(self) -> list[tuple[int, float, float]]:
        return list(zip(self.counts.tolist(), self.probs.tolist(), self.costs.tolist()))

    def __len__(self) -> int:
        return int(self.counts.size)


def assign_costs(dist: Distribution, grouping: Grouping, costs: CostVector | Sequence[float]) -> CostedDistribution:
    k = np.asarray(costs.k if isinstance(costs, CostVector) else costs, dtype=np.float64)
    if k.size != grouping.tau:
        raise ValueError(f"cost vector has {k.size} entries for {grouping.tau} groups")
    if grouping.labels.size != len(dist):
        raise ValueError("grouping does not match the distribution")
    return CostedDistribution(dist.counts, dist.probs, k[grouping.labels])


def server_cost(dist: Distribution, grouping: Grouping, costs: CostVector | Sequence[float]) -> float:
    """Amortized cost of verifying a correct password: sum_j k_j * Pr[G_j]."""
    k = costs.k if isinstance(costs, CostVector) else tuple(costs)
    if len(k) != grouping.tau or grouping.labels.size != len(dist):
        raise ValueError("inconsistent shapes")
    return math.fsum(kj * mj for kj, mj in zip(k, grouping.masses))
