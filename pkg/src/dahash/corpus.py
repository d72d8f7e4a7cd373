"""Password corpora and the compressed distributions built from them.

A distribution is stored as equivalence sets: ``count`` passwords that all
share probability ``prob``. Empirical distributions come from frequency
lists; Monte-Carlo distributions come from histograms of guessing numbers.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np


class CorpusError(ValueError):
    pass


class EquivalenceSet(NamedTuple):
    count: int
    prob: float


@dataclass(frozen=True)
class FrequencyCorpus:
    """Per-password frequencies, sorted non-increasing."""

    freqs: np.ndarray
    N: int

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=np.int64)
        if freqs.size == 0:
            raise CorpusError("empty corpus")
        if freqs.min() < 1:
            raise CorpusError("frequencies must be positive")
        if np.any(np.diff(freqs) > 0):
            freqs = np.sort(freqs)[::-1]
        freqs = np.ascontiguousarray(freqs)
        freqs.setflags(write=False)
        object.__setattr__(self, "freqs", freqs)
        if int(freqs.sum()) != self.N:
            raise CorpusError(f"N={self.N} does not match sum of frequencies {int(freqs.sum())}")

    @classmethod
    def from_freqs(cls, freqs: Iterable[int]) -> "FrequencyCorpus":
        arr = np.sort(np.fromiter((int(f) for f in freqs), dtype=np.int64))[::-1]
        return cls(arr, int(arr.sum()))

    @property
    def distinct(self) -> int:
        return int(self.freqs.size)

    def freq_counts(self) -> dict[int, int]:
        """Map frequency f to N_f, the number of passwords seen exactly f times."""
        values, counts = np.unique(self.freqs, return_counts=True)
        return {int(f): int(n) for f, n in zip(values, counts)}


def _strip_eol(line: str) -> str:
    return line.rstrip("\n").rstrip("\r")


def ingest_passwords(lines: Iterable[str]) -> FrequencyCorpus:
    """Tabulate a plaintext corpus (one password per line).

    Blank lines are ignored so a trailing newline or CRLF endings do not
    introduce an empty password.
    """
    counter = Counter(s for s in map(_strip_eol, lines) if s)
    if not counter:
        raise CorpusError("empty corpus")
    return FrequencyCorpus.from_freqs(counter.values())


def ingest_frequency_list(lines: Iterable[str]) -> FrequencyCorpus:
    """Parse ``f N_f`` lines: N_f distinct passwords were each seen f times."""
    by_freq: dict[int, int] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = _strip_eol(raw)
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CorpusError(f"line {lineno}: expected 'frequency count', got {line!r}")
        try:
            f, n = int(parts[0]), int(parts[1])
        except ValueError:
            raise CorpusError(f"line {lineno}: not an integer pair: {line!r}") from None
        if f <= 0 or n <= 0:
            raise CorpusError(f"line {lineno}: integers must be positive, got {line!r}")
        by_freq[f] = by_freq.get(f, 0) + n
    if not by_freq:
        raise CorpusError("empty corpus")
    fs = sorted(by_freq, reverse=True)
    freqs = np.repeat(np.array(fs, dtype=np.int64), [by_freq[f] for f in fs])
    return FrequencyCorpus(freqs, int(sum(f * n for f, n in by_freq.items())))


def read_guess_numbers(lines: Iterable[str]) -> list[int]:
    out = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            g = int(line)
        except ValueError:
            raise CorpusError(f"line {lineno}: not an integer: {line!r}") from None
        if g <= 0:
            raise CorpusError(f"line {lineno}: guessing numbers must be positive")
        out.append(g)
    if not out:
        raise CorpusError("no guessing numbers")
    return out


@dataclass(frozen=True)
class Distribution:
    """Compressed password distribution: equivalence sets by descending probability.

    Use :meth:`from_sets` to build one; it merges equal probabilities, sorts,
    and checks that the total mass is one.
    """

    counts: np.ndarray
    probs: np.ndarray
    mass: float = field(init=False)

    def __post_init__(self):
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if counts.shape != probs.shape or counts.ndim != 1 or counts.size == 0:
            raise CorpusError("counts and probs must be equal-length non-empty vectors")
        if counts.min() < 1:
            raise CorpusError("equivalence set counts must be >= 1")
        if probs.min() <= 0 or probs.max() > 1:
            raise CorpusError("probabilities must lie in (0, 1]")
        if np.any(np.diff(probs) >= 0):
            raise CorpusError("probabilities must be strictly descending; use Distribution.from_sets")
        counts.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "mass", math.fsum((counts * probs).tolist()))

    @classmethod
    def from_sets(cls, sets: Iterable[tuple[int, float]], normalize: bool = False,
                  tol: float = 1e-9) -> "Distribution":
        merged: dict[float, int] = {}
        for count, prob in sets:
            if count < 1 or not prob > 0:
                raise CorpusError(f"invalid equivalence set ({count}, {prob})")
            merged[float(prob)] = merged.get(float(prob), 0) + int(count)
        if not merged:
            raise CorpusError("empty distribution")
        probs = np.array(sorted(merged, reverse=True))
        counts = np.array([merged[p] for p in probs], dtype=np.int64)
        total = math.fsum((counts * probs).tolist())
        if normalize:
            probs = probs / total
        elif abs(total - 1.0) > tol:
            raise CorpusError(f"distribution mass {total!r} is not 1")
        return cls(counts, probs)

    @property
    def sets(self) -> list[EquivalenceSet]:
        return [EquivalenceSet(int(c), float(p)) for c, p in zip(self.counts, self.probs)]

    @property
    def set_masses(self) -> np.ndarray:
        return self.counts * self.probs

    def __len__(self) -> int:
        return int(self.counts.size)

    def __iter__(self) -> Iterator[EquivalenceSet]:
        return iter(self.sets)


def to_empirical_distribution(corpus: FrequencyCorpus) -> Distribution:
    """One equivalence set per distinct frequency f, holding N_f passwords of probability f/N."""
    fc = corpus.freq_counts()
    fs = sorted(fc, reverse=True)
    probs = np.array([f / corpus.N for f in fs])
    counts = np.array([fc[f] for f in fs], dtype=np.int64)
    return Distribution(counts, probs)


@dataclass(frozen=True)
class GoodTuringProfile:
    """Good-Turing mass estimates U_f = (f+1) N_{f+1} / N for f = 0..max frequency.

    U_f also upper-bounds the error E_f of the empirical estimate of the
    cracked mass once every password seen more than f times is guessed;
    E_f itself needs the true distribution and is not computed.
    """

    U: tuple[float, ...]
    N_f: dict[int, int] = field(default_factory=dict)
    B_f: tuple[int, ...] = ()
    N: int = 0

    @property
    def fmax(self) -> int:
        return len(self.U) - 1

    def total(self) -> float:
        return math.fsum(self.U)


def good_turing(corpus: FrequencyCorpus) -> GoodTuringProfile:
    fc = corpus.freq_counts()
    fmax = max(fc)
    N = corpus.N
    U = tuple((f + 1) * fc.get(f + 1, 0) / N for f in range(fmax + 1))
    # B_f = number of distinct passwords seen more than f times
    B = []
    running = corpus.distinct
    for f in range(fmax + 1):
        running -= fc.get(f, 0)
        B.append(running)
    return GoodTuringProfile(U=U, N_f=fc, B_f=tuple(B), N=N)


def f_epsilon(profile: GoodTuringProfile, eps: float) -> int:
    """Smallest f with U_f <= eps (max frequency + 1 if there is none)."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    for f, u in enumerate(profile.U):
        if u <= eps:
            return f
    return len(profile.U)


@dataclass(frozen=True)
class GuessHistogram:
    """Histogram of guessing numbers over bins [edges[i], edges[i+1]).

    The final bin is closed on the right so the largest sample is counted.
    """

    edges: tuple[int, ...]
    hits: tuple[int, ...]
    samples: int

    def bin_of(self, guess: int) -> int:
        """Index of the bin holding ``guess``; -1 above the last edge."""
        if guess > self.edges[-1]:
            return -1
        i = int(np.searchsorted(self.edges, guess, side="right")) - 1
        return min(max(i, 0), len(self.hits) - 1)

    def bin_sets(self) -> list[tuple[int, float, int]]:
        """(count, prob, bin index) for every non-empty bin, in bin order."""
        out = []
        for i, g in enumerate(self.hits):
            if g == 0:
                continue
            width = self.edges[i + 1] - self.edges[i]
            out.append((width, (g / self.samples) / width, i))
        return out

    def to_distribution(self) -> Distribution:
        return Distribution.from_sets((c, p) for c, p, _ in self.bin_sets())


def guess_thresholds(max_guess: int, bins: int = 200, growth: float = 1.15,
                     offset: int = 25) -> list[int]:
    """Bin edges 0, 15, then geometric gaps round(growth**(i + offset)).

    The schedule is cut at the first edge reaching ``max_guess``; otherwise
    edge number ``bins`` is replaced by ``max_guess``.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    if not growth > 1:
        raise ValueError("growth must be > 1")
    if max_guess < 1:
        raise ValueError("max_guess must be positive")
    edges = [0]
    t = 15
    i = 1
    while True:
        if t >= max_guess or len(edges) == bins:
            edges.append(max_guess)
            break
        if t > edges[-1]:
            edges.append(t)
        i += 1
        t = edges[-1] + round(growth ** (i + offset))
    for lo, hi in zip(edges, edges[1:]):
        if hi <= lo:
            raise CorpusError(f"empty bin range [{lo}, {hi})")
    return edges


def guess_histogram(guess_numbers: Sequence[int], bins: int = 200, growth: float = 1.15,
                    offset: int = 25) -> GuessHistogram:
    g = np.asarray(guess_numbers, dtype=np.int64)
    if g.size == 0:
        raise CorpusError("no guessing numbers")
    if g.min() < 1:
        raise CorpusError("guessing numbers must be positive")
    edges = guess_thresholds(int(g.max()), bins, growth, offset)
    idx = np.searchsorted(np.array(edges), g, side="right") - 1
    idx = np.minimum(idx, len(edges) - 2)
    hits = np.bincount(idx, minlength=len(edges) - 1)
    return GuessHistogram(tuple(edges), tuple(int(h) for h in hits), int(g.size))


def monte_carlo_distribution(guess_numbers: Sequence[int], bins: int = 200, growth: float = 1.15,
                             offset: int = 25) -> Distribution:
    """Histogram-density distribution over guessing-number bins.

    Bin i becomes an equivalence set of (t_i - t_{i-1}) passwords, each with
    probability g_i / (s * (t_i - t_{i-1})). Empty bins are dropped.
    """
    return guess_histogram(guess_numbers, bins, growth, offset).to_distribution()


def zipf_probabilities(support: int, exponent: float) -> np.ndarray:
    ranks = np.arange(1, support + 1, dtype=np.float64)
    w = ranks ** -exponent
    return w / w.sum()


def gen_zipf_corpus(support: int, exponent: float, samples: int, seed: int = 0) -> FrequencyCorpus:
    """Draw ``samples`` passwords with P(rank r) proportional to r**-exponent."""
    if support < 1 or samples < 1 or not exponent > 0:
        raise ValueError("need support >= 1, samples >= 1 and exponent > 0")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(samples, zipf_probabilities(support, exponent))
    return FrequencyCorpus.from_freqs(counts[counts > 0])


def gen_zipf_guess_numbers(support: int, exponent: float, samples: int, seed: int = 0) -> list[int]:
    """Guessing numbers of Zipf-sampled passwords for an attacker who guesses in rank order."""
    if support < 1 or samples < 1 or not exponent > 0:
        raise ValueError("need support >= 1, samples >= 1 and exponent > 0")
    rng = np.random.default_rng(seed)
    ranks = rng.choice(support, size=samples, p=zipf_probabilities(support, exponent)) + 1
    return [int(r) for r in ranks]
