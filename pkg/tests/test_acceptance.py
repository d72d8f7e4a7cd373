"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` (the lines are printed
even without ``-s``).
"""
import itertools
import math
import re
import time

import numpy as np
import pytest

from dahash.adversary import best_response
from dahash.authkit import (HashPrimitive, Policy, RecordStore, authenticate, create_account)
from dahash.bench import (SweepConfig, load_guess_numbers, sweep_empirical, sweep_montecarlo)
from dahash.corpus import (Distribution, FrequencyCorpus, f_epsilon, gen_zipf_corpus,
                           gen_zipf_guess_numbers, good_turing, monte_carlo_distribution)
from dahash.stackelberg import opt_hash_cost_vec
from dahash.strength import CostedDistribution, assign_costs, partition_by_mass

from oracles import brute_force_best, per_guess_utilities, random_instance

ORACLE_SEED = 20240601
N_ORACLE = 1000


@pytest.fixture
def report(capsys):
    def _report(num, name, ok, detail=""):
        with capsys.disabled():
            print(f"\n[criterion {num}] {'PASS' if ok else 'FAIL'} {name} :: {detail}")
    return _report


@pytest.fixture(scope="module")
def oracle_instances():
    rng = np.random.default_rng(ORACLE_SEED)
    return [random_instance(rng) for _ in range(N_ORACLE)]


def test_c1_best_response_oracle(oracle_instances, report):
    t0 = time.perf_counter()
    worst_u = worst_lam = 0.0
    for v, triples in oracle_instances:
        best_u, best_lam = brute_force_best(v, triples)
        plan = best_response(v, CostedDistribution.from_triples(triples))
        worst_u = max(worst_u, abs(plan.utility - best_u))
        worst_lam = max(worst_lam, abs(plan.lam - best_lam))
    elapsed = time.perf_counter() - t0
    ok = worst_u <= 1e-9 and worst_lam <= 1e-9 and elapsed < 60
    report(1, "best response vs exhaustive enumeration", ok,
           f"{N_ORACLE} instances, max |dU|={worst_u:.2e}, max |dlambda|={worst_lam:.2e}, {elapsed:.1f}s")
    assert worst_u <= 1e-9 and worst_lam <= 1e-9
    assert elapsed < 60


def _per_guess_utility(v, probs, costs, B):
    lam = cost = 0.0
    for p, k in zip(probs[:B], costs[:B]):
        cost += k * (1.0 - lam)
        lam += p
    return v * lam - cost


def test_c2_swap_lemma(report):
    rng = np.random.default_rng(ORACLE_SEED + 1)
    worst_drop = worst_err = 0.0
    cases = 0
    while cases < 10_000:
        v, triples = random_instance(rng)
        probs = np.array([p for c, p, _ in triples for _ in range(c)])
        costs = np.array([k for c, _, k in triples for _ in range(c)])
        L = probs.size
        if L < 2:
            continue
        perm = rng.permutation(L)
        p, k = probs[perm], costs[perm]
        inv = np.flatnonzero(p[:-1] * k[1:] < p[1:] * k[:-1])
        if inv.size == 0:
            continue
        b = int(rng.choice(inv))               # 0-based: positions b and b+1 are inverted
        B = int(rng.integers(b + 2, L + 1))    # both passwords of the pair are guessed
        p2, k2 = p.copy(), k.copy()
        p2[[b, b + 1]] = p2[[b + 1, b]]
        k2[[b, b + 1]] = k2[[b + 1, b]]
        change = _per_guess_utility(v, p2, k2, B) - _per_guess_utility(v, p, k, B)
        predicted = p[b + 1] * k[b] - p[b] * k[b + 1]
        worst_drop = min(worst_drop, change)
        worst_err = max(worst_err, abs(change - predicted))
        assert predicted > 0
        assert change >= -1e-12 and abs(change - predicted) <= 1e-12
        cases += 1
    ok = worst_drop >= -1e-12 and worst_err <= 1e-12
    report(2, "swapping an inverted consecutive pair", ok,
           f"{cases} cases, min change={worst_drop:.2e}, max |change - (p_b+1 k_b - p_b k_b+1)|={worst_err:.2e}")
    assert ok


def _boundary_best(v, triples):
    """Best utility over contiguous set orderings stopped at set boundaries."""
    counts = [c for c, _, _ in triples]
    probs = np.array([p for _, p, _ in triples])
    costs = np.array([k for _, _, k in triples])
    perms = []
    for order in itertools.permutations(range(len(triples))):
        perms.append([i for i in order for _ in range(counts[i])])
    U, _ = per_guess_utilities(v, probs, costs, np.array(perms))
    best = -np.inf
    for row, order in zip(U, itertools.permutations(range(len(triples)))):
        ends = np.concatenate([[0], np.cumsum([counts[i] for i in order])])
        best = max(best, row[ends].max())
    return float(best)


def test_c3_boundary_stopping(oracle_instances, report):
    worst = 0.0
    for v, triples in oracle_instances:
        per_guess, _ = brute_force_best(v, triples)
        worst = max(worst, abs(per_guess - _boundary_best(v, triples)))
    ok = worst <= 1e-9
    report(3, "per-guess optimum is attained at a set boundary", ok,
           f"{len(oracle_instances)} instances, max gap={worst:.2e}")
    assert ok


def test_c4_analytic_stackelberg(report):
    toy = Distribution.from_sets([(1, 0.9), (1, 0.1)])
    t0 = time.perf_counter()
    res = opt_hash_cost_vec(2.0, 1.0, 0.1, toy, 2, iters=10_000, seed=0)
    elapsed = time.perf_counter() - t0
    uniform = best_response(2.0, assign_costs(toy, partition_by_mass(toy, 1), (1.0,))).lam
    gain = uniform - res.p_adv

    # brute force over the budget line k_1*0.9 + k_2*0.1 = 1, k_i >= 0.1
    grouping = partition_by_mass(toy, 2)
    k1 = np.linspace(0.1, (1.0 - 0.01) / 0.9, 20001)
    k2 = (1.0 - 0.9 * k1) / 0.1
    grid = [best_response(2.0, assign_costs(toy, grouping, (a, b))).lam for a, b in zip(k1, k2)]
    grid_min = min(grid)

    ok = (res.p_adv == 0.9 and uniform == 1.0 and abs(gain - 0.1) <= 1e-12
          and abs(grid_min - 0.9) <= 1e-12 and res.evals <= 10_000 and elapsed < 10)
    report(4, "analytic two-set Stackelberg instance", ok,
           f"p_adv={res.p_adv!r}, uniform={uniform!r}, gain={gain:.17g}, grid min={grid_min!r}, "
           f"k*={tuple(round(x, 4) for x in res.k_star.k)}, evals={res.evals}, {elapsed:.2f}s")
    assert res.p_adv == 0.9
    assert uniform == 1.0
    assert abs(gain - 0.1) <= 1e-12
    assert abs(grid_min - 0.9) <= 1e-12
    assert res.evals <= 10_000 and elapsed < 10


def test_c5_dominance_zipf(report):
    t0 = time.perf_counter()
    corpus = gen_zipf_corpus(100_000, 0.9, 1_000_000, seed=0)
    rows = sweep_empirical(corpus, SweepConfig(taus=(1, 3, 5), iters=10_000, seed=0))
    elapsed = time.perf_counter() - t0
    p = {(r.v_over_cmax, r.tau): r.p_adv for r in rows}
    grid = sorted({r.v_over_cmax for r in rows})
    bad = [v for v in grid if p[v, 3] > p[v, 1] or p[v, 5] > p[v, 1]]
    gaps = [p[v, 1] - p[v, 3] for v in grid]
    i = int(np.argmax(gaps))
    ok = not bad and elapsed < 600
    report(5, "tau=3,5 never worse than uniform on Zipf corpus", ok,
           f"{len(grid)} grid points, violations={len(bad)}, tau3 gap max={gaps[i]:.4f} "
           f"at v/C_max={grid[i]:g}, mean={np.mean(gaps):.4f}, {elapsed:.0f}s")
    assert not bad
    assert elapsed < 600


def test_c6_good_turing_identities(report):
    rng = np.random.default_rng(ORACLE_SEED + 6)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 3000))
        freqs = rng.zipf(1.6, n)
        freqs = np.minimum(freqs, 10_000)
        corpus = FrequencyCorpus.from_freqs(freqs)
        prof = good_turing(corpus)
        worst = max(worst, abs(math.fsum(prof.U) - 1.0))
        N1 = int(np.sum(corpus.freqs == 1))
        assert prof.U[0] == N1 / corpus.N
        for eps in (0.5, 0.1, 0.05, 0.01, 0.001, float(rng.uniform(1e-4, 0.9))):
            scan = next((f for f, u in enumerate(prof.U) if u <= eps), len(prof.U))
            assert f_epsilon(prof, eps) == scan
    ok = worst <= 1e-12
    report(6, "Good-Turing completeness, U_0 and f_eps scan", ok,
           f"100 corpora, max |sum U_f - 1|={worst:.2e}")
    assert ok


def _signature(rows):
    return [(r.v_over_cmax, r.tau, r.p_adv, r.b_star, r.uncertainty) for r in rows]


def test_c7_scale_invariance(report):
    corpus = gen_zipf_corpus(20_000, 0.9, 100_000, seed=7)
    grid = (300.0, 2000.0, 9000.0, 50000.0, 400000.0)
    base = dict(taus=(1, 3, 5), grid=grid, iters=2000, seed=3)
    a = sweep_empirical(corpus, SweepConfig(c_max=1.0, **base))
    b = sweep_empirical(corpus, SweepConfig(c_max=1000.0, **base))
    emp_ok = _signature(a) == _signature(b)

    train = gen_zipf_guess_numbers(10 ** 6, 0.8, 5000, seed=1)
    evals = gen_zipf_guess_numbers(10 ** 6, 0.8, 5000, seed=2)
    mc = dict(mode="montecarlo", taus=(1, 3), grid=(2e3, 6e5, 4e8), iters=1000)
    c = sweep_montecarlo(train, evals, SweepConfig(c_max=1.0, **mc))
    d = sweep_montecarlo(train, evals, SweepConfig(c_max=1000.0, **mc))
    mc_ok = _signature(c) == _signature(d)
    ok = emp_ok and mc_ok
    report(7, "scaling (v, C_max, k_min) by 1000", ok,
           f"empirical {len(a)} rows identical={emp_ok}, montecarlo {len(c)} rows identical={mc_ok}")
    assert ok


def test_c8_authkit(tmp_path, report):
    rng = np.random.default_rng(ORACLE_SEED + 8)
    words = [f"w{i:04d}" for i in range(300)]
    dictionary = {w: int(f) for w, f in zip(words, rng.zipf(1.3, len(words)))}
    policy = Policy(dictionary, (20, 3), (37, 11, 4))
    store = RecordStore(tmp_path / "records.txt")

    accepted = rejected = cost_ok = 0
    passwords = {}
    for i in range(1000):
        pw = words[int(rng.integers(len(words)))] if rng.random() < 0.7 else f"rare-{i}-{rng.integers(1e9)}"
        user = f"user{i}"
        create_account(store, policy, user, pw)
        passwords[user] = pw
    for user, pw in passwords.items():
        H = HashPrimitive()
        accepted += authenticate(store, policy, user, pw, primitive=H)
        cost_ok += H.calls == policy.get_hardness(pw)
        wrong = words[int(rng.integers(len(words)))] if rng.random() < 0.5 else pw + "x"
        if wrong == pw:
            wrong = pw + "!"
        H = HashPrimitive()
        rejected += not authenticate(store, policy, user, wrong, primitive=H)
        cost_ok += H.calls == policy.get_hardness(wrong)

    lines = (tmp_path / "records.txt").read_text(encoding="ascii").splitlines()
    pattern = re.compile(r"v1:user\d+:[0-9a-f]{32}:[0-9a-f]{64}")
    schema_ok = len(lines) == 1000 and all(pattern.fullmatch(x) for x in lines)
    costs = {str(c) for c in policy.costs} | {str(j) for j in range(policy.tau + 1)}
    schema_ok &= not any(set(x.split(":")[2:]) & costs for x in lines)

    ok = accepted == 1000 and rejected == 1000 and cost_ok == 2000 and schema_ok
    report(8, "authkit round trips, rejections, cost fidelity, record schema", ok,
           f"accepted={accepted}/1000, rejected={rejected}/1000, cost matches={cost_ok}/2000, "
           f"schema ok={schema_ok}")
    assert ok


def test_c9_monte_carlo_construction(tmp_path, report):
    d = monte_carlo_distribution([10, 20, 1000], bins=2, growth=1.15, offset=25)
    hand_ok = d.sets == [(15, (1 / 3) / 15), (985, (2 / 3) / 985)]
    rng = np.random.default_rng(ORACLE_SEED + 9)
    worst = 0.0
    for i in range(100):
        n = int(rng.integers(1, 5000))
        top = int(10 ** rng.uniform(1, 14))
        guesses = rng.integers(1, top + 1, n)
        path = tmp_path / f"g{i}.txt"
        path.write_text("".join(f"{g}\n" for g in guesses.tolist()))
        dist = monte_carlo_distribution(load_guess_numbers(str(path)))
        worst = max(worst, abs(dist.mass - 1.0))
    ok = hand_ok and worst <= 1e-12
    report(9, "Monte-Carlo histogram distribution", ok,
           f"hand example exact={hand_ok}, 100 files max |mass - 1|={worst:.2e}")
    assert ok
