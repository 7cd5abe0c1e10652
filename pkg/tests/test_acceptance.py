"""Acceptance gate: one test per criterion, each printing PASS/FAIL.

Criteria, tolerances and runtime budgets are fixed here; nothing is
calibrated at run time.  Criterion 6 also reports (without requiring) the
per-cell range-exponent convention for comparison.
"""

import math
import time

import numpy as np
import pytest

import somblocks as sb
from somblocks.partition import Partition, enumerate_connected_partitions, validate_partition

from conftest import make_map, plain_params, random_map
from test_bayes_cost import integration_cost


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}")
    assert ok, f"{criterion}: {detail}"


@pytest.fixture(scope="module")
def seeded_runs(iris, iris_params):
    """Ten end-to-end Iris runs with default settings, seeds 1..10."""
    runs = []
    for seed in range(1, 11):
        m = sb.train(iris, sb.SomConfig(rows=5, cols=5, seed=seed))
        part = sb.partition_som(m, iris_params)
        rep = sb.score(part, m, iris.labels)
        oracle = sb.oracle_partition(m, iris.labels)
        orep = sb.score(oracle, m, iris.labels)
        runs.append((seed, m, part, rep, orep))
    return runs


def test_criterion_1_cost_calibration():
    t0 = time.time()
    # singleton: per_block == sum ln R, per_pe == 0, both to 1e-9
    member = [(np.array([2.0, -1.0]), np.array([0.8, 1.3]))]
    pb = sb.block_cost(member, plain_params(M=2, R=25.0))
    pp = sb.block_cost(member, plain_params(M=2, R=25.0, exponent="per_pe"))
    ok = abs(pb - 2 * math.log(25.0)) < 1e-9 and abs(pp) < 1e-9

    # merge criterion flips exactly at sigma * sqrt(2 pi) = R
    R = 10.0
    params = plain_params(R=R)

    def delta(sigma):
        pair = [(np.zeros(1), np.array([sigma]))] * 2
        return sb.block_cost(pair, params) - 2 * math.log(R)

    lo, hi = 0.5, 10.0
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if delta(mid) < 0 else (lo, mid)
    flip = 0.5 * (lo + hi)
    ok &= abs(flip - R / math.sqrt(2 * math.pi)) < 1e-6

    # numerical-integration oracle on 20 random 2-4 cell instances
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(20):
        n, M = int(rng.integers(2, 5)), int(rng.integers(1, 4))
        sigmas = rng.uniform(0.3, 2.0, size=(n, M))
        means = rng.uniform(-2, 2, size=M) + rng.uniform(-1.5, 1.5, size=(n, M)) * sigmas
        Rv = rng.uniform(5.0, 50.0, size=M)
        p = sb.CostParams(R=Rv, sigma_floor=np.full(M, 1e-9))
        members = [(means[i], sigmas[i]) for i in range(n)]
        got = sb.block_cost(members, p)
        want = integration_cost(members, Rv)
        worst = max(worst, abs(got - want) / abs(want))
    ok &= worst < 1e-6
    elapsed = time.time() - t0
    ok &= elapsed < 1.0
    report("criterion 1 (cost calibration)",
           ok, f"flip at {flip:.6f} vs {R/math.sqrt(2*math.pi):.6f}, "
               f"worst oracle rel err {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_oracle_equivalence():
    t0 = time.time()
    count = sum(1 for _ in enumerate_connected_partitions(2, 2))
    ok = count == 12

    params = plain_params(R=30.0)
    structured = {
        "stripes": make_map([[0.0] * 3, [9.0] * 3, [9.0] * 3], s=0.4),
        "quadrants": make_map([[0.0, 9.0], [18.0, 27.0]], s=0.4),
        "uniform": make_map([[1.0] * 3] * 3, s=0.6),
    }
    detail = [f"2x2 count={count}"]
    for name, m in structured.items():
        best = sb.exhaustive_partition(m, params, cell_limit=9)
        greedy = sb.partition_som(m, params)
        hit = np.array_equal(greedy.block_of, best.block_of)
        ok &= hit
        detail.append(f"{name} optimum {'matched' if hit else 'MISSED'}")

    rng = np.random.default_rng(77)
    gaps = []
    for _ in range(5):
        m = random_map(rng, rows=3, cols=3, M=1, empty_prob=0.0)
        best = sb.exhaustive_partition(m, params, cell_limit=9)
        greedy = sb.partition_som(m, params)
        gaps.append(greedy.cost - best.cost)
        ok &= greedy.cost >= best.cost - 1e-9
        singles = Partition.from_labels(np.arange(9).reshape(3, 3))
        whole = Partition.from_labels(np.zeros((3, 3), dtype=int))
        bound = min(sb.partition_cost(singles, m, params),
                    sb.partition_cost(whole, m, params))
        ok &= greedy.cost <= bound + 1e-9
    elapsed = time.time() - t0
    ok &= elapsed < 30.0
    detail.append(f"random gaps {['%.3f' % g for g in gaps]}, {elapsed:.1f}s")
    report("criterion 2 (oracle equivalence)", ok, "; ".join(detail))


def test_criterion_3_iris_end_to_end(seeded_runs, fixture_map, iris, iris_params):
    t0 = time.time()
    in_band = 0
    per_seed = []
    for seed, _, part, rep, _ in seeded_runs:
        hit = 2 <= part.n_blocks <= 4 and rep.p_o >= 0.80 and rep.kappa >= 0.65
        in_band += hit
        per_seed.append(f"s{seed}:{part.n_blocks}b/{rep.p_o:.2f}{'' if hit else '!'}")
    fix_part = sb.partition_som(fixture_map, iris_params)
    fix_rep = sb.score(fix_part, fixture_map, iris.labels)
    fixture_ok = fix_part.n_blocks == 3 and 0.80 <= fix_rep.p_o <= 0.95
    elapsed = time.time() - t0
    ok = in_band >= 8 and fixture_ok and elapsed < 60.0
    report("criterion 3 (Iris end-to-end)", ok,
           f"{in_band}/10 in band [{' '.join(per_seed)}]; fixture "
           f"{fix_part.n_blocks} blocks acc {fix_rep.p_o:.4f}; {elapsed:.1f}s")


def test_criterion_4_oracle_partition_quality(seeded_runs):
    ok = True
    worst = (1.0, 1.0)
    for seed, _, part, rep, orep in seeded_runs:
        ok &= orep.p_o >= 0.95 and orep.kappa >= 0.92 and orep.p_o >= rep.p_o
        worst = (min(worst[0], orep.p_o), min(worst[1], orep.kappa))
    report("criterion 4 (oracle partition quality)", ok,
           f"worst oracle acc {worst[0]:.4f}, worst kappa {worst[1]:.4f}")


def test_criterion_5_threshold_fragility(fixture_map, iris):
    hit = None
    for T in np.linspace(0.3, 1.2, 90):
        p = sb.threshold_partition(fixture_map, float(T))
        if p.n_blocks >= 5 and sb.score(p, fixture_map, iris.labels).p_o >= 0.6:
            lo = sb.threshold_partition(fixture_map, float(T) * 0.95).n_blocks
            hi = sb.threshold_partition(fixture_map, float(T) * 1.05).n_blocks
            if lo != p.n_blocks or hi != p.n_blocks:
                hit = (float(T), p.n_blocks,
                       sb.score(p, fixture_map, iris.labels).p_o)
                break
    counts = [sb.threshold_partition(fixture_map, float(T)).n_blocks
              for T in np.linspace(0.0, 3.5, 50)]
    monotone = all(a >= b for a, b in zip(counts, counts[1:]))
    ok = hit is not None and monotone
    report("criterion 5 (threshold fragility)", ok,
           f"fragile T={hit[0]:.3f} ({hit[1]} blocks, acc {hit[2]:.3f}); "
           f"monotone={monotone}" if hit else "no fragile threshold found")


def test_criterion_6_stability_region(fixture_map, iris_params):
    t0 = time.time()
    st = sb.sweep(fixture_map, sb.SweepSpec(base=iris_params))
    spans = sb.stable_region(st)
    # per-cell exponent convention: reported, not required
    from dataclasses import replace
    st_pp = sb.sweep(fixture_map,
                     sb.SweepSpec(base=replace(iris_params, range_exponent="per_pe")))
    spans_pp = sb.stable_region(st_pp)
    elapsed = time.time() - t0
    ok = spans[0] >= 10.0 and spans[1] >= 10.0 and elapsed < 120.0
    report("criterion 6 (stability region)", ok,
           f"per_block spans f_R {spans[0]:.1f}x f_sigma {spans[1]:.1f}x; "
           f"per_pe (reported only) {spans_pp[0]:.1f}x/{spans_pp[1]:.1f}x; {elapsed:.0f}s")


def test_criterion_7_property_suites(iris):
    # partition validity on 200 random maps
    rng = np.random.default_rng(2718)
    for i in range(200):
        m = random_map(rng, M=2)
        p = sb.partition_som(m, plain_params(M=2, R=20.0))
        validate_partition(p)

    # additivity and permutation invariance to 1e-12
    means = rng.normal(0, 2, size=(7, 3))
    sigmas = rng.uniform(0.2, 2.0, size=(7, 3))
    members = [(means[i], sigmas[i]) for i in range(7)]
    params = plain_params(M=3, R=40.0)
    base = sb.block_cost(members, params)
    additive_ok = True
    for _ in range(20):
        perm = rng.permutation(7)
        additive_ok &= abs(sb.block_cost([members[i] for i in perm], params) - base) <= 1e-12

    # kappa hand case: balanced 3 classes, 120/150, uniform marginals
    from test_evaluate import labeled_line_map
    m3, labels3 = labeled_line_map([(40, 5, 5), (5, 40, 5), (5, 5, 40)])
    rep = sb.score(Partition.from_labels(np.array([[0, 1, 2]])), m3, labels3)
    kappa_ok = rep.kappa == pytest.approx(0.7, abs=1e-12) and rep.p_o == pytest.approx(0.8)

    # SOM determinism and identical-sample convergence
    cfg = sb.SomConfig(rows=3, cols=3, epochs=30, seed=123)
    det_ok = sb.train(iris, cfg) == sb.train(iris, cfg)
    flat = sb.Dataset(samples=np.tile([2.0, 4.0], (12, 1)), labels=None,
                      attribute_names=["a", "b"])
    mfix = sb.train(flat, sb.SomConfig(rows=2, cols=2, epochs=30, seed=3))
    conv_ok = sb.quantization_error(mfix, flat) <= 1e-6

    ok = additive_ok and kappa_ok and det_ok and conv_ok
    report("criterion 7 (property suites)", ok,
           f"200 partitions valid; additivity<=1e-12: {additive_ok}; "
           f"kappa=0.7 exact: {kappa_ok}; determinism: {det_ok}; convergence: {conv_ok}")
