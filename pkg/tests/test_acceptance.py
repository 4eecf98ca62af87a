"""
End-to-end acceptance suite: one test per criterion, each recording a
PASS/FAIL line that is printed in the terminal summary.

Run with ``pytest tests/test_acceptance.py -v`` (or ``python3
tests/test_acceptance.py``).
"""

import itertools
import json
import math
import pathlib
import sys
import time

import pytest
from scipy import stats

from radon_sampling.convex_sim import (
    make_isotropic_body,
    run_ellipse_experiment,
    run_tail_checks,
    run_zero_one_experiment,
    simplex_pushforward,
)
from radon_sampling.montecarlo import TAIL_LEVEL, run_chunked
from radon_sampling.spectrum import (
    SpectrumQuery,
    eigenvalue_general,
    eigenvalue_k2,
    eigenvalue_quadrature,
    eigenvalue_ratio,
    vandermonde_check,
)
from radon_sampling.sphere_sim import (
    SphereSet,
    band_section_moments,
    run_correlation_experiment,
    run_sharpness_check,
    run_sphere_experiment,
    sample_unit_vectors,
)
from radon_sampling.torus_sim import (
    TorusConfig,
    eigen_check,
    random_half_set,
    run_torus_experiment,
)

pytestmark = pytest.mark.slow

SEED = 7
BASELINES = json.loads((pathlib.Path(__file__).with_name("baselines.json")).read_text())
GRID_N = (6, 10, 50, 101)


def grid_k(n):
    return sorted({k for k in (2, 3, 4, 10, n - 1) if 2 <= k <= n - 1})


def tail_at(report, t):
    return dict((a, b) for a, b in report.tail_probs)[t]


def test_criterion_01_oracle_equivalence(record_criterion):
    start = time.perf_counter()
    worst = 0.0
    for n in GRID_N:
        for k in grid_k(n):
            for ell in range(21):
                closed = eigenvalue_general(SpectrumQuery(n, k, ell))
                quad = eigenvalue_quadrature(SpectrumQuery(n, k, 2 * ell))
                worst = max(worst, abs(closed - quad) / quad)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 60
    record_criterion(1, ok, f"max rel err {worst:.2e} (<= 1e-8), {elapsed:.1f} s (< 60 s)")
    assert ok


def test_criterion_02_closed_forms(record_criterion):
    worst_k2 = worst_k = worst_ratio = 0.0
    monotone = True
    for n in GRID_N:
        worst_k2 = max(worst_k2, abs(eigenvalue_k2(n, 1) / ((n - 2) / (2 * (n - 1))) - 1))
        for k in grid_k(n):
            val = eigenvalue_general(SpectrumQuery(n, k, 1))
            worst_k = max(worst_k, abs(val / ((n - k) / (k * (n - 1))) - 1))
            prev = eigenvalue_general(SpectrumQuery(n, k, 0))
            for ell in range(20):
                nxt = eigenvalue_general(SpectrumQuery(n, k, ell + 1))
                worst_ratio = max(worst_ratio, abs((nxt / prev) / eigenvalue_ratio(n, k, ell) - 1))
                monotone &= nxt < prev
                prev = nxt
    ok = max(worst_k2, worst_k, worst_ratio) <= 1e-12 and monotone
    record_criterion(2, ok, f"k=2 {worst_k2:.1e}, general {worst_k:.1e}, ratio {worst_ratio:.1e}, "
                            f"monotone={monotone}")
    assert ok


def test_criterion_03_geodesics_at_scale(record_criterion):
    start = time.perf_counter()
    n = 1000
    sset = SphereSet.with_measure("band", n, 0.5)
    rep = run_sphere_experiment(n, 2, sset, 100_000, SEED)
    elapsed = time.perf_counter() - start
    _, exact_var = band_section_moments(n, 2, sset)
    tail = tail_at(rep, TAIL_LEVEL)
    ok = (tail <= TAIL_LEVEL and rep.variance <= 0.5
          and abs(rep.variance - exact_var) <= 4 * rep.variance_se and elapsed < 120)
    record_criterion(3, ok, f"tail {tail:.4f} <= {TAIL_LEVEL:.4f}, var {rep.variance:.5f} "
                            f"vs oracle {exact_var:.5f} (SE {rep.variance_se:.5f}), {elapsed:.1f} s")
    assert ok


def test_criterion_04_sharpness(record_criterion):
    rows = run_sharpness_check([100, 1000], 100_000, SEED)
    ok = all(abs(r["p_zero"] - r["p_zero_exact"]) <= 4 * r["p_zero_se"]
             and r["p_zero"] >= 0.1 and r["p_zero_exact"] >= 0.1 for r in rows)
    detail = ", ".join(f"n={r['n']}: {r['p_zero']:.4f} vs {r['p_zero_exact']:.4f}" for r in rows)
    record_criterion(4, ok, detail)
    assert ok


def test_criterion_05_hemisphere(record_criterion):
    n = 1000
    rep = run_sphere_experiment(n, 2, SphereSet.hemisphere(n), 100_000, SEED)
    # a zero fsum of squared deviations forces every sample to equal the mean
    ok = rep.mean == 1.0 and rep.variance == 0.0 and rep.samples == 100_000
    record_criterion(5, ok, f"mean {rep.mean!r}, variance {rep.variance!r}")
    assert ok


def test_criterion_06_correlation(record_criterion):
    target = -1.0 / 600
    a = run_correlation_experiment(10, 2, 1_000_000, SEED)
    b = run_correlation_experiment(10, 5, 1_000_000, SEED + 1)
    ok = (abs(a.mean - target) <= 4 * a.mean_se and abs(b.mean - target) <= 4 * b.mean_se
          and abs(a.mean - b.mean) <= 4 * math.hypot(a.mean_se, b.mean_se))
    record_criterion(6, ok, f"k=2 {a.mean:.6f}, k=5 {b.mean:.6f}, target {target:.6f}")
    assert ok


def test_criterion_07_zero_one_law(record_criterion):
    start = time.perf_counter()
    parts, ok = [], True
    for kind in ("ball", "cube"):
        big = run_zero_one_experiment(make_isotropic_body(kind, 1000), 3000, SEED)
        small = run_zero_one_experiment(make_isotropic_body(kind, 100), 3000, SEED)
        f_big, f_small = big.extras["fraction_in_01"], small.extras["fraction_in_01"]
        base = BASELINES["zero_one_fraction"][kind]
        ok &= f_big >= base and f_big >= f_small
        parts.append(f"{kind} {f_big:.4f} (baseline {base}, n=100 {f_small:.4f})")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300
    record_criterion(7, ok, "; ".join(parts) + f", {elapsed:.1f} s")
    assert ok


def test_criterion_08_tail_checks(record_criterion):
    parts, ok = [], True
    for kind in ("ball", "cube", "simplex"):
        rep = run_tail_checks(make_isotropic_body(kind, 100), 100_000, SEED)
        ok &= rep["chord"]["ok"] and rep["direction"]["ok"]
        parts.append(f"{kind} c={rep['chord']['envelope_c']:.3f} "
                     f"chord={rep['chord']['ok']} dir={rep['direction']['ok']}")
    record_criterion(8, ok, "; ".join(parts))
    assert ok


def test_criterion_09_torus(record_criterion):
    spectra = all(
        all(r["ratio"] == r["expected"] for r in eigen_check(TorusConfig(p, n), exact=True))
        for p, n in [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 2), (3, 3)])
    worst = 0.0
    for p in (3, 5):
        cfg = TorusConfig(p, 2)
        for draw in range(20):
            rep = run_torus_experiment(cfg, random_half_set(cfg, SEED, draw))
            worst = max(worst, rep["probability"])
    cfg = TorusConfig(101, 2)
    sampled = run_torus_experiment(cfg, random_half_set(cfg, SEED), mode="sampled",
                                   count=1_000_000, seed=SEED, workers=4)
    ok = spectra and worst <= 0.5 and sampled["probability"] <= 0.5 + 4 * sampled["probability_se"]
    record_criterion(9, ok, f"exact spectra {spectra}, exhaustive max {worst:.4f}, "
                            f"sampled (101,2) {sampled['probability']:.4f}")
    assert ok


def test_criterion_10_vandermonde(record_criterion):
    start = time.perf_counter()
    ok = all(lhs == rhs for lhs, rhs in (
        vandermonde_check(a, b, c)
        for a, b, c in itertools.product(range(1, 21), repeat=3) if c >= a))
    elapsed = time.perf_counter() - start
    ok &= elapsed < 10
    record_criterion(10, ok, f"all a,b,c <= 20 exact, {elapsed:.2f} s")
    assert ok


def test_criterion_11_pushforward_and_ellipses(record_criterion):
    worst = 0.0
    for n in (3, 10):
        y = run_chunked(lambda rng, m: simplex_pushforward(sample_unit_vectors(2 * n + 2, m, rng), n),
                        100_000, SEED)
        law = stats.beta(1, n).cdf
        worst = max(worst, max(stats.kstest(y[:, j], law).statistic for j in range(n)))
    rep = run_ellipse_experiment(50, 10_000, SEED)
    tail = tail_at(rep, TAIL_LEVEL)
    ok = worst <= 0.01 and tail <= TAIL_LEVEL
    record_criterion(11, ok, f"max KS {worst:.4f}, ellipse tail {tail:.4f}")
    assert ok


def _json_pair(run):
    return run(1).to_json(), run(4).to_json()


def test_criterion_12_determinism(record_criterion):
    sset = SphereSet.with_measure("band", 200, 0.5)
    simplex = make_isotropic_body("simplex", 50)
    runs = {
        "sphere": lambda w: run_sphere_experiment(200, 3, sset, 20_000, SEED, workers=w),
        "convex": lambda w: run_zero_one_experiment(simplex, 3000, SEED, workers=w),
        "ellipse": lambda w: run_ellipse_experiment(10, 3000, SEED, workers=w),
        "correlation": lambda w: run_correlation_experiment(10, 3, 20_000, SEED, workers=w),
    }
    same = {}
    for name, run in runs.items():
        first = {run(w).to_json() for w in (1, 1, 4)}
        same[name] = len(first) == 1
    sharp = {json.dumps(run_sharpness_check([50], 5000, SEED, workers=w)) for w in (1, 3)}
    cfg = TorusConfig(31, 2)
    mask = random_half_set(cfg, SEED)
    torus = {json.dumps(run_torus_experiment(cfg, mask, mode=m, count=50_000, seed=SEED, workers=w),
                        sort_keys=True) for m in ("exhaustive", "sampled") for w in (1, 3)}
    same["sharpness"] = len(sharp) == 1
    same["torus"] = len(torus) == 2
    ok = all(same.values())
    record_criterion(12, ok, ", ".join(f"{k}={v}" for k, v in same.items()))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
