"""Acceptance suite: the statistical exit criteria, one test per criterion.

Each test prints a single PASS/FAIL line (run with ``pytest -s`` to see them
live).  Tolerances are pinned here, not configurable: most targets are
asymptotic statements checked at desk scale with three binomial standard
errors of slack, under frozen seeds.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from lowcut._rng import Prng
from lowcut.cli import DEMOS
from lowcut.densities import GaussianMixture, adversarial_pair, uniform_density, vee_density
from lowcut.estimators import soft_margin_cut, strip_count
from lowcut.experiments import config_from_dict, coupon_tail_limit, run_experiment
from lowcut.geometry import sphere_grid


def report(tag: str, ok: bool, detail: str, elapsed: float, budget_s: float | None = None):
    status = "PASS" if ok else "FAIL"
    line = f"{tag} {status} - {detail} [{elapsed:.1f}s]"
    print(line)
    assert ok, line
    if budget_s is not None:
        assert elapsed <= budget_s, f"{tag} exceeded runtime budget: {elapsed:.1f}s > {budget_s}s"


def run_demo_config(name, **overrides):
    cfg = config_from_dict({**DEMOS[name], **overrides}, source=f"<demo:{name}>")
    return run_experiment(cfg)


def test_a1_bucketing_consistency():
    t0 = time.perf_counter()
    result = run_demo_config("convergence-1d")
    rates = [row["exceedance_dE"] for row in result.summary["aggregates"]["per_m"]]
    ok = all(a >= b for a, b in zip(rates, rates[1:])) and rates[-1] <= 0.05
    report("A1", ok, f"bucketing exceedance rates {rates} (nonincreasing, final <= 0.05)",
           time.perf_counter() - t0, budget_s=120)


def test_a2_bucketing_failure_regime():
    t0 = time.perf_counter()
    result = run_demo_config("failure")
    legs = {row["schedule"]: row["freq_right_half"]
            for row in result.summary["aggregates"]["per_leg"]}
    ok = legs["identity"] >= 0.5 and legs["cbrt"] <= 0.05
    report("A2", ok,
           f"freq(output in right half): identity {legs['identity']:.3f} >= 0.5, "
           f"cbrt {legs['cbrt']:.3f} <= 0.05",
           time.perf_counter() - t0, budget_s=60)


def test_a3_coupon_collector_tails():
    t0 = time.perf_counter()
    result = run_demo_config("coupon")
    gaps = {row["c"]: abs(row["tail_rate"] - coupon_tail_limit(row["c"]))
            for row in result.summary["aggregates"]["per_c"]}
    ok = set(gaps) == {-1.0, 0.0, 1.0, 2.0} and all(g <= 0.035 for g in gaps.values())
    report("A3", ok,
           "coupon |empirical - limit| per c: "
           + ", ".join(f"c={c:+.0f}: {g:.4f}" for c, g in sorted(gaps.items()))
           + " (all <= 0.035)",
           time.perf_counter() - t0, budget_s=180)


def test_a4_largest_gap_concentration():
    t0 = time.perf_counter()
    result = run_demo_config("gaps")
    fracs = {row["epsilon"]: row["fraction_in_band"]
             for row in result.summary["aggregates"]["per_epsilon"]}
    ok = fracs[0.3] >= 0.95 and fracs[0.1] < fracs[0.3]
    report("A4", ok,
           f"gap in-band fractions: eps=0.3: {fracs[0.3]:.3f} >= 0.95, "
           f"eps=0.1: {fracs[0.1]:.3f} strictly smaller",
           time.perf_counter() - t0, budget_s=120)


def test_a5_hard_margin_consistency():
    t0 = time.perf_counter()
    cfg = config_from_dict({
        "experiment": "convergence", "id": "a5-hard-margin", "seed": 1,
        "density": "thm2", "estimator": "hard1d",
        "sample_sizes": [10_000, 100_000], "trials": 50, "epsilon": 0.05,
    })
    result = run_experiment(cfg)
    rates = [row["exceedance_dE"] for row in result.summary["aggregates"]["per_m"]]
    ok = rates[1] <= 0.10 and rates[1] <= rates[0]
    report("A5", ok, f"hard-margin exceedance rates {rates} (final <= 0.10, no increase)",
           time.perf_counter() - t0, budget_s=60)


def test_a6_soft_margin_consistency_2d():
    t0 = time.perf_counter()
    result = run_demo_config("convergence-nd")
    medians = [row["median_dE"] for row in result.summary["aggregates"]["per_m"]]
    ok = all(a > b for a, b in zip(medians, medians[1:])) and medians[-1] <= 0.01
    report("A6", ok,
           f"soft-margin median dE {['%.4f' % v for v in medians]} "
           "(decreasing, final <= 0.01)",
           time.perf_counter() - t0, budget_s=300)


def test_a7_impossibility_mechanism():
    t0 = time.perf_counter()
    result = run_demo_config("lowerbound")
    agg = result.summary["aggregates"]
    bound = (1.0 - 2.0 / 999.0) ** 100
    best = max(row["freq_error_ge_quarter"] for row in agg["per_estimator"])
    ok = agg["miss_frequency"] >= bound - 0.03 and best >= 0.35
    report("A7", ok,
           f"miss frequency {agg['miss_frequency']:.4f} >= {bound - 0.03:.4f}; "
           f"max freq(error >= 1/4) {best:.3f} >= 0.35",
           time.perf_counter() - t0, budget_s=60)


def test_a8_oracle_equivalences():
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)

    # strip mass vs 10^6-point Monte Carlo on 10 random triples
    strip_ok, worst = True, 0.0
    for i in range(10):
        k = rng.integers(1, 4)
        w8 = rng.uniform(0.2, 1.0, size=k)
        w8 /= w8.sum()
        means = rng.uniform(-3.0, 3.0, size=(k, 2))
        covs = []
        for _ in range(k):
            a = rng.normal(size=(2, 2))
            covs.append(a @ a.T + 0.5 * np.eye(2))
        mix = GaussianMixture(w8, means, covs)
        w = rng.normal(size=2)
        w /= np.linalg.norm(w)
        gamma = rng.uniform(0.05, 1.0)
        x = mix.sample(1_000_000, Prng(4200 + i))
        frac = float(np.mean(np.abs(x @ w) <= gamma))
        dev = abs(frac - mix.strip_mass(w, gamma))
        worst = max(worst, dev)
        strip_ok &= dev <= 0.005

    # soft-margin argmin certificate on 100 random instances
    cert_ok = True
    grid = sphere_grid(2, 36)
    for _ in range(100):
        X = rng.normal(size=(rng.integers(1, 100), 2)) * rng.uniform(0.5, 2.0)
        gamma = rng.uniform(0.01, 1.0)
        est = soft_margin_cut(X, gamma, grid)
        counts = [strip_count(X, w, gamma) for w in grid.directions]
        cert_ok &= est.score == min(counts) and est.index == int(np.argmin(counts))

    # cdf/quantile round trip on 10^3 points
    u = np.linspace(0.0, 1.0, 1000)
    round_ok = True
    for density in (vee_density(), uniform_density(), *adversarial_pair(1000)):
        err = np.max(np.abs(density.cdf(density.quantile(u)) - u))
        round_ok &= err <= 1e-9

    ok = strip_ok and cert_ok and round_ok
    report("A8", ok,
           f"strip vs MC worst dev {worst:.4f} <= 0.005; argmin certificate x100: "
           f"{cert_ok}; cdf/quantile round-trip <= 1e-9: {round_ok}",
           time.perf_counter() - t0)


def test_a9_demo_coupon_determinism(tmp_path):
    t0 = time.perf_counter()

    def run(out, parallel):
        cmd = [sys.executable, "-m", "lowcut.cli", "demo", "coupon",
               "--out", str(out), "--parallel", str(parallel)]
        proc = subprocess.run(cmd, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        return (Path(out) / "coupon.csv").read_bytes()

    first = run(tmp_path / "r1", 1)
    second = run(tmp_path / "r2", 1)
    eighth = run(tmp_path / "r3", 8)
    ok = first == second == eighth
    report("A9", ok, "demo coupon CSV byte-identical across reruns and parallelism 1 vs 8",
           time.perf_counter() - t0)
