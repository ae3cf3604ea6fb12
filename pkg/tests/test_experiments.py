import json
import math

import numpy as np
import pytest

from lowcut._rng import Prng
from lowcut.densities import adversarial_pair, notch_intervals
from lowcut.experiments import (
    ConfigError,
    DegenerateOracleError,
    RECORD_HEADER,
    _coupon_draws,
    config_from_dict,
    coupon_tail_limit,
    coupon_threshold,
    derive_trial_seed,
    format_records,
    gap_band,
    load_config,
    read_records,
    run_convergence,
    run_coupon_collector,
    run_experiment,
    run_failure_regime,
    run_indistinguishability,
    run_largest_gap,
    write_records,
)

GMM_SPEC = {
    "kind": "gmm",
    "d": 2,
    "components": [
        {"w": 0.5, "mean": [2.0, 0.0], "cov": [[1.0, 0.0], [0.0, 1.0]]},
        {"w": 0.5, "mean": [-2.0, 0.0], "cov": [[1.0, 0.0], [0.0, 1.0]]},
    ],
}


def make_config(**overrides):
    data = {"experiment": "coupon", "id": "t", "seed": 1, "trials": 100,
            "n": 50, "c_values": [0.0]}
    data.update(overrides)
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# seed derivation


def test_trial_seed_deterministic():
    a = derive_trial_seed(1, "exp", 1000, 3)
    b = derive_trial_seed(1, "exp", 1000, 3)
    assert a == b


def test_trial_seed_sensitivity():
    base = derive_trial_seed(1, "exp", 1000, 3)
    assert derive_trial_seed(1, "exp", 1000, 4) != base
    assert derive_trial_seed(1, "exp2", 1000, 3) != base
    assert derive_trial_seed(1, "exp", 1001, 3) != base
    assert derive_trial_seed(2, "exp", 1000, 3) != base


def test_trial_seed_collision_scan():
    seeds = {derive_trial_seed(1, "exp", 1000, t) for t in range(1_000_000)}
    assert len(seeds) == 1_000_000


# ---------------------------------------------------------------------------
# analytic helpers


def test_coupon_tail_limit_values():
    assert coupon_tail_limit(0.0) == pytest.approx(0.6321205588)
    assert coupon_tail_limit(2.0) == pytest.approx(0.1265769815)
    assert coupon_tail_limit(-1.0) == pytest.approx(0.9340119642)


def test_gap_band_center():
    lo, hi = gap_band(100, 0.3)
    center = math.log(100) / 100
    assert center == pytest.approx(0.046051701859)
    assert lo == pytest.approx(0.7 * center) and hi == pytest.approx(1.3 * center)


# ---------------------------------------------------------------------------
# coupon simulation core


class StubPrng:
    """Feeds a scripted draw stream through the Prng integer interface."""

    def __init__(self, values):
        self.values = list(values)

    def integers(self, n, upper):
        out, self.values = self.values[:n], self.values[n:]
        if len(out) < n:
            out = out + [0] * (n - len(out))
        return np.asarray(out)


def test_coupon_draws_exact_on_scripted_stream():
    # n=4: first chunk has size max(int(4*(ln4-1)), 4) = 4
    stream = [0, 1, 2, 3]
    assert _coupon_draws(4, StubPrng(stream)) == 4
    # last type arrives on draw 3; trailing repeats don't matter
    assert _coupon_draws(4, StubPrng([0, 1, 3, 2])) == 4
    assert _coupon_draws(4, StubPrng([2, 1, 3, 0])) == 4
    # completion in a later chunk: chunk sizes 4 then max(4//2, 64) = 64
    stream = [0, 0, 1, 1] + [2] * 10 + [3] + [0] * 60
    assert _coupon_draws(4, StubPrng(stream)) == 15


def test_coupon_draws_mean_matches_harmonic_formula():
    n = 1000
    draws = [_coupon_draws(n, Prng(i)) for i in range(400)]
    expected = n * sum(1.0 / i for i in range(1, n + 1))  # ~7485.47
    assert np.mean(draws) == pytest.approx(expected, rel=0.03)
    assert min(draws) >= n


# ---------------------------------------------------------------------------
# config validation


def test_config_rejects_unknown_kind():
    with pytest.raises(ConfigError, match="experiment"):
        config_from_dict({"experiment": "wat", "seed": 1, "trials": 5})


def test_config_rejects_unknown_key():
    with pytest.raises(ConfigError, match="bogus"):
        make_config(bogus=3)


def test_config_rejects_bad_trials():
    with pytest.raises(ConfigError, match="trials"):
        make_config(trials=-5)


def test_config_requires_seed():
    data = {"experiment": "coupon", "trials": 100, "n": 10, "c_values": [0.0]}
    with pytest.raises(ConfigError, match="seed"):
        config_from_dict(data)


def test_config_convergence_rules():
    base = {"experiment": "convergence", "seed": 1, "trials": 2,
            "density": "thm2", "estimator": "bucketing",
            "sample_sizes": [10, 100]}
    cfg = config_from_dict(base)
    assert cfg.epsilon == 0.05 and cfg.distances == ["dE", "df"]
    with pytest.raises(ConfigError, match="sample_sizes"):
        config_from_dict({**base, "sample_sizes": [100, 10]})
    with pytest.raises(ConfigError, match="estimator"):
        config_from_dict({**base, "estimator": "wat"})
    with pytest.raises(ConfigError, match="epsilon"):
        config_from_dict({**base, "epsilon": -1.0})
    with pytest.raises(ConfigError, match="distances"):
        config_from_dict({**base, "distances": ["df"]})
    with pytest.raises(ConfigError, match="mc_samples"):
        config_from_dict({**base, "mc_samples": 10})


def test_config_gaps_rules():
    base = {"experiment": "gaps", "seed": 1, "trials": 10, "m": 500,
            "epsilons": [0.3]}
    assert config_from_dict(base).m == 500
    with pytest.raises(ConfigError, match="m"):
        config_from_dict({**base, "m": 10})
    with pytest.raises(ConfigError, match="epsilons"):
        config_from_dict({**base, "epsilons": [1.5]})


def test_config_lowerbound_rules():
    base = {"experiment": "lowerbound", "seed": 1, "trials": 10,
            "n": 100, "m": 10}
    cfg = config_from_dict(base)
    assert cfg.estimators == ["bucketing", "hard1d"]
    with pytest.raises(ConfigError, match="n"):
        config_from_dict({**base, "n": 2})
    with pytest.raises(ConfigError, match="estimators"):
        config_from_dict({**base, "estimators": ["soft"]})


def test_load_config_json_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="bad.json"):
        load_config(path)


def test_load_config_uses_stem_as_id(tmp_path):
    path = tmp_path / "convergence_thm2.json"
    path.write_text(json.dumps({"experiment": "coupon", "seed": 1,
                                "trials": 100, "n": 10, "c_values": [0.0]}))
    assert load_config(path).id == "convergence_thm2"


# ---------------------------------------------------------------------------
# record files


def test_records_roundtrip(tmp_path):
    cfg = make_config(n=20, trials=100)
    result = run_coupon_collector(cfg)
    path = tmp_path / "r.csv"
    write_records(path, result.records)
    rows = read_records(path)
    assert len(rows) == 100
    assert rows[0]["experiment"] == "t"
    assert all(r["wall_ms"] is None for r in rows)


def test_records_header_and_sorting():
    cfg = make_config(n=10, trials=100, c_values=[1.0, 0.0])
    result = run_coupon_collector(cfg)
    text = format_records(result.records)
    lines = text.splitlines()
    assert lines[0] == ",".join(RECORD_HEADER)
    keys = [(l.split(",")[0], int(l.split(",")[1]), int(l.split(",")[2]))
            for l in lines[1:]]
    assert keys == sorted(keys)


def test_records_byte_identical_across_workers():
    cfg = make_config(n=30, trials=120)
    a = format_records(run_coupon_collector(cfg, workers=1).records)
    b = format_records(run_coupon_collector(cfg, workers=2).records)
    assert a == b


def test_out_values_17_digits():
    cfg = config_from_dict({"experiment": "gaps", "id": "g", "seed": 3,
                            "trials": 1, "m": 100, "epsilons": [0.3]})
    text = format_records(run_largest_gap(cfg).records)
    value_cell = text.splitlines()[1].split(",")[4]
    assert float(value_cell) == run_largest_gap(cfg).records[0].out[0]


# ---------------------------------------------------------------------------
# runners


def test_convergence_1d_smoke():
    cfg = config_from_dict({
        "experiment": "convergence", "id": "c1", "seed": 1, "trials": 10,
        "density": "thm2", "estimator": "bucketing",
        "sample_sizes": [200, 2000], "distances": ["dE", "df", "dmu"],
    })
    result = run_convergence(cfg)
    assert len(result.records) == 20
    per_m = result.summary["aggregates"]["per_m"]
    assert [row["m"] for row in per_m] == [200, 2000]
    assert all(0.0 <= row["exceedance_dE"] <= 1.0 for row in per_m)
    for r in result.records:
        assert r.dE is not None and r.df is not None and r.dmu is not None
        assert r.dE >= 0.0 and r.dmu <= 0.5
    assert result.summary["oracle"]["position"] == 0.25


def test_convergence_refuses_degenerate_density():
    cfg = config_from_dict({
        "experiment": "convergence", "id": "c2", "seed": 1, "trials": 2,
        "density": "uniform", "estimator": "hard1d", "sample_sizes": [50],
    })
    with pytest.raises(DegenerateOracleError):
        run_convergence(cfg)


def test_convergence_refuses_degenerate_mixture():
    cfg = config_from_dict({
        "experiment": "convergence", "id": "c3", "seed": 1, "trials": 2,
        "density": {"kind": "gmm", "d": 2, "components": [
            {"w": 1.0, "mean": [0.0, 0.0], "cov": [[1.0, 0.0], [0.0, 1.0]]}]},
        "estimator": "soft", "sample_sizes": [50],
        "grid_size": 90, "oracle_grid_size": 900,
    })
    with pytest.raises(DegenerateOracleError):
        run_convergence(cfg)


def test_convergence_rejects_pair_density():
    cfg = config_from_dict({
        "experiment": "convergence", "id": "c4", "seed": 1, "trials": 2,
        "density": "adversarial(100)", "estimator": "bucketing",
        "sample_sizes": [50],
    })
    with pytest.raises(ConfigError, match="density"):
        run_convergence(cfg)


def test_convergence_estimator_density_mismatch():
    cfg = config_from_dict({
        "experiment": "convergence", "id": "c5", "seed": 1, "trials": 2,
        "density": "thm2", "estimator": "soft", "sample_sizes": [50],
    })
    with pytest.raises(ConfigError, match="estimator"):
        run_convergence(cfg)


def test_convergence_nd_smoke_and_de_recompute(tmp_path):
    cfg = config_from_dict({
        "experiment": "convergence", "id": "cnd", "seed": 1, "trials": 4,
        "density": GMM_SPEC, "estimator": "soft",
        "sample_sizes": [100, 400], "grid_size": 90, "oracle_grid_size": 900,
    })
    result = run_convergence(cfg, workers=2)
    path = tmp_path / "cnd.csv"
    write_records(path, result.records)
    w_star = np.asarray(result.summary["oracle"]["direction"])
    for row in read_records(path):
        out = np.asarray(row["out_values"])
        assert row["out_dim"] == 2
        recomputed = 1.0 - abs(float(out @ w_star))
        assert abs(recomputed - row["dE"]) <= 1e-12


def test_convergence_nd_hardnd_flagged_experimental():
    cfg = config_from_dict({
        "experiment": "convergence", "id": "ch", "seed": 1, "trials": 2,
        "density": GMM_SPEC, "estimator": "hardnd",
        "sample_sizes": [100], "grid_size": 90, "oracle_grid_size": 900,
    })
    result = run_convergence(cfg)
    assert result.summary.get("experimental") is True


def test_failure_regime_smoke():
    cfg = config_from_dict({
        "experiment": "failure", "id": "f", "seed": 1, "trials": 30,
        "sample_sizes": [500], "schedules": ["identity", "cbrt"],
    })
    result = run_failure_regime(cfg)
    legs = {row["schedule"]: row for row in result.summary["aggregates"]["per_leg"]}
    assert legs["identity"]["freq_right_half"] > legs["cbrt"]["freq_right_half"]
    # whenever the output lands in [1/2, 1] its error is at least 1/4
    for r in result.records:
        if r.out[0] >= 0.5:
            assert abs(r.out[0] - 0.25) >= 0.25


def test_coupon_runner_aggregates():
    cfg = make_config(n=100, trials=300, c_values=[-1.0, 1.0])
    result = run_coupon_collector(cfg)
    per_c = {row["c"]: row for row in result.summary["aggregates"]["per_c"]}
    assert per_c[-1.0]["threshold"] == coupon_threshold(100, -1.0)
    # the tail at c=-1 must dominate the tail at c=+1
    assert per_c[-1.0]["tail_rate"] > per_c[1.0]["tail_rate"]
    assert 0.0 <= per_c[1.0]["tail_rate"] <= 1.0


def test_largest_gap_runner_band_nesting():
    cfg = config_from_dict({"experiment": "gaps", "id": "g", "seed": 1,
                            "trials": 200, "m": 2000,
                            "epsilons": [0.5, 0.25, 0.1]})
    result = run_largest_gap(cfg)
    fracs = [row["fraction_in_band"]
             for row in result.summary["aggregates"]["per_epsilon"]]
    # same trials, nested bands: wider band can only contain more
    assert fracs[0] >= fracs[1] >= fracs[2]


def test_lowerbound_runner_miss_matches_analytic():
    # tiny sharpness: one draw misses both notches with probability
    # 1 - mass(U) - mass(V), computable from the density itself
    n, trials = 4, 4000
    cfg = config_from_dict({"experiment": "lowerbound", "id": "lb", "seed": 1,
                            "trials": trials, "n": n, "m": 1})
    result = run_indistinguishability(cfg)
    f, _ = adversarial_pair(n)
    (ul, uh), (vl, vh) = notch_intervals(n)
    miss_prob = 1.0 - f.interval_mass(ul, uh) - f.interval_mass(vl, vh)
    got = result.summary["aggregates"]["miss_frequency"]
    se = math.sqrt(miss_prob * (1 - miss_prob) / trials)
    assert abs(got - miss_prob) <= 3.0 * se


def test_lowerbound_runner_records_per_estimator():
    cfg = config_from_dict({"experiment": "lowerbound", "id": "lb2", "seed": 2,
                            "trials": 50, "n": 100, "m": 20})
    result = run_indistinguishability(cfg)
    ids = {r.experiment for r in result.records}
    assert ids == {"lb2:bucketing", "lb2:hard1d"}
    assert len(result.records) == 100


def test_run_experiment_dispatch():
    cfg = make_config(n=10, trials=100)
    result = run_experiment(cfg)
    assert result.summary["kind"] == "coupon"
    assert result.summary["config"]["seed"] == 1
    assert result.summary["code_version"]
