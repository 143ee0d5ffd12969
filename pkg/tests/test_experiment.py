import csv
import json
import math
import os

import numpy as np
import pytest
from pydantic import ValidationError

from app.exceptions import ConfigurationError
from app.schemas.adversary import AdversarySpec
from app.schemas.benchmark import SequenceIn
from app.schemas.experiment import ExperimentConfig, HorizonResult, SimulationRequest
from app.services.experiment_service import ExperimentService, replication_seeds
from app.tasks.pool import fan_out


def _row(T, regret):
    return HorizonResult(
        T=T, replications=1, completed=1, mean_regret=regret, std_regret=0.0, mean_budget=1.0,
        min_budget=1.0, no_phase_two_fraction=0.0, mean_total_gft=1.0, mean_best_fixed_price=1.0,
        bound_value=1.0, bound_vacuous=True,
    )


def _square(x):
    return x * x


def test_replication_seeds_are_stable_and_distinct():
    assert replication_seeds(1, 64, 0) == replication_seeds(1, 64, 0)
    seeds = {replication_seeds(1, 64, i) for i in range(20)}
    assert len(seeds) == 20
    assert replication_seeds(1, 64, 0) != replication_seeds(1, 128, 0)


def test_config_validation():
    assert ExperimentConfig(algo="onebit", horizons=[8]).algo == "one-bit"
    with pytest.raises(ValidationError):
        ExperimentConfig(horizons=[64, 32])
    with pytest.raises(ValidationError):
        ExperimentConfig(horizons=[0])
    with pytest.raises(ValidationError):
        ExperimentConfig(horizons=[])


@pytest.mark.parametrize("family, T", [("iid", 20), ("full-lb", 20), ("twobit-lb", 20), ("gap", 20), ("alpha-lb", 20)])
def test_make_sequence_families(family, T, rng):
    seq = ExperimentService.make_sequence(AdversarySpec(family=family, N=40), T, rng)
    assert len(seq) == T


def test_make_sequence_with_distribution(rng):
    spec = AdversarySpec.model_validate({
        "family": "iid",
        "distribution": {"support": [{"s": 0.2, "b": 0.7}], "probs": [1.0]},
    })
    seq = ExperimentService.make_sequence(spec, 5, rng)
    assert seq.as_pairs() == [(0.2, 0.7)] * 5


def test_fit_slope_recovers_exponent():
    # alternating 1% noise leaves the slope at 0.5 but gives the fit a nonzero standard error
    horizons = (256, 512, 1024, 2048, 4096)
    rows = [_row(T, 3.0 * T ** 0.5 * (1.01 if i % 2 == 0 else 0.99)) for i, T in enumerate(horizons)]
    fit = ExperimentService.fit_slope(rows)
    assert fit.slope == pytest.approx(0.5, abs=1e-3)
    assert fit.std_err > 0
    assert fit.ci_low <= 0.5 <= fit.ci_high
    assert fit.horizons == [256, 512, 1024, 2048, 4096]


def test_fit_slope_needs_enough_large_horizons():
    rows = [_row(T, float(T)) for T in (16, 32, 64, 256, 512, 1024)]
    assert ExperimentService.fit_slope(rows) is None


def test_fan_out_in_process():
    assert fan_out(_square, [3, 1, 2], workers=1) == [9, 1, 4]


def test_run_writes_artifacts(tmp_path):
    config = ExperimentConfig(horizons=[32, 64], replications=2, master_seed=3, out_dir=str(tmp_path),
                              save_traces=True, workers=1)
    result = ExperimentService.run(config)
    assert result.ok
    assert [row.T for row in result.horizons] == [32, 64]
    assert all(row.completed == 2 for row in result.horizons)
    assert all(row.mean_budget >= 0.0 for row in result.horizons)

    with open(result.artifacts["curve"]) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["T", "mean_regret", "std_regret", "mean_budget"]
    assert len(rows) == 3
    with open(result.artifacts["summary"]) as f:
        assert json.load(f)["master_seed"] == 3
    assert os.path.exists(os.path.join(str(tmp_path), "traces", "T64_r1.csv"))


def test_run_is_deterministic(tmp_path):
    config = ExperimentConfig(algo="one-bit", horizons=[64], replications=2, master_seed=11)
    first = ExperimentService.run(config, persist=False)
    second = ExperimentService.run(config, persist=False)
    assert first.horizons[0].mean_regret == second.horizons[0].mean_regret
    assert first.artifacts == {}


def test_aborted_replications_are_reported():
    config = ExperimentConfig(horizons=[63], replications=2, adversary=AdversarySpec(family="gap"))
    result = ExperimentService.run(config, persist=False)
    assert result.aborted == 2
    assert not result.ok
    assert math.isnan(result.horizons[0].mean_regret)

    aggregate, replications = ExperimentService.regret_curve(config)
    assert all(r.aborted and "even" in r.error for r in replications)


def test_simulate_once_inline_and_generated():
    request = SimulationRequest(sequence=SequenceIn(s=[0.1, 0.2, 0.3], b=[0.9, 0.8, 0.7]), seed=5,
                                include_benchmarks=True)
    trace, response = ExperimentService.simulate_once(request)
    assert len(trace) == 3
    assert response.algorithm_seed == 5 and response.adversary_seed is None
    assert response.benchmarks.T == 3

    request = SimulationRequest(algo="one-bit", T=64, adversary=AdversarySpec(family="full-lb"), seed=5)
    _, response = ExperimentService.simulate_once(request)
    assert (response.adversary_seed, response.algorithm_seed) == replication_seeds(5, 64, 0)
    assert response.summary.config.feedback == "one-bit"


def test_simulation_request_needs_one_source():
    with pytest.raises(ValidationError):
        SimulationRequest()
    with pytest.raises(ValidationError):
        SimulationRequest(adversary=AdversarySpec())
    with pytest.raises(ValidationError):
        SequenceIn(s=[0.1], b=[0.2, 0.3])
