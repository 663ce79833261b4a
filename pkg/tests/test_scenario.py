import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from udua import (
    ChannelParams,
    GridRegion,
    ScenarioGenConfig,
    ScenarioGenerationError,
    UserSet,
    distribution_matrix,
    load_user_sets,
    sample_user_set,
    save_user_sets,
)
from udua.scenario import draw_counts


def test_degenerate_lognormal_fills_every_grid():
    region = GridRegion(5, 5, 10.0)
    us = sample_user_set(region, ScenarioGenConfig(0.0, 1e-9, seed=3), ChannelParams(phi=50))
    assert len(us) == 25
    assert np.array_equal(distribution_matrix(us), np.ones((5, 5), dtype=int))


def test_sampling_is_deterministic(desk_params, region5):
    cfg = ScenarioGenConfig(-1.0, 0.6, seed=42)
    a, b = sample_user_set(region5, cfg, desk_params), sample_user_set(region5, cfg, desk_params)
    assert np.array_equal(a.users, b.users)
    assert a.gen_params == {"mu": -1.0, "sigma": 0.6, "seed": 42}


def test_per_grid_mean_matches_lognormal():
    rng = np.random.default_rng(2024)
    region = GridRegion(9, 9, 10.0)
    counts = np.stack([draw_counts(rng, region, -0.2, 1.0) for _ in range(10000)])
    target = np.exp(-0.2 + 0.5)
    assert counts.mean() == pytest.approx(target, rel=0.10)


def test_size_bound_respected_by_resampling(region5):
    params = ChannelParams(phi=10)
    for seed in range(30):
        us = sample_user_set(region5, ScenarioGenConfig(-0.6, 1.0, seed=seed), params)
        assert 1 <= len(us) <= 20


def test_generation_error_reports_last_size(region5):
    with pytest.raises(ScenarioGenerationError, match="last I"):
        sample_user_set(region5, ScenarioGenConfig(2.0, 0.2, seed=0, max_resamples=3), ChannelParams(phi=1))


def test_distribution_small_cases(region5):
    assert distribution_matrix(UserSet([[1, 1]], region5)).sum() == 1
    assert distribution_matrix(UserSet([[1, 1]], region5))[0, 0] == 1
    assert distribution_matrix(UserSet([[2, 3], [2, 3]], region5))[2, 1] == 2


def test_distribution_matches_tally():
    region = GridRegion(4, 7, 10.0)
    rng = np.random.default_rng(5)
    users = np.column_stack([rng.integers(1, 8, 50), rng.integers(1, 5, 50)])
    D = distribution_matrix(UserSet(users, region))
    tally = {}
    for x, y in users.tolist():
        tally[(y, x)] = tally.get((y, x), 0) + 1
    assert D.sum() == 50
    for ky in range(1, 5):
        for kx in range(1, 8):
            assert D[ky - 1, kx - 1] == tally.get((ky, kx), 0)


def test_user_outside_region_rejected(region5):
    with pytest.raises(ValueError):
        UserSet([[6, 1]], region5)
    us = UserSet([[5, 5]], region5)
    with pytest.raises(ValueError):
        distribution_matrix(us, GridRegion(4, 4, 10.0))


@settings(max_examples=40, deadline=None)
@given(mu=st.floats(-1.2, 0.0), sigma=st.floats(0.1, 1.2), seed=st.integers(0, 2**32 - 1))
def test_distribution_sum_equals_user_count(mu, sigma, seed):
    region = GridRegion(5, 5, 10.0)
    us = sample_user_set(region, ScenarioGenConfig(mu, sigma, seed, max_resamples=100000), ChannelParams(phi=30))
    assert distribution_matrix(us).sum() == len(us)


def test_round_trip(tmp_path, desk_params, region5):
    sets = [sample_user_set(region5, ScenarioGenConfig(-0.6, 0.6, seed=s), desk_params) for s in range(3)]
    save_user_sets(sets, tmp_path / "many.json")
    save_user_sets(sets[0], tmp_path / "one.json")
    back = load_user_sets(tmp_path / "many.json")
    assert [s.id for s in back] == [s.id for s in sets]
    for a, b in zip(sets, back):
        assert np.array_equal(distribution_matrix(a), distribution_matrix(b))
        assert b.region == region5
    one = json.loads((tmp_path / "one.json").read_text())
    assert set(one) == {"id", "region", "gen_params", "users"}
    assert len(load_user_sets(tmp_path / "one.json")) == 1
