"""Smoke tests for the Python bindings: each major operation gets exercised
once against a small independent check (numpy linear algebra, closed forms,
or frozen hand arithmetic)."""

import math

import numpy as np
import pytest

import graphrl


def test_version():
    assert graphrl.__version__ == "0.1.0"


def test_adjacency_normalization_matches_numpy():
    a = np.array(graphrl.path_adjacency(4))
    graph = graphrl.NormalizedGraph.from_adjacency(a)
    degrees = np.diag(1.0 / np.sqrt((a + np.eye(4)).sum(axis=1)))
    expected = degrees @ (a + np.eye(4)) @ degrees
    np.testing.assert_allclose(np.array(graph.propagation), expected, atol=1e-12)


def test_metrics_fixture():
    m = graphrl.compute_metrics(np.array([[1.0, 2, 3, 5]]), np.array([[1.0, 4, 3, 4]]))
    assert m.mae == pytest.approx(0.75, abs=1e-12)
    assert m.rmse == pytest.approx(math.sqrt(1.25), abs=1e-12)
    assert m.mape == pytest.approx(18.75, abs=1e-12)


def test_scaler_round_trip():
    rows = np.array([[0.0, 10.0], [5.0, 20.0], [10.0, 40.0]])
    scaler = graphrl.MinMaxScaler.fit(rows)
    scaled = np.array(scaler.apply(rows))
    assert scaled[0, 0] == 0.0 and scaled[2, 0] == 1.0
    probe = np.array([[3.3, 17.2]])
    np.testing.assert_allclose(np.array(scaler.invert(scaler.apply(probe))), probe, atol=1e-12)


def test_build_windows_shapes():
    series = np.arange(20.0).reshape(10, 2)
    ds = graphrl.build_windows(series, 3, [1, 2])
    assert ds.size == 10 - 3 - 2 + 1
    assert np.array(ds.window(0)).shape == (3, 2)
    assert np.array(ds.target(0)).shape == (2, 2)
    # first target row is the row right after the window
    np.testing.assert_allclose(np.array(ds.target(0))[0], series[3])


def test_forecaster_trains_and_round_trips(tmp_path):
    adjacency = np.array(graphrl.path_adjacency(2))
    graph = graphrl.NormalizedGraph.from_adjacency(adjacency)
    series = np.full((40, 2), 0.5)
    scaler = graphrl.MinMaxScaler.fit(np.array([[0.0, 0.0], [1.0, 1.0]]))
    ds = graphrl.build_windows(series, 4, [1])

    config = graphrl.TgcnConfig()
    config.n_nodes = 2
    config.window = 4
    config.hidden = 4
    config.gcn_hidden = 4
    config.horizons = [1]
    config.epochs = 40
    config.batch_size = 8
    config.learning_rate = 0.02
    model = graphrl.ForecastModel.create("tgcn", config, graph, scaler)
    trace = graphrl.train_forecaster(model, ds)
    assert trace[-1] < trace[0]

    window = np.full((4, 2), 0.5)
    pred = np.array(model.predict_scaled(window))
    assert pred.shape == (1, 2)

    path = tmp_path / "model.json"
    model.save(str(path))
    loaded = graphrl.ForecastModel.load(str(path), graph)
    np.testing.assert_array_equal(np.array(loaded.predict_scaled(window)), pred)


def test_persistence_prediction():
    window = np.array([[1.0, 2.0], [3.0, 4.0]])
    pred = np.array(graphrl.persistence_predict(window, 3))
    np.testing.assert_array_equal(pred, np.array([[3.0, 4.0]] * 3))


def test_env_episode_with_oracle_policy():
    spec = graphrl.SyntheticSpec()
    spec.kind = "threshold-walk"
    spec.nodes = 1
    spec.length = 80
    spec.seed = 3
    series, _ = graphrl.synthesize(spec)
    bands = graphrl.BandTable.default_heart_rate()
    env = graphrl.MonitorEnv(np.array(series), monitor_length=30, context=2)
    obs = env.reset()
    total = 0.0
    while True:
        action = bands.correct_action(obs[0])
        obs, reward, done, info = env.step(action)
        assert info["correct_action"] == action
        total += reward
        if done:
            break
    assert total == pytest.approx(30 * 10.0)


def test_agent_replay_decays_epsilon():
    config = graphrl.AgentConfig()
    config.n_actions = 4
    config.state_dim = 3
    config.hidden1 = 8
    config.hidden2 = 8
    config.batch_size = 4
    config.epsilon = 0.5
    config.epsilon_decay = 0.9
    config.epsilon_min = 0.4
    agent = graphrl.DqnAgent(config)
    skipped, _, _ = agent.replay()
    assert skipped  # memory below batch size
    for i in range(4):
        agent.memorize([0.1, 0.2, 0.3], i, 10.0, [0.1, 0.2, 0.3], True)
    agent.replay()
    assert agent.epsilon == pytest.approx(0.45)
    agent.replay()
    agent.replay()
    assert agent.epsilon == 0.4


def test_short_training_loop_runs():
    spec = graphrl.SyntheticSpec()
    spec.kind = "threshold-walk"
    spec.nodes = 1
    spec.length = 100
    spec.seed = 1
    series, _ = graphrl.synthesize(spec)
    env = graphrl.MonitorEnv(np.array(series), monitor_length=40, context=2)
    config = graphrl.AgentConfig()
    config.n_actions = 4
    config.state_dim = env.state_dim
    config.batch_size = 16
    config.state_scale = 0.1
    agent = graphrl.DqnAgent(config)
    records = graphrl.run_training(env, agent, episodes=3)
    assert len(records) == 3
    assert all(r.steps == 40 for r in records)
    scores, total = graphrl.evaluate_agent(env, agent, episodes=2, seed=7)
    assert total == pytest.approx(sum(scores))


def test_gp_matches_numpy_dense_solve():
    rng = np.random.default_rng(5)
    x = rng.uniform(size=(6, 2))
    y = rng.normal(size=6)
    config = graphrl.GpConfig()
    model = graphrl.GpModel.fit([list(p) for p in x], list(y), config)

    def kernel(a, b):
        d2 = float(((a - b) ** 2).sum())
        return config.signal_variance * math.exp(-d2 / (2 * config.lengthscale**2))

    gram = np.array([[kernel(a, b) for b in x] for a in x])
    gram += (config.noise_variance + model.jitter_used) * np.eye(6)
    z = (y - y.mean()) / y.std()
    query = np.array([0.3, 0.7])
    k_star = np.array([kernel(p, query) for p in x])
    solve = np.linalg.solve(gram, z)
    expected_mean = float(k_star @ solve) * y.std() + y.mean()
    expected_var = (kernel(query, query) - float(k_star @ np.linalg.solve(gram, k_star))) * y.std() ** 2

    mean, var = model.predict(list(query))
    assert mean == pytest.approx(expected_mean, abs=1e-8)
    assert var == pytest.approx(expected_var, abs=1e-8)


def test_expected_improvement_closed_form():
    assert graphrl.expected_improvement(2.0, 1.0, 2.0) == pytest.approx(
        1.0 / math.sqrt(2 * math.pi), abs=1e-12
    )
    assert graphrl.expected_improvement(1.0, 0.0, 2.0) == 1.0
    assert graphrl.expected_improvement(3.0, 0.0, 2.0) == 0.0


def test_tune_quadratic():
    best, best_value, log = graphrl.tune(
        lambda x: (x[0] - 0.3) ** 2, [("x", 0.0, 1.0, "linear")], budget=15, seed=0
    )
    assert abs(best["x"] - 0.3) < 0.1
    assert best_value == min(row["objective"] for row in log)


def test_synthesize_is_deterministic():
    spec = graphrl.SyntheticSpec()
    spec.length = 50
    spec.seed = 9
    a_series, a_adj = graphrl.synthesize(spec)
    b_series, b_adj = graphrl.synthesize(spec)
    np.testing.assert_array_equal(np.array(a_series), np.array(b_series))
    np.testing.assert_array_equal(np.array(a_adj), np.array(b_adj))
