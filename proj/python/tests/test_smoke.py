"""Smoke tests for the sktspy bindings."""

import math

import numpy as np
import pytest

import sktspy


def _synthetic_config():
    cfg = sktspy.SyntheticConfig()
    cfg.signal_dim = 30
    cfg.meas_dim = 10
    cfg.sparsity = 3
    cfg.block_len = 8
    cfg.snr_db = 25.0
    cfg.seed = 11
    return cfg


def test_generate_and_recover():
    cfg = _synthetic_config()
    trace = sktspy.generate_synthetic(cfg)
    assert len(trace.blocks) == 1
    block = trace.blocks[0]
    mb = block.measurements()

    est = sktspy.run_skts(cfg.model(), mb, sktspy.SktsConfig.standard(cfg.sparsity))
    assert est.support.sparsity() == cfg.sparsity
    mse = sktspy.compute_mse_db(block.h, est.h_hat)
    assert mse < -10.0


def test_oracle_beats_conventional():
    cfg = _synthetic_config()
    trace = sktspy.generate_synthetic(cfg)
    block = trace.blocks[0]
    mb = block.measurements()
    model = cfg.model()

    oracle = sktspy.compute_mse_db(block.h, sktspy.oracle_ks(model, mb, block.support).h_hat)
    conv = sktspy.compute_mse_db(block.h, sktspy.conventional_ks(model, mb).h_hat)
    assert oracle < conv


def test_smoother_matches_oracle():
    rng = np.random.default_rng(5)
    m, n, t = 4, 2, 3
    model = sktspy.StateSpaceModel.diagonal_scalar(m, 0.7, 1.0, 0.1)
    obs = [rng.standard_normal(n) + 1j * rng.standard_normal(n) for _ in range(t)]
    mats = [rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m)) for _ in range(t)]
    block = sktspy.MeasurementBlock(obs, mats)
    support = sktspy.SupportVector.from_indices(m, [0, 2])

    post = sktspy.smooth(model, block, support)
    oracle = sktspy.batch_lmmse_oracle(model, block, support)
    for a, b in zip(post.means, oracle.means):
        assert np.linalg.norm(a - b) < 1e-8 * max(1.0, np.linalg.norm(b))


def test_tree_search_picks_top_entries():
    stats_block = sktspy.MeasurementBlock(
        [np.array([1.0 + 0j, 0.0 + 0j])], [np.eye(2, dtype=complex)]
    )
    post = sktspy.smooth(
        sktspy.StateSpaceModel.diagonal_scalar(2, 0.5, 1.0, 0.1),
        stats_block,
        sktspy.SupportVector.all_ones(2),
    )
    stats = sktspy.accumulate_statistics(stats_block, post)
    best = sktspy.greedy_tree_search(stats, 1, 4)
    assert best.indices() == [0]
    assert sktspy.q_score(stats, best) > 0.0


def test_rt_state_streams():
    cfg = _synthetic_config()
    trace = sktspy.generate_synthetic(cfg)
    block = trace.blocks[0]

    rt = sktspy.RtConfig()
    rt.sparsity = cfg.sparsity
    rt.warmup_len = 2
    state = sktspy.RtState(cfg.model(), rt)
    for y, b in zip(block.y, block.measurements().system_matrices):
        h = state.step(y, b)
        assert h.shape == (cfg.signal_dim,)
    assert state.support().sparsity() == cfg.sparsity


def test_invalid_inputs_raise():
    with pytest.raises(ValueError):
        sktspy.SupportVector.from_indices(3, [0, 7])
    cfg = sktspy.SktsConfig()
    cfg.sparsity_schedule = [2, 5]  # increasing schedule is invalid
    model = sktspy.StateSpaceModel.diagonal_scalar(6, 0.5, 1.0, 0.1)
    block = sktspy.MeasurementBlock(
        [np.zeros(2, dtype=complex)], [np.zeros((2, 6), dtype=complex)]
    )
    with pytest.raises(ValueError):
        sktspy.run_skts(model, block, cfg)


def test_compute_mse_db_exact_recovery_clamps():
    truth = [np.array([1.0 + 0j, 0.0 + 0j])]
    assert sktspy.compute_mse_db(truth, truth) == -200.0
    assert math.isclose(
        sktspy.compute_mse_db(truth, [np.zeros(2, dtype=complex)]), 0.0, abs_tol=1e-12
    )
