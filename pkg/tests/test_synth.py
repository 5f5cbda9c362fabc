"""Stream generator, planted graphs, and the evaluation metrics."""
import numpy as np
import pytest
from scipy.special import comb

from graphmdl.codelen import BetaLuckiness
from graphmdl.detect import ChangeReport
from graphmdl.inference import infer_blocks
from graphmdl.synth import (
    SynthConfig,
    benefit_auc,
    compression_at,
    generate_stream,
    planted_sbm,
    type_errors,
)


def adjusted_rand(u, v):
    ct = np.zeros((u.max() + 1, v.max() + 1))
    for x, w in zip(u, v):
        ct[x, w] += 1
    si = comb(ct.sum(axis=1), 2).sum()
    sj = comb(ct.sum(axis=0), 2).sum()
    s = comb(ct, 2).sum()
    expected = si * sj / comb(len(u), 2)
    return (s - expected) / ((si + sj) / 2 - expected)


def report(t, phi, alarm=False, summary_total=100.0):
    return ChangeReport(
        t=t, k_hat=2, k_concat=None if phi is None else 2, phi=phi,
        epsilon=None if phi is None else 0.0, alarm=alarm, l_k=1.0, l_z=2.0,
        l_y=3.0, l_x=4.0, summary_total=summary_total, data_total=4.0,
    )


def trial(phis, alarms=(), t0=2):
    return [report(1, None)] + [
        report(t0 + i, p, alarm=(t0 + i) in alarms) for i, p in enumerate(phis)
    ]


def edge_sets(snaps):
    return [frozenset(map(tuple, g.edges)) for g in snaps]


def test_generator_is_deterministic_per_seed():
    cfg = SynthConfig(n_nodes=40, t_change=4, t_max=6, seed=3)
    a, truth_a = generate_stream(cfg)
    b, truth_b = generate_stream(cfg)
    assert edge_sets(a) == edge_sets(b)
    assert np.array_equal(truth_a["z"], truth_b["z"])
    other, _ = generate_stream(SynthConfig(n_nodes=40, t_change=4, t_max=6, seed=4))
    assert edge_sets(other)[0] != edge_sets(a)[0]


def test_stream_shape_and_truth_fields():
    cfg = SynthConfig(n_nodes=30, k_true=3, t_change=5, t_max=8, seed=1)
    snaps, truth = generate_stream(cfg)
    assert [g.t for g in snaps] == list(range(1, 9))
    assert all(g.n_nodes == 30 for g in snaps)
    assert truth["t_star"] == 5
    assert truth["z"].shape == (30,) and truth["z"].max() < 3
    assert truth["theta_before"].shape == (3, 3)
    assert truth["theta_after"].shape == (3, 3)


def test_zero_regeneration_freezes_between_changes():
    cfg = SynthConfig(n_nodes=25, t_change=4, t_max=7, regen_prob=0.0, seed=2)
    snaps, _ = generate_stream(cfg)
    sets = edge_sets(snaps)
    assert sets[0] == sets[1] == sets[2]
    assert sets[3] == sets[4] == sets[5] == sets[6]
    assert sets[2] != sets[3]


def test_zero_jitter_keeps_densities():
    cfg = SynthConfig(n_nodes=25, t_change=3, t_max=4, jitter=0.0, seed=5)
    _, truth = generate_stream(cfg)
    clipped = np.clip(truth["theta_before"], cfg.tau_clip, 1 - cfg.tau_clip)
    assert truth["theta_after"] == pytest.approx(clipped)


def test_huge_jitter_respects_clip_bounds():
    cfg = SynthConfig(n_nodes=25, t_change=3, t_max=4, jitter=5.0, tau_clip=0.01, seed=6)
    _, truth = generate_stream(cfg)
    assert truth["theta_after"].min() >= 0.01
    assert truth["theta_after"].max() <= 0.99


def test_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(n_nodes=1)
    with pytest.raises(ValueError):
        SynthConfig(k_true=0)
    with pytest.raises(ValueError):
        SynthConfig(t_change=1)
    with pytest.raises(ValueError):
        SynthConfig(t_change=31, t_max=30)
    with pytest.raises(ValueError):
        SynthConfig(regen_prob=1.5)


def test_planted_sbm_recovered_across_seeds():
    prior = BetaLuckiness(a=0.5, b=0.5, lam=1.0)
    for seed in range(10):
        g, z_true = planted_sbm(60, 3, p_in=0.6, p_out=0.05, seed=seed)
        assign = infer_blocks(g, 3, prior)
        assert adjusted_rand(z_true, assign.z) >= 0.9


def test_type_errors_uses_stored_alarms():
    hit = trial([0.0] * 13 + [9.0] + [0.0] * 15, alarms={15})
    fa, miss = type_errors([hit], t_star=15)
    assert (fa, miss) == (0.0, 0.0)
    wrong = trial([0.0] * 5 + [9.0] + [0.0] * 23, alarms={7})
    fa, miss = type_errors([wrong], t_star=15)
    assert (fa, miss) == (1.0, 1.0)
    fa, miss = type_errors([hit, wrong], t_star=15)
    assert (fa, miss) == (0.5, 0.5)


def test_type_errors_rethresholds_with_scalar():
    phis = [0.0] * 13 + [9.0] + [0.0] * 15
    t = trial(phis)  # stored alarms all False
    assert type_errors([t], 15) == (0.0, 1.0)
    assert type_errors([t], 15, epsilon=5.0) == (0.0, 0.0)
    assert type_errors([t], 15, epsilon=-1.0) == (1.0, 0.0)


def test_type_errors_window_widens_tolerance():
    near = trial([0.0] * 14 + [9.0] + [0.0] * 14, alarms={16})
    assert type_errors([near], 15) == (1.0, 1.0)
    assert type_errors([near], 15, window=2) == (0.0, 0.0)


def test_type_errors_rejects_empty():
    with pytest.raises(ValueError):
        type_errors([], 15)


def test_benefit_auc_perfect_and_flat():
    phis = [float(i == 13) for i in range(29)]
    assert benefit_auc(trial(phis), 15) == pytest.approx(1.0)
    assert benefit_auc(trial([2.0] * 29), 15) == pytest.approx(0.5)


def test_benefit_auc_invariant_to_monotone_rescoring():
    rng = np.random.default_rng(0)
    phis = list(rng.normal(size=29))
    base = benefit_auc(trial(phis), 15)
    warped = benefit_auc(trial([np.exp(3 * p) for p in phis]), 15)
    assert warped == pytest.approx(base)


def test_benefit_auc_horizon_credits_near_misses():
    phis = [float(i == 14) for i in range(29)]  # top score lands at t=16
    # horizon=1: t=16 is a zero-benefit step, so the curve spends 1/28 of
    # the false-alarm axis before any benefit appears
    assert benefit_auc(trial(phis), 15) == pytest.approx((1 - 1 / 28) / 2)
    assert benefit_auc(trial(phis), 15, horizon=2) == pytest.approx(0.75)


def test_compression_at_picks_requested_step():
    reports = [report(t, 0.0, summary_total=50.0 + t) for t in range(1, 6)]
    assert compression_at(reports, 3) == pytest.approx(53.0)
    with pytest.raises(ValueError):
        compression_at(reports, 9)
