"""Synthetic block-structured streams with one planted change point, and
the evaluation metrics used on them.

A stream holds t_max snapshots over fixed node labels.  Between steps,
each block pair's adjacency slots are redrawn with a small probability,
so consecutive snapshots are strongly dependent.  At the change point the
edge-density matrix is jittered and every slot is redrawn under the new
densities, so the pooled encoding of the straddling snapshot pair can no
longer fit one density per block pair.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from graphmdl.detect import ChangeReport
from graphmdl.graphs import GraphSnapshot, snapshot


@dataclass(frozen=True)
class SynthConfig:
    n_nodes: int = 200
    k_true: int = 2
    t_change: int = 15
    t_max: int = 30
    regen_prob: float = 0.05
    jitter: float = 0.1
    tau_clip: float = 0.001
    seed: int = 0

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValueError("need at least two nodes")
        if self.k_true < 1:
            raise ValueError("k_true must be >= 1")
        if not 1 < self.t_change <= self.t_max:
            raise ValueError(
                f"t_change must lie in (1, t_max], got {self.t_change}/{self.t_max}"
            )
        if not 0.0 <= self.regen_prob <= 1.0:
            raise ValueError("regen_prob must lie in [0, 1]")


def _snapshot_from_adjacency(t: int, adj: np.ndarray) -> GraphSnapshot:
    edges = np.argwhere(adj)
    return snapshot(t, adj.shape[0], edges)


def generate_stream(cfg: SynthConfig) -> tuple[list[GraphSnapshot], dict]:
    """Sample one stream; returns (snapshots, ground truth).

    Ground truth holds the change time, the node labels, and the density
    matrices before and after the change.
    """
    rng = np.random.default_rng(cfg.seed)
    k = cfg.k_true
    n = cfg.n_nodes
    proportions = rng.dirichlet(np.ones(k))
    z = rng.choice(k, size=n, p=proportions)
    theta = rng.beta(0.5, 0.5, size=(k, k))
    theta_before = theta.copy()

    prob = theta[z[:, None], z[None, :]]
    adj = rng.random((n, n)) < prob
    np.fill_diagonal(adj, False)

    snaps = [_snapshot_from_adjacency(1, adj)]
    for t in range(2, cfg.t_max + 1):
        if t == cfg.t_change:
            theta = np.clip(
                theta + rng.uniform(-cfg.jitter, cfg.jitter, size=(k, k)),
                cfg.tau_clip,
                1.0 - cfg.tau_clip,
            )
            prob = theta[z[:, None], z[None, :]]
            adj = rng.random((n, n)) < prob
        else:
            redraw_pair = rng.random((k, k)) < cfg.regen_prob
            redraw = redraw_pair[z[:, None], z[None, :]]
            adj = np.where(redraw, rng.random((n, n)) < prob, adj)
        np.fill_diagonal(adj, False)
        snaps.append(_snapshot_from_adjacency(t, adj))

    truth = {
        "t_star": cfg.t_change,
        "z": z,
        "theta_before": theta_before,
        "theta_after": theta,
    }
    return snaps, truth


def planted_sbm(
    n_nodes: int, k: int, p_in: float, p_out: float, seed: int = 0, t: int = 1
) -> tuple[GraphSnapshot, np.ndarray]:
    """One snapshot with balanced planted blocks and two-level densities."""
    if k < 1 or n_nodes < k:
        raise ValueError(f"need 1 <= k <= n_nodes, got k={k}, n_nodes={n_nodes}")
    rng = np.random.default_rng(seed)
    z = np.arange(n_nodes) % k
    prob = np.where(z[:, None] == z[None, :], p_in, p_out)
    adj = rng.random((n_nodes, n_nodes)) < prob
    np.fill_diagonal(adj, False)
    return _snapshot_from_adjacency(t, adj), z


def type_errors(
    trials: Sequence[Sequence[ChangeReport]],
    t_star: int,
    epsilon: float | None = None,
    window: int = 1,
) -> tuple[float, float]:
    """Trial-level false-alarm and miss rates.

    With epsilon=None each report's stored alarm flag decides; passing a
    scalar re-thresholds the statistic series.  A trial counts as a false
    alarm when any step outside the tolerance window fires, and as a miss
    when no step inside it does.
    """
    if not trials:
        raise ValueError("need at least one trial")
    false_alarms = 0
    misses = 0
    for reports in trials:
        fired = set()
        for r in reports:
            if r.phi is None:
                continue
            if (r.alarm if epsilon is None else r.phi > epsilon):
                fired.add(r.t)
        in_window = {t for t in fired if abs(t - t_star) < window}
        if fired - in_window:
            false_alarms += 1
        if not in_window:
            misses += 1
    return false_alarms / len(trials), misses / len(trials)


def benefit_auc(
    reports: Sequence[ChangeReport], t_star: int, horizon: int = 1
) -> float:
    """Area under the benefit-versus-false-alarm curve of one trial.

    The statistic series is swept over every threshold; an alarm at time
    t earns benefit max(0, 1 - |t - t_star| / horizon).  Each threshold
    maps to (false-alarm rate among zero-benefit steps, best benefit
    attained), and the curve is integrated with the endpoints (0, 0) and
    (1, 1) pinned.
    """
    scored = [(r.t, r.phi) for r in reports if r.phi is not None]
    if not scored:
        raise ValueError("no scored steps: stream too short")
    benefit = {t: max(0.0, 1.0 - abs(t - t_star) / horizon) for t, _ in scored}
    negatives = [t for t, _ in scored if benefit[t] == 0.0]

    points = [(0.0, 0.0), (1.0, 1.0)]
    thresholds = sorted({phi for _, phi in scored}, reverse=True)
    for h in thresholds + [-np.inf]:
        fired = [t for t, phi in scored if phi > h]
        best = max((benefit[t] for t in fired), default=0.0)
        fa = (
            sum(1 for t in fired if benefit[t] == 0.0) / len(negatives)
            if negatives
            else 0.0
        )
        points.append((fa, best))
    points.sort()
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def compression_at(reports: Sequence[ChangeReport], t: int) -> float:
    """Summary-part code-length recorded at time t."""
    for r in reports:
        if r.t == t:
            return r.summary_total
    raise ValueError(f"no report at t={t}")
