"""Code-length change detection between consecutive snapshots.

The statistic asks whether two consecutive snapshots compress better as
one pooled sample under a single shared structure than as two separately
summarized snapshots.  The pooled encoding still writes a full header —
order, labels, superedge flags — for each snapshot, but ties both
headers to one shared assignment and lets each block pair's two slot
samples (one per snapshot) share a single edge-density parameter.
While the generating densities hold still, pooling a pair's sample is
mildly cheaper than describing it twice, so the statistic sits slightly
below zero; when the densities move, no single parameter per pair fits
both halves and the pooled data cost surges.  The threshold is the
parametric-complexity budget of one summary plus a confidence margin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from graphmdl.codelen import (
    BetaLuckiness,
    _log_multinomial_complexity,
    categorical_nml_codelen,
    integer_codelen,
    lnml_codelen,
    lnml_complexity,
)
from graphmdl.graphs import BlockAssignment, GraphSnapshot, SummaryGraph, block_edge_counts
from graphmdl.inference import InferenceOptions, infer_shared_blocks
from graphmdl.summarize import superedge_decision

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ChangeReport:
    """Per-step record emitted by the streaming loop."""

    t: int
    k_hat: int
    k_concat: int | None
    phi: float | None
    epsilon: float | None
    alarm: bool
    l_k: float
    l_z: float
    l_y: float
    l_x: float
    summary_total: float
    data_total: float


def pooled_codelen(
    g_a: GraphSnapshot, g_b: GraphSnapshot, assign: BlockAssignment,
    prior: BetaLuckiness,
) -> tuple[np.ndarray, float]:
    """Bits to encode both snapshots under one shared assignment.

    Per block pair the two snapshots' slots form a single sample of
    doubled length with pooled edge counts; the superedge flag picks the
    shorter branch for that pooled sample.  Order, labels, and flags are
    each charged twice — one header per snapshot, both spelling out the
    same shared structure — so against two independent summaries only
    the data terms differ.
    """
    m_a, n = block_edge_counts(g_a, assign)
    m_b, _ = block_edge_counts(g_b, assign)
    k = assign.k
    y = np.zeros((k, k), dtype=np.int8)
    data = 0.0
    for p in range(k):
        for q in range(k):
            y[p, q], bits = superedge_decision(
                int(m_a[p, q] + m_b[p, q]), int(2 * n[p, q])
            )
            data += bits
    total = (
        2.0 * integer_codelen(k)
        + 2.0 * categorical_nml_codelen(assign.counts(), k)
        + 2.0 * lnml_codelen(int(y.sum()), k * k, prior)
        + data
    )
    return y, total


def concat_codelen(
    g_t: GraphSnapshot, g_prev: GraphSnapshot, kset, prior: BetaLuckiness,
    opts: InferenceOptions | None = None,
) -> tuple[int, float]:
    """Shortest pooled encoding of two snapshots over the candidate
    orders; ties resolve to the smallest order."""
    if g_t.n_nodes != g_prev.n_nodes:
        raise ValueError(
            f"snapshots disagree on node count: {g_t.n_nodes} vs {g_prev.n_nodes}"
        )
    orders = sorted(set(int(k) for k in kset))
    if not orders:
        raise ValueError("kset must contain at least one candidate order")
    if orders[0] < 1:
        raise ValueError(f"candidate orders must be >= 1, got {orders[0]}")
    if opts is None:
        opts = InferenceOptions()
    best_k = None
    best_bits = math.inf
    for k in orders:
        assign = infer_shared_blocks(g_t, g_prev, k, prior, opts)
        _, bits = pooled_codelen(g_t, g_prev, assign, prior)
        if bits < best_bits:
            best_bits = bits
            best_k = k
    return best_k, best_bits


def change_statistic(
    g_t: GraphSnapshot, g_prev: GraphSnapshot, summary_t: SummaryGraph,
    summary_prev: SummaryGraph, kset, prior: BetaLuckiness,
    opts: InferenceOptions | None = None,
) -> tuple[float, int]:
    """Pooled-encoding cost minus the two stored totals; negative while
    the snapshots share one structure, sharply positive when they stop."""
    k_concat, joint = concat_codelen(g_t, g_prev, kset, prior, opts)
    separate = summary_t.breakdown.total + summary_prev.breakdown.total
    return joint - separate, k_concat


def threshold(
    prior: BetaLuckiness, delta: float, k0: int, n_nodes: int
) -> float:
    """Alarm threshold: complexity budget of one order-k0 summary plus a
    (1 - delta)-confidence margin."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if k0 < 1:
        raise ValueError(f"k0 must be >= 1, got {k0}")
    if n_nodes < 1:
        raise ValueError(f"n_nodes must be >= 1, got {n_nodes}")
    return (
        lnml_complexity(k0 * k0, prior)
        + _log_multinomial_complexity(n_nodes, k0) / LN2
        + (integer_codelen(k0) - math.log2(delta)) / 2.0
    )


def mdl_change_test(phi: float, epsilon: float) -> bool:
    """Raise an alarm when the statistic strictly exceeds the threshold."""
    return phi > epsilon
