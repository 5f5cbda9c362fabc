"""Summary construction: encode a snapshot at each candidate order, keep
the shortest total description.

The total for one (k, z) pair is
    L(k) + L(z | k) + L(y | z) + L(x | y, z)
where y flags, per block pair, whether the Bernoulli-NML branch beats the
counting branch, and L(y) is the luckiness-NML cost of the flag matrix.
"""
from __future__ import annotations

import itertools
from collections.abc import Iterable

import numpy as np

from graphmdl.codelen import (
    BetaLuckiness,
    bernoulli_nml_codelen,
    categorical_nml_codelen,
    counting_codelen,
    integer_codelen,
    lnml_codelen,
)
from graphmdl.graphs import (
    BlockAssignment,
    CodeLenBreakdown,
    GraphSnapshot,
    SummaryGraph,
    block_edge_counts,
)
from graphmdl.inference import InferenceOptions, infer_blocks

_EXHAUSTIVE_NODE_LIMIT = 8


def superedge_decision(m: int, n: int) -> tuple[int, float]:
    """Pick the shorter branch for a block pair with m edges in n slots.

    Returns (y, bits): y = 1 when the Bernoulli-NML code is strictly
    shorter than the counting code, 0 otherwise (including n = 0, which
    costs nothing).
    """
    if n == 0:
        return 0, 0.0
    nml = bernoulli_nml_codelen(m, n)
    cnt = counting_codelen(m, n)
    if nml < cnt:
        return 1, nml
    return 0, cnt


def summary_codelen(
    g: GraphSnapshot, assign: BlockAssignment, prior: BetaLuckiness
) -> tuple[np.ndarray, CodeLenBreakdown]:
    """Superedge flags and the four-part code-length of one assignment."""
    m, n = block_edge_counts(g, assign)
    k = assign.k
    y = np.zeros((k, k), dtype=np.int8)
    l_x = 0.0
    for p in range(k):
        for q in range(k):
            y[p, q], bits = superedge_decision(int(m[p, q]), int(n[p, q]))
            l_x += bits
    l_y = lnml_codelen(int(y.sum()), k * k, prior)
    l_z = categorical_nml_codelen(assign.counts(), k)
    l_k = integer_codelen(k)
    return y, CodeLenBreakdown(l_k, l_z, l_y, l_x, l_k + l_z + l_y + l_x)


def _density_matrix(g: GraphSnapshot, assign: BlockAssignment) -> np.ndarray:
    m, n = block_edge_counts(g, assign)
    # m = 0 wherever n = 0, so clamping the denominator leaves those at 0
    return m / np.maximum(n, 1)


def _exhaustive_assignment(
    g: GraphSnapshot, k: int, prior: BetaLuckiness
) -> BlockAssignment:
    if g.n_nodes > _EXHAUSTIVE_NODE_LIMIT:
        raise ValueError(
            f"exhaustive search supports at most {_EXHAUSTIVE_NODE_LIMIT} nodes,"
            f" got {g.n_nodes}"
        )
    best_total = np.inf
    best = None
    for labels in itertools.product(range(k), repeat=g.n_nodes):
        assign = BlockAssignment(np.array(labels, dtype=np.int64), k)
        _, breakdown = summary_codelen(g, assign, prior)
        if breakdown.total < best_total:
            best_total = breakdown.total
            best = assign
    return best


def build_summary(
    g: GraphSnapshot,
    kset: Iterable[int],
    prior: BetaLuckiness,
    opts: InferenceOptions | None = None,
    exhaustive: bool = False,
) -> SummaryGraph:
    """Encode the snapshot at every order in kset and keep the best.

    Ties in total code-length resolve to the smallest k.  With
    exhaustive=True every labeling is scanned instead of running the
    greedy search (tiny graphs only).
    """
    orders = sorted(set(int(k) for k in kset))
    if not orders:
        raise ValueError("kset must contain at least one candidate order")
    if orders[0] < 1:
        raise ValueError(f"candidate orders must be >= 1, got {orders[0]}")
    if opts is None:
        opts = InferenceOptions()

    best = None
    for k in orders:
        if exhaustive:
            assign = _exhaustive_assignment(g, k, prior)
        else:
            assign = infer_blocks(g, k, prior, opts)
        y, breakdown = summary_codelen(g, assign, prior)
        if best is None or breakdown.total < best.breakdown.total:
            best = SummaryGraph(
                t=g.t,
                k=k,
                z=assign.z,
                y=y,
                xi_hat=_density_matrix(g, assign),
                breakdown=breakdown,
            )
    return best
