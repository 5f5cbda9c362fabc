"""Streaming loop: summarize each snapshot and score it against the
previous summary."""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from graphmdl.codelen import BetaLuckiness
from graphmdl.detect import ChangeReport, change_statistic, mdl_change_test, threshold
from graphmdl.graphs import GraphSnapshot
from graphmdl.inference import InferenceOptions
from graphmdl.summarize import build_summary


@dataclass
class BscConfig:
    """Run-level settings: luckiness strength, confidence, candidate
    orders, and the search options (seeded from `seed` when omitted)."""

    lam: float = 1.0
    delta: float = 0.05
    kset: tuple[int, ...] = (2, 3, 4)
    prior_a: float = 0.5
    prior_b: float = 0.5
    seed: int = 0
    inference: InferenceOptions | None = field(default=None)

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        self.kset = tuple(sorted(set(int(k) for k in self.kset)))
        if not self.kset or self.kset[0] < 1:
            raise ValueError(f"kset must hold positive orders, got {self.kset}")
        if self.inference is None:
            self.inference = InferenceOptions(seed=self.seed)

    @property
    def prior(self) -> BetaLuckiness:
        return BetaLuckiness(a=self.prior_a, b=self.prior_b, lam=self.lam)


def run(stream: Iterable[GraphSnapshot], cfg: BscConfig) -> list[ChangeReport]:
    """Process the snapshots in order; one report per snapshot.

    The first snapshot has no predecessor, so its statistic, threshold,
    and shared order are absent and its alarm flag is False.
    """
    prior = cfg.prior
    reports: list[ChangeReport] = []
    previous = None
    for g in stream:
        try:
            summary = build_summary(g, cfg.kset, prior, cfg.inference)
            if previous is None:
                phi, k_concat, epsilon, alarm = None, None, None, False
            else:
                prev_g, prev_summary = previous
                phi, k_concat = change_statistic(
                    g, prev_g, summary, prev_summary, cfg.kset, prior, cfg.inference
                )
                epsilon = threshold(prior, cfg.delta, prev_summary.k, g.n_nodes)
                alarm = mdl_change_test(phi, epsilon)
        except Exception as exc:
            raise RuntimeError(f"stream processing failed at t={g.t}: {exc}") from exc
        br = summary.breakdown
        reports.append(
            ChangeReport(
                t=g.t, k_hat=summary.k, k_concat=k_concat, phi=phi,
                epsilon=epsilon, alarm=alarm, l_k=br.l_k, l_z=br.l_z,
                l_y=br.l_y, l_x=br.l_x, summary_total=br.summary_total,
                data_total=br.data_total,
            )
        )
        previous = (g, summary)
    return reports
