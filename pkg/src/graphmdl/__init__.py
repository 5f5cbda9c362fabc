"""MDL graph-stream summarization and code-length change detection."""

from graphmdl.codelen import (
    BetaLuckiness,
    bernoulli_nml_codelen,
    bernoulli_nml_complexity,
    categorical_nml_codelen,
    counting_codelen,
    integer_codelen,
    lnml_codelen,
    lnml_complexity,
    lnml_estimator,
    multinomial_complexity,
)
from graphmdl.detect import (
    ChangeReport,
    change_statistic,
    concat_codelen,
    mdl_change_test,
    pooled_codelen,
    threshold,
)
from graphmdl.graphs import (
    BlockAssignment,
    CodeLenBreakdown,
    GraphSnapshot,
    StreamFormatError,
    SummaryGraph,
    block_edge_counts,
    load_stream,
    snapshot,
    write_stream,
)
from graphmdl.inference import (
    InferenceOptions,
    estimate_xi,
    infer_blocks,
    infer_shared_blocks,
)
from graphmdl.stream import BscConfig, run
from graphmdl.summarize import build_summary, summary_codelen, superedge_decision
from graphmdl.synth import (
    SynthConfig,
    benefit_auc,
    compression_at,
    generate_stream,
    planted_sbm,
    type_errors,
)

__all__ = [
    "BetaLuckiness",
    "BlockAssignment",
    "BscConfig",
    "ChangeReport",
    "CodeLenBreakdown",
    "GraphSnapshot",
    "InferenceOptions",
    "StreamFormatError",
    "SummaryGraph",
    "SynthConfig",
    "benefit_auc",
    "bernoulli_nml_codelen",
    "bernoulli_nml_complexity",
    "block_edge_counts",
    "build_summary",
    "categorical_nml_codelen",
    "change_statistic",
    "compression_at",
    "concat_codelen",
    "counting_codelen",
    "estimate_xi",
    "generate_stream",
    "infer_blocks",
    "infer_shared_blocks",
    "integer_codelen",
    "lnml_codelen",
    "lnml_complexity",
    "lnml_estimator",
    "load_stream",
    "mdl_change_test",
    "multinomial_complexity",
    "planted_sbm",
    "pooled_codelen",
    "run",
    "snapshot",
    "summary_codelen",
    "superedge_decision",
    "threshold",
    "type_errors",
    "write_stream",
]

__version__ = "0.1.0"
