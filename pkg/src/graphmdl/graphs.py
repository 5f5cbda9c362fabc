"""Directed-graph snapshots, stream serialization, and block-level counts.

A stream is either a JSONL file with one record {"t", "n", "edges"} per
snapshot, or a JSON manifest {"n", "snapshots": [paths]} pointing at
tab-separated edge-list files whose order defines t = 1, 2, ...
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class StreamFormatError(ValueError):
    """Raised when a stream file violates the on-disk contract."""


@dataclass
class GraphSnapshot:
    """One directed graph observed at time t; no self-loops, no duplicates.

    Edges are stored as an (E, 2) int64 array in lexicographic order, so
    serialization is canonical and repeated loads are byte-stable.
    """

    t: int
    n_nodes: int
    edges: np.ndarray

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])


def snapshot(t: int, n_nodes: int, edges, where: str = "snapshot") -> GraphSnapshot:
    """Validate and canonicalize raw edge data into a GraphSnapshot."""
    if n_nodes < 1:
        raise StreamFormatError(f"{where}: node count must be >= 1, got {n_nodes}")
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise StreamFormatError(f"{where}: edges must be (src, dst) pairs")
    if arr.size:
        if arr.min() < 0 or arr.max() >= n_nodes:
            raise StreamFormatError(f"{where}: edge endpoint outside [0, {n_nodes})")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise StreamFormatError(f"{where}: self-loops are not allowed")
        order = np.lexsort((arr[:, 1], arr[:, 0]))
        arr = arr[order]
        dup = np.all(arr[1:] == arr[:-1], axis=1) if arr.shape[0] > 1 else np.zeros(0, bool)
        if np.any(dup):
            s, d = arr[1:][dup][0]
            raise StreamFormatError(f"{where}: duplicate edge ({s}, {d})")
    return GraphSnapshot(t=t, n_nodes=n_nodes, edges=arr)


def _snapshot_from_record(rec: dict, where: str) -> GraphSnapshot:
    for key in ("t", "n", "edges"):
        if key not in rec:
            raise StreamFormatError(f"{where}: missing key {key!r}")
    return snapshot(int(rec["t"]), int(rec["n"]), rec["edges"], where=where)


def _load_jsonl(path: Path) -> list[GraphSnapshot]:
    snaps = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StreamFormatError(f"{where}: invalid JSON ({exc.msg})") from exc
            if not isinstance(rec, dict):
                raise StreamFormatError(f"{where}: expected an object per line")
            snaps.append(_snapshot_from_record(rec, where))
    return snaps


def _load_manifest(path: Path, manifest: dict) -> list[GraphSnapshot]:
    if "n" not in manifest:
        raise StreamFormatError(f"{path}: manifest is missing key 'n'")
    n = int(manifest["n"])
    snaps = []
    for idx, rel in enumerate(manifest["snapshots"], start=1):
        edge_path = (path.parent / rel).resolve()
        edges = []
        try:
            lines = edge_path.read_text().splitlines()
        except OSError as exc:
            raise StreamFormatError(f"{path}: cannot read snapshot file {rel!r}: {exc}") from exc
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise StreamFormatError(f"{edge_path}:{lineno}: expected 'src<TAB>dst'")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError as exc:
                raise StreamFormatError(f"{edge_path}:{lineno}: non-integer endpoint") from exc
        snaps.append(snapshot(idx, n, edges, where=str(edge_path)))
    return snaps


def load_stream(path) -> list[GraphSnapshot]:
    """Load a snapshot stream from JSONL or from a manifest of edge lists.

    Timestamps must be strictly increasing; every structural violation is
    reported with the offending file and line.
    """
    path = Path(path)
    with path.open() as fh:
        first = fh.readline()
    if not first.strip():
        raise StreamFormatError(f"{path}: empty stream file")
    try:
        head = json.loads(first)
    except json.JSONDecodeError:
        head = None
    if isinstance(head, dict) and "snapshots" in head:
        manifest = json.loads(path.read_text())
        snaps = _load_manifest(path, manifest)
    else:
        snaps = _load_jsonl(path)
    if not snaps:
        raise StreamFormatError(f"{path}: stream contains no snapshots")
    ts = [g.t for g in snaps]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise StreamFormatError(f"{path}: timestamps must be strictly increasing, got {ts}")
    return snaps


def snapshot_record(g: GraphSnapshot) -> dict:
    return {"t": g.t, "n": g.n_nodes, "edges": g.edges.tolist()}


def write_stream(path, snaps) -> None:
    """Write snapshots as canonical JSONL (sorted edges, compact separators)."""
    path = Path(path)
    with path.open("w") as fh:
        for g in snaps:
            fh.write(json.dumps(snapshot_record(g), separators=(",", ":")) + "\n")


# ---------------------------------------------------------------------------
# block containers and counts
# ---------------------------------------------------------------------------


@dataclass
class BlockAssignment:
    """Node-to-block labels z in [0, k) together with the model order k."""

    z: np.ndarray
    k: int

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=np.int64)
        if self.k < 1:
            raise ValueError(f"block count must be >= 1, got {self.k}")
        if self.z.size and (self.z.min() < 0 or self.z.max() >= self.k):
            raise ValueError("labels must lie in [0, k)")

    def counts(self) -> np.ndarray:
        return np.bincount(self.z, minlength=self.k)


def block_edge_counts(g: GraphSnapshot, assign: BlockAssignment):
    """Edge and slot counts per ordered block pair.

    Returns (m, n): m[l, r] counts observed edges from block l to block r,
    n[l, r] the available ordered slots (diagonal excludes self-loops).
    Sum of n is always n_nodes * (n_nodes - 1).
    """
    k = assign.k
    z = assign.z
    if z.shape != (g.n_nodes,):
        raise ValueError(f"assignment covers {z.shape[0]} nodes, graph has {g.n_nodes}")
    sizes = assign.counts().astype(np.int64)
    if g.n_edges:
        flat = z[g.edges[:, 0]] * k + z[g.edges[:, 1]]
        m = np.bincount(flat, minlength=k * k).reshape(k, k)
    else:
        m = np.zeros((k, k), dtype=np.int64)
    n = np.outer(sizes, sizes) - np.diag(sizes)
    return m, n


@dataclass
class CodeLenBreakdown:
    """Bits per component of one summary: order, labels, superedges, data."""

    l_k: float
    l_z: float
    l_y: float
    l_x: float
    total: float

    @property
    def summary_total(self) -> float:
        """Cost of the summary graph itself (without the data term)."""
        return self.l_k + self.l_z + self.l_y

    @property
    def data_total(self) -> float:
        return self.l_x


@dataclass
class SummaryGraph:
    """Best block summary of one snapshot under the code-length objective."""

    t: int
    k: int
    z: np.ndarray
    y: np.ndarray
    xi_hat: np.ndarray
    breakdown: CodeLenBreakdown
