"""Reads in, consensus candidates out."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import PipelineError
from .kog import DEFAULT_K_MAX, DEFAULT_K_MIN, KmerOverlapGraph, make_kog
from .pathsearch import (
    DEFAULT_SLACK,
    AnchorSelection,
    ConsensusCandidate,
    layered_path_search,
    reconstruct_consensus,
    select_anchors,
    target_path_length,
)
from .preprocess import DEFAULT_K_ANCHOR, PreprocessStats, PrimerPair, preprocess_reads
from .seqio import Read

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConsensusConfig:
    k_max: int = DEFAULT_K_MAX
    k_min: int = DEFAULT_K_MIN
    solid_threshold: Optional[int] = None
    min_overlap: Optional[int] = None
    pos_gap: Optional[int] = None
    k_anchor: int = DEFAULT_K_ANCHOR
    slack: int = DEFAULT_SLACK


@dataclass
class ConsensusRun:
    candidates: list[ConsensusCandidate]
    graph: KmerOverlapGraph
    k: int
    anchors: AnchorSelection
    target_path_len: int
    stats: PreprocessStats = field(default_factory=PreprocessStats)


def run_consensus(
    reads: Sequence[Read],
    primers: PrimerPair,
    payload_len: int,
    config: ConsensusConfig = ConsensusConfig(),
) -> ConsensusRun:
    trimmed, stats = preprocess_reads(reads, primers, payload_len, config.k_anchor)
    log.info("reads: %d in, %d long enough, %d anchored, %d kept", stats.n_input, stats.n_length_ok, stats.n_anchored, stats.n_kept)
    if not trimmed:
        raise PipelineError("no usable reads after length filtering and primer trimming")
    graph, k = make_kog(
        trimmed, primers, config.k_max, config.k_min,
        t=config.solid_threshold, l=config.min_overlap, d=config.pos_gap,
    )
    anchors = select_anchors(graph, primers)
    target = target_path_length(anchors, primers, payload_len)
    log.info("K=%d: %d nodes, %d edges; target path length %d", k, len(graph.nodes), len(graph.edges), target)
    table = layered_path_search(graph, anchors, target, config.slack)
    candidates = reconstruct_consensus(table, anchors, primers, target, config.slack)
    return ConsensusRun(candidates, graph, k, anchors, target, stats)


def consensus_pipeline(
    reads: Sequence[Read],
    primers: PrimerPair,
    payload_len: int,
    config: ConsensusConfig = ConsensusConfig(),
) -> list[ConsensusCandidate]:
    return run_consensus(reads, primers, payload_len, config).candidates
