"""Best-scoring fixed-length path between the primer anchors of a k-mer overlap graph."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import PipelineError
from .kog import KmerOverlapGraph, PositionedKmer
from .preprocess import PrimerPair

DEFAULT_SLACK = 5
EMPTY = np.iinfo(np.int64).min

State = tuple[int, int]  # (node index, spelled length)


@dataclass(frozen=True)
class AnchorSelection:
    start: PositionedKmer
    end: PositionedKmer
    start_index: int
    end_index: int
    start_offset: int  # where start.kmer begins in the left primer
    end_offset: int  # just past where end.kmer ends in the right primer


@dataclass(frozen=True)
class ConsensusCandidate:
    full_sequence: str
    payload: str
    total_length: int
    score: int
    path_length: int


def select_anchors(graph: KmerOverlapGraph, primers: PrimerPair) -> AnchorSelection:
    """START is the left-primer k-mer closest to the payload, END the right-primer one.

    Ties at the same primer offset go to the heavier node, then the smaller
    k-mer string, then the smaller position.
    """
    k = graph.k
    best_start = best_end = None
    for i, n in enumerate(graph.nodes):
        off = primers.left.rfind(n.kmer)
        if off >= 0:
            key = (-off, -n.weight, n.kmer, n.position)
            if best_start is None or key < best_start[0]:
                best_start = (key, i, off)
        off = primers.right.find(n.kmer)
        if off >= 0:
            key = (off, -n.weight, n.kmer, n.position)
            if best_end is None or key < best_end[0]:
                best_end = (key, i, off)
    if best_start is None or best_end is None:
        side = "left" if best_start is None else "right"
        raise PipelineError(f"anchor not found: no solid {k}-mer lies in the {side} primer")
    _, si, soff = best_start
    _, ei, eoff = best_end
    return AnchorSelection(graph.nodes[si], graph.nodes[ei], si, ei, soff, eoff + k)


def target_path_length(anchors: AnchorSelection, primers: PrimerPair, payload_len: int) -> int:
    """Spelled length from START through END that yields a molecule of exactly the expected size."""
    return (len(primers.left) - anchors.start_offset) + payload_len + anchors.end_offset


class PathTable:
    """Best score and backpointer per (node, spelled length) state.

    Stored densely as (max_len + 1) x |V| arrays; EMPTY marks unreached states.
    """

    def __init__(self, graph: KmerOverlapGraph, max_len: int):
        self.graph = graph
        self.max_len = max_len
        shape = (max(max_len + 1, 0), len(graph.nodes))
        self.scores = np.full(shape, EMPTY, dtype=np.int64)
        self.back_node = np.full(shape, -1, dtype=np.int32)
        self.back_len = np.zeros(shape, dtype=np.int32)

    def __contains__(self, state: State) -> bool:
        node, length = state
        return 0 <= length <= self.max_len and self.scores[length, node] != EMPTY

    def _check(self, node: int, length: int) -> None:
        if (node, length) not in self:
            raise KeyError((node, length))

    def score(self, node: int, length: int) -> int:
        self._check(node, length)
        return int(self.scores[length, node])

    def back(self, node: int, length: int) -> Optional[State]:
        self._check(node, length)
        b = int(self.back_node[length, node])
        return None if b < 0 else (b, int(self.back_len[length, node]))

    def scores_at(self, node: int) -> dict[int, int]:
        col = self.scores[:, node]
        return {int(length): int(col[length]) for length in np.flatnonzero(col != EMPTY)}

    def states(self):
        lengths, nodes = np.nonzero(self.scores != EMPTY)
        for length, node in zip(lengths.tolist(), nodes.tolist()):
            yield (node, length), int(self.scores[length, node]), self.back(node, length)

    def walk(self, node: int, length: int) -> list[int]:
        """Node indices from the seed state to (node, length)."""
        path = [node]
        back = self.back(node, length)
        while back is not None:
            path.append(back[0])
            back = self.back(*back)
        path.reverse()
        return path


def _tie_ranks(graph: KmerOverlapGraph) -> np.ndarray:
    order = sorted(range(len(graph.nodes)), key=lambda i: (graph.nodes[i].kmer, graph.nodes[i].position))
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    return rank


def relax_layers(graph: KmerOverlapGraph, seeds: Mapping[State, int], max_len: int) -> PathTable:
    """Layered dynamic program over (node, spelled length).

    Seeds are installed as given. Layers are processed by increasing length;
    every edge weight is >= 1, so a state only depends on shorter states and
    cycles in the graph are harmless. A candidate replaces an entry when its
    score is strictly higher, or equal with a lexicographically smaller
    predecessor (k-mer, position). Seeds have no predecessor and only yield
    to a strictly higher score.

    Each layer relaxes all out-edges of its reached nodes at once, so the
    cost is O(max_len x |E|) array work rather than per-edge Python.
    """
    table = PathTable(graph, max_len)
    n = len(graph.nodes)
    scores, back_node, back_len = table.scores, table.back_node, table.back_len
    lo = None
    for (node, length), score in seeds.items():
        if 0 <= length <= max_len:
            scores[length, node] = score
            lo = length if lo is None else min(lo, length)
    if lo is None or not graph.edges:
        return table

    edges = np.asarray(graph.edges, dtype=np.int64).reshape(-1, 3)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    src, dst, wts = edges[:, 0], edges[:, 1], edges[:, 2]
    indptr = np.searchsorted(src, np.arange(n + 1))
    weight = np.array([x.weight for x in graph.nodes], dtype=np.int64)
    rank = _tie_ranks(graph)

    for length in range(lo, max_len + 1):
        active = np.flatnonzero(scores[length] != EMPTY)
        if not active.size:
            continue
        first, counts = indptr[active], indptr[active + 1] - indptr[active]
        total = int(counts.sum())
        if not total:
            continue
        eidx = np.repeat(first - (np.cumsum(counts) - counts), counts) + np.arange(total)
        eidx = eidx[length + wts[eidx] <= max_len]
        if not eidx.size:
            continue
        u, v, w = src[eidx], dst[eidx], wts[eidx]
        nxt = length + w
        cand = scores[length, u] + w * weight[v]

        # best candidate per target state within this layer
        flat = nxt * n + v
        order = np.lexsort((rank[u], -cand, flat))
        keep = order[np.concatenate(([True], flat[order][1:] != flat[order][:-1]))]
        u, v, nxt, cand = u[keep], v[keep], nxt[keep], cand[keep]

        # against what earlier layers installed
        cur = scores[nxt, v]
        cur_back = back_node[nxt, v].astype(np.int64)
        tie_wins = (cand == cur) & (cur_back >= 0) & (rank[u] < rank[np.maximum(cur_back, 0)])
        better = (cur == EMPTY) | (cand > cur) | tie_wins
        nxt, v = nxt[better], v[better]
        scores[nxt, v] = cand[better]
        back_node[nxt, v] = u[better]
        back_len[nxt, v] = length
    return table


def layered_path_search(
    graph: KmerOverlapGraph, anchors: AnchorSelection, target_path_len: int, slack: int = DEFAULT_SLACK
) -> PathTable:
    k = graph.k
    if target_path_len < k:
        raise ValueError(f"target path length {target_path_len} is shorter than K={k}")
    if slack < 0:
        raise ValueError("slack must be >= 0")
    start = anchors.start_index
    seed = {(start, k): k * graph.nodes[start].weight}
    return relax_layers(graph, seed, target_path_len + slack)


def spell(graph: KmerOverlapGraph, path: Iterable[int]) -> str:
    """Start k-mer, then the last w symbols of each successor along the walk."""
    it = iter(path)
    first = next(it)
    parts = [graph.nodes[first].kmer]
    prev = first
    for node in it:
        w = graph.edge_weight(prev, node)
        if w is None:
            raise ValueError(f"no edge {prev} -> {node}")
        parts.append(graph.nodes[node].kmer[-w:])
        prev = node
    return "".join(parts)


def path_score(graph: KmerOverlapGraph, path: list[int]) -> int:
    """Re-sum a walk's score: K x start weight plus w x weight for every step."""
    nodes = graph.nodes
    total = graph.k * nodes[path[0]].weight
    for u, v in zip(path, path[1:]):
        total += graph.edge_weight(u, v) * nodes[v].weight
    return total


def reconstruct_consensus(
    table: PathTable,
    anchors: AnchorSelection,
    primers: PrimerPair,
    target_path_len: int,
    slack: int = DEFAULT_SLACK,
) -> list[ConsensusCandidate]:
    graph = table.graph
    end = anchors.end_index
    found = []
    for length, score in table.scores_at(end).items():
        if abs(length - target_path_len) > slack:
            continue
        spelled = spell(graph, table.walk(end, length))
        full = primers.left[:anchors.start_offset] + spelled + primers.right[anchors.end_offset:]
        payload = full[len(primers.left):max(len(primers.left), len(full) - len(primers.right))]
        found.append(ConsensusCandidate(full, payload, len(full), score, length))
    found.sort(key=lambda c: (abs(c.path_length - target_path_len), -c.score, c.path_length))
    return found
