"""Positioned solid k-mers and the k-mer overlap graph built on them."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import PipelineError
from .preprocess import PrimerPair, TrimmedRead

log = logging.getLogger(__name__)

DEFAULT_K_MAX = 26
DEFAULT_K_MIN = 10
MAX_K = 32  # 2 bits per base in a uint64 code

_ENCODE = np.full(256, 255, dtype=np.uint8)
for _i, _c in enumerate(b"ACGT"):
    _ENCODE[_c] = _i
_DECODE = np.frombuffer(b"ACGT", dtype=np.uint8)


def default_min_overlap(k: int) -> int:
    return max(1, (2 * k) // 3)


def default_solid_threshold(n_reads: int) -> int:
    return max(1, n_reads // 10)


@dataclass(frozen=True)
class KmerParams:
    """k: k-mer size, t: solidity threshold (weight must exceed it),
    l: minimum overlap, d: position-cluster gap."""

    k: int
    t: int
    l: int
    d: int

    def __post_init__(self):
        if not 1 <= self.l < self.k:
            raise ValueError(f"need 1 <= L < K, got L={self.l}, K={self.k}")
        if self.k > MAX_K:
            raise ValueError(f"K={self.k} exceeds the supported maximum {MAX_K}")
        if self.t < 1 or self.d < 1:
            raise ValueError("T and D must be >= 1")

    @classmethod
    def for_k(cls, k: int, t: int, l: Optional[int] = None, d: Optional[int] = None) -> "KmerParams":
        return cls(k=k, t=t, l=default_min_overlap(k) if l is None else l, d=k if d is None else d)


@dataclass(frozen=True, order=True)
class PositionedKmer:
    position: int
    kmer: str
    weight: int = field(compare=False)

    def label(self) -> str:
        return f"{self.kmer}@{self.position}"


@dataclass(frozen=True)
class KmerOverlapGraph:
    nodes: tuple[PositionedKmer, ...]
    edges: tuple[tuple[int, int, int], ...]  # (from index, to index, weight), sorted
    params: KmerParams
    succ: tuple[tuple[tuple[int, int], ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        out: list[list[tuple[int, int]]] = [[] for _ in self.nodes]
        for u, v, w in self.edges:
            out[u].append((v, w))
        object.__setattr__(self, "succ", tuple(tuple(s) for s in out))

    @property
    def k(self) -> int:
        return self.params.k

    def __len__(self):
        return len(self.nodes)

    def edge_weight(self, u: int, v: int) -> Optional[int]:
        for x, w in self.succ[u]:
            if x == v:
                return w
        return None

    def dump(self) -> str:
        """Plain-text edge list, one `kmer@pos weight -> kmer@pos weight w=<int>` line per edge."""
        lines = []
        for u, v, w in self.edges:
            a, b = self.nodes[u], self.nodes[v]
            lines.append(f"{a.label()} {a.weight} -> {b.label()} {b.weight} w={w}")
        return "\n".join(lines) + ("\n" if lines else "")


def _sequences(reads: Iterable[Union[TrimmedRead, str]]) -> list[str]:
    return [r if isinstance(r, str) else r.seq for r in reads]


def _kmer_codes(seqs: Sequence[str], k: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer codes and in-read offsets of every k-mer window across `seqs`."""
    seqs = [s for s in seqs if len(s) >= k]
    if not seqs:
        return np.empty(0, np.uint64), np.empty(0, np.int64)
    joined = np.frombuffer("".join(seqs).encode("ascii"), dtype=np.uint8)
    enc = _ENCODE[joined]
    if (enc == 255).any():
        raise ValueError("reads must be ACGT only")
    lengths = np.fromiter((len(s) for s in seqs), dtype=np.int64, count=len(seqs))
    starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    n_win = len(enc) - k + 1
    code = np.zeros(n_win, dtype=np.uint64)
    enc64 = enc.astype(np.uint64)
    for j in range(k):
        code = (code << np.uint64(2)) | enc64[j:j + n_win]
    # window i is valid when it does not cross into the next read
    read_of = np.repeat(np.arange(len(seqs)), lengths)[:n_win]
    offset = np.arange(n_win) - starts[read_of]
    valid = offset <= (lengths[read_of] - k)
    return code[valid], offset[valid]


def _decode(code: int, k: int) -> str:
    shifts = np.arange(2 * (k - 1), -1, -2, dtype=np.uint64)
    idx = (np.uint64(code) >> shifts) & np.uint64(3)
    return _DECODE[idx.astype(np.intp)].tobytes().decode()


def extract_solid_kmers(reads: Iterable[Union[TrimmedRead, str]], params: KmerParams) -> list[PositionedKmer]:
    """Cluster each k-mer's occurrence offsets and keep clusters seen more than T times.

    Offsets of one k-mer string are sorted and split wherever two consecutive
    offsets differ by more than D. A cluster's position is its lower median.
    """
    k = params.k
    codes, offsets = _kmer_codes(_sequences(reads), k)
    if codes.size == 0:
        return []
    order = np.lexsort((offsets, codes))
    codes, offsets = codes[order], offsets[order]
    brk = np.ones(codes.size, dtype=bool)
    brk[1:] = (codes[1:] != codes[:-1]) | ((offsets[1:] - offsets[:-1]) > params.d)
    starts = np.flatnonzero(brk)
    sizes = np.diff(np.append(starts, codes.size))
    solid = sizes > params.t
    out = []
    for s, n in zip(starts[solid].tolist(), sizes[solid].tolist()):
        out.append(PositionedKmer(int(offsets[s + (n - 1) // 2]), _decode(int(codes[s]), k), n))
    out.sort()
    return out


def build_overlap_graph(kmers: Sequence[PositionedKmer], params: KmerParams) -> KmerOverlapGraph:
    """Edge u->v when a suffix of u of length >= L equals the prefix of v.

    Only the longest overlap per ordered pair is kept; edge weight is
    K - overlap. Prefixes are indexed per overlap length so candidate
    successors come from dictionary hits rather than a pair scan.
    """
    k, min_ov = params.k, params.l
    nodes = tuple(sorted(kmers))
    for n in nodes:
        if len(n.kmer) != k:
            raise ValueError(f"k-mer {n.kmer!r} does not have length K={k}")
    prefix_index: dict[int, dict[str, list[int]]] = {o: {} for o in range(min_ov, k)}
    for i, n in enumerate(nodes):
        for o in range(min_ov, k):
            prefix_index[o].setdefault(n.kmer[:o], []).append(i)

    edges = []
    for u, n in enumerate(nodes):
        seen = {u}
        for o in range(k - 1, min_ov - 1, -1):
            for v in prefix_index[o].get(n.kmer[k - o:], ()):
                if v not in seen:
                    seen.add(v)
                    edges.append((u, v, k - o))
    edges.sort()
    return KmerOverlapGraph(nodes, tuple(edges), params)


def count_weak_components(graph: KmerOverlapGraph) -> int:
    n = len(graph.nodes)
    if n == 0:
        return 0
    if graph.edges:
        e = np.asarray(graph.edges, dtype=np.int64)
        rows, cols = e[:, 0], e[:, 1]
    else:
        rows = cols = np.empty(0, dtype=np.int64)
    adj = coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n))
    count, _ = connected_components(adj, directed=True, connection="weak")
    return int(count)


def has_anchors(graph: KmerOverlapGraph, primers: PrimerPair) -> bool:
    return any(n.kmer in primers.left for n in graph.nodes) and any(n.kmer in primers.right for n in graph.nodes)


def make_kog(
    reads: Sequence[Union[TrimmedRead, str]],
    primers: Optional[PrimerPair] = None,
    k_max: int = DEFAULT_K_MAX,
    k_min: int = DEFAULT_K_MIN,
    t: Optional[int] = None,
    l: Optional[int] = None,
    d: Optional[int] = None,
) -> tuple[KmerOverlapGraph, int]:
    """Decrease K from k_max until the graph is one weak component holding both anchors.

    `t` defaults to max(1, N // 10); `l` to floor(2K/3); `d` to K. When
    `primers` is None the anchor requirement is skipped.
    """
    if k_min > k_max:
        raise ValueError(f"k_min={k_min} > k_max={k_max}")
    seqs = _sequences(reads)
    if not seqs:
        raise PipelineError("no connected anchored graph: empty read set")
    if t is None:
        t = default_solid_threshold(len(seqs))
    tried = []
    for k in range(k_max, k_min - 1, -1):
        params = KmerParams.for_k(k, t, l if l is None or l < k else k - 1, d)
        graph = build_overlap_graph(extract_solid_kmers(seqs, params), params)
        comps = count_weak_components(graph)
        anchored = primers is None or has_anchors(graph, primers)
        log.debug("K=%d: %d nodes, %d edges, %d components, anchored=%s", k, len(graph.nodes), len(graph.edges), comps, anchored)
        if comps == 1 and anchored:
            return graph, k
        tried.append(f"K={k}: {comps} component(s){'' if anchored else ', anchors missing'}")
    raise PipelineError("no connected anchored graph; " + "; ".join(tried))
