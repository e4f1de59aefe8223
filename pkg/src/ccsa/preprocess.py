"""Read filtering and primer-anchored trimming applied before graph construction."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .seqio import Read, canonical

DEFAULT_K_ANCHOR = 12


@dataclass(frozen=True)
class PrimerPair:
    left: str
    right: str

    def __post_init__(self):
        object.__setattr__(self, "left", canonical(self.left))
        object.__setattr__(self, "right", canonical(self.right))

    @property
    def total(self) -> int:
        return len(self.left) + len(self.right)


@dataclass(frozen=True)
class TrimmedRead:
    read: Read
    trim_start: int
    trim_end: int

    def __post_init__(self):
        if not 0 <= self.trim_start < self.trim_end <= len(self.read.seq):
            raise ValueError(f"bad trim window [{self.trim_start}, {self.trim_end}) for read of length {len(self.read.seq)}")

    @property
    def seq(self) -> str:
        return self.read.seq[self.trim_start:self.trim_end]

    def __len__(self):
        return self.trim_end - self.trim_start

    @classmethod
    def whole(cls, read: Read) -> "TrimmedRead":
        return cls(read, 0, len(read.seq))


def min_molecule_length(payload_len: int, primers: PrimerPair) -> int:
    """Length threshold used by the read filter: payload plus both primers."""
    return payload_len + primers.total


def filter_by_length(reads: Iterable[Read], min_total_len: int) -> list[Read]:
    return [r for r in reads if len(r.seq) >= min_total_len]


def _kmer_offsets(primer: str, k: int, keep_last: bool) -> dict[str, int]:
    index: dict[str, int] = {}
    for i in range(len(primer) - k + 1):
        kmer = primer[i:i + k]
        if keep_last or kmer not in index:
            index[kmer] = i
    return index


def anchor_trim(read: Read, primers: PrimerPair, k_anchor: int = DEFAULT_K_ANCHOR) -> Optional[TrimmedRead]:
    """Trim `read` to the primer-bounded molecule, or return None (discard).

    The leftmost exact left-primer k-mer hit and the rightmost exact
    right-primer k-mer hit are extended outward to where the primer ends
    would sit, clamped to the read.
    """
    if k_anchor > min(len(primers.left), len(primers.right)):
        raise ValueError(f"k_anchor={k_anchor} exceeds a primer length")
    seq = read.seq
    n = len(seq)
    left_index = _kmer_offsets(primers.left, k_anchor, keep_last=False)
    right_index = _kmer_offsets(primers.right, k_anchor, keep_last=True)

    m_left = o_left = None
    for i in range(n - k_anchor + 1):
        o = left_index.get(seq[i:i + k_anchor])
        if o is not None:
            m_left, o_left = i, o
            break
    if m_left is None:
        return None

    m_right = o_right = None
    for i in range(n - k_anchor, m_left + k_anchor - 1, -1):
        o = right_index.get(seq[i:i + k_anchor])
        if o is not None:
            m_right, o_right = i, o
            break
    if m_right is None:
        return None

    start = max(0, m_left - o_left)
    end = min(n, m_right + len(primers.right) - o_right)
    return TrimmedRead(read, start, end)


def retrim(trimmed: TrimmedRead, primers: PrimerPair, k_anchor: int = DEFAULT_K_ANCHOR) -> Optional[TrimmedRead]:
    """Apply anchor_trim to an already trimmed read, keeping original-read coordinates."""
    view = Read(trimmed.read.id, trimmed.seq)
    again = anchor_trim(view, primers, k_anchor)
    if again is None:
        return None
    return TrimmedRead(trimmed.read, trimmed.trim_start + again.trim_start, trimmed.trim_start + again.trim_end)


@dataclass
class PreprocessStats:
    n_input: int = 0
    n_length_ok: int = 0
    n_anchored: int = 0
    n_kept: int = 0


def preprocess_reads(
    reads: Sequence[Read],
    primers: PrimerPair,
    payload_len: int,
    k_anchor: int = DEFAULT_K_ANCHOR,
) -> tuple[list[TrimmedRead], PreprocessStats]:
    """Length filter, anchor trim, then the length filter again on trimmed reads."""
    threshold = min_molecule_length(payload_len, primers)
    stats = PreprocessStats(n_input=len(reads))
    long_enough = filter_by_length(reads, threshold)
    stats.n_length_ok = len(long_enough)
    kept = []
    for read in long_enough:
        t = anchor_trim(read, primers, k_anchor)
        if t is None:
            continue
        stats.n_anchored += 1
        if len(t) >= threshold:
            kept.append(t)
    stats.n_kept = len(kept)
    return kept, stats
