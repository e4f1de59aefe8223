"""FASTQ/FASTA reading and consensus FASTA writing.

Inputs are read fully into memory; files handled here are a few thousand
reads at most. Every sequence that leaves this module is uppercase ACGT.
"""
from __future__ import annotations

import logging
import os
import re
from dataclasses import dataclass
from typing import IO, TYPE_CHECKING, Iterable, Optional, Union

from .errors import ParseError

if TYPE_CHECKING:
    from .pathsearch import ConsensusCandidate

log = logging.getLogger(__name__)

ALPHABET = frozenset("ACGT")
FASTA_WIDTH = 80
_HEADER_RE = re.compile(r"^ccsa_len=(\d+)_score=(-?\d+)$")

Source = Union[bytes, str, "os.PathLike[str]", IO[bytes], IO[str]]


def canonical(seq: str) -> str:
    """Uppercase `seq` and check it is a non-empty ACGT string."""
    up = seq.upper()
    if not up:
        raise ValueError("empty nucleotide sequence")
    bad = set(up) - ALPHABET
    if bad:
        raise ValueError(f"non-ACGT symbols {''.join(sorted(bad))!r} in sequence")
    return up


def is_acgt(seq: str) -> bool:
    return bool(seq) and set(seq.upper()) <= ALPHABET


@dataclass(frozen=True)
class Read:
    id: str
    seq: str
    qual: Optional[str] = None

    def __post_init__(self):
        if self.qual is not None and len(self.qual) != len(self.seq):
            raise ValueError(f"read {self.id}: quality length {len(self.qual)} != sequence length {len(self.seq)}")

    def __len__(self):
        return len(self.seq)


@dataclass(frozen=True)
class NamedSequence:
    name: str
    seq: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("sequence name must be non-empty")


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    data = source.read()
    return data.encode() if isinstance(data, str) else data


def _lines_with_offsets(data: bytes):
    offset = 0
    for raw in data.splitlines(keepends=True):
        yield offset, raw.rstrip(b"\r\n").decode("ascii", errors="replace")
        offset += len(raw)


def parse_fastq(source: Source) -> list[Read]:
    """Parse 4-line FASTQ records.

    Reads that are empty or contain anything other than ACGT (either case)
    are dropped and counted in a single warning. A trailing partial record
    is a ParseError carrying the byte offset where that record starts.
    """
    data = _read_bytes(source)
    lines = [(off, line) for off, line in _lines_with_offsets(data)]
    # blank trailing lines are padding unless they complete a record (empty read)
    while len(lines) % 4 and not lines[-1][1].strip():
        lines.pop()
    if len(lines) % 4:
        start = lines[len(lines) - len(lines) % 4][0]
        raise ParseError(f"truncated FASTQ record at byte offset {start}")

    reads = []
    dropped = 0
    for i in range(0, len(lines), 4):
        (off, head), (_, seq), (sep_off, sep), (_, qual) = lines[i:i + 4]
        if not head.startswith("@"):
            raise ParseError(f"expected '@' header at byte offset {off}")
        if not sep.startswith("+"):
            raise ParseError(f"expected '+' separator at byte offset {sep_off}")
        if len(qual) != len(seq):
            raise ParseError(f"quality/sequence length mismatch in record at byte offset {off}")
        if not is_acgt(seq):
            dropped += 1
            continue
        name = head[1:].split(maxsplit=1)[0] if head[1:].strip() else f"read{i // 4}"
        reads.append(Read(name, seq.upper(), qual))
    if dropped:
        log.warning("dropped %d FASTQ read(s) with empty or non-ACGT sequence", dropped)
    return reads


def parse_fasta(source: Source) -> list[NamedSequence]:
    data = _read_bytes(source)
    records = []
    name = None
    chunks: list[str] = []
    head_off = 0

    def flush():
        if not chunks:
            raise ParseError(f"FASTA record {name!r} at byte offset {head_off} has no sequence")
        try:
            seq = canonical("".join(chunks))
        except ValueError as exc:
            raise ParseError(f"FASTA record {name!r}: {exc}") from None
        records.append(NamedSequence(name, seq))

    for off, line in _lines_with_offsets(data):
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            if name is not None:
                flush()
            name = line[1:].strip()
            if not name:
                raise ParseError(f"empty FASTA header at byte offset {off}")
            chunks = []
            head_off = off
        elif name is None:
            raise ParseError(f"sequence data before first '>' at byte offset {off}")
        else:
            chunks.append(line)
    if name is not None:
        flush()
    return records


def read_single_fasta(source: Source) -> str:
    """Sequence of the first record; primer files hold exactly one."""
    records = parse_fasta(source)
    if not records:
        raise ParseError("FASTA input contains no records")
    return records[0].seq


def wrap(seq: str, width: int = FASTA_WIDTH) -> list[str]:
    return [seq[i:i + width] for i in range(0, len(seq), width)]


def format_fasta(records: Iterable[NamedSequence], width: int = FASTA_WIDTH) -> bytes:
    out = []
    for rec in records:
        out.append(f">{rec.name}")
        out.extend(wrap(rec.seq, width))
    return ("\n".join(out) + "\n").encode() if out else b""


def consensus_header(length: int, score: int) -> str:
    return f"ccsa_len={length}_score={score}"


def parse_consensus_header(name: str) -> tuple[int, int]:
    m = _HEADER_RE.match(name.strip())
    if not m:
        raise ParseError(f"not a consensus header: {name!r}")
    return int(m.group(1)), int(m.group(2))


def write_fasta_consensus(candidates: Iterable["ConsensusCandidate"]) -> bytes:
    """Consensus records by increasing length, higher score first on equal length."""
    ordered = sorted(candidates, key=lambda c: (c.total_length, -c.score))
    return format_fasta(
        NamedSequence(consensus_header(c.total_length, c.score), c.full_sequence) for c in ordered
    )


def format_fastq(reads: Iterable[Read]) -> bytes:
    out = []
    for r in reads:
        qual = r.qual if r.qual is not None else "I" * len(r.seq)
        out.append(f"@{r.id}\n{r.seq}\n+\n{qual}\n")
    return "".join(out).encode()
