"""Random payloads under a homopolymer cap and an i.i.d. substitution/indel read channel.

Per-read randomness comes from ``SeedSequence([seed, index])``, so read i of
a dataset can be regenerated without producing reads 0..i-1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .preprocess import PrimerPair
from .seqio import Read, format_fastq

BASES = "ACGT"
_DUMMY_QUAL = "I"


@dataclass(frozen=True)
class ErrorModel:
    p_sub: float = 0.03
    p_ins: float = 0.03
    p_del: float = 0.03

    def __post_init__(self):
        for p in (self.p_sub, self.p_ins, self.p_del):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"error rate {p} outside [0, 1]")
        # deletion and substitution share one draw per base
        if self.p_sub + self.p_del > 1.0:
            raise ValueError("p_sub + p_del must be <= 1")

    @classmethod
    def noiseless(cls) -> "ErrorModel":
        return cls(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class MoleculeSpec:
    payload_len: int
    hp_cap: int
    primers: PrimerPair

    def __post_init__(self):
        if self.payload_len < 1 or self.hp_cap < 1:
            raise ValueError("payload_len and hp_cap must be >= 1")


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *stream]))


def _trailing_run(s: str) -> tuple[str, int]:
    if not s:
        return "", 0
    last = s[-1]
    n = len(s) - len(s.rstrip(last))
    return last, n


def generate_reference(spec: MoleculeSpec, seed: int) -> str:
    """Uniform random payload with no run longer than hp_cap, primer junctions included."""
    rng = _rng(seed, 0xAB)
    cap = spec.hp_cap
    prev, run = _trailing_run(spec.primers.left)
    right = spec.primers.right
    head = right[0]
    head_run = len(right) - len(right.lstrip(head))
    out = []
    draws = rng.random(spec.payload_len)
    for i in range(spec.payload_len):
        allowed = [b for b in BASES if not (b == prev and run >= cap)]
        if i == spec.payload_len - 1:
            allowed = [b for b in allowed if b != head or (run if b == prev else 0) + 1 + head_run <= cap]
        b = allowed[int(draws[i] * len(allowed))]
        run = run + 1 if b == prev else 1
        prev = b
        out.append(b)
    return "".join(out)


def mutate_read(molecule: str, model: ErrorModel, seed: int, read_id: Optional[str] = None) -> Read:
    """One pass over `molecule`: delete, substitute or keep each base, then maybe insert after it."""
    rng = _rng(seed)
    n = len(molecule)
    event = rng.random(n)
    sub_shift = rng.integers(1, 4, size=n)
    ins = rng.random(n) < model.p_ins
    ins_base = rng.integers(0, 4, size=n)
    out = []
    for i, base in enumerate(molecule):
        u = event[i]
        if u < model.p_del:
            continue
        if u < model.p_del + model.p_sub:
            out.append(BASES[(BASES.index(base) + sub_shift[i]) % 4])
        else:
            out.append(base)
        if ins[i]:
            out.append(BASES[ins_base[i]])
    seq = "".join(out)
    return Read(read_id or f"read_{seed}", seq, _DUMMY_QUAL * len(seq))


def read_seed(master_seed: int, index: int) -> int:
    """Seed of read `index`: first word of SeedSequence([master_seed, index])."""
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1, dtype=np.uint64)[0])


def simulate_reads(molecule: str, model: ErrorModel, n_reads: int, seed: int) -> list[Read]:
    return [mutate_read(molecule, model, read_seed(seed, i), read_id=f"sim{seed}_{i}") for i in range(n_reads)]


def molecule_of(spec: MoleculeSpec, payload: str) -> str:
    return spec.primers.left + payload + spec.primers.right


def simulate_dataset(spec: MoleculeSpec, model: ErrorModel, n_reads: int, seed: int, payload: Optional[str] = None) -> bytes:
    """FASTQ bytes of `n_reads` noisy copies of left primer + payload + right primer.

    The payload is drawn with generate_reference(spec, seed) unless given.
    """
    if payload is None:
        payload = generate_reference(spec, seed)
    return format_fastq(simulate_reads(molecule_of(spec, payload), model, n_reads, seed))
