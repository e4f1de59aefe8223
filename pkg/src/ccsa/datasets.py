"""Primer and reference sequences printed for the published datasets.

Only complete records are bundled: A_900_1, A_900_2, A_900_3 and U2_900_3.
Lengths are whatever the printed sequences give, which is not always the
nominal dataset length.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .preprocess import PrimerPair
from .seqio import parse_fasta


@dataclass(frozen=True)
class Dataset:
    name: str
    primers: PrimerPair
    reference: str

    @property
    def molecule(self) -> str:
        return self.primers.left + self.reference + self.primers.right


@lru_cache(maxsize=None)
def _records() -> dict[str, dict[str, str]]:
    data = resources.files("ccsa").joinpath("data/datasets.fasta").read_bytes()
    out: dict[str, dict[str, str]] = {}
    for rec in parse_fasta(data):
        name, part = rec.name.split()
        out.setdefault(name, {})[part] = rec.seq
    return out


def names() -> list[str]:
    return sorted(_records())


def load(name: str) -> Dataset:
    try:
        parts = _records()[name]
    except KeyError:
        raise KeyError(f"unknown dataset {name!r}; available: {', '.join(names())}") from None
    return Dataset(name, PrimerPair(parts["left"], parts["right"]), parts["reference"])
