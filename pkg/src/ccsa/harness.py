"""Coverage-sweep evaluation: repeated subsampled consensus runs scored against a known payload."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from rapidfuzz.distance import Levenshtein

from .errors import PipelineError
from .pipeline import ConsensusConfig, consensus_pipeline
from .preprocess import PrimerPair, filter_by_length, min_molecule_length
from .seqio import Read

log = logging.getLogger(__name__)

DEFAULT_COVERAGES = (100, 80, 60, 40, 30, 20)


def count_errors(candidate_payload: str, reference: str) -> int:
    """Unit-cost Levenshtein distance."""
    return Levenshtein.distance(candidate_payload, reference)


@dataclass(frozen=True)
class TrialOutcome:
    coverage: int
    seed: int
    exact_length_found: bool
    errors: int = 0


@dataclass
class CoverageRow:
    coverage: int
    n_trials: int = 0
    n_seq: int = 0
    n_err: int = 0

    def err_rate(self, payload_len: int) -> Optional[Fraction]:
        """n_err / (n_seq * payload_len), or None when nothing was found."""
        if self.n_seq == 0:
            return None
        return Fraction(self.n_err, self.n_seq * payload_len)


@dataclass
class ExperimentReport:
    payload_len: int
    rows: list[CoverageRow] = field(default_factory=list)
    outcomes: list[TrialOutcome] = field(default_factory=list)

    def row(self, coverage: int) -> CoverageRow:
        for r in self.rows:
            if r.coverage == coverage:
                return r
        raise KeyError(coverage)

    def add(self, outcome: TrialOutcome) -> None:
        try:
            row = self.row(outcome.coverage)
        except KeyError:
            row = CoverageRow(outcome.coverage)
            self.rows.append(row)
        row.n_trials += 1
        if outcome.exact_length_found:
            row.n_seq += 1
            row.n_err += outcome.errors
        self.outcomes.append(outcome)


def trial_seed(master_seed: int, coverage: int, repeat: int) -> int:
    return int(np.random.SeedSequence([master_seed, coverage, repeat]).generate_state(1, dtype=np.uint64)[0])


def subsample(n_available: int, coverage: int, seed: int) -> list[int]:
    """`coverage` distinct indices drawn uniformly from range(n_available)."""
    rng = np.random.default_rng(seed)
    return rng.choice(n_available, size=coverage, replace=False).tolist()


def run_trial(
    reads: Sequence[Read],
    reference: str,
    primers: PrimerPair,
    coverage: int,
    seed: int,
    config: ConsensusConfig = ConsensusConfig(),
) -> TrialOutcome:
    picked = [reads[i] for i in subsample(len(reads), coverage, seed)]
    expected_total = min_molecule_length(len(reference), primers)
    try:
        candidates = consensus_pipeline(picked, primers, len(reference), config)
    except PipelineError as exc:
        log.debug("coverage %d seed %d: %s", coverage, seed, exc)
        return TrialOutcome(coverage, seed, False)
    exact = [c for c in candidates if c.total_length == expected_total]
    if not exact:
        return TrialOutcome(coverage, seed, False)
    best = max(exact, key=lambda c: c.score)
    return TrialOutcome(coverage, seed, True, count_errors(best.payload, reference))


def _run_trial_args(args):
    return run_trial(*args)


def run_coverage_experiment(
    reads: Sequence[Read],
    reference: str,
    primers: PrimerPair,
    coverages: Sequence[int] = DEFAULT_COVERAGES,
    repeats: int = 100,
    seed: int = 0,
    config: ConsensusConfig = ConsensusConfig(),
    workers: int = 1,
) -> ExperimentReport:
    """Repeat the consensus on random read subsets for each coverage.

    Only reads at least as long as the full molecule are sampled from. Trial
    r at coverage C uses a seed derived from (seed, C, r), so results do not
    depend on `workers` or on which other coverages are requested.
    """
    pool = filter_by_length(reads, min_molecule_length(len(reference), primers))
    for c in coverages:
        if c > len(pool):
            raise ValueError(f"coverage {c} exceeds the {len(pool)} reads long enough to sample from")
    jobs = [
        (pool, reference, primers, c, trial_seed(seed, c, r), config)
        for c in coverages
        for r in range(repeats)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            outcomes = list(ex.map(_run_trial_args, jobs, chunksize=4))
    else:
        outcomes = [_run_trial_args(j) for j in jobs]

    report = ExperimentReport(len(reference))
    for c in coverages:
        report.rows.append(CoverageRow(c))
    for o in outcomes:
        report.add(o)
    return report


def format_rate(rate: Optional[Fraction]) -> str:
    """Two significant digits in the tables' style: 0, 1.1e-5, and '-' when undefined."""
    if rate is None:
        return "-"
    if rate == 0:
        return "0"
    mantissa, exp = f"{float(rate):.1e}".split("e")
    return f"{mantissa}e{int(exp)}"


def format_report(report: ExperimentReport) -> str:
    lines = ["coverage\tn_seq\tn_err\terr_rate"]
    for row in sorted(report.rows, key=lambda r: -r.coverage):
        lines.append(f"{row.coverage}\t{row.n_seq}\t{row.n_err}\t{format_rate(row.err_rate(report.payload_len))}")
    return "\n".join(lines) + "\n"
