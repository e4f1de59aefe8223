"""Constrained consensus of noisy long reads for DNA-storage decoding."""

__version__ = "0.1.0"

from .errors import CCSAError, ParseError, PipelineError
from .harness import ExperimentReport, count_errors, format_report, run_coverage_experiment
from .kog import (
    KmerOverlapGraph,
    KmerParams,
    PositionedKmer,
    build_overlap_graph,
    count_weak_components,
    extract_solid_kmers,
    make_kog,
)
from .pathsearch import (
    AnchorSelection,
    ConsensusCandidate,
    PathTable,
    layered_path_search,
    reconstruct_consensus,
    select_anchors,
)
from .pipeline import ConsensusConfig, consensus_pipeline, run_consensus
from .preprocess import PrimerPair, TrimmedRead, anchor_trim, filter_by_length
from .seqio import NamedSequence, Read, parse_fasta, parse_fastq, write_fasta_consensus
from .simulate import ErrorModel, MoleculeSpec, generate_reference, mutate_read, simulate_dataset
