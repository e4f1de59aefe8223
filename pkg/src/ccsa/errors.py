class CCSAError(Exception):
    """Base class for every error raised by the package."""


class ParseError(CCSAError, ValueError):
    """Malformed FASTA/FASTQ input."""


class PipelineError(CCSAError):
    """A consensus stage could not produce a usable result (no reads, no graph, no anchors)."""
