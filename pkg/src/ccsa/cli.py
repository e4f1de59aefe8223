"""Command line entry point: ``ccsa consensus | simulate | evaluate``.

Exit status: 0 success (including zero candidates), 1 usage or parse
error, 2 pipeline failure (no usable reads, no connected anchored graph).
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import __version__
from .errors import ParseError, PipelineError
from .harness import DEFAULT_COVERAGES, format_report, run_coverage_experiment
from .pipeline import ConsensusConfig, run_consensus
from .preprocess import PrimerPair, min_molecule_length
from .seqio import NamedSequence, format_fasta, parse_fastq, read_single_fasta, write_fasta_consensus
from .simulate import ErrorModel, MoleculeSpec, generate_reference, simulate_dataset, simulate_reads

log = logging.getLogger("ccsa")

EXIT_USAGE = 1
EXIT_PIPELINE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_primers(p):
    p.add_argument("--left", required=True, help="left surrounding sequence (FASTA)")
    p.add_argument("--right", required=True, help="right surrounding sequence (FASTA)")


def _add_graph_opts(p):
    g = p.add_argument_group("graph and search")
    g.add_argument("--kmax", type=int, default=ConsensusConfig.k_max)
    g.add_argument("--kmin", type=int, default=ConsensusConfig.k_min)
    g.add_argument("--solid-threshold", type=int, default=None, help="T; default max(1, reads // 10)")
    g.add_argument("--min-overlap", type=int, default=None, help="L; default floor(2K/3)")
    g.add_argument("--pos-gap", type=int, default=None, help="position cluster gap D; default K")
    g.add_argument("--k-anchor", type=int, default=ConsensusConfig.k_anchor)
    g.add_argument("--slack", type=int, default=ConsensusConfig.slack)


def _add_error_model(p):
    p.add_argument("--p-sub", type=float, default=0.03)
    p.add_argument("--p-ins", type=float, default=0.03)
    p.add_argument("--p-del", type=float, default=0.03)


def _config(args) -> ConsensusConfig:
    return ConsensusConfig(
        k_max=args.kmax, k_min=args.kmin, solid_threshold=args.solid_threshold,
        min_overlap=args.min_overlap, pos_gap=args.pos_gap, k_anchor=args.k_anchor, slack=args.slack,
    )


def _primers(args) -> PrimerPair:
    return PrimerPair(read_single_fasta(args.left), read_single_fasta(args.right))


def _write(data: bytes, out: Optional[str]) -> None:
    if out and out != "-":
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def cmd_consensus(args) -> int:
    primers = _primers(args)
    reads = parse_fastq(args.reads)
    log.info("length threshold: %d nt (payload %d + primers %d)",
             min_molecule_length(args.length, primers), args.length, primers.total)
    run = run_consensus(reads, primers, args.length, _config(args))
    if args.graph_dump:
        with open(args.graph_dump, "w") as fh:
            fh.write(run.graph.dump())
    _write(write_fasta_consensus(run.candidates), args.out)
    return 0


def _parse_sim_spec(text: str) -> dict:
    """``sim:n=1000,hp_cap=2,p_sub=0.03,p_ins=0.03,p_del=0.03,seed=1``"""
    opts = {"n": 1000, "hp_cap": 3, "p_sub": 0.03, "p_ins": 0.03, "p_del": 0.03, "seed": 0}
    body = text[len("sim:"):]
    for item in filter(None, body.split(",")):
        key, _, value = item.partition("=")
        if key not in opts:
            raise UsageError(f"unknown simulate-spec key {key!r}")
        try:
            opts[key] = type(opts[key])(value)
        except ValueError:
            raise UsageError(f"bad value for {key}: {value!r}") from None
    return opts


def cmd_simulate(args) -> int:
    primers = _primers(args)
    spec = MoleculeSpec(args.payload_len, args.hp_cap, primers)
    if args.reference:
        payload = read_single_fasta(args.reference)
        spec = MoleculeSpec(len(payload), args.hp_cap, primers)
    else:
        payload = generate_reference(spec, args.seed)
    if args.reference_out:
        with open(args.reference_out, "wb") as fh:
            fh.write(format_fasta([NamedSequence(f"payload seed={args.seed} len={len(payload)}", payload)]))
    model = ErrorModel(args.p_sub, args.p_ins, args.p_del)
    _write(simulate_dataset(spec, model, args.n_reads, args.seed, payload=payload), args.out)
    return 0


def cmd_evaluate(args) -> int:
    primers = _primers(args)
    if args.reads.startswith("sim:"):
        opts = _parse_sim_spec(args.reads)
        if args.reference:
            reference = read_single_fasta(args.reference)
        else:
            reference = generate_reference(MoleculeSpec(args.length, opts["hp_cap"], primers), opts["seed"])
        model = ErrorModel(opts["p_sub"], opts["p_ins"], opts["p_del"])
        molecule = primers.left + reference + primers.right
        reads = simulate_reads(molecule, model, opts["n"], opts["seed"])
    else:
        if not args.reference:
            raise UsageError("--reference is required when --reads is a FASTQ file")
        reference = read_single_fasta(args.reference)
        reads = parse_fastq(args.reads)
    if len(reference) != args.length:
        raise UsageError(f"--length {args.length} does not match the reference length {len(reference)}")
    report = run_coverage_experiment(
        reads, reference, primers, args.coverages, args.repeats, args.seed, _config(args), workers=args.workers
    )
    _write(format_report(report).encode(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ccsa", description="Constrained consensus of noisy reads for DNA storage.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("consensus", parents=[common], help="consensus sequences from a FASTQ of grouped reads")
    p.add_argument("--reads", required=True, help="FASTQ")
    _add_primers(p)
    p.add_argument("--length", type=int, required=True, help="expected payload length P")
    _add_graph_opts(p)
    p.add_argument("--graph-dump", help="write the chosen overlap graph as an edge list")
    p.add_argument("--out", help="FASTA output (default stdout)")
    p.set_defaults(func=cmd_consensus)

    p = sub.add_parser("simulate", parents=[common], help="noisy reads of a random or given payload between primers")
    _add_primers(p)
    p.add_argument("--payload-len", type=int, default=900)
    p.add_argument("--hp-cap", type=int, default=3)
    p.add_argument("--reference", help="payload FASTA to use instead of a random one")
    p.add_argument("--reference-out", help="write the payload used to this FASTA file")
    p.add_argument("--n-reads", type=int, default=100)
    _add_error_model(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="FASTQ output (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", parents=[common], help="coverage sweep scored against a known payload; TSV report")
    p.add_argument("--reads", required=True, help="FASTQ file, or sim:key=value,... to simulate the pool")
    p.add_argument("--reference", help="payload FASTA (required with a FASTQ pool)")
    _add_primers(p)
    p.add_argument("--length", type=int, required=True, help="expected payload length P")
    p.add_argument("--coverages", type=_csv_ints, default=list(DEFAULT_COVERAGES))
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _add_graph_opts(p)
    p.add_argument("--out", help="TSV output (default stdout)")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ParseError, UsageError, ValueError, OSError) as exc:
        print(f"ccsa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PipelineError as exc:
        print(f"ccsa: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
