import random
import statistics

import pytest

from ccsa.harness import count_errors
from ccsa.preprocess import PrimerPair
from ccsa.seqio import parse_fastq
from ccsa.simulate import (
    ErrorModel,
    MoleculeSpec,
    generate_reference,
    mutate_read,
    read_seed,
    simulate_dataset,
    simulate_reads,
)
from oracles import max_run


def junction_runs(left, payload, right):
    """Run lengths of the symbol runs that straddle each primer junction."""
    mol = left + payload + right
    out = []
    for j in (len(left), len(left) + len(payload)):
        c = mol[j]
        a = j
        while a > 0 and mol[a - 1] == c:
            a -= 1
        b = j
        while b < len(mol) and mol[b] == c:
            b += 1
        out.append(b - a)
    return out


def test_cap_one_alternates(primers):
    payload = generate_reference(MoleculeSpec(500, 1, primers), seed=2)
    assert all(a != b for a, b in zip(payload, payload[1:]))
    assert primers.left[-1] != payload[0] and payload[-1] != primers.right[0]


def test_cap_three_over_many_seeds(primers):
    spec = MoleculeSpec(900, 3, primers)
    for seed in range(1000):
        payload = generate_reference(spec, seed)
        assert len(payload) == 900
        assert max_run(payload) <= 3
        assert max(junction_runs(primers.left, payload, primers.right)) <= 3


def test_cap_two_mirrors_u2_900_3(u2_900_3):
    assert max_run(u2_900_3.reference) == 2
    spec = MoleculeSpec(916, 2, u2_900_3.primers)
    for seed in range(50):
        payload = generate_reference(spec, seed)
        assert max_run(payload) <= 2
        assert max(junction_runs(spec.primers.left, payload, spec.primers.right)) <= 2


def test_junction_cap_with_awkward_primers():
    primers = PrimerPair("ACGTTT", "TTACGT")
    for seed in range(200):
        payload = generate_reference(MoleculeSpec(30, 3, primers), seed)
        assert max_run(primers.left + payload + primers.right) <= 3


def test_reference_is_seeded(primers):
    spec = MoleculeSpec(300, 3, primers)
    assert generate_reference(spec, 4) == generate_reference(spec, 4)
    assert generate_reference(spec, 4) != generate_reference(spec, 5)


def test_zero_rates_identity():
    mol = "ACGTTGCA" * 20
    assert mutate_read(mol, ErrorModel.noiseless(), 3).seq == mol


def test_full_deletion_gives_empty_read():
    assert mutate_read("ACGT" * 10, ErrorModel(0, 0, 1.0), 3).seq == ""


def test_error_model_validation():
    with pytest.raises(ValueError):
        ErrorModel(0.6, 0.0, 0.6)
    with pytest.raises(ValueError):
        ErrorModel(-0.1, 0, 0)
    with pytest.raises(ValueError):
        MoleculeSpec(0, 3, PrimerPair("ACGT", "ACGT"))


def test_mean_edit_distance_matches_event_rate():
    rng = random.Random(21)
    mol = "".join(rng.choice("ACGT") for _ in range(1000))
    p = 0.03
    reads = simulate_reads(mol, ErrorModel(p, p, p), 10_000, seed=8)
    # deletions, substitutions, and insertions after each surviving base
    expected = len(mol) * (p + p + (1 - p) * p)
    mean = statistics.mean(count_errors(r.seq, mol) for r in reads)
    assert abs(mean - expected) <= 0.05 * expected


def test_dataset_zero_rates(primers):
    spec = MoleculeSpec(200, 3, primers)
    reads = parse_fastq(simulate_dataset(spec, ErrorModel.noiseless(), 20, seed=1))
    mol = primers.left + generate_reference(spec, 1) + primers.right
    assert len(reads) == 20
    assert all(r.seq == mol for r in reads)


def test_dataset_deterministic(primers):
    spec = MoleculeSpec(200, 3, primers)
    a = simulate_dataset(spec, ErrorModel(), 30, seed=9)
    assert a == simulate_dataset(spec, ErrorModel(), 30, seed=9)
    assert a != simulate_dataset(spec, ErrorModel(), 30, seed=10)


def test_reads_reproducible_in_isolation(primers):
    mol = primers.left + "ACGT" * 50 + primers.right
    reads = simulate_reads(mol, ErrorModel(), 12, seed=77)
    assert mutate_read(mol, ErrorModel(), read_seed(77, 11), read_id="sim77_11") == reads[11]


def test_mean_read_length(primers):
    spec = MoleculeSpec(900, 3, primers)
    reads = parse_fastq(simulate_dataset(spec, ErrorModel(), 100, seed=12))
    mol_len = 900 + primers.total
    assert abs(statistics.mean(len(r) for r in reads) - mol_len) <= 0.02 * mol_len
