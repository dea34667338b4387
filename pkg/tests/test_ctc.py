import io
import math

import numpy as np
import pytest

from pinasr.ctc import (
    DecoderConfig,
    EmissionMatrix,
    InfeasibleLength,
    InstanceTooLarge,
    VocabularyMismatch,
    brute_force_decode,
    collapse_alignment,
    greedy_decode,
    log10addexp,
    min_frames_required,
    prefix_beam_search,
    read_emissions,
    sequence_logprob,
    write_emissions,
)
from pinasr.ngram_lm import train
from reference_impls import enumerate_ctc_distribution

NEG_INF = float("-inf")


def random_emissions(rng, T, V, labels="abcde"):
    probs = rng.dirichlet(np.ones(V + 1), size=T)
    return EmissionMatrix(np.log10(probs), tuple(labels[:V]), blank_index=V)


def one_hot_emissions(classes, V, labels="abcde"):
    grid = np.full((len(classes), V + 1), NEG_INF)
    for t, c in enumerate(classes):
        grid[t, c] = 0.0
    return EmissionMatrix(grid, tuple(labels[:V]), blank_index=V)


@pytest.fixture(scope="module")
def fusion_lm():
    corpus = [["a", "b"], ["b", "a"], ["a", "b", "a"], ["c"]]
    return train(corpus, order=2, discount=0.6, vocabulary=list("abcde"))


def test_collapse_rules():
    assert collapse_alignment([0, 0, 2, 1], blank=2) == [0, 1]
    assert collapse_alignment([2, 2], blank=2) == []
    assert collapse_alignment([0, 2, 0], blank=2) == [0, 0]
    assert collapse_alignment([], blank=0) == []


def test_log10addexp():
    assert log10addexp(NEG_INF, NEG_INF) == NEG_INF
    assert log10addexp(0.0, NEG_INF) == 0.0
    assert log10addexp(math.log10(0.25), math.log10(0.75)) == pytest.approx(0.0, abs=1e-12)


def test_emission_matrix_validation():
    with pytest.raises(ValueError, match="sums to"):
        EmissionMatrix(np.log10([[0.6, 0.6]]), ("a",), blank_index=1)
    with pytest.raises(ValueError, match="blank_index"):
        EmissionMatrix(np.log10([[0.5, 0.5]]), ("a",), blank_index=2)
    with pytest.raises(ValueError, match="columns"):
        EmissionMatrix(np.log10([[0.5, 0.5]]), ("a", "b"), blank_index=1)


def test_greedy_one_hot():
    e = one_hot_emissions([0, 0, 2, 1], V=2)
    assert greedy_decode(e) == ["a", "b"]
    assert greedy_decode(one_hot_emissions([2, 2], V=2)) == []
    assert greedy_decode(one_hot_emissions([0], V=2)) == ["a"]


def test_greedy_tie_breaks_low_class():
    e = EmissionMatrix(np.log10([[0.4, 0.4, 0.2]]), ("a", "b"), blank_index=2)
    assert greedy_decode(e) == ["a"]


def test_sequence_logprob_single_frame_uniform():
    e = EmissionMatrix(np.log10([[0.5, 0.5]]), ("a",), blank_index=1)
    assert sequence_logprob(e, ["a"]) == pytest.approx(math.log10(0.5), abs=1e-12)
    assert sequence_logprob(e, []) == pytest.approx(math.log10(0.5), abs=1e-12)


def test_sequence_logprob_infeasible():
    e = EmissionMatrix(np.log10([[0.5, 0.5], [0.5, 0.5]]), ("a",), blank_index=1)
    with pytest.raises(InfeasibleLength):
        sequence_logprob(e, ["a", "a", "a"])
    # repeated labels need a separating blank frame
    with pytest.raises(InfeasibleLength):
        sequence_logprob(e, ["a", "a"])
    with pytest.raises(VocabularyMismatch):
        sequence_logprob(e, ["zz"])


def test_min_frames_required():
    assert min_frames_required([]) == 0
    assert min_frames_required(["a", "b"]) == 2
    assert min_frames_required(["a", "a", "b"]) == 4


def test_forward_matches_path_enumeration():
    rng = np.random.default_rng(5)
    for _ in range(12):
        T, V = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        e = random_emissions(rng, T, V)
        table = enumerate_ctc_distribution(e)
        for labels, want in table.items():
            assert 10.0 ** sequence_logprob(e, list(labels)) == pytest.approx(want, abs=1e-12)


def test_total_probability_is_one():
    rng = np.random.default_rng(6)
    for _ in range(12):
        T, V = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        e = random_emissions(rng, T, V)
        total = sum(enumerate_ctc_distribution(e).values())
        assert total == pytest.approx(1.0, abs=1e-9)


def test_beam_spells_clean_sequence(fusion_lm):
    e = one_hot_emissions([0, 2, 1, 2, 0], V=2)
    for lm, alpha in ((None, 0.0), (fusion_lm, 0.8)):
        top = prefix_beam_search(e, lm, DecoderConfig(beam_width=4, lm_weight=alpha))
        assert top[0][0] == ("a", "b", "a")


def test_exhaustive_beam_matches_brute_force(fusion_lm):
    rng = np.random.default_rng(7)
    for trial in range(40):
        T, V = int(rng.integers(1, 7)), int(rng.integers(1, 5))
        e = random_emissions(rng, T, V)
        for lm, alpha, beta in ((None, 0.0, 0.0), (fusion_lm, 0.6, 0.2)):
            config = DecoderConfig(beam_width=10**6, lm_weight=alpha, insertion_bonus=beta)
            got = prefix_beam_search(e, lm, config)[0]
            want_labels, want_score = brute_force_decode(e, lm, alpha, beta)
            assert got[0] == want_labels, trial
            assert got[1] == pytest.approx(want_score, abs=1e-9)


def test_beam_monotone_in_width(fusion_lm):
    rng = np.random.default_rng(8)
    e = random_emissions(rng, 6, 4)
    previous = NEG_INF
    for width in (1, 2, 4, 8, 32, 10**6):
        config = DecoderConfig(beam_width=width, lm_weight=0.4)
        score = prefix_beam_search(e, fusion_lm, config)[0][1]
        assert score >= previous - 1e-12
        previous = score


def test_lm_off_reduction(fusion_lm):
    rng = np.random.default_rng(9)
    e = random_emissions(rng, 5, 3)
    other = train([["c", "c"]], order=1, discount=0.4, vocabulary=list("abcde"))
    config = DecoderConfig(beam_width=6, lm_weight=0.0, insertion_bonus=0.0)
    assert prefix_beam_search(e, fusion_lm, config) == prefix_beam_search(e, other, config)


def test_lm_weight_flips_ranking_at_threshold():
    # Frame 1 fixes 'a'; frame 2 splits 0.4/0.6 between 'b' and 'c'. The LM
    # prefers "a b", so rank 1 flips from (a,c) to (a,b) once the fusion
    # weight crosses the closed-form break-even point.
    grid = np.full((2, 4), NEG_INF)
    grid[0, 0] = 0.0
    grid[1, 1] = math.log10(0.4)
    grid[1, 2] = math.log10(0.6)
    e = EmissionMatrix(grid, ("a", "b", "c"), blank_index=3)
    lm = train([["a", "b"]] * 9 + [["a", "c"]], order=2, discount=0.5, vocabulary=list("abc"))
    delta_acoustic = math.log10(0.6) - math.log10(0.4)
    delta_lm = lm.score_token(["a"], "b") - lm.score_token(["a"], "c")
    assert delta_lm > 0
    threshold = delta_acoustic / delta_lm
    config = DecoderConfig(beam_width=16, lm_weight=threshold * 0.9)
    assert prefix_beam_search(e, lm, config)[0][0] == ("a", "c")
    config = DecoderConfig(beam_width=16, lm_weight=threshold * 1.1)
    assert prefix_beam_search(e, lm, config)[0][0] == ("a", "b")


def test_vocabulary_mismatch_raised(fusion_lm):
    e = one_hot_emissions([0], V=2, labels=("a", "zz"))
    with pytest.raises(VocabularyMismatch):
        prefix_beam_search(e, fusion_lm, DecoderConfig(beam_width=2))


def test_brute_force_guard():
    rng = np.random.default_rng(10)
    with pytest.raises(InstanceTooLarge):
        brute_force_decode(random_emissions(rng, 9, 2))
    with pytest.raises(InstanceTooLarge):
        brute_force_decode(EmissionMatrix(
            np.log10(rng.dirichlet(np.ones(7), size=2)), tuple("abcdef"), blank_index=6
        ))


def test_brute_force_agrees_with_greedy_on_one_hot():
    e = one_hot_emissions([0, 2, 1], V=2)
    labels, score = brute_force_decode(e)
    assert list(labels) == greedy_decode(e)
    assert score == pytest.approx(0.0, abs=1e-12)


def test_decoder_config_validation():
    with pytest.raises(ValueError):
        DecoderConfig(beam_width=0)
    with pytest.raises(ValueError):
        DecoderConfig(lm_weight=-0.1)


def test_emission_file_round_trip():
    rng = np.random.default_rng(11)
    e = random_emissions(rng, 4, 3)
    buf = io.StringIO()
    write_emissions(e, buf)
    back = read_emissions(io.StringIO(buf.getvalue()))
    assert back.unit_labels == e.unit_labels
    assert back.blank_index == e.blank_index
    assert np.array_equal(back.log_probs, e.log_probs)
    header = buf.getvalue().splitlines()[0]
    assert header == f"{e.num_frames} {e.num_units} {e.blank_index}"


def test_emission_file_handles_neg_inf():
    e = one_hot_emissions([0, 2], V=2)
    buf = io.StringIO()
    write_emissions(e, buf)
    back = read_emissions(io.StringIO(buf.getvalue()))
    assert np.array_equal(back.log_probs, e.log_probs)


def test_emission_file_rejects_bad_header():
    with pytest.raises(ValueError):
        read_emissions(io.StringIO("1 2\nx y\n0 0 0\n"))
