"""Lexicon-free CTC decoding over unit emissions.

Greedy decode, prefix beam search with shallow n-gram LM fusion, the
forward-algorithm sequence probability, and a brute-force oracle for small
instances. Every modeling unit is its own decoding token (the "dummy
lexicon" view), so no word lexicon is involved anywhere.

All scores are log10, matching the emission file format and the language
model. Fusion follows the usual shallow form: the ranking score of a
hypothesis is

    log10 P_ctc(prefix) + lm_weight * log10 P_lm(prefix) + insertion_bonus * len(prefix)

where the LM term conditions on the sentence-begin marker but never scores
sentence end (the frame loop, not the LM, decides when the utterance is
over). With an exhaustive beam and no pruning the search is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .ngram_lm import BOS, NGramModel

NEG_INF = float("-inf")

_LN10 = math.log(10.0)


class InfeasibleLength(ValueError):
    """The label sequence cannot be emitted in the given number of frames."""


class VocabularyMismatch(ValueError):
    """The fusion LM does not cover the emission unit alphabet."""


class InstanceTooLarge(ValueError):
    """Brute-force enumeration guard: the instance exceeds desk scale."""


def log10addexp(a: float, b: float) -> float:
    """log10(10**a + 10**b), stable for the -inf cases."""
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(10.0 ** (b - a)) / _LN10


@dataclass(frozen=True)
class EmissionMatrix:
    """T x (V+1) grid of per-frame log10 class posteriors.

    Column ``blank_index`` is the CTC blank; the remaining V columns map to
    ``unit_labels`` in order (label j sits at column j when j < blank_index,
    else at column j+1).
    """

    log_probs: np.ndarray
    unit_labels: tuple[str, ...]
    blank_index: int

    def __post_init__(self):
        lp = np.asarray(self.log_probs, dtype=np.float64)
        object.__setattr__(self, "log_probs", lp)
        object.__setattr__(self, "unit_labels", tuple(self.unit_labels))
        if lp.ndim != 2 or lp.shape[0] < 1:
            raise ValueError(f"need a T x (V+1) matrix with T >= 1, got shape {lp.shape}")
        num_units = len(self.unit_labels)
        if num_units < 1:
            raise ValueError("need at least one unit label")
        if lp.shape[1] != num_units + 1:
            raise ValueError(f"{num_units} unit labels require {num_units + 1} columns, got {lp.shape[1]}")
        if not 0 <= self.blank_index <= num_units:
            raise ValueError(f"blank_index {self.blank_index} out of range")
        row_sums = np.power(10.0, lp).sum(axis=1)
        bad = np.nonzero(np.abs(row_sums - 1.0) > 1e-5)[0]
        if bad.size:
            raise ValueError(f"row {bad[0]} sums to {row_sums[bad[0]]:.8f}, not 1")

    @property
    def num_frames(self) -> int:
        return self.log_probs.shape[0]

    @property
    def num_units(self) -> int:
        return len(self.unit_labels)

    def class_of_unit(self, unit_index: int) -> int:
        return unit_index if unit_index < self.blank_index else unit_index + 1

    def unit_of_class(self, class_index: int) -> int:
        """Unit index for a non-blank class column."""
        if class_index == self.blank_index:
            raise ValueError("blank class has no unit")
        return class_index if class_index < self.blank_index else class_index - 1


def collapse_alignment(frames: Sequence[int], blank: int) -> list[int]:
    """Standard CTC collapse: merge adjacent repeats, then delete blanks."""
    out: list[int] = []
    previous = None
    for label in frames:
        if label != previous:
            if label != blank:
                out.append(label)
            previous = label
    return out


def greedy_decode(emissions: EmissionMatrix) -> list[str]:
    """Per-frame argmax (ties go to the lower class index) then collapse."""
    frames = np.argmax(emissions.log_probs, axis=1)
    collapsed = collapse_alignment(frames.tolist(), emissions.blank_index)
    return [emissions.unit_labels[emissions.unit_of_class(c)] for c in collapsed]


def min_frames_required(labels: Sequence) -> int:
    """Frames a label sequence needs: one per label plus a blank between
    adjacent repeats."""
    repeats = sum(1 for i in range(1, len(labels)) if labels[i] == labels[i - 1])
    return len(labels) + repeats


def sequence_logprob(emissions: EmissionMatrix, labels: Sequence[str]) -> float:
    """log10 of the total probability mass of alignments collapsing to
    ``labels`` (the CTC forward algorithm)."""
    label_to_unit = {u: i for i, u in enumerate(emissions.unit_labels)}
    try:
        units = [label_to_unit[lab] for lab in labels]
    except KeyError as exc:
        raise VocabularyMismatch(f"label {exc.args[0]!r} is not an emission unit") from None
    T = emissions.num_frames
    if min_frames_required(units) > T:
        raise InfeasibleLength(f"{len(units)} labels need {min_frames_required(units)} frames, have {T}")

    blank = emissions.blank_index
    # Expanded state sequence: blank, l1, blank, l2, ..., blank.
    expanded = [blank]
    for u in units:
        expanded.append(emissions.class_of_unit(u))
        expanded.append(blank)
    S = len(expanded)
    rows = emissions.log_probs.tolist()

    alpha = [NEG_INF] * S
    alpha[0] = rows[0][expanded[0]]
    if S > 1:
        alpha[1] = rows[0][expanded[1]]
    for t in range(1, T):
        row = rows[t]
        new = [NEG_INF] * S
        for s in range(S):
            best = alpha[s]
            if s >= 1:
                best = log10addexp(best, alpha[s - 1])
            # Skip a blank only between distinct labels.
            if s >= 2 and expanded[s] != blank and expanded[s] != expanded[s - 2]:
                best = log10addexp(best, alpha[s - 2])
            if best != NEG_INF:
                new[s] = best + row[expanded[s]]
        alpha = new
    total = alpha[S - 1]
    if S > 1:
        total = log10addexp(total, alpha[S - 2])
    return total


@dataclass(frozen=True)
class DecoderConfig:
    """Beam search knobs. ``prune_threshold`` is a per-frame log10 floor;
    classes at or below it are not extended (the default skips only
    zero-probability classes)."""

    beam_width: int = 8
    lm_weight: float = 0.5
    insertion_bonus: float = 0.0
    prune_threshold: float = NEG_INF

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError(f"beam_width must be >= 1, got {self.beam_width}")
        if self.lm_weight < 0:
            raise ValueError(f"lm_weight must be >= 0, got {self.lm_weight}")


def prefix_beam_search(
    emissions: EmissionMatrix,
    lm: NGramModel | None,
    config: DecoderConfig = DecoderConfig(),
) -> list[tuple[tuple[str, ...], float]]:
    """CTC prefix beam search with optional shallow LM fusion.

    Returns up to ``beam_width`` (unit sequence, fused score) pairs, best
    first; ties sort by the unit strings so output is deterministic. Each
    prefix tracks separate blank/non-blank ending masses, and extension by a
    unit adds its fused LM/bonus contribution exactly once.
    """
    if lm is not None:
        missing = [u for u in emissions.unit_labels if u not in lm.vocabulary]
        if missing:
            raise VocabularyMismatch(f"units absent from LM vocabulary: {missing[:5]}")

    alpha = config.lm_weight if lm is not None else 0.0
    beta = config.insertion_bonus
    order = lm.order if lm is not None else 1

    labels = emissions.unit_labels
    blank = emissions.blank_index

    # prefix (tuple of unit indices) -> [p_blank, p_nonblank]
    beam: dict[tuple[int, ...], list[float]] = {(): [0.0, NEG_INF]}
    # prefix -> (cumulative lm log10, lm context tuple); grows append-only.
    lm_cache: dict[tuple[int, ...], tuple[float, tuple[str, ...]]] = {(): (0.0, (BOS,))}

    def fused(prefix: tuple[int, ...], masses: list[float]) -> float:
        total = log10addexp(masses[0], masses[1])
        return total + alpha * lm_cache[prefix][0] + beta * len(prefix)

    def extend_meta(prefix: tuple[int, ...], unit: int) -> None:
        child = prefix + (unit,)
        if child in lm_cache:
            return
        cum, ctx = lm_cache[prefix]
        token = labels[unit]
        if lm is not None:
            cum = cum + lm.score_token(ctx, token)
            ctx = (ctx + (token,))[-(order - 1):] if order > 1 else ()
        lm_cache[child] = (cum, ctx)

    for row in emissions.log_probs:
        active = [int(c) for c in np.nonzero(row > config.prune_threshold)[0]]
        next_beam: dict[tuple[int, ...], list[float]] = {}

        def bump(prefix: tuple[int, ...], slot: int, value: float) -> None:
            masses = next_beam.get(prefix)
            if masses is None:
                masses = [NEG_INF, NEG_INF]
                next_beam[prefix] = masses
            masses[slot] = log10addexp(masses[slot], value)

        for prefix, (p_b, p_nb) in beam.items():
            total = log10addexp(p_b, p_nb)
            for class_index in active:
                score = row[class_index]
                if class_index == blank:
                    bump(prefix, 0, total + score)
                    continue
                unit = emissions.unit_of_class(class_index)
                if prefix and prefix[-1] == unit:
                    # Repeat merges unless a blank separated it.
                    bump(prefix, 1, p_nb + score)
                    if p_b != NEG_INF:
                        extend_meta(prefix, unit)
                        bump(prefix + (unit,), 1, p_b + score)
                else:
                    extend_meta(prefix, unit)
                    bump(prefix + (unit,), 1, total + score)

        ranked = sorted(
            next_beam.items(),
            key=lambda item: (-fused(item[0], item[1]), tuple(labels[u] for u in item[0])),
        )
        beam = dict(ranked[: config.beam_width])

    results = sorted(
        ((tuple(labels[u] for u in prefix), fused(prefix, masses)) for prefix, masses in beam.items()),
        key=lambda item: (-item[1], item[0]),
    )
    return results[: config.beam_width]


def brute_force_decode(
    emissions: EmissionMatrix,
    lm: NGramModel | None = None,
    lm_weight: float = 0.5,
    insertion_bonus: float = 0.0,
) -> tuple[tuple[str, ...], float]:
    """Exact argmax of the fused score over every feasible label sequence.

    Test oracle only: enumerates all sequences up to length T, so the
    instance must satisfy T <= 8 and V <= 5.
    """
    T, V = emissions.num_frames, emissions.num_units
    if T > 8 or V > 5:
        raise InstanceTooLarge(f"T={T}, V={V} exceeds the T<=8, V<=5 oracle guard")
    alpha = lm_weight if lm is not None else 0.0
    beta = insertion_bonus

    best_labels: tuple[str, ...] | None = None
    best_score = NEG_INF
    for length in range(0, T + 1):
        for combo in product(range(V), repeat=length):
            if min_frames_required(combo) > T:
                continue
            labels = tuple(emissions.unit_labels[u] for u in combo)
            score = sequence_logprob(emissions, labels)
            if alpha != 0.0:
                score += alpha * lm.score_sequence(labels, include_eos=False)
            score += beta * length
            if best_labels is None or score > best_score or (score == best_score and labels < best_labels):
                best_labels = labels
                best_score = score
    assert best_labels is not None
    return best_labels, best_score


def write_emissions(emissions: EmissionMatrix, sink) -> None:
    """Text form: ``T V blank_index`` header, the unit-label line, then T
    rows of V+1 log10 probabilities."""
    for label in emissions.unit_labels:
        if " " in label:
            raise ValueError(f"unit label {label!r} contains a space")
    sink.write(f"{emissions.num_frames} {emissions.num_units} {emissions.blank_index}\n")
    sink.write(" ".join(emissions.unit_labels) + "\n")
    for row in emissions.log_probs:
        sink.write(" ".join(repr(float(v)) for v in row) + "\n")


def read_emissions(source) -> EmissionMatrix:
    lines = source.read().splitlines() if hasattr(source, "read") else [l.rstrip("\n") for l in source]
    if len(lines) < 2:
        raise ValueError("emission file needs a header line and a label line")
    header = lines[0].split()
    if len(header) != 3:
        raise ValueError(f"bad header {lines[0]!r}, expected 'T V blank_index'")
    T, V, blank_index = (int(x) for x in header)
    unit_labels = tuple(lines[1].split())
    if len(unit_labels) != V:
        raise ValueError(f"header declares {V} units, label line has {len(unit_labels)}")
    if len(lines) < 2 + T:
        raise ValueError(f"header declares {T} frames, file has {len(lines) - 2} rows")
    rows = [[float(v) for v in lines[2 + t].split()] for t in range(T)]
    return EmissionMatrix(log_probs=np.array(rows), unit_labels=unit_labels, blank_index=blank_index)
