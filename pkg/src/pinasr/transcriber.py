"""Pinyin-to-Hanzi transcription via homophone lattices and a character LM.

Each input unit selects the lexicon characters that can sound like it; the
decoder then finds the character path maximizing

    log10 P_lm(path) + channel_weight * sum(log10 P(unit | char))

with the LM scored like a sentence (begin and end markers included). The
Viterbi search is exact: its state is the last order-1 characters, which is
all the LM can see. ``beam_transcribe`` is the bounded-memory variant and
degenerates to exact search when the beam covers every state.

Ties anywhere break toward the lexicographically smaller character
sequence, so results are deterministic and enumeration-checkable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .ngram_lm import BOS, EOS, NGramModel
from .pinyin import PronunciationLexicon, Syllable

import math


class NoCandidate(ValueError):
    """A unit matched no lexicon character."""

    def __init__(self, unit: str, position: int):
        super().__init__(f"no homophone candidates for {unit!r} at position {position}")
        self.unit = unit
        self.position = position


@dataclass(frozen=True)
class HomophoneLattice:
    """Per-position candidate sets of (character, log10 channel weight)."""

    units: tuple[str, ...]
    positions: tuple[tuple[tuple[str, float], ...], ...]

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class TranscriptionResult:
    hanzi: str
    total_score: float
    alternatives: tuple[tuple[str, float], ...] | None = None


def build_lattice(
    pinyin: Sequence[Syllable | str],
    lexicon: PronunciationLexicon,
    tonal: bool = True,
) -> HomophoneLattice:
    """Match each unit against the lexicon's (tonal or tone-stripped)
    readings. Raises NoCandidate with the offending position."""
    units = tuple(str(s) for s in pinyin)
    positions = []
    for index, unit in enumerate(units):
        matches = lexicon.homophones(unit, tonal=tonal)
        if not matches:
            raise NoCandidate(unit, index)
        positions.append(tuple((char, math.log10(p)) for char, p in matches))
    return HomophoneLattice(units=units, positions=tuple(positions))


def build_lattice_lenient(
    pinyin: Sequence[Syllable | str],
    lexicon: PronunciationLexicon,
    tonal: bool = True,
) -> HomophoneLattice:
    """Like :func:`build_lattice`, but recognition errors never kill the
    utterance: a tonal unit with no homophones falls back to its toneless
    candidates (the tone was probably misrecognized), and a unit whose
    segment is entirely unknown falls back to the lexicon's most frequent
    character with a flat penalty. Length is always preserved."""
    units = tuple(str(s) for s in pinyin)
    fallback_char: str | None = None
    positions = []
    for unit in units:
        matches = lexicon.homophones(unit, tonal=tonal)
        if not matches and tonal and unit[-1].isdigit():
            matches = lexicon.homophones(unit[:-1], tonal=False)
        if matches:
            positions.append(tuple((char, math.log10(p)) for char, p in matches))
            continue
        if fallback_char is None:
            fallback_char = max(
                lexicon.characters,
                key=lambda c: (sum(w for _, w in lexicon.readings(c)), c),
            )
        positions.append(((fallback_char, -3.0),))
    return HomophoneLattice(units=units, positions=tuple(positions))


def _search(
    lattice: HomophoneLattice,
    char_lm: NGramModel,
    channel_weight: float,
    beam_width: int | None,
) -> list[tuple[tuple[str, ...], float]]:
    """Shared DP over lattice paths; state = LM context tuple.

    Keeping, per state, the single best (score, lexicographically smallest)
    prefix is exact because any two paths meeting in a state share their
    future scores. ``beam_width=None`` disables pruning.
    """
    ctx_len = char_lm.order - 1
    # state -> (score, prefix)
    initial: tuple[str, ...] = (BOS,) if ctx_len else ()
    states: dict[tuple[str, ...], tuple[float, tuple[str, ...]]] = {initial: (0.0, ())}
    for candidates in lattice.positions:
        new_states: dict[tuple[str, ...], tuple[float, tuple[str, ...]]] = {}
        for ctx, (score, prefix) in states.items():
            for char, weight in candidates:
                gained = char_lm.score_token(ctx, char) + channel_weight * weight
                entry = (score + gained, prefix + (char,))
                new_ctx = (ctx + (char,))[-ctx_len:] if ctx_len else ()
                held = new_states.get(new_ctx)
                if held is None or entry[0] > held[0] or (entry[0] == held[0] and entry[1] < held[1]):
                    new_states[new_ctx] = entry
        if beam_width is not None and len(new_states) > beam_width:
            ranked = sorted(new_states.items(), key=lambda item: (-item[1][0], item[1][1]))
            new_states = dict(ranked[:beam_width])
        states = new_states
    finals = [
        (score + char_lm.score_token(ctx, EOS), prefix)
        for ctx, (score, prefix) in states.items()
    ]
    finals.sort(key=lambda item: (-item[0], item[1]))
    return [(prefix, score) for score, prefix in finals]


def viterbi_transcribe(
    lattice: HomophoneLattice,
    char_lm: NGramModel,
    channel_weight: float = 1.0,
) -> TranscriptionResult:
    """Exact argmax over lattice paths."""
    ranked = _search(lattice, char_lm, channel_weight, beam_width=None)
    prefix, score = ranked[0]
    return TranscriptionResult(hanzi="".join(prefix), total_score=score)


def beam_transcribe(
    lattice: HomophoneLattice,
    char_lm: NGramModel,
    channel_weight: float = 1.0,
    beam_width: int = 16,
) -> list[TranscriptionResult]:
    """Beam-limited search returning an n-best list (non-increasing scores).

    The rank-1 result carries the remaining hypotheses in ``alternatives``.
    """
    if beam_width < 1:
        raise ValueError(f"beam_width must be >= 1, got {beam_width}")
    ranked = _search(lattice, char_lm, channel_weight, beam_width=beam_width)
    ranked = ranked[:beam_width]
    results = [TranscriptionResult(hanzi="".join(p), total_score=s) for p, s in ranked]
    if results:
        alts = tuple((r.hanzi, r.total_score) for r in results[1:])
        results[0] = TranscriptionResult(
            hanzi=results[0].hanzi, total_score=results[0].total_score, alternatives=alts
        )
    return results
