"""Text-corpus ingestion: length/exclusion filtering and Hanzi-pinyin pairing."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .pinyin import (
    PronunciationLexicon,
    Syllable,
    SyllableInventory,
    UnknownCharacter,
    hanzi_to_pinyin,
    parse_syllable,
)


class EmptyCorpus(ValueError):
    """An operation that needs data was given none."""


_HANZI_RE = re.compile(r"[一-鿿]+")


def normalize_hanzi(line: str) -> str:
    """Keep only CJK unified ideographs; whitespace and punctuation drop out."""
    return "".join(_HANZI_RE.findall(line))


@dataclass
class FilterResult:
    sentences: list[str]
    malformed: int = 0
    out_of_bounds: int = 0
    excluded: int = 0
    duplicates: int = 0


def filter_sentences(
    lines: Iterable[str],
    min_len: int,
    max_len: int,
    exclusion: Iterable[str] = (),
) -> FilterResult:
    """Keep normalized sentences with length in [min_len, max_len].

    Sentences in ``exclusion`` (compared after the same normalization) and
    exact repeats are dropped; lines that normalize to nothing count as
    malformed. Input order is preserved.
    """
    if min_len < 1:
        raise ValueError(f"min_len must be >= 1, got {min_len}")
    if max_len < min_len:
        raise ValueError(f"max_len {max_len} < min_len {min_len}")
    excluded_set = {normalize_hanzi(s) for s in exclusion}
    result = FilterResult(sentences=[])
    seen: set[str] = set()
    for line in lines:
        sentence = normalize_hanzi(line)
        if not sentence:
            result.malformed += 1
            continue
        if not (min_len <= len(sentence) <= max_len):
            result.out_of_bounds += 1
            continue
        if sentence in excluded_set:
            result.excluded += 1
            continue
        if sentence in seen:
            result.duplicates += 1
            continue
        seen.add(sentence)
        result.sentences.append(sentence)
    return result


@dataclass
class ParallelCorpus:
    """Sentence-aligned (Hanzi, tonal pinyin) pairs; pinyin length always
    equals the character count."""

    pairs: list[tuple[str, tuple[Syllable, ...]]]
    source_tag: str = "inline"
    skipped: int = 0

    def __len__(self) -> int:
        return len(self.pairs)


def build_parallel(
    sentences: Sequence[str],
    lexicon: PronunciationLexicon,
    source_tag: str = "inline",
) -> ParallelCorpus:
    """Pair each sentence with its pinyin; uncovered sentences are skipped
    and counted, never partially converted."""
    pairs: list[tuple[str, tuple[Syllable, ...]]] = []
    skipped = 0
    for sentence in sentences:
        try:
            pinyin = tuple(hanzi_to_pinyin(sentence, lexicon))
        except UnknownCharacter:
            skipped += 1
            continue
        pairs.append((sentence, pinyin))
    return ParallelCorpus(pairs=pairs, source_tag=source_tag, skipped=skipped)


def write_parallel_tsv(corpus: ParallelCorpus, sink) -> None:
    """Write ``hanzi<TAB>space-joined-pinyin`` lines."""
    for hanzi, pinyin in corpus.pairs:
        sink.write(hanzi + "\t" + " ".join(str(s) for s in pinyin) + "\n")


def read_parallel_tsv(source, inventory: SyllableInventory, source_tag: str = "tsv") -> ParallelCorpus:
    """Read pairs written by :func:`write_parallel_tsv`; validates unit
    membership and the length-equality invariant."""
    pairs: list[tuple[str, tuple[Syllable, ...]]] = []
    for lineno, raw in enumerate(source, 1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"line {lineno}: expected 2 tab-separated fields")
        hanzi, pinyin_text = fields
        pinyin = tuple(parse_syllable(tok, inventory) for tok in pinyin_text.split())
        if len(pinyin) != len(hanzi):
            raise ValueError(
                f"line {lineno}: {len(pinyin)} pinyin units vs {len(hanzi)} characters"
            )
        pairs.append((hanzi, pinyin))
    return ParallelCorpus(pairs=pairs, source_tag=source_tag)
