"""Pinyin syllable alphabet: parsing, tone stripping, Hanzi conversion.

A tonal unit is written as lowercase romanization plus one tone digit,
e.g. ``zhong1``. Tone 5 is the neutral tone, and ``v`` stands in for
u-umlaut (``lv4``), so every unit is plain ASCII. A toneless unit is the
same string without the digit (``zhong``).

Which units exist is not hardcoded: a :class:`SyllableInventory` is loaded
from a data file and defines validity. The initial/final split of a unit is
derived by longest-prefix matching against the fixed onset list below;
``y`` and ``w`` are treated as onsets, pure-vowel syllables (``e``, ``ai``)
have an empty onset.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence


class InvalidSyllable(ValueError):
    """The text does not name a unit of the inventory."""


class InvalidTone(ValueError):
    """Tone digit missing or outside 1-5."""


class UnknownCharacter(ValueError):
    """A Hanzi character has no lexicon entry."""

    def __init__(self, char: str, position: int):
        super().__init__(f"no lexicon entry for {char!r} at position {position}")
        self.char = char
        self.position = position


# Onsets, two-letter ones first so longest-prefix matching works.
ONSETS = (
    "zh", "ch", "sh",
    "b", "p", "m", "f", "d", "t", "n", "l",
    "g", "k", "h", "j", "q", "x", "r",
    "z", "c", "s", "y", "w",
)

NEUTRAL_TONE = 5

_TONAL_RE = re.compile(r"^[a-z]+[1-5]$")


def split_segment(segment: str) -> tuple[str, str]:
    """Split a toneless segment into (initial, final) by onset prefix."""
    for onset in ONSETS:
        if segment.startswith(onset) and len(segment) > len(onset):
            return onset, segment[len(onset):]
    return "", segment


@dataclass(frozen=True, order=True)
class Syllable:
    """One tonal pinyin unit, decomposed as initial + final + tone."""

    initial: str
    final: str
    tone: int

    def __str__(self) -> str:
        return f"{self.initial}{self.final}{self.tone}"

    @property
    def segment(self) -> str:
        """The toneless romanization (initial + final)."""
        return self.initial + self.final


def strip_tone(syllable: Syllable) -> str:
    """Drop the tone, returning the toneless unit string."""
    return syllable.segment


@dataclass(frozen=True)
class SyllableInventory:
    """The set of valid units, tonal and (derived) toneless.

    ``toneless_units`` is always exactly the image of ``tonal_units`` under
    tone stripping.
    """

    tonal_units: frozenset[str]
    toneless_units: frozenset[str]
    version: str

    @classmethod
    def from_units(cls, tonal_units: Iterable[str], version: str = "inline") -> "SyllableInventory":
        tonal = frozenset(tonal_units)
        for unit in tonal:
            if not _TONAL_RE.match(unit):
                raise InvalidSyllable(f"malformed tonal unit {unit!r}")
        toneless = frozenset(u[:-1] for u in tonal)
        return cls(tonal_units=tonal, toneless_units=toneless, version=version)

    @classmethod
    def from_file(cls, path) -> "SyllableInventory":
        """Load from a text file: one tonal unit per line, '#' comments."""
        version = str(path)
        units = []
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if line.startswith("#"):
                    m = re.match(r"#\s*version:\s*(\S+)", line)
                    if m:
                        version = m.group(1)
                    continue
                if not line:
                    continue
                if not _TONAL_RE.match(line):
                    raise InvalidSyllable(f"{path}:{lineno}: malformed tonal unit {line!r}")
                units.append(line)
        inv = cls.from_units(units, version=version)
        return inv

    def __contains__(self, unit: str) -> bool:
        return unit in self.tonal_units

    def __len__(self) -> int:
        return len(self.tonal_units)


def parse_syllable(text: str, inventory: SyllableInventory) -> Syllable:
    """Parse a tonal unit like ``zhong1`` into a :class:`Syllable`.

    Raises InvalidTone when the trailing tone digit is missing or not 1-5,
    InvalidSyllable when the unit is not in the inventory.
    """
    if not text or not text.isascii():
        raise InvalidSyllable(f"not an ASCII pinyin unit: {text!r}")
    text = text.lower()
    if not text[-1].isdigit():
        raise InvalidTone(f"missing tone digit in {text!r}")
    if text[-1] not in "12345":
        raise InvalidTone(f"tone digit out of range in {text!r}")
    if text not in inventory.tonal_units:
        raise InvalidSyllable(f"not in inventory ({inventory.version}): {text!r}")
    initial, final = split_segment(text[:-1])
    return Syllable(initial=initial, final=final, tone=int(text[-1]))


def parse_toneless(text: str, inventory: SyllableInventory) -> str:
    """Validate a toneless unit like ``zhong``; returns the canonical string."""
    if not text or not text.isascii():
        raise InvalidSyllable(f"not an ASCII pinyin unit: {text!r}")
    text = text.lower()
    if text[-1].isdigit():
        raise InvalidSyllable(f"tone digit present in toneless unit {text!r}")
    if text not in inventory.toneless_units:
        raise InvalidSyllable(f"not in inventory ({inventory.version}): {text!r}")
    return text


class PronunciationLexicon:
    """Hanzi -> weighted tonal readings, with homophone lookup indexes.

    Readings per character are kept in descending weight order (ties broken
    by the canonical unit string), so ``readings(char)[0]`` is the default
    reading used by :func:`hanzi_to_pinyin`. Instances are immutable after
    construction and safe to share across threads.
    """

    def __init__(self, entries: dict[str, Sequence[tuple[Syllable, float]]], version: str = "inline"):
        self.version = version
        self._entries: dict[str, tuple[tuple[Syllable, float], ...]] = {}
        for char, readings in entries.items():
            if not readings:
                raise ValueError(f"empty reading list for {char!r}")
            for syl, weight in readings:
                if weight <= 0:
                    raise ValueError(f"non-positive weight {weight} for {char!r} {syl}")
            ordered = tuple(sorted(readings, key=lambda rw: (-rw[1], str(rw[0]))))
            self._entries[char] = ordered
        # Homophone indexes: unit string -> list of (char, P(reading | char)).
        tonal_index: dict[str, list[tuple[str, float]]] = {}
        toneless_index: dict[str, list[tuple[str, float]]] = {}
        for char, readings in self._entries.items():
            total = sum(w for _, w in readings)
            toneless_mass: dict[str, float] = {}
            for syl, weight in readings:
                tonal_index.setdefault(str(syl), []).append((char, weight / total))
                seg = syl.segment
                toneless_mass[seg] = toneless_mass.get(seg, 0.0) + weight / total
            for seg, mass in toneless_mass.items():
                toneless_index.setdefault(seg, []).append((char, mass))
        self._tonal_index = {k: tuple(sorted(v)) for k, v in tonal_index.items()}
        self._toneless_index = {k: tuple(sorted(v)) for k, v in toneless_index.items()}

    @classmethod
    def from_file(cls, path, inventory: SyllableInventory) -> "PronunciationLexicon":
        """Load a TSV of ``character<TAB>unit<TAB>weight`` rows."""
        entries: dict[str, list[tuple[Syllable, float]]] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 3:
                    raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
                char, unit, weight_text = fields
                if len(char) != 1:
                    raise ValueError(f"{path}:{lineno}: key must be a single character, got {char!r}")
                try:
                    weight = float(weight_text)
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: bad weight {weight_text!r}") from exc
                if weight <= 0:
                    raise ValueError(f"{path}:{lineno}: weight must be positive")
                syl = parse_syllable(unit, inventory)
                entries.setdefault(char, []).append((syl, weight))
        return cls(entries, version=str(path))

    def __contains__(self, char: str) -> bool:
        return char in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def characters(self) -> Iterable[str]:
        return self._entries.keys()

    def readings(self, char: str) -> tuple[tuple[Syllable, float], ...]:
        return self._entries[char]

    def homophones(self, unit: str, tonal: bool = True) -> tuple[tuple[str, float], ...]:
        """Characters whose (tonal or toneless) reading matches ``unit``.

        Each entry is (char, P(reading | char)); empty tuple when no
        character matches.
        """
        index = self._tonal_index if tonal else self._toneless_index
        return index.get(unit, ())

    def all_units(self) -> frozenset[str]:
        """Every tonal unit used by some reading."""
        return frozenset(self._tonal_index.keys())


def hanzi_to_pinyin(sentence: str, lexicon: PronunciationLexicon) -> list[Syllable]:
    """Convert a Hanzi sentence to one tonal unit per character.

    Heteronyms take their highest-weight reading. Raises UnknownCharacter
    (with the character and its position) on the first uncovered character.
    """
    out = []
    for position, char in enumerate(sentence):
        if char not in lexicon:
            raise UnknownCharacter(char, position)
        out.append(lexicon.readings(char)[0][0])
    return out
