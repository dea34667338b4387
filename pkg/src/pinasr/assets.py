"""Bundled data files: accessors and manifest validation.

The manifest (``path<TAB>sha256<TAB>count``) pins each data file's content
hash and record count. ``validate_assets`` re-derives both and additionally
checks the structural closure properties the rest of the toolkit relies on:
tone stripping maps the tonal inventory onto the toneless one, every
lexicon reading is inventory-valid, and the toy corpora are fully covered
by the lexicon.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .corpus import build_parallel
from .pinyin import PronunciationLexicon, SyllableInventory

# Full-scale Mandarin references, for context in reports (a desk-scale
# bundle is intentionally smaller): ~4333 characters, 2020 tonal units,
# 408 toneless units.
REFERENCE_COUNTS = {"characters": 4333, "tonal_units": 2020, "toneless_units": 408}

CORPORA = ("corpus_train.txt", "corpus_heldout.txt", "corpus_toy20.txt")


def data_path(name: str) -> Path:
    path = Path(str(resources.files("pinasr") / "data" / name))
    if not path.exists():
        raise FileNotFoundError(f"bundled data file missing: {path}")
    return path


@lru_cache(maxsize=1)
def default_inventory() -> SyllableInventory:
    return SyllableInventory.from_file(data_path("syllables.txt"))


@lru_cache(maxsize=1)
def default_lexicon() -> PronunciationLexicon:
    return PronunciationLexicon.from_file(data_path("lexicon.tsv"), default_inventory())


def read_sentences(name: str) -> list[str]:
    return [line for line in data_path(name).read_text(encoding="utf-8").splitlines() if line.strip()]


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    sha256: str
    count: int


def read_manifest(path: Path | None = None) -> list[ManifestEntry]:
    path = path or data_path("manifest.tsv")
    entries = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
        entries.append(ManifestEntry(path=fields[0], sha256=fields[1], count=int(fields[2])))
    return entries


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def render(self) -> str:
        lines = [f"[{'ok' if c.ok else 'FAIL'}] {c.name}: {c.detail}" for c in self.checks]
        return "\n".join(lines) + "\n"


def _record_count(name: str, path: Path) -> int:
    lines = [l for l in path.read_text(encoding="utf-8").splitlines() if l.strip() and not l.startswith("#")]
    return len(lines)


def validate_assets(manifest_path: Path | None = None) -> ValidationReport:
    checks: list[Check] = []
    entries = read_manifest(manifest_path)

    for entry in entries:
        try:
            path = data_path(entry.path)
        except FileNotFoundError:
            checks.append(Check(f"present:{entry.path}", False, "file missing"))
            continue
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        checks.append(
            Check(
                f"hash:{entry.path}",
                digest == entry.sha256,
                "matches manifest" if digest == entry.sha256 else f"got {digest[:12]}..., manifest {entry.sha256[:12]}...",
            )
        )
        count = _record_count(entry.path, path)
        checks.append(
            Check(
                f"count:{entry.path}",
                count == entry.count,
                f"{count} records" if count == entry.count else f"{count} records, manifest says {entry.count}",
            )
        )

    try:
        inventory = default_inventory()
        lexicon = default_lexicon()
    except Exception as exc:  # parse failure is itself the diagnostic
        checks.append(Check("load", False, str(exc)))
        return ValidationReport(checks=tuple(checks))

    stripped = {u[:-1] for u in inventory.tonal_units}
    checks.append(
        Check(
            "tone-strip-surjective",
            stripped == set(inventory.toneless_units),
            f"{len(inventory.tonal_units)} tonal -> {len(inventory.toneless_units)} toneless"
            f" (full-scale reference: {REFERENCE_COUNTS['tonal_units']}/{REFERENCE_COUNTS['toneless_units']})",
        )
    )

    outside = sorted(lexicon.all_units() - inventory.tonal_units)
    checks.append(
        Check(
            "lexicon-closure",
            not outside,
            f"{len(lexicon)} characters, all readings inventory-valid"
            f" (full-scale reference: {REFERENCE_COUNTS['characters']} characters)"
            if not outside
            else f"readings outside inventory: {outside[:5]}",
        )
    )

    for name in CORPORA:
        try:
            sentences = read_sentences(name)
        except FileNotFoundError:
            checks.append(Check(f"coverage:{name}", False, "file missing"))
            continue
        parallel = build_parallel(sentences, lexicon, source_tag=name)
        checks.append(
            Check(
                f"coverage:{name}",
                parallel.skipped == 0,
                f"{len(parallel)} sentences fully covered"
                if parallel.skipped == 0
                else f"{parallel.skipped} of {len(sentences)} sentences have uncovered characters",
            )
        )
    return ValidationReport(checks=tuple(checks))
