import shutil
from pathlib import Path

import pytest

from pinasr import assets
from pinasr.assets import (
    REFERENCE_COUNTS,
    read_manifest,
    validate_assets,
)


def test_pristine_checkout_validates():
    report = validate_assets()
    assert report.ok, report.render()


def test_manifest_entries_cover_all_data_files():
    names = {e.path for e in read_manifest()}
    data_dir = Path(assets.data_path("manifest.tsv")).parent
    on_disk = {p.name for p in data_dir.iterdir() if p.name != "manifest.tsv"}
    assert names == on_disk


def test_validation_report_mentions_reference_counts():
    text = validate_assets().render()
    assert str(REFERENCE_COUNTS["tonal_units"]) in text
    assert str(REFERENCE_COUNTS["toneless_units"]) in text


def test_corruption_is_detected(tmp_path, monkeypatch):
    data_dir = Path(assets.data_path("manifest.tsv")).parent
    workdir = tmp_path / "data"
    shutil.copytree(data_dir, workdir)
    lexicon = workdir / "lexicon.tsv"
    lexicon.write_text(
        lexicon.read_text(encoding="utf-8") + "妈\tma1\t7\n", encoding="utf-8"
    )

    def fake_data_path(name):
        path = workdir / name
        if not path.exists():
            raise FileNotFoundError(f"bundled data file missing: {path}")
        return path

    monkeypatch.setattr(assets, "data_path", fake_data_path)
    assets.default_inventory.cache_clear()
    assets.default_lexicon.cache_clear()
    try:
        report = validate_assets()
    finally:
        assets.default_inventory.cache_clear()
        assets.default_lexicon.cache_clear()
    failed = {c.name for c in report.checks if not c.ok}
    assert "hash:lexicon.tsv" in failed
    assert "count:lexicon.tsv" in failed


def test_missing_file_is_reported(tmp_path, monkeypatch):
    data_dir = Path(assets.data_path("manifest.tsv")).parent
    workdir = tmp_path / "data"
    shutil.copytree(data_dir, workdir)
    (workdir / "corpus_toy20.txt").unlink()

    def fake_data_path(name):
        path = workdir / name
        if not path.exists():
            raise FileNotFoundError(f"bundled data file missing: {path}")
        return path

    monkeypatch.setattr(assets, "data_path", fake_data_path)
    assets.default_inventory.cache_clear()
    assets.default_lexicon.cache_clear()
    try:
        report = validate_assets()
    finally:
        assets.default_inventory.cache_clear()
        assets.default_lexicon.cache_clear()
    assert not report.ok
    assert any(c.name == "present:corpus_toy20.txt" and not c.ok for c in report.checks)
