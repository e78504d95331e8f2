"""Bundled example datasets: the Newton and Schiaparelli timelines and
their shared gazetteer, plus frozen golden outputs used by the tests.

Every date or coordinate the datasets pin beyond what common reference
works state is flagged in the files themselves as an editorial pin.
"""

from __future__ import annotations

from pathlib import Path

_HERE = Path(__file__).resolve().parent


def corpus_dir() -> Path:
    """Directory holding the bundled .vita and .tsv files."""
    return _HERE


def _read(name: str) -> str:
    return (_HERE / name).read_text(encoding="utf-8")


def newton_corpus() -> tuple[str, str]:
    """(VITA text, gazetteer TSV) for the Isaac Newton timeline."""
    return _read("newton.vita"), _read("gazetteer.tsv")


def schiaparelli_corpus() -> tuple[str, str]:
    """(VITA text, gazetteer TSV) for the Ernesto Schiaparelli timeline."""
    return _read("schiaparelli.vita"), _read("gazetteer.tsv")


def golden_output(name: str) -> str:
    """Read a frozen golden output file (for example "newton.kml")."""
    return _read(str(Path("golden") / name))
