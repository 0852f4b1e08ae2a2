"""Built-in inequality catalog: ten inequalities with reference thresholds and
reference near-optimal measurements for the five strongest entries.

A catalog is a directory of ``<name>.cg`` inequality files, optional
``<name>.meas`` measurement files, and an optional ``table1.tsv`` with
reference threshold metadata.  This package directory is the shipped catalog;
the ``BELLSCOPE_CATALOG`` environment variable points at a replacement.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..chsh import alpha_max_chsh
from ..inequality import BellInequality, load_cg
from ..quantum import Crossing, MeasurementSet, alpha_crossing, load_measurements

APPENDIX_NAMES = ("A28", "A27", "A5", "A56", "A8")


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str                       # file stem, e.g. "A2_CHSH"
    alias: Optional[str]            # e.g. "CHSH"
    inequality: BellInequality
    table_alpha_max: Optional[float]  # paper-reported upper bound, reference only
    cut_facet: Optional[str]        # descriptive provenance metadata
    meas_path: Optional[Path]

    @property
    def short_name(self) -> str:
        return self.name.split("_", 1)[0] if self.alias else self.name

    def measurements(self) -> tuple[MeasurementSet, MeasurementSet]:
        if self.meas_path is None:
            raise ValueError(f"no measurement data shipped for {self.name}")
        return load_measurements(self.meas_path, self.inequality.m_a, self.inequality.m_b)


@dataclass(frozen=True, eq=False)
class AppendixReport:
    """Consistency check of one shipped measurement set against the reference
    threshold: endpoint violations, the zero crossing, and its distance from
    the reported value."""

    name: str
    v0: float
    v1: float
    crossing: float
    table_value: Optional[float]
    delta: Optional[float]


def default_catalog_dir() -> Path:
    env = os.environ.get("BELLSCOPE_CATALOG")
    return Path(env) if env else Path(__file__).parent


def _natural_key(name: str):
    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", name)]


def _read_table(path: Path) -> dict[str, tuple[Optional[float], Optional[str]]]:
    table = {}
    if not path.exists():
        return table
    lines = path.read_text(encoding="utf-8").splitlines()
    for line in lines[1:]:
        if not line.strip():
            continue
        cells = line.split("\t")
        name = cells[0]
        alpha = float(cells[1]) if len(cells) > 1 and cells[1].strip() else None
        facet = cells[2].strip() if len(cells) > 2 and cells[2].strip() else None
        table[name] = (alpha, facet)
    return table


def load_catalog(directory=None) -> list[CatalogEntry]:
    """All inequalities of a catalog directory in natural name order."""
    directory = Path(directory) if directory is not None else default_catalog_dir()
    if not directory.is_dir():
        raise FileNotFoundError(f"catalog directory {directory} does not exist")
    table = _read_table(directory / "table1.tsv")
    entries = []
    for path in sorted(directory.glob("*.cg"), key=lambda p: _natural_key(p.stem)):
        ineq = load_cg(path)
        name = path.stem
        alias = None
        m = re.fullmatch(r"(A\d+)_(\w+)", name)
        if m:
            alias = m.group(2)
        alpha, facet = table.get(name, (None, None))
        meas = path.with_suffix(".meas")
        entries.append(CatalogEntry(name, alias, ineq, alpha, facet,
                                    meas if meas.exists() else None))
    if not entries:
        raise FileNotFoundError(f"no .cg files in catalog directory {directory}")
    return entries


def find_entry(entries: list[CatalogEntry], key: str) -> CatalogEntry:
    """Look an entry up by full name, serial name, or alias (case-insensitive)."""
    want = key.lower()
    for e in entries:
        candidates = {e.name.lower(), e.short_name.lower()}
        if e.alias:
            candidates.add(e.alias.lower())
        if want in candidates:
            return e
    raise KeyError(f"no catalog entry matches {key!r}")


def verify_appendix(name: str, directory=None) -> AppendixReport:
    """Rebuild the shipped measurements for one entry and locate the alpha
    where their violation curve crosses zero."""
    entries = load_catalog(directory)
    entry = find_entry(entries, name)
    if entry.meas_path is None:
        raise KeyError(f"{entry.name} has no shipped measurement data")
    a, b = entry.measurements()
    cr: Crossing = alpha_crossing(entry.inequality, a.d, a, b)
    delta = abs(cr.alpha - entry.table_alpha_max) if entry.table_alpha_max is not None else None
    return AppendixReport(entry.name, cr.v0, cr.v1, cr.alpha, entry.table_alpha_max, delta)


@dataclass(frozen=True, eq=False)
class RelevanceRow:
    name: str
    crossing: float
    table_value: Optional[float]
    margin: float  # gap below the proven d=3 CHSH threshold; positive = relevant


def relevance_summary(directory=None) -> list[RelevanceRow]:
    """Crossing alphas of the five strong entries next to the CHSH threshold.

    A crossing strictly below the proven CHSH value exhibits an isotropic
    state that satisfies CHSH for all measurements yet violates the entry, so
    a positive margin certifies relevance to CHSH at d=3.
    """
    chsh_alpha = alpha_max_chsh(3)
    rows = []
    for name in APPENDIX_NAMES:
        rep = verify_appendix(name, directory)
        rows.append(RelevanceRow(rep.name, rep.crossing, rep.table_value,
                                 chsh_alpha - rep.crossing))
    entries = load_catalog(directory)
    chsh = find_entry(entries, "CHSH")
    rows.append(RelevanceRow(chsh.name, chsh_alpha, chsh.table_alpha_max, 0.0))
    return rows
