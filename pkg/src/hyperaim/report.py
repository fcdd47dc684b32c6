"""Run orchestration, table reproduction and CSV output."""

from __future__ import annotations

import csv
import enum
import functools
import io
import logging
import sys
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .aim import AimSettings, EigenResult, bound_levels, find_spectrum
from .errors import ConfigError, NoRootsFound
from .oracle import OracleGrid, oracle_spectrum
from .potential import PotentialParams, pt_exact_spectrum
from .reference import TABLES, lookup

log = logging.getLogger(__name__)

HEADER = ["n", "ell", "e_aim", "e_exact", "e_oracle", "e_reference", "abs_diff"]
SIG_DIGITS = 12

# iteration counts used when reproducing each table; the error of the
# highest levels falls off only algebraically in k
TABLE_K_MAX = {1: 300, 2: 300, 3: 250, 4: 250}


class Mode(enum.Enum):
    Aim = "Aim"
    ExactPT = "ExactPT"
    Oracle = "Oracle"
    Compare = "Compare"


@dataclass(frozen=True)
class RunConfig:
    params: PotentialParams
    settings: AimSettings = field(default_factory=AimSettings)
    grid: OracleGrid | None = None
    mode: Mode = Mode.Compare
    output_path: str | None = None  # None: standard output

    def __post_init__(self):
        if self.mode is Mode.ExactPT:
            if self.params.V2 != 0:
                raise ConfigError(f"v2: exact spectrum mode needs v2 = 0, got {self.params.V2}")
            if self.params.ell != 0:
                raise ConfigError(f"ell: exact spectrum mode needs ell = 0, got {self.params.ell}")


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    ell: int
    e_aim: float | None = None
    e_exact: float | None = None
    e_oracle: float | None = None
    e_reference: float | None = None
    abs_diff: float | None = None

    def __post_init__(self):
        if self.e_aim is None and self.e_exact is None and self.e_oracle is None and self.e_reference is None:
            raise ValueError("a comparison row needs at least one energy")

    @property
    def computed(self) -> float | None:
        """The value compared against the reference: AIM, else exact, else oracle."""
        for v in (self.e_aim, self.e_exact, self.e_oracle):
            if v is not None:
                return v
        return None


def _row(n, ell, aim=None, exact=None, oracle=None, ref=None) -> ComparisonRow:
    vals = [None if v is None else float(v) for v in (aim, exact, oracle, ref)]
    aim, exact, oracle, ref = vals
    comp = next((v for v in (aim, exact, oracle) if v is not None), None)
    diff = abs(comp - ref) if comp is not None and ref is not None else None
    return ComparisonRow(n, ell, aim, exact, oracle, ref, diff)


@functools.lru_cache(maxsize=64)
def cached_levels(p: PotentialParams, settings: AimSettings) -> tuple[EigenResult, ...]:
    """Bound levels from ``find_spectrum``, memoized per (params, settings)."""
    return tuple(bound_levels(find_spectrum(p, settings)))


def _aim_levels(p: PotentialParams, settings: AimSettings) -> list[EigenResult]:
    return list(cached_levels(p, settings))


def rows_from_results(results: Sequence[EigenResult], ell: int) -> list[ComparisonRow]:
    return [_row(r.n, ell, aim=r.energy) for r in bound_levels(results)]


def run(config: RunConfig) -> list[ComparisonRow]:
    p, mode = config.params, config.mode
    grid = config.grid or OracleGrid.for_params(p)
    if mode is Mode.Aim:
        return rows_from_results(find_spectrum(p, config.settings), p.ell)
    if mode is Mode.ExactPT:
        return [_row(n, p.ell, exact=e) for n, e in enumerate(pt_exact_spectrum(p))]
    if mode is Mode.Oracle:
        return [_row(n, p.ell, oracle=e) for n, e in enumerate(oracle_spectrum(p, grid))]
    # Compare: everything applicable, joined by level index
    try:
        aim = [r.energy for r in _aim_levels(p, config.settings)]
    except NoRootsFound:
        aim = []
    exact = pt_exact_spectrum(p) if p.V2 == 0 and p.ell == 0 else []
    oracle = oracle_spectrum(p, grid)
    count = max(len(aim), len(exact), len(oracle))
    if count == 0:
        raise NoRootsFound("no bound states from any method")
    pick = lambda xs, n: xs[n] if n < len(xs) else None
    return [_row(n, p.ell, pick(aim, n), pick(exact, n), pick(oracle, n)) for n in range(count)]


def table_settings(table: int, **overrides) -> AimSettings:
    """AIM settings used for a table: defaults with the table's iteration count."""
    overrides.setdefault("k_max", TABLE_K_MAX[table])
    return AimSettings(**overrides)


def reproduce_table(table: int, settings: AimSettings | None = None, grid: OracleGrid | None = None,
                    reference_column: str | None = None) -> list[ComparisonRow]:
    """One row per published cell, with freshly computed columns alongside."""
    if table not in TABLES:
        raise ConfigError(f"table: must be one of {sorted(TABLES)}, got {table}")
    spec = TABLES[table]
    column = reference_column or spec.primary
    if column not in spec.columns:
        raise ConfigError(f"reference: table {table} has columns {list(spec.columns)}, got {column!r}")
    settings = settings or table_settings(table)
    rows = []
    for ell in spec.ells:
        p = spec.params(ell)
        try:
            aim = [r.energy for r in _aim_levels(p, settings)]
        except NoRootsFound:
            aim = []
        exact = pt_exact_spectrum(p) if p.V2 == 0 and ell == 0 else []
        oracle = oracle_spectrum(p, grid or OracleGrid.for_params(p))
        pick = lambda xs, n: xs[n] if n < len(xs) else None
        n = 0
        while (ref := lookup(table, column, ell, n)) is not None:
            rows.append(_row(n, ell, pick(aim, n), pick(exact, n), pick(oracle, n), ref.value))
            n += 1
    return rows


# CSV


def _fmt(v: float | None, digits: int = SIG_DIGITS) -> str:
    if v is None:
        return ""
    return format(v, f".{digits}g")


def rows_to_csv(rows: Iterable[ComparisonRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow([r.n, r.ell, _fmt(r.e_aim), _fmt(r.e_exact), _fmt(r.e_oracle), _fmt(r.e_reference), _fmt(r.abs_diff)])
    return buf.getvalue()


def csv_to_rows(text: str) -> list[ComparisonRow]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    val = lambda s: float(s) if s else None
    return [ComparisonRow(int(d["n"]), int(d["ell"]), val(d["e_aim"]), val(d["e_exact"]), val(d["e_oracle"]),
                          val(d["e_reference"]), val(d["abs_diff"])) for d in reader]


def write_csv(rows: Sequence[ComparisonRow], path: str | None, stream=None) -> None:
    text = rows_to_csv(rows)
    if path is None:
        (stream or sys.stdout).write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
