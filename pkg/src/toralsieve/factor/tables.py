"""Ingestion of external factor tables.

Line format (UTF-8, ``#`` starts a comment)::

    <label> <index> <factor> <factor> ... [C<digits> ...]

``C<digits>`` marks a composite cofactor with no known factor, of the given
decimal length. Labels F, L, M (Fibonacci, Lucas, Mersenne) are checked
against the reconstructed sequence value; other labels are taken on trust.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from pathlib import Path
from typing import Iterable

from ..sequences import SEQUENCES, sequence_value


class TableFormatError(ValueError):
    pass


class TableIntegrityError(ValueError):
    pass


@dataclass(frozen=True)
class TableEntry:
    label: str
    index: int
    factors: tuple[int, ...]
    cofactor_digits: tuple[int, ...] = ()
    value: int | None = None

    @property
    def known_part(self) -> int:
        return prod(self.factors)

    def check_against(self, n: int) -> None:
        """Raise TableIntegrityError unless this entry is consistent with n."""
        known = self.known_part
        if known == 0 or n % known:
            raise TableIntegrityError(
                f"{self.label} {self.index}: listed factors do not divide the value"
            )
        cof = n // known
        if not self.cofactor_digits:
            if cof != 1:
                raise TableIntegrityError(
                    f"{self.label} {self.index}: product of factors is {known}, expected {n}"
                )
            return
        nd = len(str(cof)) if cof > 1 else 0
        total = sum(self.cofactor_digits)
        lo = total - (len(self.cofactor_digits) - 1)
        if not lo <= nd <= total:
            raise TableIntegrityError(
                f"{self.label} {self.index}: unresolved cofactor has {nd} digits, "
                f"table says {'+'.join(map(str, self.cofactor_digits))}"
            )

    @property
    def cofactor(self) -> int | None:
        """The unresolved part as an integer, when the entry value is known."""
        if self.value is None or not self.cofactor_digits:
            return None
        return self.value // self.known_part


@dataclass
class FactorTable:
    """Entries keyed by ``(label, index)``."""

    entries: dict[tuple[str, int], TableEntry] = field(default_factory=dict)
    _by_value: dict[int, TableEntry] = field(default_factory=dict, repr=False)

    def add(self, entry: TableEntry) -> None:
        key = (entry.label, entry.index)
        if key in self.entries:
            raise TableFormatError(f"duplicate entry {entry.label} {entry.index}")
        self.entries[key] = entry
        if entry.value is not None:
            self._by_value.setdefault(entry.value, entry)

    @property
    def labels(self) -> set[str]:
        return {lab for lab, _ in self.entries}

    def get(self, label: str, index: int) -> TableEntry | None:
        return self.entries.get((label, index))

    def by_value(self, n: int) -> TableEntry | None:
        return self._by_value.get(n)

    def known_primes(self) -> set[int]:
        return {p for e in self.entries.values() for p in e.factors}

    def __len__(self) -> int:
        return len(self.entries)


def parse_line(line: str, lineno: int = 0) -> TableEntry | None:
    body = line.split("#", 1)[0].strip()
    if not body:
        return None
    parts = body.split()
    if len(parts) < 2:
        raise TableFormatError(f"line {lineno}: expected '<label> <index> ...'")
    label = parts[0]
    try:
        index = int(parts[1])
        factors: list[int] = []
        cofs: list[int] = []
        for tok in parts[2:]:
            if tok[0] in "Cc":
                cofs.append(int(tok[1:]))
            else:
                factors.append(int(tok))
    except ValueError as exc:
        raise TableFormatError(f"line {lineno}: {exc}") from None
    if any(f < 2 for f in factors) or any(d < 1 for d in cofs) or index < 0:
        raise TableFormatError(f"line {lineno}: factors must be >= 2, digit counts >= 1")
    return TableEntry(label, index, tuple(factors), tuple(cofs))


def ingest_factor_table(lines: Iterable[str]) -> FactorTable:
    """Parse and integrity-check a factor table."""
    table = FactorTable()
    for lineno, line in enumerate(lines, start=1):
        entry = parse_line(line, lineno)
        if entry is None:
            continue
        if entry.label in SEQUENCES:
            value = sequence_value(entry.label, entry.index)
            entry.check_against(value)
        elif entry.cofactor_digits:
            value = None
        else:
            value = entry.known_part
        entry = TableEntry(entry.label, entry.index, entry.factors, entry.cofactor_digits, value)
        try:
            table.add(entry)
        except TableFormatError as exc:
            raise TableFormatError(f"line {lineno}: {exc}") from None
    return table


def load_factor_table(path: str | Path) -> FactorTable:
    with open(path, encoding="utf-8") as fh:
        return ingest_factor_table(fh)
