"""Column-oriented record of observables along a simulated run."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence


@dataclass
class Trajectory:
    """Named, equal-length series indexed by the step counter ``t``.

    ``columns`` keeps insertion order, which is also the CSV column order.
    ``summary`` carries scalar diagnostics (lock reports, final negativity)
    that are printed by the CLI but never written to the CSV.
    """

    names: Sequence[str]
    columns: dict[str, list[Any]] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.names = tuple(self.names)
        if "t" not in self.names:
            raise ValueError("a trajectory needs a 't' column")
        for name in self.names:
            self.columns.setdefault(name, [])
        extra = set(self.columns) - set(self.names)
        if extra:
            raise ValueError(f"columns not declared in names: {sorted(extra)}")

    def append(self, **row: Any) -> None:
        missing = set(self.names) - set(row)
        unknown = set(row) - set(self.names)
        if missing or unknown:
            raise ValueError(f"row mismatch: missing={sorted(missing)} unknown={sorted(unknown)}")
        t = self.columns["t"]
        if t and row["t"] <= t[-1]:
            raise ValueError("t must be strictly increasing")
        for name in self.names:
            self.columns[name].append(row[name])

    def __len__(self) -> int:
        return len(self.columns["t"])

    def __getitem__(self, name: str) -> list[Any]:
        return self.columns[name]

    def rows(self) -> Iterable[tuple[Any, ...]]:
        return zip(*(self.columns[n] for n in self.names))

    def select(self, names: Sequence[str]) -> "Trajectory":
        """Copy restricted to ``names``; ``t`` is always kept first."""
        unknown = [n for n in names if n not in self.columns]
        if unknown:
            raise KeyError(f"unknown column(s): {', '.join(unknown)}")
        keep = ["t"] + [n for n in names if n != "t"]
        return Trajectory(keep, {n: list(self.columns[n]) for n in keep}, dict(self.summary))
