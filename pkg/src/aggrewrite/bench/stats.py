"""Win, exclusive-win and win-by-margin tallies over a timing matrix."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List

from .runner import RunRecord

MARGINS = (Fraction(1, 5), Fraction(1, 2))


class IncompleteMatrix(ValueError):
    pass


@dataclass
class WinStats:
    wins: int = 0
    exclusive_wins: int = 0
    wins_by_20: int = 0
    wins_by_50: int = 0
    considered: int = 0

    def share(self, count: int, of: int) -> float:
        return 100.0 * count / of if of else 0.0

    @property
    def win_pct(self) -> float:
        return self.share(self.wins, self.considered)

    @property
    def exclusive_pct(self) -> float:
        return self.share(self.exclusive_wins, self.wins)

    @property
    def by_20_pct(self) -> float:
        return self.share(self.wins_by_20, self.wins)

    @property
    def by_50_pct(self) -> float:
        return self.share(self.wins_by_50, self.wins)


@dataclass
class MatrixStats:
    encodings: List[str]
    per_encoding: Dict[str, WinStats]
    considered: int
    excluded: List[str] = field(default_factory=list)

    def __getitem__(self, encoding: str) -> WinStats:
        return self.per_encoding[encoding]


def wins_by_margin(best: float, reference: float, margin: Fraction) -> bool:
    """True when ``best`` is at least ``margin`` faster than ``reference``.

    Compared exactly on the float values so that scaling both by a power of
    two or an integer never flips the outcome through rounding.
    """
    return Fraction(best) <= (1 - margin) * Fraction(reference)


def compute_stats(records: Iterable[RunRecord]) -> MatrixStats:
    records = list(records)
    encodings = list(dict.fromkeys(r.encoding for r in records))
    instances = list(dict.fromkeys(r.instance for r in records))
    grid = defaultdict(dict)
    for r in records:
        if r.encoding in grid[r.instance]:
            raise IncompleteMatrix(f"duplicate record for {r.encoding} on {r.instance}")
        grid[r.instance][r.encoding] = r
    for instance in instances:
        missing = [e for e in encodings if e not in grid[instance]]
        if missing:
            raise IncompleteMatrix(f"{instance} has no record for {', '.join(missing)}")

    per = {e: WinStats() for e in encodings}
    considered = 0
    excluded = []
    for instance in instances:
        row = grid[instance]
        finished = sorted((r.seconds, r.encoding) for r in row.values() if r.finished)
        if not finished:
            excluded.append(instance)
            continue
        considered += 1
        best = finished[0][0]
        winners = [e for t, e in finished if t == best]
        exclusive = len(finished) == 1
        if exclusive:
            reference = row[winners[0]].limit
        else:
            reference = finished[1][0]
        for e in winners:
            stats = per[e]
            stats.wins += 1
            stats.exclusive_wins += exclusive
            stats.wins_by_20 += wins_by_margin(best, reference, MARGINS[0])
            stats.wins_by_50 += wins_by_margin(best, reference, MARGINS[1])
    for stats in per.values():
        stats.considered = considered
    return MatrixStats(encodings, per, considered, excluded)
