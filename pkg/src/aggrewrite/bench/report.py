"""Table and figure output for benchmark statistics."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .runner import RunRecord  # noqa: E402
from .stats import MatrixStats  # noqa: E402

HEADER = ("Encoding", "Wins", "Exclusive Wins", "Wins by 20%", "Wins by 50%")


def _cell(count: int, pct: float) -> str:
    return f"{count} ({pct:.1f}%)"


def format_table(stats: MatrixStats, labels: Dict[str, str] = None) -> str:
    labels = labels or {}
    rows = [HEADER]
    for e in stats.encodings:
        s = stats[e]
        rows.append((
            labels.get(e, e),
            _cell(s.wins, s.win_pct),
            _cell(s.exclusive_wins, s.exclusive_pct),
            _cell(s.wins_by_20, s.by_20_pct),
            _cell(s.wins_by_50, s.by_50_pct),
        ))
    widths = [max(len(r[i]) for r in rows) for i in range(len(HEADER))]
    lines = []
    for n, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append(" | ".join(cells))
        if n == 0:
            lines.append("-+-".join("-" * w for w in widths))
    lines.append(f"instances with at least one finisher: {stats.considered}"
                 f" (excluded: {len(stats.excluded)})")
    return "\n".join(lines)


def plot_wins(stats: MatrixStats, path, labels: Dict[str, str] = None):
    labels = labels or {}
    names = [labels.get(e, Path(e).name) for e in stats.encodings]
    series = [
        ("wins", [stats[e].wins for e in stats.encodings]),
        ("exclusive", [stats[e].exclusive_wins for e in stats.encodings]),
        ("by 20%", [stats[e].wins_by_20 for e in stats.encodings]),
        ("by 50%", [stats[e].wins_by_50 for e in stats.encodings]),
    ]
    width = 0.8 / len(series)
    fig, ax = plt.subplots(figsize=(max(4.0, 1.6 * len(names)), 3.2))
    for k, (label, values) in enumerate(series):
        xs = [i + (k - (len(series) - 1) / 2) * width for i in range(len(names))]
        ax.bar(xs, values, width, label=label)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=15, ha="right")
    ax.set_ylabel("instances")
    ax.set_title(f"{stats.considered} instances with a finisher")
    ax.legend(frameon=False, fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_cactus(records: Sequence[RunRecord], path, labels: Dict[str, str] = None):
    """Solved-instance count against per-instance time, one line per encoding."""
    labels = labels or {}
    by_encoding: Dict[str, List[float]] = {}
    limit = 0.0
    for r in records:
        by_encoding.setdefault(r.encoding, [])
        limit = max(limit, r.limit)
        if r.finished:
            by_encoding[r.encoding].append(r.seconds)
    fig, ax = plt.subplots(figsize=(4.8, 3.2))
    for encoding, times in by_encoding.items():
        times.sort()
        ax.step(range(1, len(times) + 1), times, where="post",
                label=labels.get(encoding, Path(encoding).name))
    if limit:
        ax.axhline(limit, color="grey", linestyle=":", linewidth=1)
    ax.set_xlabel("instances solved")
    ax.set_ylabel("seconds")
    ax.legend(frameon=False, fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def write_figures(stats: MatrixStats, records: Sequence[RunRecord], directory,
                  labels: Dict[str, str] = None) -> List[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return [
        plot_wins(stats, directory / "wins.png", labels),
        plot_cactus(records, directory / "cactus.png", labels),
    ]
