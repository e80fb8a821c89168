"""Ratio-series datasets and their CSV / JSON / SVG renderings.

All writers are deterministic: identical datasets give byte-identical CSV
and JSON, and SVG output differs at most in the generator comment.
"""

from __future__ import annotations

import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

CSV_DECIMALS = 6


@dataclass(frozen=True)
class FigurePoint:
    n: int
    ratio: float
    marker: str = "all"
    omega: int | None = None
    exact: bool = True
    aux: float | None = None


@dataclass(frozen=True)
class ReferenceLine:
    label: str
    value: float


@dataclass
class FigureDataset:
    title: str
    ylabel: str
    points: list[FigurePoint] = field(default_factory=list)
    lines: list[ReferenceLine] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    aux_label: str | None = None

    @property
    def unresolved_count(self) -> int:
        return sum(not p.exact for p in self.points)

    def running_min(self, lo: int | None = None, hi: int | None = None) -> float | None:
        vals = [
            p.ratio
            for p in self.points
            if (lo is None or p.n >= lo) and (hi is None or p.n <= hi)
        ]
        return min(vals) if vals else None


def fmt(x: float | None) -> str:
    if x is None:
        return ""
    return f"{x:.{CSV_DECIMALS}f}"


def dataset_csv(ds: FigureDataset) -> str:
    cols = ["n", "ratio", "marker", "omega", "exact"]
    if ds.aux_label:
        cols.append(ds.aux_label)
    out = [",".join(cols)]
    for p in ds.points:
        row = [str(p.n), fmt(p.ratio), p.marker, "" if p.omega is None else str(p.omega), str(int(p.exact))]
        if ds.aux_label:
            row.append(fmt(p.aux))
        out.append(",".join(row))
    return "\n".join(out) + "\n"


def dataset_json(ds: FigureDataset) -> str:
    body = {
        "title": ds.title,
        "ylabel": ds.ylabel,
        "lines": [asdict(r) for r in ds.lines],
        "metadata": ds.metadata,
        "points": len(ds.points),
        "unresolved": ds.unresolved_count,
        "running_min": ds.running_min(),
    }
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def dataset_svg(ds: FigureDataset) -> str:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "toralsieve", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        groups: dict[str, list[FigurePoint]] = {}
        for p in ds.points:
            groups.setdefault(p.marker, []).append(p)
        sizes = {"even": 9.0, "odd": 1.5}
        for name in sorted(groups):
            pts = groups[name]
            ax.scatter([p.n for p in pts], [p.ratio for p in pts], s=sizes.get(name, 3.0), label=name)
        for line in ds.lines:
            ax.axhline(line.value, linewidth=0.8, color="k", linestyle="--")
            ax.annotate(line.label, (1.0, line.value), xycoords=("axes fraction", "data"), fontsize=7)
        ax.set_xlabel("n")
        ax.set_ylabel(ds.ylabel)
        ax.set_title(ds.title, fontsize=9)
        if len(groups) > 1:
            ax.legend(fontsize=7)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buf.getvalue()


def write_atomic(path: str | Path, text: str) -> None:
    """Write text through a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
