"""Write scenario results to disk: CSV/JSON data plus static PNG figures.

Data files are deterministic for a given input.  Figures use the Agg
backend and are written next to the data they display.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

GRID_HEADER = ("n", "m", "p")


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def grid_rows(probs: np.ndarray) -> Iterable[tuple[int, int, float]]:
    """Long-form ``(n, m, p)`` rows in row-major order."""
    for (n, m), p in np.ndenumerate(probs):
        yield n, m, float(p)


def write_grid_csv(path: Path, probs: np.ndarray) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(GRID_HEADER)
        for n, m, p in grid_rows(probs):
            w.writerow((n, m, _num(p)))
    return path


def read_grid_csv(path: Path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    dim = 1 + max(int(r["n"]) for r in rows)
    out = np.zeros((dim, dim))
    for r in rows:
        out[int(r["n"]), int(r["m"])] = float(r["p"])
    return out


def write_rows_csv(path: Path, rows: list[dict]) -> Path:
    fields = list(rows[0]) if rows else []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([_num(r[k]) if isinstance(r[k], (float, int)) and not isinstance(r[k], bool)
                        else ("" if r[k] is None else r[k]) for k in fields])
    return path


def write_json(path: Path, record: dict) -> Path:
    with open(path, "w") as fh:
        json.dump(record, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


# -- figures -----------------------------------------------------------------------

def plot_grid(path: Path, probs: np.ndarray, title: str = "") -> Path:
    """Heatmap of ``P(n, m)``, ``n`` on the vertical axis."""
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    im = ax.imshow(probs, origin="lower", cmap="viridis", interpolation="nearest")
    ax.set_xlabel("m")
    ax.set_ylabel("n")
    if title:
        ax.set_title(title, fontsize=9)
    fig.colorbar(im, ax=ax, label="P(n, m)")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_curves(path: Path, rows: list[dict], x: str, y: str, group: Optional[tuple] = None,
                title: str = "") -> Path:
    """One line per distinct ``group`` key tuple, ``y`` against ``x``."""
    fig, ax = plt.subplots(figsize=(4.8, 3.4))
    series: dict = {}
    for r in rows:
        key = " / ".join(str(r[g]) for g in group) if group else y
        series.setdefault(key, []).append((r[x], r[y]))
    for key, pts in series.items():
        xs, ys = zip(*sorted(pts))
        ax.plot(xs, ys, marker="o", ms=3, lw=1.2, label=key)
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    if title:
        ax.set_title(title, fontsize=9)
    if len(series) > 1:
        ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path
