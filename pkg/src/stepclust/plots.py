"""Plot-data emission: CSV tables plus minimal SVG line charts."""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from datetime import date
from pathlib import Path

import numpy as np

from .features import VARIABLES
from .ingest import epoch_columns

log = logging.getLogger(__name__)

_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def svg_lines(series, title="", width=640, height=320, labels=None) -> str:
    """A bare polyline chart; ``series`` is a list of 1-D arrays."""
    pad = 36
    ys = np.concatenate([np.asarray(s, float) for s in series]) if series else np.zeros(1)
    lo, hi = float(np.min(ys)), float(np.max(ys))
    if hi == lo:
        hi = lo + 1.0
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<text x="{pad}" y="16" font-size="12">{title}</text>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="2" y="{pad + 4}" font-size="10">{hi:.3g}</text>',
           f'<text x="2" y="{height - pad}" font-size="10">{lo:.3g}</text>']
    for j, s in enumerate(series):
        s = np.asarray(s, float)
        xs = pad + (width - 2 * pad) * np.arange(s.size) / max(s.size - 1, 1)
        yv = height - pad - (height - 2 * pad) * (s - lo) / (hi - lo)
        pts = " ".join(f"{x:.1f},{y:.1f}" for x, y in zip(xs, yv))
        color = _COLORS[j % len(_COLORS)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{pts}"/>')
        if labels is not None:
            out.append(f'<text x="{width - pad + 2}" y="{pad + 12 * j}" font-size="10" fill="{color}">{labels[j]}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _day_date(day_id):
    try:
        return date.fromisoformat(day_id[:10])
    except ValueError:
        return None


def heatmap_tables(dm, labels, k):
    """Per-subject cluster proportions for weekdays and weekends.

    Returns ``None`` unless every day has a subject id and a day id that
    starts with an ISO date. Rows are ordered by subject id.
    """
    dates = [_day_date(d) for d in dm.day_ids]
    if not dm.has_subjects or any(s is None for s in dm.subject_ids) or any(d is None for d in dates):
        return None
    tables = {}
    for part, keep in (("weekday", lambda d: d.weekday() < 5), ("weekend", lambda d: d.weekday() >= 5)):
        counts = defaultdict(lambda: np.zeros(k))
        for subj, d, lab in zip(dm.subject_ids, dates, labels):
            if keep(d):
                counts[subj][lab] += 1
        tables[part] = [(s, counts[s] / counts[s].sum()) for s in sorted(counts)]
    return tables


def emit_plots(result, model, data, out_dir, gap=None) -> dict:
    """Write cluster mean curves, eigenfunctions, optional gap curve and
    weekday/weekend heatmap tables into ``out_dir``; return written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = {}
    cols = epoch_columns(data.T)
    labels = np.asarray(result.labels)
    sizes = np.bincount(labels, minlength=result.k)
    counts = data.counts.astype(float)
    means = [counts[labels == c].mean(axis=0) if sizes[c] else np.zeros(data.T) for c in range(result.k)]

    p = out / "cluster_means.csv"
    _write_csv(p, ["cluster", "size"] + cols, [[c + 1, int(sizes[c])] + m.tolist() for c, m in enumerate(means)])
    written["cluster_means_csv"] = p
    p = out / "cluster_means.svg"
    p.write_text(svg_lines(means, "cluster mean step counts", labels=[f"{c + 1} ({sizes[c]})" for c in range(result.k)]))
    written["cluster_means_svg"] = p

    efs = model.eigenfunctions()
    rows = []
    for v, name in enumerate(VARIABLES):
        for r in range(model.n_components):
            rows.append([name, r + 1] + efs[v][r].tolist())
    p = out / "eigenfunctions.csv"
    _write_csv(p, ["variable", "component"] + epoch_columns(efs[0].shape[1]), rows)
    written["eigenfunctions_csv"] = p
    for v, name in enumerate(VARIABLES):
        p = out / f"eigenfunctions_{name}.svg"
        p.write_text(svg_lines(list(efs[v]), f"eigenfunctions: {name}",
                               labels=[f"psi{r + 1}" for r in range(model.n_components)]))
        written[f"eigenfunctions_{name}_svg"] = p

    if gap is not None:
        p = out / "gap.csv"
        _write_csv(p, ["k", "gap", "sk"], [[int(k), float(g), float(s)] for k, g, s in zip(gap.ks, gap.gaps, gap.sks)])
        written["gap_csv"] = p
        p = out / "gap.svg"
        p.write_text(svg_lines([gap.gaps], f"gap statistic (chosen k={gap.chosen_k})"))
        written["gap_svg"] = p

    tables = heatmap_tables(data, labels, result.k)
    if tables is None:
        log.info("heatmap skipped: needs subject_id and ISO-dated day_id on every row")
        written["notices"] = ["heatmap skipped: needs subject_id and ISO-dated day_id on every row"]
    else:
        for part, rows in tables.items():
            p = out / f"heatmap_{part}.csv"
            _write_csv(p, ["subject_id"] + [f"cluster_{c + 1}" for c in range(result.k)],
                       [[s] + props.tolist() for s, props in rows])
            written[f"heatmap_{part}_csv"] = p
    return written
