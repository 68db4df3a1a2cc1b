"""Curve aggregation and deterministic CSV / SVG writers."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from rlchallenges.experiments.runner import RunRecord

CSV_HEADER = ("step", "mean_return", "stderr", "agent", "env")
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22")


@dataclass
class Curve:
    agent: str
    env: str
    steps: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray


def mean_and_stderr(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column-wise mean and standard error of a ``(reps, steps)`` array."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n = values.shape[0]
    mean = values.mean(axis=0)
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, values.std(axis=0, ddof=1) / np.sqrt(n)


def moving_average(x: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average; the window shrinks at the edges."""
    if window < 1:
        raise ValueError("window must be >= 1")
    x = np.asarray(x, dtype=float)
    if window == 1 or x.size == 0:
        return x.copy()
    left = (window - 1) // 2
    right = window - 1 - left
    csum = np.concatenate([[0.0], np.cumsum(x)])
    idx = np.arange(x.size)
    lo = np.maximum(idx - left, 0)
    hi = np.minimum(idx + right + 1, x.size)
    return (csum[hi] - csum[lo]) / (hi - lo)


def aggregate(record: RunRecord, smoothing_window: int | None = None, log_interval: int | None = None) -> list[Curve]:
    cfg = record.config
    window = cfg.smoothing_window if smoothing_window is None else smoothing_window
    interval = cfg.log_interval if log_interval is None else log_interval
    if window < 1:
        raise ValueError("smoothing_window must be >= 1")
    curves = []
    for run in cfg.runs:
        values = record.curves(run.label)
        if values.shape[1] == 0:
            empty = np.zeros(0)
            curves.append(Curve(run.label, run.env_label(), empty.astype(int), empty, empty))
            continue
        mean, se = mean_and_stderr(values)
        mean, se = moving_average(mean, window), moving_average(se, window)
        steps = np.arange(1, values.shape[1] + 1)
        keep = (steps % interval == 0) | (steps == steps[-1])
        curves.append(Curve(run.label, run.env_label(), steps[keep], mean[keep], se[keep]))
    return curves


def curves_to_csv(curves: list[Curve]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for c in curves:
        for s, m, e in zip(c.steps, c.mean, c.stderr):
            writer.writerow([int(s), f"{m:.6f}", f"{e:.6f}", c.agent, c.env])
    return buf.getvalue()


def curves_to_svg(curves: list[Curve], title: str = "", width: int = 640, height: int = 400) -> str:
    """Static SVG 1.1 line plot, one polyline per curve."""
    ml, mr, mt, mb = 60, 170, 30, 45
    pw, ph = width - ml - mr, height - mt - mb
    nonempty = [c for c in curves if len(c.steps)]
    if nonempty:
        xmax = max(float(c.steps[-1]) for c in nonempty)
        ymin = min(float(c.mean.min()) for c in nonempty)
        ymax = max(float(c.mean.max()) for c in nonempty)
    else:
        xmax, ymin, ymax = 1.0, 0.0, 1.0
    if ymax - ymin < 1e-9:
        ymin, ymax = ymin - 0.5, ymax + 0.5
    xmax = max(xmax, 1.0)

    def px(x):
        return ml + pw * x / xmax

    def py(y):
        return mt + ph * (1.0 - (y - ymin) / (ymax - ymin))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{ml + pw / 2:.1f}" y="18" text-anchor="middle" font-family="sans-serif" font-size="14">'
        f"{escape(title)}</text>",
        f'<g id="axes" stroke="black" stroke-width="1">'
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}"/>'
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}"/></g>',
    ]
    for i in range(5):
        fx = xmax * i / 4
        fy = ymin + (ymax - ymin) * i / 4
        out.append(
            f'<text x="{px(fx):.1f}" y="{mt + ph + 15}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="10">{fx:.0f}</text>'
        )
        out.append(
            f'<text x="{ml - 5}" y="{py(fy) + 3:.1f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="10">{fy:.3g}</text>'
        )
    out.append(
        f'<text x="{ml + pw / 2:.1f}" y="{height - 8}" text-anchor="middle" font-family="sans-serif" '
        'font-size="12">environment step</text>'
    )
    out.append(
        f'<text x="15" y="{mt + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 15 {mt + ph / 2:.1f})">mean return</text>'
    )
    for i, c in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        if len(c.steps):
            pts = " ".join(f"{px(s):.2f},{py(m):.2f}" for s, m in zip(c.steps, c.mean))
            out.append(
                f'<polyline id="curve-{i}" class="curve" fill="none" stroke="{color}" stroke-width="1.5" '
                f'points="{pts}"/>'
            )
        ly = mt + 14 * i + 8
        out.append(
            f'<g class="legend"><line x1="{ml + pw + 10}" y1="{ly}" x2="{ml + pw + 30}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/><text x="{ml + pw + 35}" y="{ly + 4}" '
            f'font-family="sans-serif" font-size="10">{escape(c.agent)}</text></g>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_outputs(curves: list[Curve], csv_path: str | Path, svg_path: str | Path | None = None, title: str = "") -> None:
    for path, text in ((csv_path, curves_to_csv(curves)), (svg_path, curves_to_svg(curves, title))):
        if path is None:
            continue
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def final_performance(curve: Curve, fraction: float = 0.05) -> float:
    """Mean of the smoothed curve over its last ``fraction`` of logged points."""
    if not len(curve.mean):
        return float("nan")
    k = max(1, int(round(len(curve.mean) * fraction)))
    return float(np.mean(curve.mean[-k:]))
