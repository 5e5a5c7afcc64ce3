"""Deterministic result serialization: JSON-style text, CSV, static SVG.

Everything here is pure string assembly: identical inputs produce
byte-identical outputs, which the command line interface relies on.
Floats are written with 17 significant digits so every value round-trips
exactly; infinities use the Infinity/NaN tokens Python's json module
accepts.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .version import __version__


def float_text(value: float) -> str:
    value = float(value)
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    return format(value, ".17g")


def _scalar_text(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return float_text(value)
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def structured_text(obj, indent: int = 0) -> str:
    """JSON-compatible text with stable key order and stable float digits."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f"{pad}  {json.dumps(str(k))}: {structured_text(v, indent + 1)}"
            for k, v in obj.items())
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(structured_text(v, indent) for v in obj) + "]"
    return _scalar_text(obj)


@dataclass(frozen=True)
class ResultEnvelope:
    """Top-level result document: version, setup echo, regime, payload."""

    setup: dict
    regime: dict
    payload: dict
    version: str = __version__

    def as_dict(self) -> dict:
        return {
            "version": self.version,
            "setup": self.setup,
            "regime": self.regime,
            "payload": self.payload,
        }


def _csv(header: str, rows) -> str:
    return "\n".join([header, *(",".join(cells) for cells in rows)]) + "\n"


def _csv_pattern(payload: dict) -> str:
    rows = ((str(int(p)), float_text(v))
            for p, v in zip(payload["orders"], payload["probabilities"]))
    return _csv("order,probability", rows)


def _csv_fit(payload: dict) -> str:
    rows = ((float_text(r), float_text(c))
            for r, c in zip(payload["scan_r"], payload["scan_chi2"]))
    return _csv("r_eff,chi2", rows)


def _csv_region(payload: dict) -> str:
    rows = ((float_text(d), float_text(q))
            for contour in payload["contours"]
            for d, q in zip(contour["d_tilde"], contour["q_tilde"]))
    return _csv("d_tilde,q_tilde", rows)


def _csv_scan(payload: dict) -> str:
    rows = ((float_text(d), float_text(q), float_text(r), float_text(p))
            for d, q, r, p in zip(payload["d_tilde"], payload["q_tilde"],
                                  payload["r_eff"], payload["p0"]))
    return _csv("d_tilde,q_tilde,r_eff,p0", rows)


_CSV_BY_KIND = {
    "pattern": _csv_pattern,
    "fit": _csv_fit,
    "region": _csv_region,
    "scan": _csv_scan,
}

# layout constants for the bar chart
_SVG_W, _SVG_H = 640, 400
_ML, _MR, _MT, _MB = 64, 16, 24, 48


def svg_bar_chart(payload: dict) -> str:
    """Static bar chart of order probabilities: one rect per order."""
    orders = [int(p) for p in payload["orders"]]
    probs = [float(v) for v in payload["probabilities"]]
    plot_w = _SVG_W - _ML - _MR
    plot_h = _SVG_H - _MT - _MB
    ymax = max(max(probs), 1e-12)
    n = len(orders)
    slot = plot_w / n
    bar_w = 0.8 * slot
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<line x1="{_ML}" y1="{_MT + plot_h}" x2="{_ML + plot_w}" y2="{_MT + plot_h}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_MT + plot_h}" '
        'stroke="black" stroke-width="1"/>',
        f'<text x="{_ML + plot_w / 2:.1f}" y="{_SVG_H - 10}" text-anchor="middle" '
        f'font-size="13">diffraction order p</text>',
        f'<text x="14" y="{_MT - 8}" font-size="13">probability</text>',
        f'<text x="{_ML - 6}" y="{_MT + 5}" text-anchor="end" font-size="11">'
        f'{ymax:.3g}</text>',
        f'<text x="{_ML - 6}" y="{_MT + plot_h + 4}" text-anchor="end" font-size="11">0</text>',
    ]
    label_step = max(1, (n + 15) // 16)
    for i, (p, v) in enumerate(zip(orders, probs)):
        x = _ML + i * slot + 0.5 * (slot - bar_w)
        h = plot_h * v / ymax
        y = _MT + plot_h - h
        parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{bar_w:.2f}" '
                     f'height="{h:.2f}" fill="#336699"/>')
        if i % label_step == 0:
            parts.append(f'<text x="{x + 0.5 * bar_w:.2f}" y="{_MT + plot_h + 16}" '
                         f'text-anchor="middle" font-size="11">{p}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit(envelope: ResultEnvelope, fmt: str) -> bytes:
    """Render an envelope in the requested format.

    json works for every payload; csv needs a tabular payload kind; svg is
    the pattern bar chart only.  Mismatches raise ValueError.
    """
    kind = envelope.payload.get("kind")
    if fmt == "json":
        return (structured_text(envelope.as_dict()) + "\n").encode()
    if fmt == "csv":
        builder = _CSV_BY_KIND.get(kind)
        if builder is None:
            raise ValueError(f"payload kind {kind!r} has no CSV form; use json")
        return builder(envelope.payload).encode()
    if fmt == "svg":
        if kind != "pattern":
            raise ValueError(f"svg output is only defined for patterns, not {kind!r}")
        return svg_bar_chart(envelope.payload).encode()
    raise ValueError(f"unknown format {fmt!r} (expected csv, json or svg)")
