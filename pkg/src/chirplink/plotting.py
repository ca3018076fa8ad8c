"""Self-contained SVG line plots for sweep results (no plotting stack needed)."""

from __future__ import annotations

import numpy as np

from .harness import SimRecord, shannon_capacity_bps

_WIDTH, _HEIGHT = 720, 480
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 20, 20, 50
_COLORS = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#e377c2",
)


def _ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    first = np.ceil(lo / step) * step
    return [first + i * step for i in range(int((hi - first) / step) + 1)]


def _group_key(record: SimRecord) -> tuple[str, int]:
    return (record.scheme, record.sf)


def plot_records_svg(
    records: list[SimRecord], path, kind: str = "ber", bandwidth_hz: float = 250e3
) -> None:
    """Write an SVG of axis-dB versus log10(BER) (or throughput) per curve.

    ``kind`` is ``"ber"`` (log10 of the bit error ratio; zero-error points are
    skipped) or ``"throughput"`` (kbps, with the Shannon capacity at
    ``bandwidth_hz`` added for SNR-axis sweeps).
    """
    if kind not in ("ber", "throughput"):
        raise ValueError(f"unknown plot kind {kind!r}")
    if not records:
        raise ValueError("nothing to plot")
    axis = records[0].axis

    curves: dict[tuple[str, int], list[tuple[float, float]]] = {}
    for r in sorted(records, key=lambda r: (_group_key(r), r.axis_db)):
        if kind == "ber":
            if r.ber <= 0:
                continue
            point = (r.axis_db, float(np.log10(r.ber)))
        else:
            point = (r.axis_db, r.throughput_bps / 1e3)
        curves.setdefault(_group_key(r), []).append(point)

    labelled = [(f"{scheme} sf{sf}", pts) for (scheme, sf), pts in curves.items()]
    if kind == "throughput" and axis == "snr":
        xs = sorted({r.axis_db for r in records})
        labelled.append(
            ("shannon", [(x, shannon_capacity_bps(x, bandwidth_hz) / 1e3) for x in xs])
        )

    pts_all = [p for _, pts in labelled for p in pts]
    if not pts_all:
        raise ValueError("no plottable points (all-zero error ratios?)")
    xlo = min(p[0] for p in pts_all)
    xhi = max(p[0] for p in pts_all)
    ylo = min(p[1] for p in pts_all)
    yhi = max(p[1] for p in pts_all)
    if xhi == xlo:
        xhi = xlo + 1.0
    if yhi == ylo:
        yhi = ylo + 1.0
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad

    def sx(x: float) -> float:
        return _LEFT + (x - xlo) / (xhi - xlo) * (_WIDTH - _LEFT - _RIGHT)

    def sy(y: float) -> float:
        return _HEIGHT - _BOTTOM - (y - ylo) / (yhi - ylo) * (_HEIGHT - _TOP - _BOTTOM)

    xlabel = "Eb/N0 (dB)" if axis == "ebn0" else "SNR (dB)"
    ylabel = "log10(BER)" if kind == "ber" else "throughput (kbps)"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{_WIDTH - _LEFT - _RIGHT}" '
        f'height="{_HEIGHT - _TOP - _BOTTOM}" fill="none" stroke="black"/>',
    ]
    for tx in _ticks(xlo, xhi):
        px = sx(tx)
        out.append(
            f'<line x1="{px:.1f}" y1="{_HEIGHT - _BOTTOM}" x2="{px:.1f}" '
            f'y2="{_HEIGHT - _BOTTOM + 5}" stroke="black"/>'
        )
        out.append(
            f'<text x="{px:.1f}" y="{_HEIGHT - _BOTTOM + 18}" '
            f'text-anchor="middle">{tx:g}</text>'
        )
    for ty in _ticks(ylo, yhi):
        py = sy(ty)
        out.append(f'<line x1="{_LEFT - 5}" y1="{py:.1f}" x2="{_LEFT}" y2="{py:.1f}" stroke="black"/>')
        out.append(f'<text x="{_LEFT - 8}" y="{py + 4:.1f}" text-anchor="end">{ty:g}</text>')
        out.append(
            f'<line x1="{_LEFT}" y1="{py:.1f}" x2="{_WIDTH - _RIGHT}" y2="{py:.1f}" '
            f'stroke="#dddddd" stroke-width="0.5"/>'
        )
    out.append(
        f'<text x="{(_LEFT + _WIDTH - _RIGHT) / 2}" y="{_HEIGHT - 12}" '
        f'text-anchor="middle">{xlabel}</text>'
    )
    out.append(
        f'<text x="16" y="{(_TOP + _HEIGHT - _BOTTOM) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(_TOP + _HEIGHT - _BOTTOM) / 2})">{ylabel}</text>'
    )

    for i, (label, pts) in enumerate(labelled):
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in pts:
            out.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="2.5" fill="{color}"/>')
        ly = _TOP + 16 + 16 * i
        out.append(
            f'<line x1="{_WIDTH - _RIGHT - 150}" y1="{ly - 4}" x2="{_WIDTH - _RIGHT - 126}" '
            f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
        )
        out.append(f'<text x="{_WIDTH - _RIGHT - 120}" y="{ly}">{label}</text>')
    out.append("</svg>")

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
