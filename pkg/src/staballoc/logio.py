"""Run logs and their CSV/SVG emitters.

CSV values are written with repr(), the shortest round-trip form, so
parse(emit(log)) reproduces every finite float bit-exactly and repeated
runs produce byte-identical files.  SVG plots are written directly (a few
polylines and axis labels), with no plotting dependency.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

CSV_COLUMNS = (
    "t", "Vx", "Vy", "r", "beta", "z", "phi", "theta", "X", "Y", "psi",
    "d_fl", "d_fr", "d_rl", "d_rr", "T_fl", "T_fr", "T_rl", "T_rr",
    "fz_fl", "fz_fr", "fz_rl", "fz_rr", "N_fl", "N_fr", "N_rl", "N_rr",
    "v1", "v2", "v3", "v4", "v5", "resid",
)


@dataclass
class RunLog:
    """Per-step record of one closed-loop run, columnar.

    `cols` carries the fixed CSV schema (commanded actuator values);
    `u_eff` additionally keeps the post-fault effective actuator vector and
    `r_ref` the yaw-rate reference, both needed by the metrics.
    """
    scenario: str = ""
    controller: str = ""
    dt: float = 0.0
    cols: Dict[str, List[float]] = field(
        default_factory=lambda: {c: [] for c in CSV_COLUMNS})
    u_eff: List[Tuple[float, ...]] = field(default_factory=list)
    r_ref: List[float] = field(default_factory=list)
    diverged: bool = False
    diverged_at: Optional[float] = None
    divergence_reason: str = ""

    def __len__(self) -> int:
        return len(self.cols["t"])

    def append(self, values: Dict[str, float], u_eff: Sequence[float],
               r_ref: float) -> None:
        for c in CSV_COLUMNS:
            self.cols[c].append(values[c])
        self.u_eff.append(tuple(u_eff))
        self.r_ref.append(r_ref)

    def mark_diverged(self, t: float, reason: str) -> None:
        self.diverged = True
        self.diverged_at = t
        self.divergence_reason = reason


def emit_csv(log: RunLog, path: str | Path) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            cols = [log.cols[c] for c in CSV_COLUMNS]
            for row in zip(*cols):
                fh.write(",".join(repr(v) for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return path


def parse_csv(path: str | Path) -> Dict[str, List[float]]:
    path = Path(path)
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise OSError(f"cannot read CSV from {path}: {exc}") from exc
    header = lines[0].split(",")
    data: Dict[str, List[float]] = {h: [] for h in header}
    for line in lines[1:]:
        if not line:
            continue
        for h, v in zip(header, line.split(",")):
            data[h].append(float(v))
    return data


# ---------------------------------------------------------------------------
# SVG emitters


def _svg_header(width: int, height: int) -> str:
    return (f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n'
            f'<rect width="{width}" height="{height}" fill="white"/>\n')


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _polyline(xs: Sequence[float], ys: Sequence[float],
              x0: float, y0: float, w: float, h: float,
              color: str) -> str:
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    if xmax == xmin:
        xmax = xmin + 1.0
    if ymax == ymin:
        ymax = ymin + 1.0
    pts = []
    for x, y in zip(xs, ys):
        px = x0 + (x - xmin) / (xmax - xmin) * w
        py = y0 + h - (y - ymin) / (ymax - ymin) * h
        pts.append(f"{_fmt(px)},{_fmt(py)}")
    return (f'<polyline fill="none" stroke="{color}" stroke-width="1" '
            f'points="{" ".join(pts)}"/>\n')


def _panel(xs: Sequence[float], ys: Sequence[float], label: str,
           x0: float, y0: float, w: float, h: float) -> str:
    out = (f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" '
           f'fill="none" stroke="#999"/>\n')
    out += _polyline(xs, ys, x0, y0, w, h, "#1f5fbf")
    out += (f'<text x="{x0 + 4}" y="{y0 + 14}" font-size="12" '
            f'font-family="sans-serif">{label} '
            f'[{min(ys):.4g}, {max(ys):.4g}]</text>\n')
    return out


TIMESERIES_SIGNALS = ("beta", "r", "Vx", "phi", "theta")


def emit_svg_plots(log: RunLog, out_dir: str | Path, stem: str,
                   obstacle_x: float = 100.0) -> List[Path]:
    """Write a stacked time-series SVG and an X-Y trajectory SVG.

    The trajectory plot marks the obstacle line at x = obstacle_x with a
    dash-dotted stroke.
    """
    out_dir = Path(out_dir)
    if len(log) == 0:
        raise ValueError("cannot plot an empty log")
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create plot directory {out_dir}: {exc}") from exc

    width, panel_h, margin = 720, 110, 12
    t = log.cols["t"]
    n = len(TIMESERIES_SIGNALS)
    height = margin + n * (panel_h + margin)
    svg = _svg_header(width, height)
    y = float(margin)
    for name in TIMESERIES_SIGNALS:
        svg += _panel(t, log.cols[name], name, margin, y,
                      width - 2 * margin, panel_h)
        y += panel_h + margin
    svg += "</svg>\n"
    ts_path = out_dir / f"{stem}_timeseries.svg"

    xs, ys = log.cols["X"], log.cols["Y"]
    w2, h2, m2 = 720, 320, 30
    xmin, xmax = min(min(xs), 0.0), max(max(xs), obstacle_x + 10.0)
    ymin, ymax = min(min(ys), -1.0), max(max(ys), 1.0)
    traj = _svg_header(w2, h2)
    span_x = xmax - xmin
    span_y = ymax - ymin
    pts = []
    for x, yv in zip(xs, ys):
        px = m2 + (x - xmin) / span_x * (w2 - 2 * m2)
        py = h2 - m2 - (yv - ymin) / span_y * (h2 - 2 * m2)
        pts.append(f"{_fmt(px)},{_fmt(py)}")
    ox = m2 + (obstacle_x - xmin) / span_x * (w2 - 2 * m2)
    traj += (f'<line x1="{_fmt(ox)}" y1="{m2}" x2="{_fmt(ox)}" '
             f'y2="{h2 - m2}" stroke="#e754a6" stroke-width="2" '
             f'stroke-dasharray="8 3 2 3"/>\n')
    traj += (f'<polyline fill="none" stroke="#1f5fbf" stroke-width="1.5" '
             f'points="{" ".join(pts)}"/>\n')
    traj += (f'<text x="{m2}" y="{m2 - 8}" font-size="12" '
             f'font-family="sans-serif">trajectory X-Y [m], obstacle line '
             f'at x={obstacle_x:g}</text>\n')
    traj += "</svg>\n"
    traj_path = out_dir / f"{stem}_trajectory.svg"

    try:
        ts_path.write_text(svg)
        traj_path.write_text(traj)
    except OSError as exc:
        raise OSError(f"cannot write SVG under {out_dir}: {exc}") from exc
    return [ts_path, traj_path]
