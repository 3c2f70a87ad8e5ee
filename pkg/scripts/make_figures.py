#!/usr/bin/env python3
"""Run the five shipped scenarios with their comparison controllers and
emit CSV logs and SVG plots under out/ (or --out DIR), plus a metric
summary table on stdout."""
import argparse
import math
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from staballoc.harness import run_scenario          # noqa: E402
from staballoc.logio import emit_csv, emit_svg_plots  # noqa: E402
from staballoc.metrics import compute_metrics       # noqa: E402
from staballoc.scenario import load_scenario        # noqa: E402

PAIRS = [
    ("low_speed", ("proposed", "baseline")),
    ("high_speed", ("proposed", "baseline")),
    ("varying_road", ("proposed", "baseline")),
    ("actuator_fault", ("proposed", "baseline")),
    ("suspension_fault", ("proposed", "hybrid")),
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(REPO / "out"))
    ap.add_argument("--no-svg", action="store_true")
    args = ap.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    print(f"{'scenario':<18}{'controller':<11}{'max|beta|':>10}"
          f"{'spin':>6}{'rms roll':>10}{'rms pitch':>10}{'offset':>8}")
    for name, controllers in PAIRS:
        scn = load_scenario(REPO / "scenarios" / f"{name}.scn")
        for ctrl in controllers:
            log = run_scenario(scn, controller=ctrl)
            m = compute_metrics(log)
            stem = f"{name}_{ctrl}"
            emit_csv(log, out_dir / f"{stem}.csv")
            if not args.no_svg:
                emit_svg_plots(log, out_dir, stem)
            print(f"{name:<18}{ctrl:<11}"
                  f"{math.degrees(m.max_beta):>9.2f}d"
                  f"{str(m.spin):>6}"
                  f"{m.rms_roll:>10.5f}{m.rms_pitch:>10.5f}"
                  f"{m.lateral_offset:>8.2f}")
    print(f"\nfiles written to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
