#!/usr/bin/env python3
"""Gain-tuning workbench: run a scenario (or all five) with gain and
allocator overrides from the command line and print the outcome metrics.

Examples:
    python scripts/tune_gains.py --scenario varying_road \\
        --controller proposed --set kp_beta_mz=45000 --set kp_fy=60000
    python scripts/tune_gains.py --all --alloc gamma=4000
"""
import argparse
import math
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from staballoc.allocator import AllocatorConfig     # noqa: E402
from staballoc.controllers import Gains             # noqa: E402
from staballoc.harness import run_scenario          # noqa: E402
from staballoc.metrics import compute_metrics       # noqa: E402
from staballoc.scenario import load_scenario        # noqa: E402

ALL = ["low_speed", "high_speed", "varying_road", "actuator_fault",
       "suspension_fault"]


def parse_pairs(pairs):
    out = {}
    for token in pairs or []:
        key, _, value = token.partition("=")
        out[key] = float(value)
    return out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default=None,
                    help="scenario name (default: all five)")
    ap.add_argument("--controller", default=None,
                    help="override the scenario's controller")
    ap.add_argument("--set", action="append", dest="gain_sets",
                    metavar="NAME=VALUE", help="gain override")
    ap.add_argument("--alloc", action="append", dest="alloc_sets",
                    metavar="NAME=VALUE", help="allocator override")
    args = ap.parse_args()

    gains = Gains().with_overrides(parse_pairs(args.gain_sets))
    acfg = AllocatorConfig()
    for key, value in parse_pairs(args.alloc_sets).items():
        if not hasattr(acfg, key):
            ap.error(f"unknown allocator setting {key!r}")
        setattr(acfg, key, value)

    names = [args.scenario] if args.scenario else ALL
    for name in names:
        scn = load_scenario(REPO / "scenarios" / f"{name}.scn")
        controllers = ([args.controller] if args.controller
                       else ["proposed", "baseline"])
        for ctrl in controllers:
            log = run_scenario(scn, gains=gains, alloc_config=acfg,
                               controller=ctrl)
            m = compute_metrics(log)
            flags = ("SPIN " if m.spin else "") + \
                ("DIVERGED " if m.diverged else "")
            print(f"{name:<18}{ctrl:<10} max|beta|="
                  f"{math.degrees(m.max_beta):6.2f}d  "
                  f"rms roll={m.rms_roll:.5f}  rms pitch={m.rms_pitch:.5f}  "
                  f"offset={m.lateral_offset:6.2f}  {flags}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
