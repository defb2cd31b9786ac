#!/usr/bin/env python3
"""Plan and execute a full landing-pad mission, then print the audit.

Defaults match the lunar construction case: 20 m pad radius, 0.4 m
depth, construction vehicle, soft regolith. Flags shrink the job for
quick experiments.
"""

import argparse
import time

from spikedozer.locomotion import CONSTRUCTION
from spikedozer.planner import (
    PadSpec,
    execute_plan,
    plan_pad_mission,
    validate_plan,
)
from spikedozer.soils import MOON, SOILS


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=float, default=20.0)
    ap.add_argument("--depth", type=float, default=0.40)
    ap.add_argument("--soil", choices=sorted(SOILS), default="soft")
    ap.add_argument("--skip-validate", action="store_true")
    args = ap.parse_args()

    soil = SOILS[args.soil]
    pad = PadSpec(radius=args.radius, depth=args.depth)

    t0 = time.perf_counter()
    plan = plan_pad_mission(pad, CONSTRUCTION, MOON, soil)
    t1 = time.perf_counter()
    print(f"planned {len(plan.trips)} trips over {plan.n_lanes} lanes "
          f"in {t1 - t0:.2f} s")
    print(f"  bank volume {plan.planned_bank_volume:.1f} m^3, "
          f"energy budget {plan.energy_budget / 1e6:.2f} MJ")

    if not args.skip_validate:
        findings = validate_plan(plan, MOON, soil)
        t2 = time.perf_counter()
        print(f"validated in {t2 - t1:.2f} s: {len(findings)} findings")
        for f in findings:
            print(f"  {f}")
        if findings:
            raise SystemExit(1)

    t3 = time.perf_counter()
    result = execute_plan(plan, MOON, soil)
    t4 = time.perf_counter()

    rel = result.audit_residual / max(result.excavated_bank, 1e-12)
    print(f"executed {result.trips_run} trips in {t4 - t3:.2f} s")
    print(f"  excavated {result.excavated_bank:.2f} m^3 bank, "
          f"audit residual {rel:.2e} (relative)")
    for key, val in result.energy.items():
        if key == "efficiency":
            print(f"  {key}: {val:.4f}")
        else:
            print(f"  {key}: {val / 1e6:.3f} MJ")


if __name__ == "__main__":
    main()
