#!/usr/bin/env python3
"""Pivot turns across vehicles, gravities, and soils.

Runs a 180 degree heading change for a few machine/ground pairings and
prints how many push-pull cycles each needs, how far the anchored pin
crept, and what the turn cost. The last case shows the failure mode:
half the Earth-weight vehicle on soft ground needs more holding force
than a fully seated spike can supply, so the turn refuses rather than
dragging the anchor.
"""

import math

from spikedozer.earthworks import Terrain
from spikedozer.errors import VehicleStuck
from spikedozer.locomotion import CONSTRUCTION, REFERENCE, Machine
from spikedozer.soils import EARTH, MOON, SOILS

CASES = [
    (REFERENCE, MOON, "medium"),
    (CONSTRUCTION, MOON, "soft"),
    (REFERENCE, EARTH, "hard"),
    (REFERENCE, EARTH, "soft"),
]


def main() -> None:
    print(f"{'vehicle':<14}{'where':<14}{'soil':<8}"
          f"{'cycles':>7}{'pin drift':>12}{'energy':>10}")
    for spec, env, soil_name in CASES:
        terrain = Terrain((120, 120), cell_size=0.25, origin=(-15.0, -15.0),
                          soil=SOILS[soil_name])
        machine = Machine(spec, terrain, env)
        label = f"{spec.name:<14}{env.name:<14}{soil_name:<8}"
        try:
            halves = machine.turn_to(180.0)
        except VehicleStuck as err:
            print(f"{label}   stuck: {err}")
            continue
        cycles = math.ceil(halves / 2.0)
        energy = machine.energy_totals()["total"]
        print(f"{label}{cycles:>7}{machine.max_pin_drift:>12.1e}"
              f"{energy:>9.0f} J")


if __name__ == "__main__":
    main()
