"""Landing pad mission planning and execution.

A circular pad is excavated in radial lanes.  Each lane is a wedge of
cells claimed by exactly one lane (first lane to reach a cell owns it),
so the sum of lane volumes is exactly the pad volume and no cell is cut
twice.  Lanes are worked outermost strip first: the machine backs to the
inner end of a strip, cuts outward along the ray with the blade limited
to the strip's claimed cells, pushes the prism past the rim, and dumps
it on a berm ring staged over several radii so no single pile grows tall
enough to avalanche back onto the pad.  Deep pads are taken in equal
lifts sized to the blade's single-pass cut.

The full depth is reached in lifts, every trip is packed to the blade's
carry capacity from the claim map, and the machine turns in place at a
hub near the pad center between lanes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .earthworks import SWELL_FACTOR, Terrain
from .errors import SimulationError
from .locomotion import Machine, VehicleSpec, traverse_check
from .sensing import PenetrationRecorder
from .soils import Environment, SoilField, SoilProfile, crust_breaks
from .traction import flip_margin

# Pads shallower than this fail to trap engine exhaust recirculation and
# deeper ones waste mission energy for no blast benefit.
MIN_PAD_DEPTH = 0.30
MAX_PAD_DEPTH = 0.50

# Width given up on each lane so small lateral drift from in-place turns
# never lets a lane edge escape the blade.
LANE_ALIGNMENT_MARGIN = 1.0
LANE_HEADING_TOL_DEG = 0.02


@dataclass(frozen=True)
class PadSpec:
    """What to build, the berm layout, and the operating caps.

    Spoil is dumped on a retreating line along each lane ray: the first
    trip of a lane carries to the outermost dump spot and every later
    trip stops one `berm_ring_spacing` short of the previous one, so no
    pile is ever climbed or ploughed through and the spoil settles into
    concentric berm rings starting `berm_setback` beyond the rim.
    """

    radius: float = 20.0
    depth: float = 0.40
    cell_size: float = 0.25
    berm_setback: float = 4.0
    berm_ring_spacing: float = 2.0
    hub_radius: float = 2.0
    max_push_distance: float = 60.0
    max_loaded_slope_deg: float = 20.0
    force_depth_override: bool = False

    def __post_init__(self) -> None:
        if self.radius < 0.0:
            raise ValueError("pad radius must be non-negative")
        if self.depth <= 0.0:
            raise ValueError("pad depth must be positive")
        if self.cell_size <= 0.0:
            raise ValueError("cell size must be positive")
        if self.berm_setback <= 0.0:
            raise ValueError("berm setback must be positive")
        if self.berm_ring_spacing <= 0.0:
            raise ValueError("berm ring spacing must be positive")
        if self.max_push_distance <= 0.0:
            raise ValueError("push distance cap must be positive")
        if not 0.0 < self.max_loaded_slope_deg < 90.0:
            raise ValueError("loaded slope cap must be in (0, 90) degrees")
        if not (MIN_PAD_DEPTH <= self.depth <= MAX_PAD_DEPTH
                or self.force_depth_override):
            raise ValueError(
                f"pad depth {self.depth} m is outside the {MIN_PAD_DEPTH}-"
                f"{MAX_PAD_DEPTH} m band that keeps exhaust scour contained "
                "at sane cost; set force_depth_override to plan it anyway")


@dataclass(frozen=True)
class Trip:
    """One cut-carry-dump pass along a lane."""

    lane: int
    lift: int
    seq: int  # order within the lane
    azimuth_deg: float
    start_r: float
    deposit_r: float
    target_elevation: float
    cells: frozenset[tuple[int, int]]
    volume_loose: float  # m^3 the blade will carry

    @property
    def volume_bank(self) -> float:
        return self.volume_loose / SWELL_FACTOR


@dataclass
class MissionPlan:
    pad: PadSpec
    vehicle: VehicleSpec
    n_lanes: int
    n_lifts: int
    lift_depth: float
    center: tuple[float, float]
    shape: tuple[int, int]
    origin: tuple[float, float]
    claims: np.ndarray  # lane id per cell, -1 outside the pad
    trips: list[Trip]
    planned_bank_volume: float
    energy_budget: float = 0.0

    def lane_azimuth_deg(self, lane: int) -> float:
        return 360.0 * lane / self.n_lanes


@dataclass
class MissionResult:
    plan: MissionPlan
    terrain: Terrain
    machine: Machine
    excavated_bank: float
    audit_residual: float
    trips_run: int
    energy: dict[str, float]


def _claim_lanes(n_cells: int, origin: tuple[float, float], cell_size: float,
                 radius: float, n_lanes: int, lane_width: float,
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Assign every pad cell to a lane: the first lane whose wedge holds
    the cell center wins, so claims partition the pad exactly."""
    idx = (np.arange(n_cells) + 0.5) * cell_size
    X = origin[0] + idx[np.newaxis, :]
    Y = origin[1] + idx[:, np.newaxis]
    R = np.hypot(X, Y)
    claims = np.full((n_cells, n_cells), -1, dtype=np.int32)
    in_pad = R <= radius
    for lane in range(n_lanes):
        az = 2.0 * math.pi * lane / n_lanes
        dx, dy = math.cos(az), math.sin(az)
        along = X * dx + Y * dy
        perp = -X * dy + Y * dx
        wedge = in_pad & (claims < 0) & (along >= 0.0) \
            & (np.abs(perp) <= 0.5 * lane_width)
        claims[wedge] = lane
    if np.any(in_pad & (claims < 0)):
        raise SimulationError("lane claiming left pad cells unowned")
    return claims, R


def plan_pad_mission(
    pad: PadSpec,
    vehicle: VehicleSpec,
    env: Environment,
    soil: SoilProfile,
) -> MissionPlan:
    """Lay out lanes, claims, and trips for a circular pad."""
    lane_pitch = vehicle.blade_width - LANE_ALIGNMENT_MARGIN
    if lane_pitch <= 0.0:
        raise ValueError("blade too narrow for the lane alignment margin")
    n_lanes = max(4, math.ceil(2.0 * math.pi * pad.radius / lane_pitch))
    lane_width = 2.0 * math.pi * pad.radius / n_lanes

    n_lifts = max(1, math.ceil(pad.depth / vehicle.blade_max_cut))
    lift_depth = pad.depth / n_lifts

    cell_area = pad.cell_size * pad.cell_size
    vol_per_cell = cell_area * lift_depth * SWELL_FACTOR  # loose
    cells_per_trip = max(1, math.floor(vehicle.blade_capacity / vol_per_cell))

    # Cheap pad-local claim pass to learn per-lane cell loads; cell
    # centers sit on the same lattice as the final grid, so counts match.
    local_half = math.ceil((pad.radius + pad.cell_size) / pad.cell_size)
    local_claims, _ = _claim_lanes(
        2 * local_half, (-local_half * pad.cell_size,) * 2, pad.cell_size,
        pad.radius, n_lanes, lane_width)
    lane_trips = [
        n_lifts * math.ceil(int(np.sum(local_claims == lane)) / cells_per_trip)
        for lane in range(n_lanes)]

    max_blade_reach = 0.5 * (vehicle.base_separation + vehicle.stroke_length) \
        + vehicle.blade_lead
    deposit_r_max = pad.radius + pad.berm_setback \
        + pad.berm_ring_spacing * max(0, max(lane_trips, default=1) - 1)
    half_extent = deposit_r_max + max_blade_reach + 6.0
    cells_half = math.ceil(half_extent / pad.cell_size)
    n_cells = 2 * cells_half
    origin = (-cells_half * pad.cell_size, -cells_half * pad.cell_size)
    center = (0.0, 0.0)
    shape = (n_cells, n_cells)

    claims, R = _claim_lanes(n_cells, origin, pad.cell_size,
                             pad.radius, n_lanes, lane_width)

    trips: list[Trip] = []
    for lane in range(n_lanes):
        ii, jj = np.nonzero(claims == lane)
        order = sorted(
            range(len(ii)),
            key=lambda k: (-float(R[ii[k], jj[k]]), int(ii[k]), int(jj[k])))
        cells = [(int(ii[k]), int(jj[k])) for k in order]
        radii = [float(R[c]) for c in cells]
        seq = 0
        for lift in range(n_lifts):
            target = -lift_depth * (lift + 1)
            for s in range(0, len(cells), cells_per_trip):
                group = cells[s:s + cells_per_trip]
                r_in = min(radii[s:s + len(group)])
                start_r = r_in - pad.cell_size - max_blade_reach - 0.3
                # retreating dump line: later trips stop short of all
                # earlier piles on this lane
                deposit_r = pad.radius + pad.berm_setback \
                    + pad.berm_ring_spacing * (lane_trips[lane] - 1 - seq)
                trips.append(Trip(
                    lane=lane, lift=lift, seq=seq,
                    azimuth_deg=360.0 * lane / n_lanes,
                    start_r=start_r,
                    deposit_r=deposit_r,
                    target_elevation=target,
                    cells=frozenset(group),
                    volume_loose=len(group) * vol_per_cell,
                ))
                seq += 1

    for trip in trips:
        push = trip.deposit_r - trip.start_r
        if push > pad.max_push_distance:
            raise ValueError(
                f"lane {trip.lane} lift {trip.lift} needs a {push:.1f} m push; "
                f"the {pad.max_push_distance:.9g} m push cap binds at this "
                "pad radius and berm layout")

    planned_bank = sum(t.volume_bank for t in trips)
    plan = MissionPlan(
        pad=pad, vehicle=vehicle,
        n_lanes=n_lanes, n_lifts=n_lifts, lift_depth=lift_depth,
        center=center, shape=shape, origin=origin,
        claims=claims, trips=trips,
        planned_bank_volume=planned_bank,
    )
    plan.energy_budget = estimate_energy(plan, vehicle, env, soil)
    return plan


def estimate_energy(
    plan: MissionPlan,
    vehicle: VehicleSpec,
    env: Environment,
    soil: SoilProfile,
) -> float:
    """Predicted mission energy (J) from the same force models.

    Walks every trip's push leg in closed form instead of stepping the
    terrain.  The prism ramps from empty to the trip's full load across
    the cut span (taken from the claimed cell radii), then rides at full
    load to the dump spot, so drag is charged at half weight over the
    cut and full weight over the carry.  Face work is cutting resistance
    times bank volume, the rim climb lifts machine plus load out of the
    pit, and anchoring plus its prepaid extraction are charged per
    half-cycle over the loaded span at that span's mean draft.  Return
    legs and hub approaches run empty at near-zero draft and descents
    recover nothing, so they cost only the lane changes, each priced as
    pivot friction swept through a half-rotation of in-place turning.
    """
    g = env.gravity
    k = soil.anchor_work_slope
    cell = plan.pad.cell_size
    cx, cy = plan.center
    ox, oy = plan.origin
    stroke_gain = max(vehicle.stroke_length - 2.0 * anchoring_slip_of(soil),
                      1e-6)
    gauge = vehicle.base_separation + 0.5 * vehicle.stroke_length
    total = 0.0
    lane_changes = 0
    last_lane = -1
    for trip in plan.trips:
        if trip.lane != last_lane:
            lane_changes += 1
            last_lane = trip.lane
        radii = [math.hypot(ox + (j + 0.5) * cell - cx,
                            oy + (i + 0.5) * cell - cy)
                 for i, j in trip.cells]
        r_lo = min(radii) - 0.5 * cell
        r_hi = max(radii) + 0.5 * cell
        depth = -trip.target_elevation
        face_work = vehicle.blade_cut_coeff * soil.resistance_at(depth) \
            * trip.volume_bank
        drag_full = vehicle.prism_friction * soil.loose_density \
            * trip.volume_loose * g
        drag_work = drag_full * (0.5 * (r_hi - r_lo)
                                 + max(0.0, trip.deposit_r - r_hi))
        climb = (vehicle.mass + soil.loose_density * trip.volume_loose) \
            * g * depth
        useful = face_work + drag_work + climb
        loaded_span = max(trip.deposit_r - r_lo, cell)
        halves = math.ceil(2.0 * loaded_span / stroke_gain)
        anchoring = halves * k * (useful / loaded_span)
        total += useful + anchoring * (1.0 + vehicle.extraction_ratio)
    pivot_friction = soil.surface_friction * 0.5 * vehicle.mass * g
    total += lane_changes * pivot_friction * math.pi * gauge
    return total


def anchoring_slip_of(soil: SoilProfile) -> float:
    return 2.0 * soil.anchor_work_slope


def predict_peak_draft(plan: MissionPlan, trip: Trip, env: Environment,
                       soil: SoilProfile) -> float:
    """Worst draft a trip should see: a full-width cut at the per-pass
    thickness limit, full prism drag, and the climb over the pit rim
    averaged across the machine's own support footprint."""
    vehicle = plan.vehicle
    g = env.gravity
    depth = -trip.target_elevation
    face = vehicle.blade_cut_coeff * vehicle.blade_width \
        * vehicle.blade_max_cut * soil.resistance_at(depth)
    drag = vehicle.prism_friction * soil.loose_density * trip.volume_loose * g
    gauge = vehicle.base_separation + 0.5 * vehicle.stroke_length
    rim_sin = depth / math.hypot(depth, gauge)
    climb = (vehicle.mass + soil.loose_density * trip.volume_loose) * g * rim_sin
    return face + drag + climb


def validate_plan(
    plan: MissionPlan,
    env: Environment,
    soil: SoilProfile,
    terrain: Terrain | None = None,
) -> list[str]:
    """Feasibility findings for a plan; empty means clear to execute.

    Checks every trip against the push-distance cap, blade capacity,
    anchoring capacity and flip stability at the predicted peak draft,
    the loaded-slope doctrine on the starting terrain, and crust
    penetrability.  Findings are data for the operator, not errors.
    """
    vehicle = plan.vehicle
    violations: list[str] = []

    if soil.duricrust is not None:
        press = vehicle.spike_press_mass * env.gravity
        if vehicle.has_crust_actuator:
            press += vehicle.crust_press_share * vehicle.mass * env.gravity
        if not crust_breaks(soil.duricrust, press, vehicle.spike.tip_area):
            violations.append(
                f"duricrust at {soil.duricrust.strength:.9g} Pa resists the "
                f"{press:.9g} N spike press; spikes cannot seat")

    start_slope = terrain.max_surface_slope_deg() if terrain is not None else 0.0
    if not traverse_check(min(start_slope, 89.9), True, soil.repose_angle_deg):
        violations.append(
            f"starting terrain has {start_slope:.1f} deg slopes above the "
            "loaded traverse limit")

    weight = vehicle.mass * env.gravity
    n_spikes = len(vehicle.spike_offsets)
    for n, trip in enumerate(plan.trips):
        push = trip.deposit_r - trip.start_r
        if push > plan.pad.max_push_distance + 1e-9:
            violations.append(
                f"trip {n}: push distance {push:.9g} m exceeds the "
                f"{plan.pad.max_push_distance:.9g} m cap")
        if trip.volume_loose > vehicle.blade_capacity + 1e-9:
            violations.append(
                f"trip {n}: planned prism {trip.volume_loose:.9g} m3 exceeds "
                f"blade capacity {vehicle.blade_capacity:.9g} m3")
        draft = predict_peak_draft(plan, trip, env, soil)
        depth = vehicle.spike.depth_for_capacity(draft / n_spikes, soil)
        if depth is None:
            violations.append(
                f"trip {n}: predicted draft {draft:.9g} N exceeds spike "
                "holding capacity at full seating depth")
        elif flip_margin(weight, draft,
                         vehicle.spike.thrust_angle_deg(depth)) <= 0.0:
            violations.append(
                f"trip {n}: predicted draft {draft:.9g} N lifts the machine "
                "at the seated thrust angle; flip risk")
    return violations


def describe_plan(plan: MissionPlan) -> str:
    """Deterministic human-readable plan listing."""
    pad = plan.pad
    lines = [
        "pad mission plan",
        f"radius {pad.radius:.9g} m, depth {pad.depth:.9g} m, "
        f"cell {pad.cell_size:.9g} m",
        f"lanes {plan.n_lanes}, lifts {plan.n_lifts} of "
        f"{plan.lift_depth:.9g} m, trips {len(plan.trips)}",
        f"planned bank volume {plan.planned_bank_volume:.9g} m3",
        f"energy budget {plan.energy_budget:.9g} J",
        "",
        "trip,lane,lift,azimuth_deg,start_r,deposit_r,target_z,cells,volume_loose",
    ]
    for n, t in enumerate(plan.trips):
        lines.append(
            f"{n},{t.lane},{t.lift},{t.azimuth_deg:.9g},{t.start_r:.9g},"
            f"{t.deposit_r:.9g},{t.target_elevation:.9g},{len(t.cells)},"
            f"{t.volume_loose:.9g}")
    return "\n".join(lines) + "\n"


def execute_plan(
    plan: MissionPlan,
    env: Environment,
    soil: SoilProfile | SoilField,
    recorder: PenetrationRecorder | None = None,
) -> MissionResult:
    """Run the planned mission on a fresh flat terrain."""
    terrain = Terrain(plan.shape, cell_size=plan.pad.cell_size,
                      origin=plan.origin, soil=soil)
    if recorder is None:
        recorder = PenetrationRecorder(terrain.soil)
    machine = Machine(plan.vehicle, terrain, env,
                      x=plan.center[0], y=plan.center[1],
                      heading_deg=plan.lane_azimuth_deg(0),
                      recorder=recorder)
    lane_margin = 0.5 * (plan.vehicle.blade_width
                         - 2.0 * math.pi * plan.pad.radius / plan.n_lanes)

    cx, cy = plan.center
    current_lane = 0
    trips_run = 0
    for trip in plan.trips:
        az = math.radians(trip.azimuth_deg)
        dx, dy = math.cos(az), math.sin(az)
        if trip.lane != current_lane:
            # Retreat to the hub, aim straight at an entry point on the
            # new ray, drive that leg, then square up on the ray.  The
            # entry point stays several metres ahead of the hub even when
            # the trip itself starts behind it, so the leg is never
            # degenerate and the squaring turn stays small; reverse
            # positioning below covers the remaining distance.  Turning
            # translates the center, so the aim is recomputed until it
            # survives its own turn, and the whole pass repeats if the
            # squaring pivot still walked the machine off the claim.
            _move_to_r(machine, cx, cy, current_lane, plan, plan.pad.hub_radius)
            r_entry = max(trip.start_r, plan.pad.hub_radius + 4.0)
            tol = math.radians(LANE_HEADING_TOL_DEG)
            guard = max(lane_margin - plan.pad.cell_size, 0.0)
            offset = 0.0
            for _ in range(3):
                ex = cx + r_entry * dx
                ey = cy + r_entry * dy
                for _ in range(4):
                    if math.hypot(ex - machine.x, ey - machine.y) <= 1e-6:
                        break
                    bearing = math.atan2(ey - machine.y, ex - machine.x)
                    if abs(Machine._wrap(bearing - machine.heading)) <= tol:
                        break
                    machine.turn_to(math.degrees(bearing),
                                    tol_deg=LANE_HEADING_TOL_DEG)
                leg = math.hypot(ex - machine.x, ey - machine.y)
                if leg > 1e-6:
                    machine.advance(leg)
                machine.turn_to(trip.azimuth_deg, tol_deg=LANE_HEADING_TOL_DEG)
                offset = -(machine.x - cx) * dy + (machine.y - cy) * dx
                if abs(offset) <= guard:
                    break
                r_entry = (machine.x - cx) * dx + (machine.y - cy) * dy + 6.0
            else:
                raise SimulationError(
                    f"lane {trip.lane}: lateral drift {offset:.3f} m exceeds "
                    "the claim margin")
            current_lane = trip.lane
        r_now = (machine.x - cx) * dx + (machine.y - cy) * dy
        delta = trip.start_r - r_now
        if delta > 1e-9:
            machine.advance(delta)
        elif delta < -1e-9:
            machine.advance(-delta, reverse=True)
        cells = trip.cells
        machine.set_blade(trip.target_elevation,
                          mask=lambda i, j, cells=cells: (i, j) in cells)
        machine.advance(trip.deposit_r - trip.start_r)
        machine.set_blade(None)
        machine.dump_prism()
        trips_run += 1

    audit = terrain.audit()
    return MissionResult(
        plan=plan,
        terrain=terrain,
        machine=machine,
        excavated_bank=audit.bank_removed,
        audit_residual=audit.residual,
        trips_run=trips_run,
        energy=machine.energy_totals(),
    )


def _move_to_r(machine: Machine, cx: float, cy: float, lane: int,
               plan: MissionPlan, r_target: float) -> None:
    az = math.radians(plan.lane_azimuth_deg(lane))
    dx, dy = math.cos(az), math.sin(az)
    r_now = (machine.x - cx) * dx + (machine.y - cy) * dy
    delta = r_target - r_now
    if delta > 1e-9:
        machine.advance(delta)
    elif delta < -1e-9:
        machine.advance(-delta, reverse=True)
