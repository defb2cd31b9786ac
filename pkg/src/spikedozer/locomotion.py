"""Push-pull locomotion on interlocking ground spikes.

The machine is two frames sharing one prismatic axis.  Rams push the
frames apart (expansion) or pull them together (contraction).  Raked
spikes on each frame wedge into the ground when their frame is shoved
against the rake, so one frame anchors while the other slides:

    expansion    rear frame seats and holds, front frame advances
    contraction  front frame seats and holds, rear frame advances

Seating is not free.  The seating frame slips backward while its spikes
ram in against a draft that grows linearly from zero to the stroke load,
which costs both stroke (the slip) and energy (the anchoring work).
Unseating costs a configured fraction of the seating energy and every
seated spike comes out exactly once, so that charge is carried in the
same half-cycle that seats it.  Those terms against the drawbar work
delivered define tractive efficiency.

Turning anchors a single spike on one side as a pin and strokes the axis
so the free frame swings around it.  Pose updates during a turn are
reconstructed from the pin position, so the anchor point cannot drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .earthworks import SWELL_FACTOR, Terrain, ripper_draft
from .errors import FlipInstability, VehicleStuck
from .sensing import PenetrationRecorder
from .soils import Environment, SoilProfile, crust_breaks
from .traction import SpikeGeometry, anchoring_slip, lift_force, ripper_downforce

STEP = 0.01  # m, quasi-static integration increment
LOADED_SLOPE_LIMIT_DEG = 20.0
UNLOADED_TILT_LIMIT_DEG = 40.0

# Drawbar pull per unit mass of a conventional tracked machine, used as
# the comparison baseline: its traction follows ground pressure, so low
# gravity cuts the pull ratio on top of cutting the weight.
CONVENTIONAL_PULL_RATIO = {"earth": 0.4, "moon": 0.21}


def conventional_drawbar_per_mass(env: Environment) -> float:
    """Drawbar pull per kilogram for a tracked comparison vehicle (N/kg)."""
    try:
        ratio = CONVENTIONAL_PULL_RATIO[env.name]
    except KeyError:
        raise ValueError(f"no tracked-vehicle baseline for {env.name!r}")
    return ratio * env.gravity


def draft_balance_curvature(weight_offset: float, spec: VehicleSpec) -> float:
    """Signed path curvature (1/m) from a lateral payload shift.

    Offsetting the carried weight from the central axis unbalances the
    draft between the two spike rows and bends an otherwise straight
    path.  The drive geometry puts the straight-line point off axis, so
    shifting the weight inward from it bends the path one way and
    shifting it outboard bends it the other.  Modeled as a calibrated
    linear map; the gain is a vehicle parameter, not derived.
    """
    if abs(weight_offset) > spec.half_width + 1e-12:
        raise ValueError("weight offset beyond the spike row")
    return spec.curvature_gain * (weight_offset - spec.curvature_balance_offset)


def traverse_check(slope_deg: float, loaded: bool, repose_angle_deg: float) -> bool:
    """Static go/no-go for holding a grade.

    Loaded, the blade load caps the climb well below the machine's own
    limit.  Unloaded, the spikes anchor in material that is itself stable
    up to its repose angle, so a soil at repose can be climbed even past
    the bare chassis tilt limit.
    """
    if not 0.0 <= slope_deg < 90.0:
        raise ValueError("slope must be in [0, 90) degrees")
    if not 0.0 < repose_angle_deg < 90.0:
        raise ValueError("repose angle must be in (0, 90) degrees")
    if loaded:
        limit = min(LOADED_SLOPE_LIMIT_DEG, repose_angle_deg)
    else:
        limit = max(UNLOADED_TILT_LIMIT_DEG, repose_angle_deg)
    return slope_deg <= limit + 1e-12


@dataclass(frozen=True)
class VehicleSpec:
    """Geometry, masses, and tool limits of one machine.

    spike_offsets       lateral spike positions on each frame (m, +left)
    blade_capacity      most spoil the blade can push (m^3, loose)
    blade_max_cut       deepest single-pass cut (m)
    extraction_ratio    energy to unseat a spike as a fraction of the
                        energy that seated it
    spike_press_mass    mass equivalent of the seating press (kg); press
                        force is this times local gravity
    crust_press_share   fraction of vehicle weight the hold-down actuator
                        can add on top of the press when crust resists
    """

    name: str
    mass: float
    stroke_length: float
    base_separation: float
    spike: SpikeGeometry
    spike_offsets: tuple[float, ...] = (0.4, -0.4)
    blade_width: float = 1.0
    blade_max_cut: float = 0.10
    blade_capacity: float = 0.5
    blade_lead: float = 0.5
    ripper_width: float = 0.5
    ripper_rake_deg: float = 35.0
    ripper_lead: float = 0.5
    extraction_ratio: float = 0.5
    rolling_coeff: float = 0.0
    spike_press_mass: float = 7.0 / 9.81
    crust_press_share: float = 0.5
    has_crust_actuator: bool = True
    heading_tolerance_deg: float = 2.0
    # cutting coefficients scale penetration resistance down to a wide
    # shallow-cut face pressure; raw q is a narrow-probe value
    blade_cut_coeff: float = 0.01
    prism_friction: float = 0.8
    ripper_cut_coeff: float = 0.01
    # path curvature per metre of payload offset from the balance point
    curvature_gain: float = 0.15
    curvature_balance_offset: float = 0.2

    def __post_init__(self) -> None:
        if self.mass <= 0.0:
            raise ValueError("vehicle mass must be positive")
        if self.stroke_length <= 0.0:
            raise ValueError("stroke length must be positive")
        if self.base_separation <= 0.0:
            raise ValueError("frame separation must be positive")
        if not self.spike_offsets:
            raise ValueError("each frame needs at least one spike")
        if self.blade_width <= 0.0 or self.ripper_width <= 0.0:
            raise ValueError("tool widths must be positive")
        if self.blade_max_cut <= 0.0 or self.blade_capacity <= 0.0:
            raise ValueError("blade cut depth and capacity must be positive")
        if not 0.0 <= self.extraction_ratio <= 1.0:
            raise ValueError("extraction ratio must be in [0, 1]")
        if self.rolling_coeff < 0.0:
            raise ValueError("rolling coefficient must be non-negative")
        if self.spike_press_mass <= 0.0:
            raise ValueError("press mass must be positive")
        if not 0.0 <= self.crust_press_share <= 1.0:
            raise ValueError("actuator weight share must be in [0, 1]")
        if not 0.0 < self.heading_tolerance_deg <= 10.0:
            raise ValueError("heading tolerance must be in (0, 10] degrees")
        if self.curvature_gain <= 0.0:
            raise ValueError("curvature gain must be positive")
        if abs(self.curvature_balance_offset) > self.half_width:
            raise ValueError("curvature balance point must lie on the frame")

    @property
    def half_width(self) -> float:
        """Lateral extent of the spike row from the central axis (m)."""
        return max(abs(off) for off in self.spike_offsets)


REFERENCE = VehicleSpec(
    name="reference",
    mass=1000.0,
    stroke_length=4.0,
    base_separation=0.6,
    spike=SpikeGeometry.from_thrust_angles(),
)

# Pad-building variant: wide blade, bigger prism, spike pairs sized for
# the heavier draft.
CONSTRUCTION = VehicleSpec(
    name="construction",
    mass=3000.0,
    stroke_length=4.0,
    base_separation=0.8,
    spike=SpikeGeometry.from_thrust_angles(bearing_width=0.05),
    spike_offsets=(1.0, -1.0),
    blade_width=3.0,
    blade_max_cut=0.25,
    blade_capacity=1.5,
    blade_lead=0.6,
    ripper_width=1.5,
    ripper_lead=0.6,
)

VEHICLES = {v.name: v for v in (REFERENCE, CONSTRUCTION)}


@dataclass
class AnchorState:
    """One frame's seated spikes: where, how deep, and what seating cost."""

    x: float
    y: float
    depth: float
    capacity: float
    stored_work: float
    by_friction: bool = False
    slipped: float = 0.0
    tan_beta: float = 0.0  # thrust angle at depth, cached for the flip check


@dataclass
class CycleRecord:
    """Log row for one half-cycle."""

    index: int
    mode: str  # expand | contract | turn-expand | turn-contract
    x: float
    y: float
    heading_deg: float
    free_advance: float
    center_advance: float
    draft_peak: float
    seat_depth: float
    slip: float
    useful_work: float
    anchoring_work: float
    extraction_work: float
    prism_volume: float
    spill_volume: float = 0.0  # m^3 pushed off the blade ends at capacity

    @property
    def total_work(self) -> float:
        return self.useful_work + self.anchoring_work + self.extraction_work

    @property
    def efficiency(self) -> float:
        total = self.total_work
        return self.useful_work / total if total > 0.0 else 1.0


RECORD_FIELDS = (
    "index", "mode", "x", "y", "heading_deg", "free_advance",
    "center_advance", "draft_peak", "seat_depth", "slip",
    "useful_work", "anchoring_work", "extraction_work", "prism_volume",
    "spill_volume",
)


@dataclass
class BladeSetting:
    """Grading mode: cut whatever stands above `target_elevation`, up to
    the per-pass limit, in cells the mask admits."""

    target_elevation: float
    mask: Callable[[int, int], bool] | None = None


class Machine:
    """Quasi-static machine state bound to a terrain and environment."""

    def __init__(
        self,
        spec: VehicleSpec,
        terrain: Terrain,
        env: Environment,
        x: float = 0.0,
        y: float = 0.0,
        heading_deg: float = 0.0,
        recorder: PenetrationRecorder | None = None,
    ):
        self.spec = spec
        self.terrain = terrain
        self.env = env
        self.x = float(x)
        self.y = float(y)
        self.heading = math.radians(heading_deg)
        self.separation = spec.base_separation  # start contracted
        self.anchors: dict[str, AnchorState | None] = {"front": None, "rear": None}
        self.prism = 0.0  # m^3 loose, carried on the blade
        self.blade: BladeSetting | None = None
        self.rip_depth: float = 0.0
        self.extra_draft: float = 0.0
        self.cycles: list[CycleRecord] = []
        self.recorder = recorder
        self.max_pin_drift = 0.0
        self._half_count = 0
        self._expanded = False
        self._unit_for = float("nan")
        self._unit_vec = (1.0, 0.0)
        self._face_force = 0.0
        self._face_run = 0.0
        self._rip_face = 0.0
        self._stroke_cut: set[tuple[int, int]] = set()
        self._stroke_spill = 0.0
        self._last_cut_cell: tuple[int, int] | None = None
        self._last_rip_cell: tuple[int, int] | None = None
        # blade width sampled finely enough that no covered cell is missed
        half_w = 0.5 * spec.blade_width
        n_samples = max(2, int(round(spec.blade_width / (0.5 * terrain.cell_size))) + 1)
        self._band_offsets = tuple(
            -half_w + k * spec.blade_width / (n_samples - 1) for k in range(n_samples))

    # ------------------------------------------------------------------
    # Pose helpers

    @property
    def heading_deg(self) -> float:
        return math.degrees(self.heading)

    def _unit(self) -> tuple[float, float]:
        # memoized; the draft integrator asks for this every step
        if self._unit_for != self.heading:
            self._unit_for = self.heading
            self._unit_vec = (math.cos(self.heading), math.sin(self.heading))
        return self._unit_vec

    def frame_ref(self, frame: str) -> tuple[float, float]:
        ux, uy = self._unit()
        sign = 0.5 if frame == "front" else -0.5
        return (self.x + sign * self.separation * ux,
                self.y + sign * self.separation * uy)

    def spike_point(self, frame: str, offset: float, depth: float) -> tuple[float, float]:
        """World position of a spike tip: arm reach behind the frame ref,
        `offset` to the left of the axis."""
        fx, fy = self.frame_ref(frame)
        ux, uy = self._unit()
        reach = self.spec.spike.reach(depth)
        return (fx - reach * ux - offset * uy, fy - reach * uy + offset * ux)

    def blade_point(self) -> tuple[float, float]:
        fx, fy = self.frame_ref("front")
        ux, uy = self._unit()
        return fx + self.spec.blade_lead * ux, fy + self.spec.blade_lead * uy

    def ripper_point(self) -> tuple[float, float]:
        rx, ry = self.frame_ref("rear")
        ux, uy = self._unit()
        return rx - self.spec.ripper_lead * ux, ry - self.spec.ripper_lead * uy

    @property
    def weight(self) -> float:
        return self.spec.mass * self.env.gravity

    def ram_travel(self, expand: bool) -> float:
        """Frame travel left before the ram reaches its stop.

        Separation runs between a small hard floor and the base
        separation plus one full stroke; alternating full strokes swing
        between the ends, while trimmed strokes leave the ram partway.
        """
        if expand:
            return max(0.0, self.spec.base_separation
                       + self.spec.stroke_length - self.separation)
        return max(0.0, self.separation - 0.05 * self.spec.base_separation)

    # ------------------------------------------------------------------
    # Anchoring

    def _profile_at(self, x: float, y: float) -> SoilProfile:
        return self.terrain.soil.profile_at(x, y)

    def _try_break_crust(self, x: float, y: float) -> bool:
        """Clear any intact crust under a spike; True when spikes can seat."""
        i, j = self.terrain.cell_of(x, y)
        if not self.terrain.crust_intact(i, j):
            return True
        crust = self._profile_at(x, y).duricrust
        press = self.spec.spike_press_mass * self.env.gravity
        if crust_breaks(crust, press, self.spec.spike.tip_area):
            self.terrain.break_crust(i, j)
            return True
        if self.spec.has_crust_actuator:
            press += self.spec.crust_press_share * self.weight
            if crust_breaks(crust, press, self.spec.spike.tip_area):
                self.terrain.break_crust(i, j)
                return True
        return False

    def _friction_capacity(self) -> float:
        profile = self._profile_at(self.x, self.y)
        return profile.surface_friction * 0.5 * self.weight

    def _seat_frame(self, frame: str, force: float, slip_allowed: bool,
                    offsets: tuple[float, ...] | None = None) -> tuple[float, float]:
        """Seat `frame`'s spikes against `force`.

        `offsets` restricts which spikes seat; straight driving seats the
        whole row, a turn pins a single off-axis spike so the frame can
        yaw around it.  Returns (slip, anchoring_work).  Falls back to
        sliding friction when crust keeps the spikes out; raises
        VehicleStuck when neither spikes nor friction can react the load.
        """
        if offsets is None:
            offsets = self.spec.spike_offsets
        n_spikes = len(offsets)
        per_spike = force / n_spikes
        sx, sy = self.spike_point(frame, offsets[0], 0.0)
        if not self._try_break_crust(sx, sy):
            if force <= self._friction_capacity():
                self.anchors[frame] = AnchorState(
                    x=sx, y=sy, depth=0.0, capacity=self._friction_capacity(),
                    stored_work=0.0, by_friction=True)
                return 0.0, 0.0
            raise VehicleStuck(
                "crust resists the spike press and sliding friction "
                f"cannot react {force:.1f} N")
        profile = self._profile_at(sx, sy)
        depth = self.spec.spike.depth_for_capacity(per_spike, profile)
        if depth is None:
            raise VehicleStuck(
                f"holding capacity exhausted at max seating depth for {force:.1f} N")
        work = profile.anchor_work_slope * force
        slip = anchoring_slip(force, profile) if slip_allowed else 0.0
        for off in offsets:
            px, py = self.spike_point(frame, off, depth)
            try:
                ci, cj = self.terrain.cell_of(px, py)
                self.terrain.break_crust(ci, cj)
            except ValueError:
                pass
            if self.recorder is not None and depth > 0.0:
                self.recorder.record(px, py, depth)
        self.anchors[frame] = AnchorState(
            x=sx, y=sy, depth=depth,
            capacity=n_spikes * self.spec.spike.holding_capacity(depth, profile),
            stored_work=work, slipped=slip,
            tan_beta=math.tan(self.spec.spike.thrust_angle_rad(depth)))
        return slip, work

    def _deepen_anchor(self, frame: str, new_force: float) -> tuple[float, float]:
        """Grow a seated anchor to react a draft that rose mid-stroke.

        The extra seating work is k * dF above the force the anchor was
        rated for.  Mobilization displacement is a property of the
        engagement, not the load: the ramp law W = F s / 2 with W = k F
        fixes the total slip of any loaded anchor at 2 k, so deepening
        only tops the anchor up to that figure.  An anchor that already
        slipped its ramp deepens without shoving the frame again.
        """
        anchor = self.anchors[frame]
        if anchor is None or anchor.by_friction:
            raise VehicleStuck("draft rose with no spike anchor to deepen")
        profile = self._profile_at(anchor.x, anchor.y)
        n_spikes = len(self.spec.spike_offsets)
        depth = self.spec.spike.depth_for_capacity(new_force / n_spikes, profile)
        if depth is None:
            raise VehicleStuck(
                f"holding capacity exhausted deepening anchor to {new_force:.1f} N")
        rated = anchor.stored_work / profile.anchor_work_slope
        extra_work = profile.anchor_work_slope * max(0.0, new_force - rated)
        extra_slip = 0.0
        if extra_work > 0.0:
            extra_slip = max(0.0, anchoring_slip(new_force, profile) - anchor.slipped)
            anchor.slipped += extra_slip
        anchor.depth = depth
        anchor.capacity = n_spikes * self.spec.spike.holding_capacity(depth, profile)
        anchor.stored_work += extra_work
        anchor.tan_beta = math.tan(self.spec.spike.thrust_angle_rad(depth))
        return extra_slip, extra_work

    def _release_frame(self, frame: str) -> None:
        """Unseat a frame's spikes.  The pull-out energy was charged when
        they seated, so releasing is free here."""
        self.anchors[frame] = None

    # ------------------------------------------------------------------
    # Draft model

    def _grade_sin(self, motion: float) -> float:
        """Pitch of the support footprint along the travel direction.

        Heights are sampled half a footprint fore and aft of the center,
        so the rigid machine bridges single-cell steps instead of seeing
        the raw cell-edge gradient underneath one point.
        """
        gauge = self.spec.base_separation + 0.5 * self.spec.stroke_length
        ux, uy = self._unit()
        hx, hy = 0.5 * gauge * ux, 0.5 * gauge * uy
        try:
            dh = (self.terrain.height_at(self.x + hx, self.y + hy)
                  - self.terrain.height_at(self.x - hx, self.y - hy))
        except ValueError:
            return 0.0
        return motion * dh / math.hypot(gauge, dh)

    def _prism_mass(self) -> float:
        if self.prism <= 0.0:
            return 0.0
        profile = self._profile_at(self.x, self.y)
        return self.prism * profile.loose_density

    def _rolling(self) -> float:
        return self.spec.rolling_coeff * self.weight

    def _blade_force(self, bx: float, by: float, ds: float, mutate: bool) -> float:
        """Blade draft over the next increment: cut face plus prism drag.

        When the blade center crosses into a new cell, every not yet
        visited cell under the blade span is cut in one pass.  The cut
        work, cutting resistance times material volume, is spread over
        one cell length of travel as a constant face force, which for a
        full-width uniform cut reduces to

            F = k_b * w * (d_loose * q_loose + d_bank * q_bank)
        """
        if self.blade is None:
            return 0.0
        profile = self._profile_at(self.x, self.y)
        drag = self.spec.prism_friction * profile.loose_density \
            * self.prism * self.env.gravity
        if not mutate:
            return self._face_force + drag
        try:
            cell = self.terrain.cell_of(bx, by)
        except ValueError:
            cell = None
        if cell is not None and cell != self._last_cut_cell:
            self._last_cut_cell = cell
            ux, uy = self._unit()
            work = 0.0
            for off in self._band_offsets:
                try:
                    ci, cj = self.terrain.cell_of(bx - off * uy, by + off * ux)
                except ValueError:
                    continue
                if (ci, cj) in self._stroke_cut:
                    continue
                self._stroke_cut.add((ci, cj))
                loose_cut, bank_cut = self._cut_cell(ci, cj)
                if loose_cut <= 0.0 and bank_cut <= 0.0:
                    continue
                cprof = self.terrain.profile_at_cell(ci, cj)
                q_bank = cprof.resistance_at(bank_cut) if bank_cut > 0.0 else 0.0
                work += self.spec.blade_cut_coeff * self.terrain.cell_area * (
                    loose_cut * cprof.loose_resistance + bank_cut * q_bank)
            if work > 0.0:
                self._face_force = work / self.terrain.cell_size
                self._face_run = self.terrain.cell_size
        if self._face_run <= 0.0:
            self._face_force = 0.0
        force = self._face_force + drag
        self._face_run -= ds
        return force

    def _cut_cell(self, i: int, j: int) -> tuple[float, float]:
        """Take one blade pass from the cell, respecting mask and cut limit.

        Material beyond the prism capacity is cast off the blade ends.
        Returns the (loose, bank) thicknesses of the face cut.
        """
        setting = self.blade
        if setting.mask is not None and not setting.mask(i, j):
            return 0.0, 0.0
        surf = self.terrain.surface_at_cell(i, j)
        thickness = surf - setting.target_elevation
        if thickness <= 1e-12:
            return 0.0, 0.0
        thickness = min(thickness, self.spec.blade_max_cut)
        loose_m3, bank_m3 = self.terrain.excavate(i, j, thickness)
        self.prism += loose_m3 + bank_m3 * SWELL_FACTOR
        excess = self.prism - self.spec.blade_capacity
        if excess > 1e-12:
            self.prism -= excess
            self._spill(excess, (i, j))
        return (loose_m3 / self.terrain.cell_area,
                bank_m3 / self.terrain.cell_area)

    def _spill(self, volume: float, fallback: tuple[int, int]) -> None:
        """Cast overflow spoil half to each cell just beyond the blade ends."""
        bx, by = self.blade_point()
        ux, uy = self._unit()
        off = 0.5 * self.spec.blade_width + 0.5 * self.terrain.cell_size
        for side in (1.0, -1.0):
            try:
                ci, cj = self.terrain.cell_of(bx - side * off * uy,
                                              by + side * off * ux)
            except ValueError:
                ci, cj = fallback  # keep the volume on the map
            self.terrain.deposit(ci, cj, 0.5 * volume)
        self._stroke_spill += volume

    def _ripper_force(self, rx: float, ry: float, mutate: bool) -> float:
        """Price the ripper tines, loosening the destination cell when new.

        The force for a cell is set by its composition as the tines enter
        it and held for the whole traverse of that cell.
        """
        if self.rip_depth <= 0.0:
            return 0.0
        try:
            i, j = self.terrain.cell_of(rx, ry)
        except ValueError:
            return 0.0
        if mutate and (i, j) != self._last_rip_cell:
            profile = self.terrain.profile_at_cell(i, j)
            loose_d = float(self.terrain.loose_depth[i, j])
            bank_d = max(0.0, self.rip_depth - loose_d)
            q_bank = profile.resistance_at(bank_d) if bank_d > 0.0 else 0.0
            face = ripper_draft(self.spec.ripper_width, bank_d, q_bank,
                                self.spec.ripper_cut_coeff) if bank_d > 0.0 else 0.0
            drag = ripper_draft(self.spec.ripper_width,
                                min(self.rip_depth, loose_d),
                                profile.loose_resistance,
                                self.spec.ripper_cut_coeff) if loose_d > 0.0 else 0.0
            self.terrain.rip(i, j, self.rip_depth)
            self._last_rip_cell = (i, j)
            self._rip_face = face + drag
        return self._rip_face

    def _draft(self, cutting: bool, ripping: bool, ds: float, motion: float,
               mutate: bool) -> float:
        """Draft over the next `ds` of free-frame travel (N, floored at 0)."""
        total = self.extra_draft + self._rolling()
        ux, uy = self._unit()
        grade = self._grade_sin(motion)
        total += (self.spec.mass + self._prism_mass()) * self.env.gravity * grade
        if cutting:
            bx, by = self.blade_point()
            total += self._blade_force(
                bx + motion * ds * ux, by + motion * ds * uy, ds, mutate)
        if ripping:
            rx, ry = self.ripper_point()
            total += self._ripper_force(
                rx + motion * ds * ux, ry + motion * ds * uy, mutate)
        return max(0.0, total)

    def _check_flip(self, seat_frame: str, draft: float, ripping: bool) -> None:
        anchor = self.anchors[seat_frame]
        if anchor is None or anchor.by_friction:
            return
        hold = self.weight
        if ripping:
            hold += ripper_downforce(draft, self.spec.ripper_rake_deg)
        if draft * anchor.tan_beta >= hold:
            beta = self.spec.spike.thrust_angle_deg(anchor.depth)
            raise FlipInstability(
                f"drawbar lift at beta={beta:.1f} deg exceeds {hold:.0f} N of hold-down")

    # ------------------------------------------------------------------
    # Linear half-cycle

    def half_cycle(self, stroke: float | None = None, reverse: bool = False) -> CycleRecord:
        """Run one half-cycle and return its log row.

        Alternates expansion and contraction automatically.  `stroke`
        limits the relative frame travel for a partial move; it defaults
        to the full ram stroke.
        """
        expand = not self._expanded
        if stroke is None:
            stroke = self.spec.stroke_length
        if not 0.0 < stroke <= self.spec.stroke_length + 1e-12:
            raise ValueError("stroke must be in (0, ram stroke]")
        stroke = min(stroke, self.spec.stroke_length, self.ram_travel(expand))
        if stroke <= 0.0:
            raise ValueError("ram is at its stop for this phase")
        if reverse and (self.blade is not None or self.rip_depth > 0.0):
            raise ValueError("tools must be raised to drive in reverse")

        motion = -1.0 if reverse else 1.0
        if expand:
            seat_frame = ("front" if reverse else "rear")
            move_frame = ("rear" if reverse else "front")
        else:
            seat_frame = ("rear" if reverse else "front")
            move_frame = ("front" if reverse else "rear")

        cutting = (not reverse) and expand and self.blade is not None
        ripping = (not reverse) and (not expand) and self.rip_depth > 0.0
        if cutting:
            self._last_cut_cell = None
            self._stroke_cut.clear()
            self._face_force = 0.0
            self._face_run = 0.0
        if ripping:
            self._last_rip_cell = None
            self._rip_face = 0.0
        self._stroke_spill = 0.0

        self._release_frame(move_frame)

        x0, y0 = self.x, self.y
        ux, uy = self._unit()

        draft = self._draft(cutting, ripping, 0.0, motion, mutate=False)
        slip, anchor_work = self._seat_frame(seat_frame, draft, slip_allowed=True)
        slip = min(slip, stroke)
        slip_total = slip
        # Seating shoves the seating frame opposite the travel direction.
        if slip > 0.0:
            self._shift_frame(seat_frame, -motion * slip)

        advance_total = stroke - slip
        useful = 0.0
        draft_peak = draft
        travelled = 0.0
        while travelled < advance_total - 1e-12:
            ds = min(STEP, advance_total - travelled)
            new_draft = self._draft(cutting, ripping, ds, motion, mutate=True)
            anchor = self.anchors[seat_frame]
            if new_draft > anchor.capacity:
                # The seated frame's skid friction reacts draft in
                # parallel with the spikes, so a rise only forces deeper
                # seating once it clears both.  Seating itself still
                # rates the spikes for the whole measured draft.
                if anchor.by_friction:
                    raise VehicleStuck(
                        f"sliding friction anchor cannot react {new_draft:.1f} N")
                if new_draft > anchor.capacity + self._friction_capacity():
                    extra_slip, extra_work = self._deepen_anchor(seat_frame, new_draft)
                    anchor_work += extra_work
                    extra_slip = min(extra_slip, advance_total - travelled)
                    if extra_slip > 0.0:
                        self._shift_frame(seat_frame, -motion * extra_slip)
                        advance_total -= extra_slip
                        slip_total += extra_slip
            draft = new_draft
            draft_peak = max(draft_peak, draft)
            self._check_flip(seat_frame, draft, ripping)
            self._shift_frame(move_frame, motion * ds)
            useful += draft * ds
            travelled += ds

        extraction = self.spec.extraction_ratio * anchor_work
        self._expanded = expand
        seat_anchor = self.anchors[seat_frame]
        record = CycleRecord(
            index=self._half_count,
            mode="expand" if expand else "contract",
            x=self.x, y=self.y, heading_deg=self.heading_deg,
            free_advance=motion * travelled,
            center_advance=(self.x - x0) * ux + (self.y - y0) * uy,
            draft_peak=draft_peak,
            seat_depth=seat_anchor.depth if seat_anchor else 0.0,
            slip=slip_total,
            useful_work=useful,
            anchoring_work=anchor_work,
            extraction_work=extraction,
            prism_volume=self.prism,
            spill_volume=self._stroke_spill,
        )
        self.cycles.append(record)
        self._half_count += 1
        return record

    def _shift_frame(self, frame: str, signed_ds: float) -> None:
        """Move one frame along the axis; center and separation follow."""
        ux, uy = self._unit()
        self.x += 0.5 * signed_ds * ux
        self.y += 0.5 * signed_ds * uy
        if frame == "front":
            self.separation += signed_ds
        else:
            self.separation -= signed_ds
        if self.separation <= 0.0:
            raise ValueError("frames collided; stroke bookkeeping is broken")

    # ------------------------------------------------------------------
    # Compound moves

    def advance(self, distance: float, reverse: bool = False) -> float:
        """Drive the machine center `distance` along its heading.

        Runs half-cycles, trimming the last stroke so the center lands on
        the target.  Returns the center travel actually achieved.
        """
        if distance <= 0.0:
            raise ValueError("advance distance must be positive")
        sign = -1.0 if reverse else 1.0
        moved = 0.0
        skips = 0
        no_gain = 0
        budget = 64 + int(16.0 * distance / self.spec.stroke_length)
        while True:
            remaining = distance - moved
            if remaining <= 1e-9:
                break
            budget -= 1
            if budget < 0:
                raise VehicleStuck(
                    "half-cycle budget exhausted without reaching the target")
            profile = self._profile_at(self.x, self.y)
            expand = not self._expanded
            cutting = (not reverse) and expand and self.blade is not None
            ripping = (not reverse) and (not expand) and self.rip_depth > 0.0
            # Predict the seating slip from the same zero-length draft peek
            # the half-cycle itself will make, clearing per-stroke tool
            # state exactly as the half-cycle would.
            if cutting:
                self._face_force = 0.0
                self._face_run = 0.0
            if ripping:
                self._rip_face = 0.0
            draft0 = self._draft(cutting, ripping, 0.0,
                                 -1.0 if reverse else 1.0, mutate=False)
            slip = anchoring_slip(draft0, profile)
            # A phase whose remaining ram travel cannot beat its own
            # seating slip is skipped: the interlock simply swaps which
            # frame holds and the opposite phase gets the full stroke.
            if self.ram_travel(expand) <= 2.0 * slip + 1e-9:
                skips += 1
                if skips >= 2:
                    raise VehicleStuck(
                        "anchor slip consumes the available ram travel in "
                        "both phases")
                self._expanded = expand
                continue
            skips = 0
            # The center moves (stroke - 2 slip) / 2 per half-cycle.
            stroke_needed = 2.0 * remaining + 2.0 * slip
            record = self.half_cycle(
                stroke=min(self.spec.stroke_length, stroke_needed),
                reverse=reverse)
            gained = record.center_advance * sign
            moved += gained
            # One dead half is not a stall: a mid-stroke draft rise can
            # eat a trimmed stroke as anchor slip, and the opposite phase
            # then reseats at the risen draft and recovers the loss.
            if gained <= 1e-12:
                no_gain += 1
                if no_gain >= 2:
                    raise VehicleStuck(
                        "no progress over consecutive half-cycles")
            else:
                no_gain = 0
        return moved

    # ------------------------------------------------------------------
    # Turning

    def turn_to(self, heading_deg: float, tol_deg: float | None = None) -> int:
        """Rotate in place to a heading; returns half-cycles used.

        One spike on the inside of the turn anchors as a pin; the ram
        stroke swings the free frame around it.  The pin side stays fixed
        for the whole maneuver and the pinned frame alternates, expansion
        pinning the rear and contraction the front.  The last stroke is
        trimmed to land on the target heading.

        `tol_deg` overrides the vehicle's stock heading tolerance; lane
        work passes a tight one because a degree of residual heading
        walks the machine off its lane over a long leg.
        """
        if tol_deg is None:
            tol_deg = self.spec.heading_tolerance_deg
        if tol_deg <= 0.0:
            raise ValueError("heading tolerance must be positive")
        target = math.radians(heading_deg)
        tol = math.radians(tol_deg)
        err = self._wrap(target - self.heading)
        if abs(err) <= tol:
            return 0
        # a clockwise (negative) turn pins on the left (+offset)
        side = (max(self.spec.spike_offsets) if err < 0.0
                else min(self.spec.spike_offsets))
        if side == 0.0:
            raise ValueError("turning needs a laterally offset spike")
        halves = 0
        for _ in range(64):
            err = self._wrap(target - self.heading)
            if abs(err) <= 1e-9:
                break
            if self._turn_half(side, err):
                halves += 1
        if abs(self._wrap(target - self.heading)) > tol:
            raise VehicleStuck("turn failed to converge on the target heading")
        return halves

    def turn_by(self, delta_deg: float, tol_deg: float | None = None) -> int:
        return self.turn_to(self.heading_deg + delta_deg, tol_deg=tol_deg)

    @staticmethod
    def _wrap(angle: float) -> float:
        while angle > math.pi:
            angle -= 2.0 * math.pi
        while angle < -math.pi:
            angle += 2.0 * math.pi
        return angle

    def _turn_half(self, side: float, err: float) -> bool:
        """One pinned half-stroke rotating toward closing `err`.

        Returns False when the ram was already at this phase's stop and
        the half degenerated to swapping the holding frame."""
        expand = not self._expanded
        pin_frame = "rear" if expand else "front"
        free_frame = "front" if expand else "rear"

        avail = min(self.spec.stroke_length, self.ram_travel(expand))
        if avail <= 1e-9:
            self._expanded = expand
            return False

        self._release_frame(free_frame)
        self._release_frame(pin_frame)

        profile = self._profile_at(*self.spike_point(pin_frame, side, 0.0))
        f_turn = profile.surface_friction * 0.5 * self.weight
        # The pin is pressed in, not dragged in: no stroke is lost to slip.
        # Only the pin seats; the frame yaws around it, so its other
        # spikes would sweep an arc and cannot hold ground.
        _, anchor_work = self._seat_frame(pin_frame, f_turn, slip_allowed=False,
                                          offsets=(side,))

        anchor = self.anchors[pin_frame]
        depth = anchor.depth
        reach = self.spec.spike.reach(depth)
        pin = self.spike_point(pin_frame, side, depth)

        # Axial distance from the pin to the free frame ref.
        if expand:
            a0 = self.separation + reach
        else:
            a0 = self.separation - reach
        psi0 = math.atan2(side, a0)
        r0 = math.hypot(a0, side)

        if expand:
            # heading change equals psi1 - psi0
            psi_t = psi0 + err
            tan_t = math.tan(psi_t)
            a1 = side / tan_t if abs(tan_t) > 1e-12 else math.inf
            delta = a1 - a0
            if not 0.0 < delta <= avail or psi_t * psi0 <= 0.0:
                delta = avail
                a1 = a0 + delta
            sep1 = self.separation + delta
        else:
            # heading change equals psi0 - psi1
            psi_t = psi0 - err
            tan_t = math.tan(psi_t)
            a1 = side / tan_t if abs(tan_t) > 1e-12 else 0.0
            delta = a0 - a1
            if not 0.0 < delta <= avail:
                delta = avail
                a1 = a0 - delta
            sep1 = self.separation - delta
        psi1 = math.atan2(side, a1)
        dpsi = (psi1 - psi0) if expand else (psi0 - psi1)
        heading1 = self.heading + dpsi

        # Rebuild the pose off the pin so the anchor cannot drift.
        ux, uy = math.cos(heading1), math.sin(heading1)
        ref_x = pin[0] + reach * ux + side * uy
        ref_y = pin[1] + reach * uy - side * ux
        if pin_frame == "rear":
            cx = ref_x + 0.5 * sep1 * ux
            cy = ref_y + 0.5 * sep1 * uy
        else:
            cx = ref_x - 0.5 * sep1 * ux
            cy = ref_y - 0.5 * sep1 * uy

        r1 = math.hypot(a1, side)
        useful = f_turn * abs(r1 - r0)

        self.heading = heading1
        self.x, self.y = cx, cy
        self.separation = sep1
        self._expanded = expand
        self._check_flip(pin_frame, f_turn, ripping=False)

        pin_after = self.spike_point(pin_frame, side, depth)
        self.max_pin_drift = max(
            self.max_pin_drift, math.hypot(pin_after[0] - pin[0], pin_after[1] - pin[1]))

        extraction = self.spec.extraction_ratio * anchor_work
        record = CycleRecord(
            index=self._half_count,
            mode="turn-expand" if expand else "turn-contract",
            x=self.x, y=self.y, heading_deg=self.heading_deg,
            free_advance=abs(r1 - r0),
            center_advance=0.0,
            draft_peak=f_turn,
            seat_depth=depth,
            slip=0.0,
            useful_work=useful,
            anchoring_work=anchor_work,
            extraction_work=extraction,
            prism_volume=self.prism,
        )
        self.cycles.append(record)
        self._half_count += 1
        return True

    # ------------------------------------------------------------------
    # Blade and spoil

    def set_blade(self, target_elevation: float | None,
                  mask: Callable[[int, int], bool] | None = None) -> None:
        if target_elevation is None:
            self.blade = None
        else:
            self.blade = BladeSetting(float(target_elevation), mask)
        self._last_cut_cell = None
        self._stroke_cut.clear()
        self._face_force = 0.0
        self._face_run = 0.0

    def set_ripper(self, depth: float) -> None:
        if depth < 0.0:
            raise ValueError("ripping depth must be non-negative")
        self.rip_depth = float(depth)
        self._last_rip_cell = None
        self._rip_face = 0.0

    def dump_prism(self, relax: bool = True) -> float:
        """Deposit the carried spoil at the blade and settle it."""
        if self.prism <= 0.0:
            return 0.0
        bx, by = self.blade_point()
        i, j = self.terrain.cell_of(bx, by)
        volume = self.prism
        self.terrain.deposit(i, j, volume)
        self.prism = 0.0
        if relax:
            pad = 12
            self.terrain.relax(window=(i - pad, j - pad, i + pad + 1, j + pad + 1))
        return volume

    # ------------------------------------------------------------------
    # Ledger

    def energy_totals(self) -> dict[str, float]:
        useful = sum(c.useful_work for c in self.cycles)
        anchoring = sum(c.anchoring_work for c in self.cycles)
        extraction = sum(c.extraction_work for c in self.cycles)
        total = useful + anchoring + extraction
        return {
            "useful": useful,
            "anchoring": anchoring,
            "extraction": extraction,
            "total": total,
            "efficiency": useful / total if total > 0.0 else 1.0,
        }
