"""Heightfield terrain, cut and fill bookkeeping, and tool draft forces.

The ground is a raster of square cells.  Each cell carries a bank floor
elevation (top of undisturbed material) and a loose depth (disturbed
spoil resting on it); the walking surface is their sum.  Cutting bank
material swells it by a fixed factor as it turns to spoil, so volumes are
audited in bank-equivalent terms: every cubic meter of bank removed must
reappear as `swell` cubic meters of loose somewhere on the map.

Draft force models are the narrow-tool kind: proportional to the cut
cross-section times the material's penetration resistance, with the
carried prism's ground drag added for the blade.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .soils import SoilField, SoilProfile

SWELL_FACTOR = 1.3
DEFAULT_CELL_SIZE = 0.25  # m
REPOSE_SLACK_DEG = 0.5  # relaxation trigger slack above the repose angle

# Neighbor scan order for the relaxation sweep: clockwise from north.
_NEIGHBORS = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


def blade_draft(
    width: float,
    loose_cut: float,
    bank_cut: float,
    q_loose: float,
    q_bank: float,
    prism_volume: float,
    loose_density: float,
    gravity: float,
    cutting_coeff: float = 1.0,
    prism_friction: float = 0.8,
) -> float:
    """Horizontal force to push a loaded blade through a cut (N).

    The cut face does work against the local material, loose and bank
    parts each at their own resistance, and the carried prism drags on
    the ground ahead of the blade:

        F = k_b * w * (d_loose * q_loose + d_bank * q_bank)
            + mu_p * rho_loose * V_prism * g
    """
    if width <= 0.0:
        raise ValueError("blade width must be positive")
    if loose_cut < 0.0 or bank_cut < 0.0:
        raise ValueError("cut thicknesses must be non-negative")
    if prism_volume < 0.0:
        raise ValueError("prism volume must be non-negative")
    face = cutting_coeff * width * (loose_cut * q_loose + bank_cut * q_bank)
    drag = prism_friction * loose_density * prism_volume * gravity
    return face + drag


def ripper_draft(
    width: float,
    depth: float,
    q_bank: float,
    cutting_coeff: float = 1.0,
) -> float:
    """Horizontal force to drag ripper tines seated `depth` into bank (N)."""
    if width <= 0.0:
        raise ValueError("tine width must be positive")
    if depth < 0.0:
        raise ValueError("ripping depth must be non-negative")
    return cutting_coeff * width * depth * q_bank


@dataclass
class VolumeAudit:
    """Mass balance of a terrain since construction."""

    bank_removed: float  # m^3 of undisturbed material cut
    loose_present: float  # m^3 of spoil resting on the map
    loose_carried: float  # m^3 of spoil checked out by machines

    @property
    def bank_equivalent_spoil(self) -> float:
        return (self.loose_present + self.loose_carried) / SWELL_FACTOR

    @property
    def residual(self) -> float:
        """Relative conservation error; zero for a closed earthworks."""
        scale = max(abs(self.bank_removed), abs(self.bank_equivalent_spoil), 1e-30)
        return abs(self.bank_removed - self.bank_equivalent_spoil) / scale


class Terrain:
    """Square-cell heightfield with bank, spoil, and crust state.

    Row index i maps to y, column index j to x; cell (0, 0) has its center
    at (origin_x + cell/2, origin_y + cell/2).
    """

    def __init__(
        self,
        shape: tuple[int, int],
        cell_size: float = DEFAULT_CELL_SIZE,
        origin: tuple[float, float] = (0.0, 0.0),
        soil: SoilField | SoilProfile | None = None,
        initial_surface: np.ndarray | None = None,
    ):
        if cell_size <= 0.0:
            raise ValueError("cell size must be positive")
        rows, cols = shape
        if rows < 1 or cols < 1:
            raise ValueError("terrain needs at least one cell")
        self.cell_size = float(cell_size)
        self.origin = (float(origin[0]), float(origin[1]))
        if isinstance(soil, SoilProfile):
            soil = SoilField(soil)
        if soil is None:
            from .soils import SOFT
            soil = SoilField(SOFT)
        self.soil = soil

        if initial_surface is None:
            self.bank_floor = np.zeros(shape, dtype=float)
        else:
            if initial_surface.shape != shape:
                raise ValueError("initial surface shape mismatch")
            self.bank_floor = initial_surface.astype(float).copy()
        self.loose_depth = np.zeros(shape, dtype=float)
        self.crust_broken = np.zeros(shape, dtype=bool)
        self._initial_bank = self.bank_floor.copy()
        # Spoil removed from the map surface and not yet put back (blade loads).
        self._carried_out = 0.0

    @property
    def shape(self) -> tuple[int, int]:
        return self.bank_floor.shape

    @property
    def cell_area(self) -> float:
        return self.cell_size * self.cell_size

    # ------------------------------------------------------------------
    # Coordinates

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        """Cell containing the point; raises ValueError off the map."""
        j = int(math.floor((x - self.origin[0]) / self.cell_size))
        i = int(math.floor((y - self.origin[1]) / self.cell_size))
        rows, cols = self.shape
        if not (0 <= i < rows and 0 <= j < cols):
            raise ValueError(f"point ({x}, {y}) is off the map")
        return i, j

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        return (
            self.origin[0] + (j + 0.5) * self.cell_size,
            self.origin[1] + (i + 0.5) * self.cell_size,
        )

    def contains(self, x: float, y: float) -> bool:
        rows, cols = self.shape
        return (
            self.origin[0] <= x < self.origin[0] + cols * self.cell_size
            and self.origin[1] <= y < self.origin[1] + rows * self.cell_size
        )

    # ------------------------------------------------------------------
    # Heights

    def surface(self) -> np.ndarray:
        return self.bank_floor + self.loose_depth

    def surface_at_cell(self, i: int, j: int) -> float:
        return float(self.bank_floor[i, j] + self.loose_depth[i, j])

    def height_at(self, x: float, y: float) -> float:
        """Walking surface height, bilinear between cell centers.

        Interpolating keeps grades finite when a track crosses a cell
        boundary with a step in it.
        """
        if not self.contains(x, y):
            raise ValueError(f"point ({x}, {y}) is off the map")
        rows, cols = self.shape
        fx = (x - self.origin[0]) / self.cell_size - 0.5
        fy = (y - self.origin[1]) / self.cell_size - 0.5
        j0 = min(max(int(math.floor(fx)), 0), cols - 1)
        i0 = min(max(int(math.floor(fy)), 0), rows - 1)
        j1 = min(j0 + 1, cols - 1)
        i1 = min(i0 + 1, rows - 1)
        tx = min(max(fx - j0, 0.0), 1.0)
        ty = min(max(fy - i0, 0.0), 1.0)
        bank, loose = self.bank_floor, self.loose_depth
        top = ((bank.item(i0, j0) + loose.item(i0, j0)) * (1.0 - tx)
               + (bank.item(i0, j1) + loose.item(i0, j1)) * tx)
        bot = ((bank.item(i1, j0) + loose.item(i1, j0)) * (1.0 - tx)
               + (bank.item(i1, j1) + loose.item(i1, j1)) * tx)
        return top * (1.0 - ty) + bot * ty

    def profile_at_cell(self, i: int, j: int) -> SoilProfile:
        x, y = self.cell_center(i, j)
        return self.soil.profile_at(x, y)

    # ------------------------------------------------------------------
    # Cut, fill, rip

    def rip(self, i: int, j: int, depth_below_surface: float) -> float:
        """Loosen bank under the cell down to `depth_below_surface`.

        Tines pass through existing spoil for free; only bank below it is
        converted.  Returns the bank thickness loosened (m).
        """
        if depth_below_surface < 0.0:
            raise ValueError("ripping depth must be non-negative")
        bank_cut = max(0.0, depth_below_surface - float(self.loose_depth[i, j]))
        if bank_cut > 0.0:
            self.bank_floor[i, j] -= bank_cut
            self.loose_depth[i, j] += bank_cut * SWELL_FACTOR
        return bank_cut

    def excavate(self, i: int, j: int, thickness: float) -> tuple[float, float]:
        """Remove `thickness` of material from the cell surface downward.

        Spoil is taken first, then bank.  Returns (loose_m3, bank_m3); the
        caller now carries loose_m3 + bank_m3 * SWELL_FACTOR of spoil.
        """
        if thickness < 0.0:
            raise ValueError("cut thickness must be non-negative")
        loose_cut = min(thickness, float(self.loose_depth[i, j]))
        bank_cut = thickness - loose_cut
        self.loose_depth[i, j] -= loose_cut
        self.bank_floor[i, j] -= bank_cut
        loose_m3 = loose_cut * self.cell_area
        bank_m3 = bank_cut * self.cell_area
        self._carried_out += loose_m3 + bank_m3 * SWELL_FACTOR
        return loose_m3, bank_m3

    def deposit(self, i: int, j: int, loose_m3: float) -> None:
        """Return carried spoil to the map at the cell."""
        if loose_m3 < 0.0:
            raise ValueError("deposited volume must be non-negative")
        self.loose_depth[i, j] += loose_m3 / self.cell_area
        self._carried_out -= loose_m3

    def break_crust(self, i: int, j: int) -> None:
        self.crust_broken[i, j] = True

    def crust_intact(self, i: int, j: int) -> bool:
        profile = self.profile_at_cell(i, j)
        return profile.duricrust is not None and not self.crust_broken[i, j]

    # ------------------------------------------------------------------
    # Spoil relaxation

    def relax(
        self,
        window: tuple[int, int, int, int] | None = None,
        max_passes: int = 10000,
    ) -> int:
        """Avalanche over-steep spoil until every slope is at repose.

        Cells are swept in row-major order; each over-steep pair moves
        just enough spoil downhill to settle to the repose grade, so the
        result is deterministic and conserves spoil exactly.  A pair only
        triggers when its slope exceeds repose by more than the slack,
        which guarantees termination.  Returns the number of sweeps.
        """
        rows, cols = self.shape
        if window is None:
            i_lo, j_lo, i_hi, j_hi = 0, 0, rows, cols
        else:
            i_lo, j_lo, i_hi, j_hi = window
            i_lo = max(i_lo, 0)
            j_lo = max(j_lo, 0)
            i_hi = min(i_hi, rows)
            j_hi = min(j_hi, cols)

        bank = self.bank_floor
        loose = self.loose_depth
        passes = 0
        for _ in range(max_passes):
            passes += 1
            moved = False
            for i in range(i_lo, i_hi):
                for j in range(j_lo, j_hi):
                    if loose[i, j] <= 0.0:
                        continue
                    profile = self.profile_at_cell(i, j)
                    tan_repose = math.tan(profile.repose_angle_rad)
                    tan_trigger = math.tan(
                        math.radians(profile.repose_angle_deg + REPOSE_SLACK_DEG))
                    h_c = bank[i, j] + loose[i, j]
                    for di, dj in _NEIGHBORS:
                        ni, nj = i + di, j + dj
                        if not (0 <= ni < rows and 0 <= nj < cols):
                            continue
                        dist = self.cell_size * (math.sqrt(2.0) if di and dj else 1.0)
                        drop = h_c - (bank[ni, nj] + loose[ni, nj])
                        if drop <= tan_trigger * dist:
                            continue
                        move = min(loose[i, j], 0.5 * (drop - tan_repose * dist))
                        if move <= 0.0:
                            continue
                        loose[i, j] -= move
                        loose[ni, nj] += move
                        h_c -= move
                        moved = True
                        if loose[i, j] <= 0.0:
                            break
            if not moved:
                return passes
        raise RuntimeError("spoil relaxation failed to settle")

    def slope_at(self, x: float, y: float) -> float:
        """Surface slope at a point, degrees, by central differences.

        Gradient components are taken between the neighbors of the
        containing cell (one-sided at the map border); the slope is the
        grade along the steepest direction.
        """
        i, j = self.cell_of(x, y)
        rows, cols = self.shape
        s = self.surface()
        j0, j1 = max(j - 1, 0), min(j + 1, cols - 1)
        i0, i1 = max(i - 1, 0), min(i + 1, rows - 1)
        dz_dx = (s[i, j1] - s[i, j0]) / ((j1 - j0) * self.cell_size) if j1 > j0 else 0.0
        dz_dy = (s[i1, j] - s[i0, j]) / ((i1 - i0) * self.cell_size) if i1 > i0 else 0.0
        return math.degrees(math.atan(math.hypot(dz_dx, dz_dy)))

    def max_surface_slope_deg(self) -> float:
        """Steepest center-to-center surface grade on the map."""
        s = self.surface()
        worst = 0.0
        rows, cols = self.shape
        for di, dj in ((0, 1), (1, 0), (1, 1), (1, -1)):
            a = s[max(0, -di):rows - max(0, di), max(0, -dj):cols - max(0, dj)]
            b = s[max(0, di):rows - max(0, -di), max(0, dj):cols - max(0, -dj)]
            dist = self.cell_size * (math.sqrt(2.0) if di and dj else 1.0)
            if a.size:
                worst = max(worst, float(np.max(np.abs(a - b))) / dist)
        return math.degrees(math.atan(worst))

    # ------------------------------------------------------------------
    # Audit

    def audit(self) -> VolumeAudit:
        bank_removed = float(np.sum(self._initial_bank - self.bank_floor)) * self.cell_area
        loose_present = float(np.sum(self.loose_depth)) * self.cell_area
        return VolumeAudit(
            bank_removed=bank_removed,
            loose_present=loose_present,
            loose_carried=self._carried_out,
        )
