"""Opportunistic ground sensing from spike penetrations.

Every seating event is also a free cone-penetration test: the press knows
the force-depth trace of the spike going in.  Readings carry lower-bound
semantics: a spike stopping early proves the ground is at least that
strong at that depth, and the weakest reading over a footprint governs
anchoring there.  Events aggregate onto a survey raster per cell, with
NaN marking cells never touched.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .soils import SoilField

SAMPLE_STEP = 0.01  # m, depth resolution of a penetration trace


@dataclass(frozen=True)
class GroundTemperatureField:
    """Linear subsurface temperature model T(depth) = surface + slope * d."""

    surface_K: float = 250.0
    gradient_K_per_m: float = -40.0

    def at(self, x: float, y: float, depth: float) -> float:
        if depth < 0.0:
            raise ValueError("depth must be non-negative")
        return self.surface_K + self.gradient_K_per_m * depth


@dataclass(frozen=True)
class PenetrationEvent:
    """One spike seating reduced to survey quantities.

    min_q and mean_q summarize the resistance trace over the seated
    depth; both are lower bounds on what a wider tool would feel, since
    the spike follows the locally weakest path.
    """

    index: int
    x: float
    y: float
    depth: float
    min_q: float
    mean_q: float
    temperature_K: float

    def as_row(self) -> tuple:
        return (self.index, self.x, self.y, self.depth,
                self.min_q, self.mean_q, self.temperature_K)


EVENT_FIELDS = ("index", "x", "y", "depth", "min_q", "mean_q", "temperature_K")


def penetration_trace(
    field: SoilField,
    x: float,
    y: float,
    depth: float,
    rng: np.random.Generator | None = None,
    noise_rel: float = 0.0,
) -> np.ndarray:
    """Resistance samples every SAMPLE_STEP from the surface to `depth`.

    The probe reads the weakest material in its immediate neighborhood,
    so the sample at each step is the minimum profile resistance over the
    probe point and four laterally offset points.
    """
    if depth <= 0.0:
        raise ValueError("trace depth must be positive")
    steps = max(1, round(depth / SAMPLE_STEP))
    offsets = ((0.0, 0.0), (SAMPLE_STEP, 0.0), (-SAMPLE_STEP, 0.0),
               (0.0, SAMPLE_STEP), (0.0, -SAMPLE_STEP))
    out = np.empty(steps)
    for k in range(steps):
        d = (k + 1) * depth / steps
        q = min(field.profile_at(x + ox, y + oy).resistance_at(d)
                for ox, oy in offsets)
        out[k] = q
    if rng is not None and noise_rel > 0.0:
        out = out * (1.0 + rng.uniform(-noise_rel, noise_rel, steps))
        np.maximum(out, 1.0, out=out)
    return out


class PenetrationRecorder:
    """Collects penetration events during a mission."""

    def __init__(
        self,
        field: SoilField,
        temperature: GroundTemperatureField | None = None,
        rng: np.random.Generator | None = None,
        noise_rel: float = 0.0,
    ):
        self.field = field
        self.temperature = temperature or GroundTemperatureField()
        self.rng = rng
        self.noise_rel = noise_rel
        self.events: list[PenetrationEvent] = []

    def record(self, x: float, y: float, depth: float) -> PenetrationEvent:
        trace = penetration_trace(self.field, x, y, depth,
                                  self.rng, self.noise_rel)
        temperature = self.temperature.at(x, y, depth)
        if self.rng is not None and self.noise_rel > 0.0:
            temperature *= 1.0 + self.rng.uniform(-self.noise_rel, self.noise_rel)
        event = PenetrationEvent(
            index=len(self.events),
            x=x, y=y, depth=depth,
            min_q=float(np.min(trace)),
            mean_q=float(np.mean(trace)),
            temperature_K=temperature,
        )
        self.events.append(event)
        return event


def lower_bound_strength(
    events: list[PenetrationEvent],
    x: float,
    y: float,
    radius: float,
) -> float | None:
    """Weakest resistance any spike felt within `radius` of the point (Pa).

    A seated spike follows the locally weakest path, so each event's
    minimum is already a lower bound; the neighborhood minimum extends
    that bound laterally.  None when no event falls in the radius.
    """
    if radius <= 0.0:
        raise ValueError("search radius must be positive")
    best: float | None = None
    for ev in events:
        if math.hypot(ev.x - x, ev.y - y) <= radius:
            if best is None or ev.min_q < best:
                best = ev.min_q
    return best


def bearing_proxy(temperature: np.ndarray, slope: float,
                  intercept: float) -> np.ndarray:
    """Affine bearing-strength proxy from a temperature raster.

    Subsurface temperature tracks thermal conductivity and with it the
    packing of the ground, so an affine recalibration of a temperature
    map serves as a stand-in strength map.  The output is a proxy and is
    only as good as the calibration; no-data cells stay no-data.
    """
    return slope * np.asarray(temperature, dtype=float) + intercept


def load_events(path: str) -> list[PenetrationEvent]:
    """Read an event log CSV written with EVENT_FIELDS back into events."""
    events: list[PenetrationEvent] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(EVENT_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path} lacks event columns: {sorted(missing)}")
        for row in reader:
            events.append(PenetrationEvent(
                index=int(row["index"]),
                x=float(row["x"]),
                y=float(row["y"]),
                depth=float(row["depth"]),
                min_q=float(row["min_q"]),
                mean_q=float(row["mean_q"]),
                temperature_K=float(row["temperature_K"]),
            ))
    return events


def rasterize_events(
    events: list[PenetrationEvent],
    shape: tuple[int, int],
    cell_size: float,
    origin: tuple[float, float] = (0.0, 0.0),
) -> tuple[np.ndarray, np.ndarray]:
    """Survey rasters (min_q, mean_q) from a list of events.

    Cell min is the minimum of event minima, keeping the lower-bound
    reading; cell mean is the mean of event means.  Cells without any
    event are NaN.  Events off the raster are ignored.
    """
    rows, cols = shape
    min_q = np.full(shape, np.nan)
    sum_q = np.zeros(shape)
    count = np.zeros(shape, dtype=int)
    for ev in events:
        j = int(math.floor((ev.x - origin[0]) / cell_size))
        i = int(math.floor((ev.y - origin[1]) / cell_size))
        if not (0 <= i < rows and 0 <= j < cols):
            continue
        if count[i, j] == 0 or ev.min_q < min_q[i, j]:
            min_q[i, j] = ev.min_q
        sum_q[i, j] += ev.mean_q
        count[i, j] += 1
    mean_q = np.full(shape, np.nan)
    touched = count > 0
    mean_q[touched] = sum_q[touched] / count[touched]
    return min_q, mean_q
