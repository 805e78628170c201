"""Insole geometry, fiber routing, sensor placement and spectral allocation.

Coordinates are millimetres in the right-insole frame: heel at the origin,
toe toward +x, medial side toward +y. Left-foot geometry is obtained by
mirroring across the long axis ``y = width / 2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

BAND_NM = (808.0, 880.0)
MAX_SENSORS = 30
# strain at the 10 kg top of the calibration range, and the design temperature swing
DEFAULT_MAX_STRAIN_UE = 189.0
DEFAULT_MAX_DT_C = 25.0
MIN_BEND_RADIUS_MM = 10.0
DEFAULT_GUARD_MM = 400.0

# Strain sensitivity as (1 - p_e) with p_e ~ 0.22, per unit strain.
DEFAULT_STRAIN_SENSITIVITY = 0.78
# Thermal cross-sensitivity of the fiber, microstrain per degree C.
CROSS_SENSITIVITY_UE_PER_C = 13.138
DEFAULT_TEMP_SENSITIVITY = CROSS_SENSITIVITY_UE_PER_C * 1e-6 * DEFAULT_STRAIN_SENSITIVITY

CALIB_A = 26.873
CALIB_B = -58.809

TEMPERATURE_IDS = (6, 10, 13, 16, 17)

PRESSURE = "pressure"
TEMPERATURE = "temperature"
ROLES = (PRESSURE, TEMPERATURE)

# Six-region partition as (x0, x1, y0, y1) fractions of length and width,
# right foot (medial toward +y).
DEFAULT_REGIONS = {
    "hallux": (0.85, 1.0, 0.5, 1.0),
    "medial_forefoot": (0.62, 0.85, 0.5, 1.0),
    "lateral_forefoot": (0.62, 1.0, 0.0, 0.5),
    "midfoot": (0.30, 0.62, 0.0, 1.0),
    "medial_heel": (0.0, 0.30, 0.5, 1.0),
    "lateral_heel": (0.0, 0.30, 0.0, 0.5),
}


class LayoutError(ValueError):
    pass


class CapacityError(LayoutError):
    pass


# -- outline --------------------------------------------------------------

_HALF_WIDTH_KNOTS = (
    (0.0, 0.0), (3.0, 14.0), (10.0, 22.0), (20.0, 27.0), (40.0, 31.0),
    (70.0, 32.0), (110.0, 33.0), (150.0, 38.0), (180.0, 43.0), (205.0, 43.5),
    (225.0, 41.0), (240.0, 35.0), (250.0, 27.0), (256.0, 17.0), (259.0, 0.0),
)


def default_outline(length: float = 259.0, width: float = 88.0) -> np.ndarray:
    """Closed insole polygon scaled into a ``length`` x ``width`` box."""
    kx = np.array([k[0] for k in _HALF_WIDTH_KNOTS]) * length / 259.0
    kw = np.array([k[1] for k in _HALF_WIDTH_KNOTS]) * width / 88.0
    xs = np.linspace(0.0, length, 120)
    hw = np.interp(xs, kx, kw)
    mid = width / 2.0
    lateral = np.column_stack([xs, mid - hw])
    medial = np.column_stack([xs[::-1], mid + hw[::-1]])
    return np.vstack([lateral, medial[1:-1]])


def points_in_polygon(points, polygon) -> np.ndarray:
    """Even-odd ray casting; boundary points count as inside."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    poly = np.asarray(polygon, dtype=float)
    x, y = pts[:, 0][:, None], pts[:, 1][:, None]
    x1, y1 = poly[:, 0][None, :], poly[:, 1][None, :]
    x2, y2 = np.roll(poly[:, 0], -1)[None, :], np.roll(poly[:, 1], -1)[None, :]
    straddle = (y1 > y) != (y2 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    inside = np.count_nonzero(straddle & (x < x_cross), axis=1) % 2 == 1
    # points lying on an edge
    ex, ey = x2 - x1, y2 - y1
    seg_len2 = ex * ex + ey * ey
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip(((x - x1) * ex + (y - y1) * ey) / seg_len2, 0.0, 1.0)
    d2 = (x1 + t * ex - x) ** 2 + (y1 + t * ey - y) ** 2
    on_edge = np.any(d2 < 1e-12, axis=1)
    return inside | on_edge


@dataclass(frozen=True)
class InsoleTemplate:
    length: float = 259.0
    width: float = 88.0
    outline: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0:
            raise LayoutError("insole length and width must be positive")
        outline = self.outline
        if outline is None:
            outline = default_outline(self.length, self.width)
        outline = np.asarray(outline, dtype=float)
        outline.setflags(write=False)
        object.__setattr__(self, "outline", outline)
        tol = 1e-9
        if (outline[:, 0].min() < -tol or outline[:, 0].max() > self.length + tol
                or outline[:, 1].min() < -tol or outline[:, 1].max() > self.width + tol):
            raise LayoutError("outline does not fit the length x width bounding box")

    def contains(self, points) -> np.ndarray:
        return points_in_polygon(points, self.outline)


# -- fiber ----------------------------------------------------------------

def circumradius(p0, p1, p2) -> float:
    """Radius of the circle through three points; ``inf`` when collinear."""
    a = math.dist(p1, p2)
    b = math.dist(p0, p2)
    c = math.dist(p0, p1)
    cross = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0])
    area2 = abs(cross)
    if area2 <= 1e-12 * max(a * b * c, 1e-300) ** (2.0 / 3.0):
        return math.inf
    return a * b * c / (2.0 * area2)


def bend_radii(polyline) -> np.ndarray:
    pts = np.asarray(polyline, dtype=float)
    return np.array([circumradius(pts[i - 1], pts[i], pts[i + 1])
                     for i in range(1, len(pts) - 1)])


def polyline_length(polyline) -> float:
    pts = np.asarray(polyline, dtype=float)
    return float(np.sum(np.hypot(*np.diff(pts, axis=0).T)))


class PathBuilder:
    """Turtle-style builder of straight runs and circular arcs."""

    def __init__(self, x: float, y: float, heading_deg: float = 0.0, step: float = 1.0):
        self.x, self.y = x, y
        self.heading = math.radians(heading_deg)
        self.step = step
        self.points = [(x, y)]
        self.s = 0.0

    def straight(self, length: float) -> "PathBuilder":
        n = max(1, int(math.ceil(length / self.step)))
        dx, dy = math.cos(self.heading), math.sin(self.heading)
        x0, y0 = self.x, self.y
        for k in range(1, n + 1):
            d = length * k / n
            self.points.append((x0 + d * dx, y0 + d * dy))
        self.x, self.y = self.points[-1]
        self.s += length
        return self

    def arc(self, radius: float, angle_deg: float) -> "PathBuilder":
        """Positive angle turns left (counter-clockwise)."""
        sign = 1.0 if angle_deg > 0 else -1.0
        cx = self.x - sign * radius * math.sin(self.heading)
        cy = self.y + sign * radius * math.cos(self.heading)
        phi0 = math.atan2(self.y - cy, self.x - cx)
        total = math.radians(angle_deg)
        arc_len = abs(total) * radius
        n = max(2, int(math.ceil(arc_len / self.step)))
        for k in range(1, n + 1):
            phi = phi0 + total * k / n
            self.points.append((cx + radius * math.cos(phi), cy + radius * math.sin(phi)))
        self.x, self.y = self.points[-1]
        self.heading += total
        self.s += arc_len
        return self


@dataclass(frozen=True)
class FiberPath:
    polyline: np.ndarray = field(repr=False)
    guard_length: float = DEFAULT_GUARD_MM
    total_length: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.polyline, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "polyline", pts)
        if self.total_length is None:
            object.__setattr__(self, "total_length", self.guard_length + polyline_length(pts))

    @property
    def arc_length(self) -> float:
        return polyline_length(self.polyline)

    def min_bend_radius(self) -> float:
        radii = bend_radii(self.polyline)
        return float(radii.min()) if radii.size else math.inf

    def point_at(self, s: float) -> tuple[float, float]:
        """Point at arc length ``s`` measured from the guard end."""
        pts = self.polyline
        seg = np.hypot(*np.diff(pts, axis=0).T)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        # chords run slightly shorter than the arcs they sample
        if cum[-1] < s <= cum[-1] + 0.05:
            s = cum[-1]
        if not 0.0 <= s <= cum[-1]:
            raise LayoutError(f"arc length {s} outside fiber (0..{cum[-1]:.3f})")
        return (float(np.interp(s, cum, pts[:, 0])), float(np.interp(s, cum, pts[:, 1])))


# -- sensors --------------------------------------------------------------

@dataclass(frozen=True)
class FbgSensorSpec:
    id: int
    role: str
    position: tuple[float, float]
    lambda_nominal: float
    strain_sensitivity: float = DEFAULT_STRAIN_SENSITIVITY
    temp_sensitivity: float = DEFAULT_TEMP_SENSITIVITY
    calib_a: float = CALIB_A
    calib_b: float = CALIB_B

    def __post_init__(self):
        if self.role not in ROLES:
            raise LayoutError(f"sensor {self.id}: unknown role {self.role!r}")
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))

    @property
    def is_pressure(self) -> bool:
        return self.role == PRESSURE

    def mirrored(self, width: float) -> "FbgSensorSpec":
        return replace(self, position=(self.position[0], width - self.position[1]))


@dataclass(frozen=True)
class SpectralPlan:
    band: tuple[float, float]
    reference_peak: float
    assignments: dict
    guard_band: float

    @property
    def wavelengths(self) -> np.ndarray:
        return np.array([self.assignments[k] for k in sorted(self.assignments)])


def plan_spectrum(n_sensors: int, band=BAND_NM, min_offset: float = 4.0) -> SpectralPlan:
    """Reference peak at the band floor, sensors equidistant up to the band top.

    The offset between reference and first sensor is at least one sensor
    spacing, so the reference stays two guard bands away from every sensor.
    """
    if n_sensors > MAX_SENSORS:
        raise CapacityError(f"{n_sensors} sensors requested, interrogator handles at most {MAX_SENSORS}")
    if n_sensors < 1:
        raise LayoutError("at least one sensor is required")
    lo, hi = float(band[0]), float(band[1])
    width = hi - lo
    offset = max(min_offset, width / n_sensors)
    if n_sensors == 1:
        lambdas = [hi]
        spacing = offset
    else:
        spacing = (width - offset) / (n_sensors - 1)
        lambdas = [lo + offset + k * spacing for k in range(n_sensors)]
        lambdas[-1] = hi
    return SpectralPlan(band=(lo, hi), reference_peak=lo,
                        assignments={k: lam for k, lam in enumerate(lambdas)},
                        guard_band=spacing / 2.0)


@dataclass(frozen=True)
class SensorLayout:
    template: InsoleTemplate
    fiber: FiberPath
    sensors: tuple
    band: tuple = BAND_NM
    reference_peak: float = BAND_NM[0]
    regions: dict = field(default_factory=lambda: dict(DEFAULT_REGIONS))

    def __post_init__(self):
        object.__setattr__(self, "sensors", tuple(self.sensors))

    def sensor(self, sensor_id: int) -> FbgSensorSpec:
        for s in self.sensors:
            if s.id == sensor_id:
                return s
        raise KeyError(sensor_id)

    @property
    def pressure_sensors(self) -> tuple:
        return tuple(s for s in self.sensors if s.role == PRESSURE)

    @property
    def temperature_sensors(self) -> tuple:
        return tuple(s for s in self.sensors if s.role == TEMPERATURE)

    def spectral_plan(self) -> SpectralPlan:
        assignments = {s.id: s.lambda_nominal for s in self.sensors}
        lams = np.sort(np.array(list(assignments.values())))
        if lams.size > 1:
            guard = float(np.min(np.diff(lams))) / 2.0
        else:
            guard = (float(lams[0]) - self.reference_peak) / 2.0 if lams.size else 0.0
        return SpectralPlan(band=tuple(self.band), reference_peak=self.reference_peak,
                            assignments=assignments, guard_band=guard)

    def nearest_temperature_sensor(self, sensor_id: int) -> int | None:
        temps = self.temperature_sensors
        if not temps:
            return None
        px, py = self.sensor(sensor_id).position
        return min(temps, key=lambda t: (math.hypot(t.position[0] - px, t.position[1] - py), t.id)).id

    def mirrored(self) -> "SensorLayout":
        """Left-foot counterpart of a right-foot layout."""
        w = self.template.width
        outline = self.template.outline.copy()
        outline[:, 1] = w - outline[:, 1]
        poly = self.fiber.polyline.copy()
        poly[:, 1] = w - poly[:, 1]
        regions = {k: (x0, x1, 1.0 - y1, 1.0 - y0) for k, (x0, x1, y0, y1) in self.regions.items()}
        return SensorLayout(
            template=InsoleTemplate(self.template.length, w, outline[::-1]),
            fiber=FiberPath(poly, self.fiber.guard_length, self.fiber.total_length),
            sensors=tuple(s.mirrored(w) for s in self.sensors),
            band=self.band, reference_peak=self.reference_peak, regions=regions)

    # -- JSON --

    def to_dict(self) -> dict:
        return {
            "template": {"length": self.template.length, "width": self.template.width,
                         "outline": np.round(self.template.outline, 6).tolist()},
            "fiber": {"polyline": np.round(self.fiber.polyline, 6).tolist(),
                      "guard_length": self.fiber.guard_length,
                      "total_length": self.fiber.total_length},
            "band": list(self.band),
            "reference_peak": self.reference_peak,
            "regions": {k: list(v) for k, v in self.regions.items()},
            "sensors": [{"id": s.id, "role": s.role, "position": list(s.position),
                         "lambda_nominal": s.lambda_nominal,
                         "strain_sensitivity": s.strain_sensitivity,
                         "temp_sensitivity": s.temp_sensitivity,
                         "calib_a": s.calib_a, "calib_b": s.calib_b}
                        for s in self.sensors],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SensorLayout":
        try:
            t = doc["template"]
            f = doc["fiber"]
            template = InsoleTemplate(t.get("length", 259.0), t.get("width", 88.0),
                                      t.get("outline"))
            fiber = FiberPath(np.asarray(f["polyline"], dtype=float),
                              f.get("guard_length", DEFAULT_GUARD_MM), f.get("total_length"))
            sensors = tuple(FbgSensorSpec(id=int(s["id"]), role=s["role"],
                                          position=tuple(s["position"]),
                                          lambda_nominal=float(s["lambda_nominal"]),
                                          strain_sensitivity=s.get("strain_sensitivity", DEFAULT_STRAIN_SENSITIVITY),
                                          temp_sensitivity=s.get("temp_sensitivity", DEFAULT_TEMP_SENSITIVITY),
                                          calib_a=s.get("calib_a", CALIB_A),
                                          calib_b=s.get("calib_b", CALIB_B))
                            for s in doc["sensors"])
        except (KeyError, TypeError) as exc:
            raise LayoutError(f"malformed layout document: {exc}") from exc
        regions = {k: tuple(v) for k, v in doc.get("regions", DEFAULT_REGIONS).items()}
        band = tuple(doc.get("band", BAND_NM))
        return cls(template, fiber, sensors, band, float(doc.get("reference_peak", band[0])), regions)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))

    @classmethod
    def load(cls, path) -> "SensorLayout":
        return cls.from_dict(json.loads(Path(path).read_text()))


# -- default layout -------------------------------------------------------

# Sensor arc-length stations along the default fiber, with roles.
# The fiber runs lateral (y=16) toe-ward, U-turns at the toes, returns along
# the midline (y=44) to the heel, U-turns round the heel and finishes along
# the medial line (y=72) to the hallux.
_LATERAL_START_X = 55.0
_PASS_END_X = 215.0
_HEEL_TURN_X = 30.0
_MEDIAL_END_X = 230.0
_TURN_RADIUS = 14.0


def default_fiber() -> FiberPath:
    b = PathBuilder(_LATERAL_START_X, 16.0, 0.0)
    b.straight(_PASS_END_X - _LATERAL_START_X)
    b.arc(_TURN_RADIUS, 180.0)
    b.straight(_PASS_END_X - _HEEL_TURN_X)
    b.arc(_TURN_RADIUS, -180.0)
    b.straight(_MEDIAL_END_X - _HEEL_TURN_X)
    return FiberPath(np.array(b.points), DEFAULT_GUARD_MM)


def _station_table():
    lat = _PASS_END_X - _LATERAL_START_X
    turn = math.pi * _TURN_RADIUS
    mid = _PASS_END_X - _HEEL_TURN_X
    s_u1 = lat
    s_mid = lat + turn
    s_u2 = s_mid + mid
    s_med = s_u2 + turn
    return [
        s_u1 - (_PASS_END_X - 60.0),      # 0  lateral heel
        s_u1 - (_PASS_END_X - 120.0),     # 1  lateral midfoot
        s_u1 - (_PASS_END_X - 175.0),     # 2  fifth metatarsal head
        s_u1 + turn / 2.0,                # 3  lesser toes (turn apex)
        s_mid + (_PASS_END_X - 205.0),    # 4  toe base
        s_mid + (_PASS_END_X - 180.0),    # 5  central metatarsal heads
        s_mid + (_PASS_END_X - 150.0),    # 6  T forefoot/midfoot
        s_mid + (_PASS_END_X - 110.0),    # 7  midfoot
        s_mid + (_PASS_END_X - 60.0),     # 8  anterior heel
        s_mid + (_PASS_END_X - 35.0),     # 9  heel centre
        s_u2 + turn / 2.0,                # 10 T posterior heel (turn apex)
        s_med + (45.0 - _HEEL_TURN_X),    # 11 medial heel
        s_med + (95.0 - _HEEL_TURN_X),    # 12 medial arch
        s_med + (130.0 - _HEEL_TURN_X),   # 13 T medial midfoot
        s_med + (160.0 - _HEEL_TURN_X),   # 14 first metatarsal head
        s_med + (185.0 - _HEEL_TURN_X),   # 15 medial forefoot
        s_med + (200.0 - _HEEL_TURN_X),   # 16 T medial forefoot
        s_med + (212.0 - _HEEL_TURN_X),   # 17 T hallux base
        s_med + (222.0 - _HEEL_TURN_X),   # 18 hallux
        s_med + (_MEDIAL_END_X - _HEEL_TURN_X),  # 19 hallux tip
    ]


def build_default_layout() -> SensorLayout:
    """Twenty-grating layout: 15 pressure, 5 temperature, heel/toe dense."""
    template = InsoleTemplate()
    fiber = default_fiber()
    stations = _station_table()
    plan = plan_spectrum(len(stations))
    sensors = []
    for sid, s in enumerate(stations):
        role = TEMPERATURE if sid in TEMPERATURE_IDS else PRESSURE
        x, y = fiber.point_at(s)
        sensors.append(FbgSensorSpec(id=sid, role=role, position=(round(x, 6), round(y, 6)),
                                     lambda_nominal=plan.assignments[sid]))
    return SensorLayout(template, fiber, tuple(sensors))


# -- validation -----------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule: str
    element: str
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple
    min_bend_radius: float
    fiber_arc_length: float
    sensor_count: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"ok": self.ok, "sensor_count": self.sensor_count,
                "min_bend_radius_mm": None if math.isinf(self.min_bend_radius) else self.min_bend_radius,
                "fiber_arc_length_mm": self.fiber_arc_length,
                "violations": [{"rule": v.rule, "element": v.element, "detail": v.detail}
                               for v in self.violations]}


def validate_layout(layout: SensorLayout, length_tolerance: float = 5.0) -> ValidationReport:
    """Check manufacturer and geometric constraints; violations are returned, not raised."""
    out = []
    sensors = sorted(layout.sensors, key=lambda s: (s.id, s.role, s.position))
    if len(sensors) > MAX_SENSORS:
        out.append(Violation("sensor count exceeds 30", "layout", f"{len(sensors)} sensors"))
    seen = set()
    for s in sensors:
        if s.id in seen:
            out.append(Violation("duplicate sensor id", f"sensor {s.id}"))
        seen.add(s.id)
    if sensors:
        inside = layout.template.contains([s.position for s in sensors])
        for s, ok in zip(sensors, inside):
            if not ok:
                out.append(Violation("position outside outline", f"sensor {s.id}",
                                     f"({s.position[0]:.3f}, {s.position[1]:.3f})"))
    lo, hi = layout.band
    for s in sensors:
        if not lo <= s.lambda_nominal <= hi:
            out.append(Violation("wavelength outside band", f"sensor {s.id}", f"{s.lambda_nominal:.4f} nm"))
        if s.strain_sensitivity <= 0 or s.temp_sensitivity <= 0:
            out.append(Violation("non-positive sensitivity", f"sensor {s.id}"))

    radii = bend_radii(layout.fiber.polyline)
    for i in np.flatnonzero(radii < MIN_BEND_RADIUS_MM):
        x, y = layout.fiber.polyline[i + 1]
        out.append(Violation("bend radius below 10 mm", f"fiber vertex {i + 1}",
                             f"r={radii[i]:.3f} mm at ({x:.3f}, {y:.3f})"))
    outside = np.flatnonzero(~layout.template.contains(layout.fiber.polyline))
    if outside.size:
        out.append(Violation("fiber outside outline", f"fiber vertex {int(outside[0])}",
                             f"{outside.size} vertices outside"))
    arc = layout.fiber.arc_length
    expected = layout.fiber.guard_length + arc
    if abs(layout.fiber.total_length - expected) > length_tolerance:
        out.append(Violation("fiber length inconsistent", "fiber",
                             f"total {layout.fiber.total_length:.3f} mm vs guard+arc {expected:.3f} mm"))
    out.sort(key=lambda v: (v.rule, v.element, v.detail))
    min_r = float(radii.min()) if radii.size else math.inf
    return ValidationReport(tuple(out), min_r, arc, len(sensors))


# -- spectral headroom ----------------------------------------------------

@dataclass(frozen=True)
class HeadroomReport:
    excursions: dict
    guard_band: float
    collisions: tuple

    @property
    def worst_excursion(self) -> float:
        return max(self.excursions.values(), default=0.0)


def worst_case_shift(lambda_nominal: float, strain_sensitivity: float, temp_sensitivity: float,
                     max_strain: float, max_dT: float) -> float:
    return abs(lambda_nominal * (strain_sensitivity * max_strain * 1e-6 + temp_sensitivity * max_dT))


def check_spectral_headroom(plan: SpectralPlan, layout: SensorLayout,
                            max_strain: float = DEFAULT_MAX_STRAIN_UE,
                            max_dT: float = DEFAULT_MAX_DT_C) -> HeadroomReport:
    excursions = {}
    for sid, lam in sorted(plan.assignments.items()):
        try:
            s = layout.sensor(sid)
        except KeyError:
            raise LayoutError(f"plan sensor {sid} missing from layout") from None
        excursions[sid] = worst_case_shift(lam, s.strain_sensitivity, s.temp_sensitivity,
                                           max_strain, max_dT)
    collisions = tuple(sid for sid, d in excursions.items() if d > plan.guard_band)
    return HeadroomReport(excursions, plan.guard_band, collisions)
