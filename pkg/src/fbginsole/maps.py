"""Sparse-to-dense foot maps: grid template, IDW rasterisation, mirroring, export."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .layout import DEFAULT_REGIONS, InsoleTemplate

LEFT = "left"
RIGHT = "right"
SIDES = (LEFT, RIGHT)

PRESSURE = "pressure"
TEMPERATURE = "temperature"
UNITS = {PRESSURE: "gf", TEMPERATURE: "degC"}

IDW_POWER = 2.0
IDW_RADIUS_MM = 60.0


class MapError(ValueError):
    pass


class ShapeError(MapError):
    pass


@dataclass(frozen=True)
class FootTemplate:
    """Regular cell grid over the insole; rows run heel to toe (x), columns lateral to medial (y).

    The grid is centred on the insole bounding box so that a column flip is an
    exact reflection across the long axis.
    """

    length: float = 259.0
    width: float = 88.0
    cell_size: float = 5.0
    nx: int = 52
    ny: int = 18
    mask: np.ndarray = field(default=None, repr=False)
    regions: dict = field(default_factory=lambda: dict(DEFAULT_REGIONS))
    mirrored: bool = False

    def __post_init__(self):
        if self.nx * self.cell_size < self.length - 1e-9 or self.ny * self.cell_size < self.width - 1e-9:
            raise ShapeError("grid does not cover the insole")
        mask = self.mask
        if mask is None:
            mask = InsoleTemplate(self.length, self.width).contains(self.cell_centers().reshape(-1, 2))
            mask = mask.reshape(self.nx, self.ny)
        mask = np.array(mask, dtype=bool)
        if mask.shape != (self.nx, self.ny):
            raise ShapeError(f"mask shape {mask.shape} != ({self.nx}, {self.ny})")
        if not mask.any():
            raise ShapeError("template mask is empty")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_insole(cls, insole: InsoleTemplate, cell_size: float = 5.0, regions=None) -> "FootTemplate":
        nx = int(math.ceil(insole.length / cell_size - 1e-9))
        ny = int(math.ceil(insole.width / cell_size - 1e-9))
        tmp = cls(insole.length, insole.width, cell_size, nx, ny, mask=np.ones((nx, ny), bool))
        mask = insole.contains(tmp.cell_centers().reshape(-1, 2)).reshape(nx, ny)
        return cls(insole.length, insole.width, cell_size, nx, ny, mask,
                   dict(regions or DEFAULT_REGIONS))

    @property
    def origin(self) -> tuple[float, float]:
        return ((self.length - self.nx * self.cell_size) / 2.0,
                (self.width - self.ny * self.cell_size) / 2.0)

    @property
    def cell_area(self) -> float:
        return self.cell_size ** 2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    def cell_centers(self) -> np.ndarray:
        """Array of shape (nx, ny, 2)."""
        ox, oy = self.origin
        xs = ox + (np.arange(self.nx) + 0.5) * self.cell_size
        ys = oy + (np.arange(self.ny) + 0.5) * self.cell_size
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.stack([gx, gy], axis=-1)

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        ox, oy = self.origin
        i = int(math.floor((x - ox) / self.cell_size))
        j = int(math.floor((y - oy) / self.cell_size))
        if not (0 <= i < self.nx and 0 <= j < self.ny):
            raise MapError(f"position ({x:.3f}, {y:.3f}) outside grid")
        return i, j

    def mirror(self) -> "FootTemplate":
        regions = {k: (x0, x1, 1.0 - y1, 1.0 - y0) for k, (x0, x1, y0, y1) in self.regions.items()}
        return replace(self, mask=self.mask[:, ::-1].copy(), regions=regions, mirrored=not self.mirrored)

    def for_side(self, side: str) -> "FootTemplate":
        """Templates are authored for the right foot; the left one is its mirror."""
        want_mirror = side == LEFT
        return self.mirror() if want_mirror != self.mirrored else self

    def compatible(self, other: "FootTemplate") -> bool:
        return (self.shape == other.shape and self.cell_size == other.cell_size
                and self.length == other.length and self.width == other.width)

    def region_masks(self) -> dict:
        centers = self.cell_centers()
        fx = centers[..., 0] / self.length
        fy = centers[..., 1] / self.width
        out = {}
        for name, (x0, x1, y0, y1) in self.regions.items():
            sel = (fx >= x0) & ((fx < x1) | (x1 >= 1.0))
            sel &= (fy >= y0) & ((fy < y1) | (y1 >= 1.0))
            out[name] = sel & self.mask
        return out


@dataclass(frozen=True)
class FootMap:
    values: np.ndarray = field(repr=False)
    kind: str
    template: FootTemplate = field(repr=False)
    side: str = RIGHT
    timestamp: float = 0.0

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.template.shape:
            raise ShapeError(f"values shape {vals.shape} != template {self.template.shape}")
        vals[~self.template.mask] = np.nan
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.side not in SIDES:
            raise MapError(f"unknown side {self.side!r}")
        if self.kind not in UNITS:
            raise MapError(f"unknown map kind {self.kind!r}")

    @property
    def unit(self) -> str:
        return UNITS[self.kind]

    @property
    def masked_values(self) -> np.ndarray:
        return self.values[self.template.mask]

    def argmax_position(self) -> tuple[float, float]:
        flat = np.where(np.isfinite(self.values), self.values, -np.inf)
        i, j = np.unravel_index(np.argmax(flat), flat.shape)
        c = self.template.cell_centers()[i, j]
        return float(c[0]), float(c[1])


def interpolate_map(samples, template: FootTemplate, kind: str, side: str = RIGHT,
                    timestamp: float = 0.0, power: float = IDW_POWER,
                    radius: float = IDW_RADIUS_MM) -> FootMap:
    """Inverse-distance-weighted raster of ``[((x, y), value), ...]``.

    A cell holding a sample takes that sample's value (the mean, if several
    share the cell). Cells with no sample within ``radius`` are no-data for
    pressure maps and nearest-sample for temperature maps.
    """
    samples = list(samples)
    if not samples:
        raise MapError("no samples to interpolate")
    pos = np.array([p for p, _ in samples], dtype=float).reshape(-1, 2)
    val = np.array([v for _, v in samples], dtype=float)
    if not np.all(np.isfinite(val)):
        raise MapError("sample values must be finite")
    # canonical order makes the result independent of how samples were listed
    order = np.lexsort((val, pos[:, 1], pos[:, 0]))
    pos, val = pos[order], val[order]
    cells = [template.cell_of(x, y) for x, y in pos]
    if not any(template.mask[c] for c in cells):
        raise MapError("no sample lies inside the template mask")

    centers = template.cell_centers().reshape(-1, 1, 2)
    d = np.sqrt(np.sum((centers - pos[None, :, :]) ** 2, axis=-1))
    in_radius = d <= radius
    with np.errstate(divide="ignore"):
        w = np.where(in_radius, 1.0 / np.maximum(d, 1e-12) ** power, 0.0)
    wsum = w.sum(axis=1)
    covered = wsum > 0
    out = np.full(d.shape[0], np.nan)
    out[covered] = (w[covered] @ val) / wsum[covered]
    # keep rounding from stepping outside the convex hull of the values
    lo = np.where(in_radius, val, np.inf).min(axis=1)
    hi = np.where(in_radius, val, -np.inf).max(axis=1)
    out[covered] = np.clip(out[covered], lo[covered], hi[covered])
    if kind == TEMPERATURE:
        nearest = np.argmin(d, axis=1)
        out[~covered] = val[nearest[~covered]]
    elif kind != PRESSURE:
        raise MapError(f"unknown map kind {kind!r}")
    out = out.reshape(template.shape)

    acc: dict = {}
    for c, v in zip(cells, val):
        acc.setdefault(c, []).append(v)
    for c, vs in acc.items():
        out[c] = float(np.mean(vs))
    return FootMap(out, kind, template, side, timestamp)


def mirror_map(m: FootMap) -> FootMap:
    """Reflect across the long axis and flip the side label."""
    side = LEFT if m.side == RIGHT else RIGHT
    return FootMap(m.values[:, ::-1].copy(), m.kind, m.template.mirror(), side, m.timestamp)


# -- export ---------------------------------------------------------------

CSV_GRID = "csv"
PGM = "pgm"
FORMATS = (CSV_GRID, PGM)


def export_map(m: FootMap, fmt: str = CSV_GRID, precision: int = 3) -> bytes:
    if fmt == CSV_GRID:
        buf = io.StringIO()
        for row in m.values:
            buf.write(",".join("" if not np.isfinite(v) else f"{v:.{precision}f}" for v in row))
            buf.write("\n")
        return buf.getvalue().encode("ascii")
    if fmt == PGM:
        vals = m.values
        inside = m.template.mask & np.isfinite(vals)
        img = np.zeros(vals.shape, dtype=np.uint8)
        if inside.any():
            lo, hi = float(vals[inside].min()), float(vals[inside].max())
            if hi > lo:
                scaled = np.rint((vals[inside] - lo) / (hi - lo) * 254.0) + 1.0
            else:
                scaled = np.full(int(inside.sum()), 255.0)
            img[inside] = scaled.astype(np.uint8)
        header = f"P5\n{m.template.ny} {m.template.nx}\n255\n".encode("ascii")
        return header + img.tobytes()
    raise MapError(f"unsupported export format {fmt!r}")


def parse_csv_grid(data: bytes) -> np.ndarray:
    rows = data.decode("ascii").strip("\n").split("\n")
    return np.array([[float(tok) if tok else np.nan for tok in r.split(",")] for r in rows])


def parse_pgm(data: bytes) -> np.ndarray:
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise MapError("not a binary PGM")
    w, h = (int(t) for t in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w)


def map_filename(m: FootMap, fmt: str) -> str:
    return f"{m.side}_{m.kind}_t{int(round(m.timestamp * 1000))}.{fmt}"


# -- scoring --------------------------------------------------------------

def pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, float).ravel()
    b = np.asarray(b, float).ravel()
    ok = np.isfinite(a) & np.isfinite(b)
    a, b = a[ok] - a[ok].mean(), b[ok] - b[ok].mean()
    den = math.sqrt(float(a @ a) * float(b @ b))
    if den == 0.0:
        return 1.0 if np.allclose(a, b) else 0.0
    return float(np.clip((a @ b) / den, -1.0, 1.0))
