"""Parametric geometry of generalized cylindrical shells (GCS).

A shell is defined by lobed radius profiles at its base and top faces,
interpolated along the height with optional linear and oscillating
twisting.  The radius scale factor is not a free parameter: it is solved
so that the single-wall (vase-mode) shell hits a target mass for the
given wall thickness and material density.

All lengths are millimetres, masses grams, densities g/cm3.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Material",
    "GcsDesign",
    "TriangleMesh",
    "PrintabilityReport",
    "GeometryError",
    "DEFAULT_DENSITIES_G_CM3",
    "SCALAR_RANGES",
    "radius_profile",
    "cross_section",
    "perimeter",
    "solve_r0",
    "build_mesh",
    "mesh_surface_area",
    "check_printability",
    "export_stl",
    "parse_stl",
]


class Material(str, Enum):
    """Filament choices covered by the dataset."""

    PETG = "PETG"
    PLA = "PLA"
    TPE_CHINCHILLA_75A = "TPE_Chinchilla75A"
    TPU_CHEETAH_95A = "TPU_Cheetah95A"
    TPU_NINJAFLEX_85A = "TPU_NinjaFlex85A"
    TPU_ARMADILLO_75D = "TPU_Armadillo75D"


# Nominal filament densities (g/cm3).  These are configuration defaults,
# not measured ground truth; override via a density table file if needed.
DEFAULT_DENSITIES_G_CM3: dict[Material, float] = {
    Material.PETG: 1.27,
    Material.PLA: 1.24,
    Material.TPE_CHINCHILLA_75A: 1.22,
    Material.TPU_CHEETAH_95A: 1.22,
    Material.TPU_NINJAFLEX_85A: 1.21,
    Material.TPU_ARMADILLO_75D: 1.20,
}

# Valid ranges of the eleven scalar design parameters, in canonical order.
SCALAR_RANGES: dict[str, tuple[float, float]] = {
    "c4_base": (0.0, 1.2),
    "c4_top": (0.0, 1.2),
    "c8_base": (-1.0, 1.0),
    "c8_top": (-1.0, 1.0),
    "linear_twist": (0.0, 2.0 * math.pi),
    "osc_twist_amplitude": (0.0, math.pi),
    "osc_twist_cycles": (0.0, 3.0),
    "perimeter_ratio": (1.0, 3.0),
    "mass": (1.0, 5.0),
    "height": (10.0, 30.0),
    "thickness": (0.4, 1.0),
}

SCALAR_FIELDS = tuple(SCALAR_RANGES)

MIN_BASE_PERIMETER_MM = 30.0
MIN_AXIS_DISTANCE_MM = 0.01

#: Bisection bracket for the base radius scale factor (mm).  Covers every
#: mass/height/thickness combination within the valid parameter ranges.
R0_BRACKET_MM = (0.1, 500.0)


class GeometryError(RuntimeError):
    """Raised when the shell construction cannot be completed."""


@dataclass(frozen=True)
class GcsDesign:
    """The twelve design parameters of a generalized cylindrical shell.

    The profile scale factor r0 is intentionally absent: it is derived
    from the mass constraint by :func:`solve_r0`.
    """

    c4_base: float
    c4_top: float
    c8_base: float
    c8_top: float
    linear_twist: float
    osc_twist_amplitude: float
    osc_twist_cycles: float
    perimeter_ratio: float
    mass: float
    height: float
    thickness: float
    material: Material

    def validate(self) -> None:
        """Raise ValueError naming the first parameter outside its range."""
        for name, (lo, hi) in SCALAR_RANGES.items():
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            if not lo <= value <= hi:
                raise ValueError(
                    f"{name}={value!r} outside valid range [{lo}, {hi}]"
                )
        if not isinstance(self.material, Material):
            raise ValueError(f"unknown material {self.material!r}")

    def scalars(self) -> np.ndarray:
        """The eleven scalar parameters in canonical order."""
        return np.array([getattr(self, f) for f in SCALAR_FIELDS], dtype=float)

    def as_dict(self) -> dict:
        d = {f: float(getattr(self, f)) for f in SCALAR_FIELDS}
        d["material"] = self.material.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GcsDesign":
        try:
            material = Material(d["material"])
        except ValueError:
            valid = ", ".join(m.value for m in Material)
            raise ValueError(
                f"unknown material {d['material']!r}; expected one of {valid}"
            ) from None
        except KeyError:
            raise ValueError("design is missing the 'material' field") from None
        missing = [f for f in SCALAR_FIELDS if f not in d]
        if missing:
            raise ValueError(f"design is missing fields: {', '.join(missing)}")
        return cls(**{f: float(d[f]) for f in SCALAR_FIELDS}, material=material)


@dataclass(frozen=True)
class TriangleMesh:
    """Open-ended surface mesh: vertices in mm, faces as vertex-index triples."""

    vertices: np.ndarray  # (n, 3) float64
    faces: np.ndarray  # (m, 3) int

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        f = np.asarray(self.faces, dtype=int)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise ValueError("face indices out of range")


@dataclass(frozen=True)
class PrintabilityReport:
    """Outcome of the fabrication feasibility checks."""

    base_perimeter: float
    min_axis_distance: float
    passes_perimeter: bool
    passes_axis: bool
    printable: bool

    def as_dict(self) -> dict:
        return {
            "base_perimeter_mm": float(self.base_perimeter),
            "min_axis_distance_mm": float(self.min_axis_distance),
            "passes_perimeter": bool(self.passes_perimeter),
            "passes_axis": bool(self.passes_axis),
            "printable": bool(self.printable),
        }


def load_density_table(path) -> dict[Material, float]:
    """Read a material -> g/cm3 table from a JSON key-value file."""
    import json

    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    table = dict(DEFAULT_DENSITIES_G_CM3)
    for name, value in raw.items():
        table[Material(name)] = float(value)
    return table


def radius_profile(c4: float, c8: float, r0: float, phi) -> np.ndarray:
    """Lobed radius r(phi) = r0 * (1 + c4*cos(4*phi) + c8*cos(8*phi)).

    May be negative for extreme coefficients; the printability check is
    responsible for catching profiles that cross the center axis.
    """
    phi = np.asarray(phi, dtype=float)
    return r0 * (1.0 + c4 * np.cos(4.0 * phi) + c8 * np.cos(8.0 * phi))


def _twist_angle(design: GcsDesign, t) -> np.ndarray:
    """Total twist at normalized height t in [0, 1]."""
    t = np.asarray(t, dtype=float)
    return design.linear_twist * t + design.osc_twist_amplitude * np.sin(
        2.0 * math.pi * design.osc_twist_cycles * t
    )


def section_radii(
    design: GcsDesign, z, r0_base: float, r0_top: float, phi
) -> np.ndarray:
    """Signed radius field of the cross-section at height z.

    The base and top lobed profiles are evaluated at ``phi - theta(z)``
    (the whole profile rotates with the twist) and interpolated linearly
    in normalized height.  Broadcasts over ``z`` and ``phi``.
    """
    t = np.asarray(z, dtype=float) / design.height
    theta = _twist_angle(design, t)
    angle = np.asarray(phi, dtype=float) - theta
    r_base = radius_profile(design.c4_base, design.c8_base, r0_base, angle)
    r_top = radius_profile(design.c4_top, design.c8_top, r0_top, angle)
    return (1.0 - t) * r_base + t * r_top


def cross_section(
    design: GcsDesign,
    z: float,
    r0_base: float,
    r0_top: float,
    samples: int = 256,
) -> np.ndarray:
    """Closed planar polyline of the shell cross-section at height z.

    Returns an (samples, 2) array of xy points at uniformly spaced
    azimuths; the closing segment back to the first point is implicit.
    """
    if not 0.0 <= z <= design.height:
        raise ValueError(f"z={z!r} outside [0, {design.height}]")
    if samples < 16:
        raise ValueError("need at least 16 azimuthal samples")
    phi = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    r = section_radii(design, z, r0_base, r0_top, phi)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def perimeter(polyline: np.ndarray) -> float:
    """Total segment length of a closed polyline (last point joins first)."""
    pts = np.asarray(polyline, dtype=float)
    if pts.ndim != 2 or len(pts) < 3:
        raise ValueError("polyline needs at least 3 points")
    deltas = np.diff(pts, axis=0, append=pts[:1])
    return float(np.sqrt((deltas**2).sum(axis=1)).sum())


def _resolve_density(design: GcsDesign, densities) -> float:
    table = DEFAULT_DENSITIES_G_CM3 if densities is None else densities
    try:
        return float(table[design.material])
    except KeyError:
        raise ValueError(
            f"no density configured for material {design.material.value!r}"
        ) from None


def solve_r0(
    design: GcsDesign,
    densities: dict[Material, float] | None = None,
    z_slices: int = 64,
    phi_samples: int = 1024,
    tol: float = 1e-4,
    max_iter: int = 100,
) -> tuple[float, float]:
    """Solve the profile scale factors from the mass constraint.

    The top scale is pinned by the perimeter-ratio constraint (twisting
    does not change a section's perimeter, so the ratio is enforced on
    the untwisted profiles).  The base scale is then found by bisection
    so that the thin-shell mass

        density * thickness * integral of perimeter(z) dz

    matches ``design.mass``.  The z integral uses a ``z_slices``-slice
    trapezoid rule.  The whole radius field scales linearly with the
    base factor, so the unit-scale lateral area is computed once and
    reused across bisection iterations.
    """
    rho_g_mm3 = _resolve_density(design, densities) * 1e-3
    phi = np.linspace(0.0, 2.0 * math.pi, phi_samples, endpoint=False)

    unit_base = radius_profile(design.c4_base, design.c8_base, 1.0, phi)
    unit_top = radius_profile(design.c4_top, design.c8_top, 1.0, phi)
    p_base = perimeter(np.column_stack([unit_base * np.cos(phi), unit_base * np.sin(phi)]))
    p_top = perimeter(np.column_stack([unit_top * np.cos(phi), unit_top * np.sin(phi)]))
    if p_base <= 0.0 or p_top <= 0.0:
        raise GeometryError("degenerate profile: zero perimeter")
    # r0_top = top_scale * r0_base enforces perimeter(top) = ratio * perimeter(base)
    top_scale = design.perimeter_ratio * p_base / p_top

    # Lateral mid-surface area for r0_base = 1 (area scales linearly with r0_base).
    z = np.linspace(0.0, design.height, z_slices + 1)
    t = z[:, None] / design.height
    theta = _twist_angle(design, z / design.height)[:, None]
    angle = phi[None, :] - theta
    r_b = radius_profile(design.c4_base, design.c8_base, 1.0, angle)
    r_t = radius_profile(design.c4_top, design.c8_top, top_scale, angle)
    r = (1.0 - t) * r_b + t * r_t
    x = r * np.cos(phi)[None, :]
    y = r * np.sin(phi)[None, :]
    dx = np.diff(x, axis=1, append=x[:, :1])
    dy = np.diff(y, axis=1, append=y[:, :1])
    perims = np.sqrt(dx**2 + dy**2).sum(axis=1)
    unit_area = float(np.trapezoid(perims, z))
    if unit_area <= 0.0:
        raise GeometryError("degenerate profile: zero lateral area")

    def mass_at(r0: float) -> float:
        return rho_g_mm3 * design.thickness * r0 * unit_area

    lo, hi = R0_BRACKET_MM
    if mass_at(lo) > design.mass or mass_at(hi) < design.mass:
        raise GeometryError(
            f"target mass {design.mass} g unreachable within the "
            f"r0 bracket {R0_BRACKET_MM} mm"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        m = mass_at(mid)
        if abs(m - design.mass) <= tol * design.mass:
            return mid, top_scale * mid
        if m < design.mass:
            lo = mid
        else:
            hi = mid
    raise GeometryError("r0 bisection did not converge (degenerate profile)")


def build_mesh(
    design: GcsDesign,
    z_slices: int = 128,
    phi_samples: int = 256,
    densities: dict[Material, float] | None = None,
) -> TriangleMesh:
    """Stack cross-section rings into an open-ended triangle-strip mesh.

    Vertex ordering is deterministic: ring by ring from the base,
    azimuth increasing counterclockwise.  Produces
    ``z_slices * phi_samples`` vertices and
    ``2 * (z_slices - 1) * phi_samples`` outward-facing triangles.
    """
    if z_slices < 2:
        raise ValueError("need at least 2 z slices")
    if phi_samples < 16:
        raise ValueError("need at least 16 azimuthal samples")
    r0_base, r0_top = solve_r0(design, densities)
    zs = np.linspace(0.0, design.height, z_slices)
    rings = []
    for z in zs:
        xy = cross_section(design, float(z), r0_base, r0_top, phi_samples)
        rings.append(np.column_stack([xy, np.full(phi_samples, z)]))
    vertices = np.vstack(rings)

    faces = np.empty((2 * (z_slices - 1) * phi_samples, 3), dtype=int)
    k = 0
    for j in range(z_slices - 1):
        base = j * phi_samples
        for i in range(phi_samples):
            i_next = (i + 1) % phi_samples
            v00 = base + i
            v01 = base + i_next
            v10 = v00 + phi_samples
            v11 = v01 + phi_samples
            faces[k] = (v00, v01, v11)
            faces[k + 1] = (v00, v11, v10)
            k += 2
    return TriangleMesh(vertices=vertices, faces=faces)


def mesh_surface_area(mesh: TriangleMesh) -> float:
    """Sum of triangle areas (mm2)."""
    v = mesh.vertices
    a = v[mesh.faces[:, 0]]
    b = v[mesh.faces[:, 1]]
    c = v[mesh.faces[:, 2]]
    cross = np.cross(b - a, c - a)
    return float(0.5 * np.sqrt((cross**2).sum(axis=1)).sum())


def check_printability(
    design: GcsDesign,
    densities: dict[Material, float] | None = None,
    phi_samples: int = 2048,
    z_levels: int = 9,
) -> PrintabilityReport:
    """Evaluate the two fabrication feasibility rules.

    The base perimeter must reach 30 mm for bed adhesion, and the signed
    radius must stay at least 0.01 mm from the center axis at every
    sampled level (base, top, and 7 intermediate sections; conservative).
    Always returns a report; an unsolvable mass constraint is reported
    as failing both checks.
    """
    try:
        r0_base, r0_top = solve_r0(design, densities)
    except (GeometryError, ValueError):
        return PrintabilityReport(0.0, 0.0, False, False, False)
    base = cross_section(design, 0.0, r0_base, r0_top, phi_samples)
    base_perimeter = perimeter(base)
    phi = np.linspace(0.0, 2.0 * math.pi, phi_samples, endpoint=False)
    zs = np.linspace(0.0, design.height, z_levels)
    radii = section_radii(design, zs[:, None], r0_base, r0_top, phi[None, :])
    min_axis_distance = float(radii.min())
    passes_perimeter = bool(base_perimeter >= MIN_BASE_PERIMETER_MM)
    passes_axis = bool(min_axis_distance >= MIN_AXIS_DISTANCE_MM)
    return PrintabilityReport(
        base_perimeter=float(base_perimeter),
        min_axis_distance=min_axis_distance,
        passes_perimeter=passes_perimeter,
        passes_axis=passes_axis,
        printable=passes_perimeter and passes_axis,
    )


def export_stl(mesh: TriangleMesh) -> bytes:
    """Serialize to binary STL (little-endian, 80-byte header).

    Normals follow the right-hand winding of each face.  Exact
    zero-area faces are dropped so the exported solid never contains
    degenerate facets.
    """
    if len(mesh.faces) == 0:
        raise ValueError("cannot export an empty mesh")
    v = mesh.vertices
    a = v[mesh.faces[:, 0]]
    b = v[mesh.faces[:, 1]]
    c = v[mesh.faces[:, 2]]
    normals = np.cross(b - a, c - a)
    lengths = np.sqrt((normals**2).sum(axis=1))
    keep = lengths > 0.0
    if not keep.any():
        raise ValueError("mesh has no non-degenerate faces")
    normals = normals[keep] / lengths[keep, None]
    a, b, c = a[keep], b[keep], c[keep]

    out = bytearray()
    out += b"gcskit binary stl".ljust(80, b"\0")
    out += struct.pack("<I", len(normals))
    tri = np.empty((len(normals), 12), dtype="<f4")
    tri[:, 0:3] = normals
    tri[:, 3:6] = a
    tri[:, 6:9] = b
    tri[:, 9:12] = c
    record = struct.Struct("<12fH")
    for row in tri:
        out += record.pack(*row, 0)
    return bytes(out)


def parse_stl(data: bytes) -> TriangleMesh:
    """Read a binary STL back into a mesh (vertices are not deduplicated)."""
    if len(data) < 84:
        raise ValueError("not a binary STL: too short")
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + 50 * count
    if len(data) != expected:
        raise ValueError(f"binary STL size mismatch: {len(data)} != {expected}")
    record = struct.Struct("<12fH")
    vertices = np.empty((3 * count, 3), dtype=float)
    for k in range(count):
        values = record.unpack_from(data, 84 + 50 * k)
        vertices[3 * k] = values[3:6]
        vertices[3 * k + 1] = values[6:9]
        vertices[3 * k + 2] = values[9:12]
    faces = np.arange(3 * count, dtype=int).reshape(-1, 3)
    return TriangleMesh(vertices=vertices, faces=faces)
