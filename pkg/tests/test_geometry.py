"""Geometry tests.

Numeric expectations come from independent closed forms computed inside
the tests (thin-wall cylinder mass, circle perimeter, polygon length),
never from the module under test.
"""

from __future__ import annotations

import math
import struct

import numpy as np
import pytest

from gcskit.geometry import (
    DEFAULT_DENSITIES_G_CM3,
    MIN_AXIS_DISTANCE_MM,
    MIN_BASE_PERIMETER_MM,
    GcsDesign,
    Material,
    TriangleMesh,
    build_mesh,
    check_printability,
    cross_section,
    export_stl,
    load_density_table,
    mesh_surface_area,
    parse_stl,
    perimeter,
    radius_profile,
    section_radii,
    solve_r0,
)


def cylinder(mass=3.0, height=20.0, thickness=0.6, material=Material.PLA):
    return GcsDesign(
        c4_base=0.0,
        c4_top=0.0,
        c8_base=0.0,
        c8_top=0.0,
        linear_twist=0.0,
        osc_twist_amplitude=0.0,
        osc_twist_cycles=0.0,
        perimeter_ratio=1.0,
        mass=mass,
        height=height,
        thickness=thickness,
        material=material,
    )


class TestSolveR0:
    def test_cylinder_matches_thin_wall_closed_form(self):
        # For a plain cylinder the shell volume is perimeter * height *
        # thickness = 2*pi*r0*h*t, so the mass constraint solves in
        # closed form: r0 = m / (2*pi*h*t*rho).
        m, h, t = 3.0, 20.0, 0.6
        rho = DEFAULT_DENSITIES_G_CM3[Material.PLA] * 1e-3  # g/mm^3
        expected = m / (2.0 * math.pi * h * t * rho)
        r0_base, r0_top = solve_r0(cylinder(m, h, t))
        assert r0_base == pytest.approx(expected, rel=1e-3)
        assert r0_top == pytest.approx(r0_base)

    def test_mass_scales_radius_linearly(self):
        # Doubling the mass of a cylinder doubles its radius.
        r1, _ = solve_r0(cylinder(mass=2.0))
        r2, _ = solve_r0(cylinder(mass=4.0))
        assert r2 == pytest.approx(2.0 * r1, rel=1e-3)

    def test_perimeter_ratio_scales_top_radius(self):
        design = cylinder()
        design = GcsDesign(**{**design.as_dict(), "perimeter_ratio": 2.0,
                              "material": Material.PLA})
        r0_base, r0_top = solve_r0(design)
        assert r0_top == pytest.approx(2.0 * r0_base, rel=1e-6)

    def test_custom_density_table(self):
        # Halving the density must double the solved radius.
        dense = {m: 2.0 * v for m, v in DEFAULT_DENSITIES_G_CM3.items()}
        r_default, _ = solve_r0(cylinder())
        r_dense, _ = solve_r0(cylinder(), densities=dense)
        assert r_dense == pytest.approx(0.5 * r_default, rel=1e-3)


class TestRadiusProfile:
    def test_matches_lobed_formula(self):
        phi = np.linspace(0.0, 2.0 * math.pi, 17)
        c4, c8, r0 = 0.3, -0.2, 10.0
        expected = r0 * (1.0 + c4 * np.cos(4 * phi) + c8 * np.cos(8 * phi))
        np.testing.assert_allclose(radius_profile(c4, c8, r0, phi), expected)

    def test_linear_twist_rotates_profile(self):
        # With only a linear twist, the top section equals the base
        # profile evaluated at phi - twist.
        d = GcsDesign(**{**cylinder().as_dict(), "c4_base": 0.5, "c4_top": 0.5,
                         "linear_twist": 1.0, "material": Material.PLA})
        phi = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
        top = section_radii(d, d.height, 10.0, 10.0, phi)
        base_shifted = radius_profile(0.5, 0.0, 10.0, phi - 1.0)
        np.testing.assert_allclose(top, base_shifted, atol=1e-12)

    def test_interpolates_between_faces(self):
        # Untwisted, mid-height radius is the average of base and top.
        d = GcsDesign(**{**cylinder().as_dict(), "c4_base": 0.4, "material": Material.PLA})
        phi = np.array([0.0, 0.5, 1.0])
        mid = section_radii(d, d.height / 2.0, 8.0, 12.0, phi)
        base = radius_profile(0.4, 0.0, 8.0, phi)
        top = radius_profile(0.0, 0.0, 12.0, phi)
        np.testing.assert_allclose(mid, 0.5 * (base + top))


class TestCrossSectionPerimeter:
    def test_circle_perimeter(self):
        # A regular n-gon inscribed in a circle of radius r has perimeter
        # n * 2r * sin(pi/n); check the discretization against it, and
        # both against 2*pi*r.
        d = cylinder()
        r0, _ = solve_r0(d)
        pts = cross_section(d, 0.0, r0, r0, samples=256)
        expected = 256 * 2.0 * r0 * math.sin(math.pi / 256)
        assert perimeter(pts) == pytest.approx(expected, rel=1e-9)
        assert perimeter(pts) == pytest.approx(2.0 * math.pi * r0, rel=1e-4)

    def test_unit_square_perimeter(self):
        square = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
        assert perimeter(square) == pytest.approx(4.0)

    def test_cross_section_rejects_bad_z(self):
        d = cylinder()
        with pytest.raises(ValueError, match="outside"):
            cross_section(d, d.height + 1.0, 10.0, 10.0)


class TestMesh:
    def test_face_count_formula(self):
        mesh = build_mesh(cylinder(), z_slices=64, phi_samples=128)
        assert mesh.vertices.shape == (64 * 128, 3)
        assert mesh.faces.shape == (2 * 63 * 128, 3)

    def test_cylinder_surface_area(self):
        # Lateral surface of a cylinder: 2*pi*r0*h.
        d = cylinder()
        r0, _ = solve_r0(d)
        mesh = build_mesh(d, z_slices=96, phi_samples=512)
        assert mesh_surface_area(mesh) == pytest.approx(
            2.0 * math.pi * r0 * d.height, rel=1e-3
        )

    def test_mesh_mass_consistency_for_straight_walls(self):
        # The mass constraint follows the vase-mode deposition model:
        # material per layer is the planar ring perimeter, so designs
        # with vertical walls (no twist, equal faces) must have
        # mesh area * thickness * density == mass within 1%.
        for d, material in [
            (cylinder(material=Material.PETG), Material.PETG),
            (
                GcsDesign(**{**cylinder().as_dict(), "c4_base": 0.4, "c4_top": 0.4,
                             "c8_base": 0.2, "c8_top": 0.2,
                             "material": Material.PLA}),
                Material.PLA,
            ),
        ]:
            mesh = build_mesh(d, z_slices=128, phi_samples=512)
            rho = DEFAULT_DENSITIES_G_CM3[material] * 1e-3
            assert mesh_surface_area(mesh) * d.thickness * rho == pytest.approx(
                d.mass, rel=0.01
            )

    def test_twist_adds_slant_area_not_mass(self):
        # Twisting tilts the interpolated surface, so the smooth mesh
        # area exceeds the deposition model's planar-ring integral; the
        # solved mass stays pinned to the deposition model.
        base = GcsDesign(**{**cylinder().as_dict(), "c4_base": 0.5, "c4_top": 0.5,
                            "material": Material.PLA})
        twisted = GcsDesign(**{**base.as_dict(), "linear_twist": 3.0,
                               "material": Material.PLA})
        assert solve_r0(twisted) == pytest.approx(solve_r0(base), rel=1e-6)
        area_base = mesh_surface_area(build_mesh(base, 128, 512))
        area_twisted = mesh_surface_area(build_mesh(twisted, 128, 512))
        assert area_twisted > 1.05 * area_base

    def test_mesh_spans_full_height(self):
        mesh = build_mesh(cylinder(height=25.0))
        assert mesh.vertices[:, 2].min() == pytest.approx(0.0)
        assert mesh.vertices[:, 2].max() == pytest.approx(25.0)


class TestStl:
    def test_single_triangle_record_layout(self):
        mesh = TriangleMesh(
            vertices=np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float),
            faces=np.array([[0, 1, 2]]),
        )
        data = export_stl(mesh)
        # 80-byte header + 4-byte count + one 50-byte record.
        assert len(data) == 84 + 50
        (count,) = struct.unpack_from("<I", data, 80)
        assert count == 1
        # Unit normal of the xy-plane triangle is +z by right-hand winding.
        normal = struct.unpack_from("<3f", data, 84)
        assert normal == pytest.approx((0.0, 0.0, 1.0))

    def test_round_trip(self):
        mesh = build_mesh(cylinder(), z_slices=8, phi_samples=32)
        parsed = parse_stl(export_stl(mesh))
        # Round trip is exact up to float32 storage.
        assert len(parsed.faces) == len(mesh.faces)
        original = mesh.vertices[mesh.faces].reshape(-1, 3)
        np.testing.assert_allclose(parsed.vertices, original, atol=1e-4)

    def test_empty_mesh_rejected(self):
        mesh = TriangleMesh(vertices=np.zeros((3, 3)), faces=np.zeros((0, 3), dtype=int))
        with pytest.raises(ValueError, match="empty"):
            export_stl(mesh)

    def test_parse_rejects_truncated(self):
        with pytest.raises(ValueError, match="too short"):
            parse_stl(b"x" * 50)
        mesh = TriangleMesh(
            vertices=np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float),
            faces=np.array([[0, 1, 2]]),
        )
        data = export_stl(mesh)
        with pytest.raises(ValueError, match="size mismatch"):
            parse_stl(data[:-1])


class TestPrintability:
    def test_plain_cylinder_printable(self):
        report = check_printability(cylinder())
        assert report.printable
        assert report.passes_perimeter and report.passes_axis

    def test_extreme_lobes_fail_axis_check(self):
        # c4 = 1.2 drives r = r0*(1 + 1.2*cos(4*phi)) negative near
        # cos(4*phi) = -1, so the wall crosses the center axis.
        d = GcsDesign(**{**cylinder().as_dict(), "c4_base": 1.2, "material": Material.PLA})
        report = check_printability(d)
        assert not report.passes_axis
        assert not report.printable
        assert report.min_axis_distance < MIN_AXIS_DISTANCE_MM

    def test_tiny_shell_fails_perimeter_check(self):
        # r0 = m/(2*pi*h*t*rho); 1 g spread over a tall thick wall gives
        # a base perimeter well under the adhesion minimum.
        d = cylinder(mass=1.0, height=30.0, thickness=1.0)
        rho = DEFAULT_DENSITIES_G_CM3[Material.PLA] * 1e-3
        assert 2.0 * math.pi * d.mass / (2.0 * math.pi * d.height * d.thickness * rho) < 30.0
        report = check_printability(d)
        assert not report.passes_perimeter
        assert not report.printable

    def test_flags_are_consistent_with_values(self):
        for d in [cylinder(), cylinder(mass=1.0, height=30.0, thickness=1.0)]:
            report = check_printability(d)
            assert report.passes_perimeter == (
                report.base_perimeter >= MIN_BASE_PERIMETER_MM
            )
            assert report.passes_axis == (
                report.min_axis_distance >= MIN_AXIS_DISTANCE_MM
            )
            assert report.printable == (report.passes_perimeter and report.passes_axis)

    def test_as_dict_keys(self):
        payload = check_printability(cylinder()).as_dict()
        assert set(payload) == {
            "base_perimeter_mm",
            "min_axis_distance_mm",
            "passes_perimeter",
            "passes_axis",
            "printable",
        }


class TestDesignValidation:
    def test_out_of_range_names_field_and_range(self):
        d = cylinder(mass=9.0)
        with pytest.raises(ValueError) as err:
            d.validate()
        assert "mass" in str(err.value)
        assert "[1.0, 5.0]" in str(err.value)

    def test_all_bounds_are_inclusive(self):
        lo = GcsDesign(0.0, 0.0, -1.0, -1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 10.0, 0.4,
                       Material.PETG)
        hi = GcsDesign(1.2, 1.2, 1.0, 1.0, 2 * math.pi, math.pi, 3.0, 3.0, 5.0,
                       30.0, 1.0, Material.TPU_ARMADILLO_75D)
        lo.validate()
        hi.validate()

    def test_from_dict_round_trip(self):
        d = cylinder(material=Material.TPE_CHINCHILLA_75A)
        assert GcsDesign.from_dict(d.as_dict()) == d

    def test_from_dict_missing_fields(self):
        payload = cylinder().as_dict()
        del payload["height"]
        with pytest.raises(ValueError, match="missing fields: height"):
            GcsDesign.from_dict(payload)

    def test_from_dict_unknown_material(self):
        payload = cylinder().as_dict()
        payload["material"] = "vibranium"
        with pytest.raises(ValueError, match="unknown material"):
            GcsDesign.from_dict(payload)

    def test_six_materials(self):
        assert len(Material) == 6


class TestDensityTable:
    def test_load_custom_table(self, tmp_path):
        path = tmp_path / "densities.json"
        path.write_text('{"PLA": 1.5, "PETG": 1.1}')
        table = load_density_table(path)
        assert table[Material.PLA] == 1.5
        assert table[Material.PETG] == 1.1
