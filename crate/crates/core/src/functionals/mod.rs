//! Global geometric functionals and their deficits: area, enclosed volume,
//! Willmore energy, isoperimetric ratio, trace-free curvature energy, the
//! tangential-divergence consistency check, and a Monte-Carlo asymmetry index.
//!
//! Deficits are measured against the exact sphere values 4π and (6√π)^(2/3);
//! discretization bias is controlled by tolerances, not by comparing against
//! same-resolution sphere meshes.

mod asymmetry;

pub use asymmetry::{asymmetry_index, AsymmetryEstimate};

use crate::curvature::CurvatureField;
use crate::mesh::{euler_characteristic, TriangleMesh};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// W(S²) = 4π, the Willmore minimum over closed surfaces.
pub const WILLMORE_MINIMUM: f64 = 4.0 * PI;

/// I(S²) = (6√π)^(2/3) = (36π)^(1/3), the isoperimetric minimum.
pub fn isoperimetric_minimum() -> f64 {
    (36.0 * PI).cbrt()
}

#[derive(Debug, Error)]
pub enum FunctionalError {
    #[error("SampleBudgetTooSmall: {samples} samples requested, at least {min} required")]
    SampleBudgetTooSmall { samples: usize, min: usize },
}

/// Every global functional of a mesh, plus the internal consistency residuals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub area: f64,
    pub volume: f64,
    pub willmore: f64,
    pub isoperimetric_ratio: f64,
    pub willmore_deficit: f64,
    pub isoperimetric_deficit: f64,
    pub tracefree_energy: f64,
    /// |4π − Σ K_i A_i|; zero up to rounding by exactness of angle defects.
    pub gauss_bonnet_residual: f64,
    /// |R + 2·area| / area for R from [`position_weighted_mean_curvature`].
    pub tangential_identity_residual: f64,
    pub euler_characteristic: i64,
    pub mesh_vertices: usize,
    pub mesh_faces: usize,
}

/// Sum of triangle areas.
pub fn surface_area(mesh: &TriangleMesh) -> f64 {
    (0..mesh.face_count())
        .map(|f| {
            let (a, b, c) = mesh.face_points(f);
            0.5 * (b - a).cross(c - a).norm()
        })
        .sum()
}

/// Enclosed volume by the divergence theorem: (1/6) Σ det[a, b, c] over faces.
///
/// Positive for outward-oriented meshes; translation invariant because the
/// mesh is closed.
pub fn enclosed_volume(mesh: &TriangleMesh) -> f64 {
    (0..mesh.face_count())
        .map(|f| {
            let (a, b, c) = mesh.face_points(f);
            a.triple(b, c) / 6.0
        })
        .sum()
}

/// Willmore energy W = (1/4) Σ H_i² A_i. Scale invariant; equals 4π on round
/// spheres in the refinement limit.
pub fn willmore_energy(mesh: &TriangleMesh) -> f64 {
    let field = CurvatureField::compute(mesh);
    willmore_from_field(&field)
}

fn willmore_from_field(field: &CurvatureField) -> f64 {
    0.25
        * field
            .mean_curvature
            .iter()
            .zip(&field.mixed_area)
            .map(|(h, a)| h * h * a)
            .sum::<f64>()
}

/// Isoperimetric ratio I = area / volume^(2/3); dilation and translation invariant.
pub fn isoperimetric_ratio(mesh: &TriangleMesh) -> f64 {
    surface_area(mesh) / enclosed_volume(mesh).powf(2.0 / 3.0)
}

/// Trace-free curvature energy (1/2)∫|Å|² = (1/4) Σ (H_i² − 4 K_i) A_i,
/// computed without clamping negative pointwise values so the discrete
/// identity `tracefree = willmore − Σ K A` stays exact.
pub fn tracefree_energy(mesh: &TriangleMesh) -> f64 {
    let field = CurvatureField::compute(mesh);
    tracefree_from_field(&field)
}

fn tracefree_from_field(field: &CurvatureField) -> f64 {
    0.25
        * field
            .mean_curvature
            .iter()
            .zip(&field.gauss_curvature)
            .zip(&field.mixed_area)
            .map(|((h, k), a)| (h * h - 4.0 * k) * a)
            .sum::<f64>()
}

/// The discrete tangential-divergence identity ∫ x·Δx dA = −2·area.
///
/// Returns `(R, residual)` where R = Σ x_i·(Δx)_i A_i with Δx the cotangent
/// Laplacian of the embedding (the inward-pointing mean-curvature vector,
/// i.e. minus the outward H⃗ of [`crate::curvature::mean_curvature_vectors`]),
/// and residual = |R + 2·area| / area. R scales as c² and its residual is
/// translation invariant up to rounding.
pub fn position_weighted_mean_curvature(mesh: &TriangleMesh) -> (f64, f64) {
    let field = CurvatureField::compute(mesh);
    let (r, residual) = position_weighted_from_field(mesh, &field, surface_area(mesh));
    (r, residual)
}

fn position_weighted_from_field(
    mesh: &TriangleMesh,
    field: &CurvatureField,
    area: f64,
) -> (f64, f64) {
    let r: f64 = mesh
        .vertices()
        .iter()
        .zip(&field.mean_curvature_vector)
        .zip(&field.mixed_area)
        .map(|((x, hv), a)| -x.dot(*hv) * a)
        .sum();
    (r, (r + 2.0 * area).abs() / area)
}

/// Populates a [`FunctionalReport`] in one curvature pass.
pub fn compute_report(mesh: &TriangleMesh) -> FunctionalReport {
    let field = CurvatureField::compute(mesh);
    let area = surface_area(mesh);
    let volume = enclosed_volume(mesh);
    let willmore = willmore_from_field(&field);
    let isoperimetric = area / volume.powf(2.0 / 3.0);
    let gauss_total: f64 = field
        .gauss_curvature
        .iter()
        .zip(&field.mixed_area)
        .map(|(k, a)| k * a)
        .sum();
    let (_, tangential_residual) = position_weighted_from_field(mesh, &field, area);

    FunctionalReport {
        area,
        volume,
        willmore,
        isoperimetric_ratio: isoperimetric,
        willmore_deficit: willmore - WILLMORE_MINIMUM,
        isoperimetric_deficit: isoperimetric - isoperimetric_minimum(),
        tracefree_energy: tracefree_from_field(&field),
        gauss_bonnet_residual: (WILLMORE_MINIMUM - gauss_total).abs(),
        tangential_identity_residual: tangential_residual,
        euler_characteristic: euler_characteristic(mesh),
        mesh_vertices: mesh.vertex_count(),
        mesh_faces: mesh.face_count(),
    }
}

/// Rescales the mesh to area exactly 4π and returns
/// `(4π/3 − volume, willmore − 4π)`: the volume deficit against the unit
/// ball and the Willmore deficit, both at the ar = 4π normalization.
/// The first component is nonnegative (up to rounding) by the isoperimetric
/// inequality at fixed area.
pub fn verify_volume_deficit(mesh: &TriangleMesh) -> (f64, f64) {
    let normalized = mesh.rescaled_to_area(4.0 * PI);
    let volume = enclosed_volume(&normalized);
    let willmore = willmore_energy(&normalized);
    (4.0 * PI / 3.0 - volume, willmore - WILLMORE_MINIMUM)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, bumpy_sphere, icosphere, spheroid_mesh};
    use crate::vec3::Vec3;

    fn unit_cube() -> TriangleMesh {
        let vertices = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 1.0),
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(0.0, 1.0, 1.0),
        ];
        let faces = vec![
            [0, 2, 1],
            [0, 3, 2],
            [4, 5, 6],
            [4, 6, 7],
            [0, 1, 5],
            [0, 5, 4],
            [2, 3, 7],
            [2, 7, 6],
            [1, 2, 6],
            [1, 6, 5],
            [3, 0, 4],
            [3, 4, 7],
        ];
        build_mesh(vertices, faces).unwrap()
    }

    #[test]
    fn cube_area_volume_and_ratio_are_exact() {
        let cube = unit_cube();
        assert_eq!(surface_area(&cube), 6.0);
        // 12 tetra contributions of 1/6 accumulate one ulp of rounding
        assert!((enclosed_volume(&cube) - 1.0).abs() < 1e-15);
        assert!((isoperimetric_ratio(&cube) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn icosphere_area_is_slightly_inside_4pi() {
        let area = surface_area(&icosphere(4).unwrap());
        let a = 4.0 * PI;
        assert!(area < a, "inscribed polyhedron has smaller area");
        assert!((area - a).abs() / a < 0.0025);
    }

    #[test]
    fn area_scales_quadratically() {
        let mesh = icosphere(2).unwrap();
        let scaled = mesh.transformed(2.0, Vec3::ZERO);
        assert!((surface_area(&scaled) - 4.0 * surface_area(&mesh)).abs() < 1e-12);
    }

    #[test]
    fn spheroid_volume_matches_closed_form() {
        let mesh = spheroid_mesh(2.0, 128, 128).unwrap();
        let exact = 8.0 * PI / 3.0;
        assert!((enclosed_volume(&mesh) - exact).abs() / exact < 0.01);
    }

    #[test]
    fn volume_is_translation_invariant() {
        let mesh = spheroid_mesh(1.5, 32, 32).unwrap();
        let v0 = enclosed_volume(&mesh);
        let v1 = enclosed_volume(&mesh.transformed(1.0, Vec3::new(10.0, -4.0, 2.5)));
        assert!((v1 - v0).abs() <= 1e-10 * v0);
    }

    #[test]
    fn willmore_refines_toward_4pi() {
        let mut prev = f64::INFINITY;
        for level in 2..=5 {
            let w = willmore_energy(&icosphere(level).unwrap());
            let err = (w - 4.0 * PI).abs();
            assert!(err < prev, "level {level}: {err} vs {prev}");
            prev = err;
        }
        assert!(prev / (4.0 * PI) < 0.05, "level 5 error {prev}");
    }

    #[test]
    fn willmore_is_scale_invariant() {
        let mesh = spheroid_mesh(1.5, 24, 24).unwrap();
        let w0 = willmore_energy(&mesh);
        let w1 = willmore_energy(&mesh.transformed(13.7, Vec3::ZERO));
        assert!((w1 - w0).abs() <= 1e-10 * w0);
    }

    #[test]
    fn isoperimetric_ratio_of_icosphere_is_near_minimum() {
        let ratio = isoperimetric_ratio(&icosphere(4).unwrap());
        let min = isoperimetric_minimum();
        assert!(ratio >= min);
        assert!((ratio - min) / min < 0.005);
    }

    #[test]
    fn isoperimetric_ratio_is_dilation_invariant() {
        let mesh = icosphere(3).unwrap();
        let i0 = isoperimetric_ratio(&mesh);
        let i1 = isoperimetric_ratio(&mesh.transformed(0.1, Vec3::new(5.0, 5.0, -1.0)));
        assert!((i1 - i0).abs() <= 1e-10 * i0);
    }

    #[test]
    fn tracefree_equals_willmore_deficit_exactly() {
        for mesh in [
            icosphere(3).unwrap(),
            spheroid_mesh(2.0, 48, 48).unwrap(),
            bumpy_sphere(4, 0.1, 42, 3).unwrap(),
        ] {
            let report = compute_report(&mesh);
            let gauss_total: f64 = {
                let f = CurvatureField::compute(&mesh);
                f.gauss_curvature.iter().zip(&f.mixed_area).map(|(k, a)| k * a).sum()
            };
            let expected = report.willmore - gauss_total;
            assert!((report.tracefree_energy - expected).abs() < 1e-9);
            assert!((report.tracefree_energy - report.willmore_deficit).abs() < 1e-9);
        }
    }

    #[test]
    fn tracefree_vanishes_under_sphere_refinement() {
        let coarse = tracefree_energy(&icosphere(2).unwrap());
        let fine = tracefree_energy(&icosphere(4).unwrap());
        assert!(fine.abs() < coarse.abs());
    }

    #[test]
    fn spheroid_tracefree_approximates_closed_form_deficit() {
        let mesh = spheroid_mesh(2.0, 128, 128).unwrap();
        let expected = crate::spheroid::spheroid_willmore(2.0).unwrap() - 4.0 * PI;
        let got = tracefree_energy(&mesh);
        assert!((got - expected).abs() / expected < 0.05, "{got} vs {expected}");
    }

    #[test]
    fn tangential_identity_on_icosphere() {
        let mesh = icosphere(4).unwrap();
        let area = surface_area(&mesh);
        let (r, residual) = position_weighted_mean_curvature(&mesh);
        assert!((r / area + 2.0).abs() < 0.04, "R/area = {}", r / area);
        assert!(residual < 0.04);
    }

    #[test]
    fn tangential_identity_scales_as_c_squared() {
        let mesh = icosphere(3).unwrap();
        let (r0, _) = position_weighted_mean_curvature(&mesh);
        let (r1, _) = position_weighted_mean_curvature(&mesh.transformed(2.0, Vec3::ZERO));
        assert!((r1 - 4.0 * r0).abs() < 1e-9 * r0.abs());
    }

    #[test]
    fn tangential_residual_on_spheroid() {
        let mesh = spheroid_mesh(2.0, 128, 128).unwrap();
        let (_, residual) = position_weighted_mean_curvature(&mesh);
        assert!(residual < 0.05, "residual {residual}");
    }

    #[test]
    fn report_deficits_on_reference_meshes() {
        // The isoperimetric deficit of any polyhedron is positive. Discrete
        // W of an inscribed sphere mesh sits slightly BELOW 4π (it tracks
        // the inscribed area): measured -1.50e-2 at level 4, shrinking to
        // -3.8e-3 at level 5, so only a resolution-sized dip is allowed.
        let report = compute_report(&icosphere(4).unwrap());
        assert!(report.isoperimetric_deficit >= -1e-9);
        assert!(report.willmore_deficit > -0.02 && report.willmore_deficit < 0.0);

        let bumpy = compute_report(&bumpy_sphere(4, 0.1, 42, 4).unwrap());
        assert!(bumpy.willmore_deficit > 0.0);
        assert!(bumpy.isoperimetric_deficit > 0.0);
    }

    #[test]
    fn fine_spheroid_meshes_match_closed_forms() {
        for r in [1.5, 2.0] {
            let mesh = spheroid_mesh(r, 256, 256).unwrap();
            let report = compute_report(&mesh);
            let pairs = [
                (report.willmore, crate::spheroid::spheroid_willmore(r).unwrap()),
                (report.area, crate::spheroid::spheroid_area(r).unwrap()),
                (report.volume, crate::spheroid::spheroid_volume(r).unwrap()),
                (report.isoperimetric_ratio, crate::spheroid::spheroid_isoperimetric(r).unwrap()),
            ];
            for (mesh_value, closed) in pairs {
                assert!(
                    (mesh_value - closed).abs() / closed < 0.02,
                    "r = {r}: {mesh_value} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn two_sphere_discretizations_agree_on_willmore() {
        let w_rev = willmore_energy(&spheroid_mesh(1.0, 128, 128).unwrap());
        let w_ico = willmore_energy(&icosphere(4).unwrap());
        assert!((w_rev - w_ico).abs() / w_ico < 0.02, "{w_rev} vs {w_ico}");
    }

    #[test]
    fn report_serializes_with_documented_keys() {
        let report = compute_report(&icosphere(1).unwrap());
        let json = serde_json::to_value(&report).unwrap();
        for key in [
            "area",
            "volume",
            "willmore",
            "isoperimetric_ratio",
            "willmore_deficit",
            "isoperimetric_deficit",
            "tracefree_energy",
            "gauss_bonnet_residual",
            "tangential_identity_residual",
            "euler_characteristic",
            "mesh_vertices",
            "mesh_faces",
        ] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
    }

    #[test]
    fn volume_deficit_is_nonnegative_after_normalization() {
        for mesh in [
            icosphere(5).unwrap(),
            bumpy_sphere(4, 0.1, 42, 4).unwrap(),
            spheroid_mesh(1.5, 48, 48).unwrap(),
        ] {
            let (vol_deficit, _) = verify_volume_deficit(&mesh);
            assert!(vol_deficit >= -1e-9, "vol deficit {vol_deficit}");
        }
        let (vd, wd) = verify_volume_deficit(&icosphere(5).unwrap());
        assert!(vd < 1e-2 && wd < 1e-2, "near-sphere deficits {vd} {wd}");
        let (vd, wd) = verify_volume_deficit(&bumpy_sphere(4, 0.1, 42, 4).unwrap());
        assert!(vd > 0.0 && wd > 0.0);
    }
}
