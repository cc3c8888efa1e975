//! Per-vertex discrete curvature quantities on triangle meshes.
//!
//! Vertex areas are Meyer-style mixed Voronoi cells (circumcentric pieces on
//! non-obtuse triangles, the area/2 + area/4 + area/4 split on obtuse ones),
//! which partition the total surface area exactly. Mean curvature comes from
//! the cotangent formula and carries the convention H = κ₁ + κ₂, so the unit
//! sphere has H = 2. Gauss curvature is the angle defect divided by the mixed
//! area, which makes the discrete Gauss–Bonnet sum Σ K_i A_i = 4π exact for
//! sphere-type meshes up to rounding.

use crate::mesh::TriangleMesh;
use crate::vec3::Vec3;
use std::f64::consts::PI;

/// Per-vertex curvature data for a mesh.
#[derive(Clone, Debug)]
pub struct CurvatureField {
    /// Mixed Voronoi area per vertex; positive, sums to the total area.
    pub mixed_area: Vec<f64>,
    /// Cotangent mean-curvature vector; points outward on convex surfaces.
    pub mean_curvature_vector: Vec<Vec3>,
    /// Signed scalar H = κ₁ + κ₂, sign from the outward vertex normal.
    pub mean_curvature: Vec<f64>,
    /// Angle-defect Gauss curvature K.
    pub gauss_curvature: Vec<f64>,
}

impl CurvatureField {
    pub fn compute(mesh: &TriangleMesh) -> CurvatureField {
        let n = mesh.vertex_count();
        let mut mixed_area = vec![0.0f64; n];
        let mut angle_sum = vec![0.0f64; n];
        let mut laplace = vec![Vec3::ZERO; n];
        let mut normal = vec![Vec3::ZERO; n];

        for f in 0..mesh.face_count() {
            let idx = mesh.faces()[f];
            let (p0, p1, p2) = mesh.face_points(f);
            let corners = face_corners(p0, p1, p2);

            let area_vec = (p1 - p0).cross(p2 - p0) * 0.5;
            accumulate_mixed_areas(&corners, &mut mixed_area, &idx);
            for c in 0..3 {
                let i = idx[c] as usize;
                angle_sum[i] += corners[c].angle;
                normal[i] += area_vec;
                // cotangent weight of the opposite edge (j, k): contributes
                // cot(angle at c) * (x_j - x_k) to j's sum and the negative to k's
                let j = idx[(c + 1) % 3] as usize;
                let k = idx[(c + 2) % 3] as usize;
                let w = corners[c].cot;
                let d = mesh.vertices()[j] - mesh.vertices()[k];
                laplace[j] += d * w;
                laplace[k] -= d * w;
            }
        }

        let mut mean_curvature_vector = vec![Vec3::ZERO; n];
        let mut mean_curvature = vec![0.0f64; n];
        let mut gauss_curvature = vec![0.0f64; n];
        for i in 0..n {
            let hv = laplace[i] / (2.0 * mixed_area[i]);
            mean_curvature_vector[i] = hv;
            mean_curvature[i] = if hv.dot(normal[i]) < 0.0 { -hv.norm() } else { hv.norm() };
            gauss_curvature[i] = (2.0 * PI - angle_sum[i]) / mixed_area[i];
        }

        CurvatureField { mixed_area, mean_curvature_vector, mean_curvature, gauss_curvature }
    }
}

struct Corner {
    /// interior angle at this corner
    angle: f64,
    /// cotangent of that angle
    cot: f64,
    /// squared lengths of the two edges incident to this corner
    adj_sq: [f64; 2],
    /// triangle area (repeated per corner for locality)
    area: f64,
}

#[allow(clippy::needless_range_loop)] // corners index with modular offsets
fn face_corners(p0: Vec3, p1: Vec3, p2: Vec3) -> [Corner; 3] {
    let points = [p0, p1, p2];
    let mut corners = [
        Corner { angle: 0.0, cot: 0.0, adj_sq: [0.0; 2], area: 0.0 },
        Corner { angle: 0.0, cot: 0.0, adj_sq: [0.0; 2], area: 0.0 },
        Corner { angle: 0.0, cot: 0.0, adj_sq: [0.0; 2], area: 0.0 },
    ];
    let area = 0.5 * (p1 - p0).cross(p2 - p0).norm();
    for c in 0..3 {
        let u = points[(c + 1) % 3] - points[c];
        let v = points[(c + 2) % 3] - points[c];
        let dot = u.dot(v);
        let crs = u.cross(v).norm();
        corners[c].angle = crs.atan2(dot);
        corners[c].cot = dot / crs;
        corners[c].adj_sq = [u.norm_squared(), v.norm_squared()];
        corners[c].area = area;
    }
    corners
}

/// Meyer mixed-area rule for one triangle. Non-obtuse triangles contribute
/// circumcentric Voronoi pieces (1/8)(|e|² cot of the opposite angle summed
/// over the two incident edges); obtuse ones give half the area to the obtuse
/// corner and a quarter to each of the others.
fn accumulate_mixed_areas(corners: &[Corner; 3], mixed_area: &mut [f64], idx: &[u32; 3]) {
    let obtuse = corners.iter().position(|c| c.cot < 0.0);
    match obtuse {
        None => {
            for c in 0..3 {
                let cot_next = corners[(c + 1) % 3].cot;
                let cot_prev = corners[(c + 2) % 3].cot;
                // adj_sq[0] is the edge toward the next corner (opposite angle
                // at prev), adj_sq[1] toward the previous corner
                let piece =
                    0.125 * (corners[c].adj_sq[0] * cot_prev + corners[c].adj_sq[1] * cot_next);
                mixed_area[idx[c] as usize] += piece;
            }
        }
        Some(o) => {
            let area = corners[o].area;
            for c in 0..3 {
                mixed_area[idx[c] as usize] += if c == o { area / 2.0 } else { area / 4.0 };
            }
        }
    }
}

/// Meyer-style mixed Voronoi areas; a positive partition of the total area.
pub fn mixed_voronoi_areas(mesh: &TriangleMesh) -> Vec<f64> {
    CurvatureField::compute(mesh).mixed_area
}

/// Cotangent mean-curvature vectors H⃗ with |H⃗| = κ₁ + κ₂ in the smooth limit.
pub fn mean_curvature_vectors(mesh: &TriangleMesh) -> Vec<Vec3> {
    CurvatureField::compute(mesh).mean_curvature_vector
}

/// Angle-defect Gauss curvatures K_i = (2π − Σ incident angles) / mixed area.
pub fn gauss_curvatures(mesh: &TriangleMesh) -> Vec<f64> {
    CurvatureField::compute(mesh).gauss_curvature
}

/// Dirichlet energy of the embedding, (1/4) Σ_edges (cot α + cot β)|x_i − x_j|².
///
/// Equals the total surface area exactly (per-triangle algebraic identity),
/// up to floating-point accumulation; a sharp consistency check on the
/// cotangent weights.
pub fn dirichlet_energy_of_embedding(mesh: &TriangleMesh) -> f64 {
    let mut sum = 0.0;
    for f in 0..mesh.face_count() {
        let (p0, p1, p2) = mesh.face_points(f);
        let corners = face_corners(p0, p1, p2);
        // |opposite edge|² = squared distance between the other two corners
        for (c, corner) in corners.iter().enumerate() {
            let opp_sq = match c {
                0 => (p2 - p1).norm_squared(),
                1 => (p0 - p2).norm_squared(),
                _ => (p1 - p0).norm_squared(),
            };
            sum += corner.cot * opp_sq;
        }
    }
    sum / 4.0
}

/// Lean single pass computing the Willmore energy, total area, and enclosed
/// volume from raw positions; the optimizer's finite-difference hot path.
pub(crate) struct MeasureScratch {
    mixed_area: Vec<f64>,
    laplace: Vec<Vec3>,
}

impl MeasureScratch {
    pub(crate) fn new(vertex_count: usize) -> MeasureScratch {
        MeasureScratch {
            mixed_area: vec![0.0; vertex_count],
            laplace: vec![Vec3::ZERO; vertex_count],
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct MeshMeasures {
    pub willmore: f64,
    pub area: f64,
    pub volume: f64,
}

pub(crate) fn measures(
    vertices: &[Vec3],
    faces: &[[u32; 3]],
    scratch: &mut MeasureScratch,
) -> MeshMeasures {
    scratch.mixed_area.fill(0.0);
    scratch.laplace.fill(Vec3::ZERO);

    let mut area = 0.0;
    let mut volume = 0.0;
    for idx in faces {
        let p0 = vertices[idx[0] as usize];
        let p1 = vertices[idx[1] as usize];
        let p2 = vertices[idx[2] as usize];
        let corners = face_corners(p0, p1, p2);
        area += corners[0].area;
        volume += p0.triple(p1, p2) / 6.0;
        accumulate_mixed_areas(&corners, &mut scratch.mixed_area, idx);
        for c in 0..3 {
            let j = idx[(c + 1) % 3] as usize;
            let k = idx[(c + 2) % 3] as usize;
            let d = vertices[j] - vertices[k];
            let w = corners[c].cot;
            scratch.laplace[j] += d * w;
            scratch.laplace[k] -= d * w;
        }
    }

    let mut willmore = 0.0;
    for i in 0..vertices.len() {
        // H² A = |laplace|² / (4 A); the sign of H is irrelevant here
        willmore += scratch.laplace[i].norm_squared() / scratch.mixed_area[i];
    }
    willmore /= 16.0;

    MeshMeasures { willmore, area, volume }
}
