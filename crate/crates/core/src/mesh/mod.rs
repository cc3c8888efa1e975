//! Closed, oriented, genus-0 triangle meshes: representation, validation,
//! generation, and OFF/OBJ file I/O.
//!
//! A [`TriangleMesh`] is immutable after construction and is only handed out
//! once it has passed the full validation in [`build_mesh`]: every edge is
//! shared by exactly two faces with opposite orientation, the Euler
//! characteristic is 2, no face is degenerate, and the signed enclosed volume
//! is positive (outward orientation).

mod generate;
mod io;

pub use generate::{bumpy_sphere, icosphere, spheroid_mesh, ShapeKind, ShapeSpec};
pub use io::{load_mesh, save_mesh, write_text_atomic, MeshFormat};

use crate::vec3::Vec3;
use std::collections::HashMap;
use thiserror::Error;

/// Relative face-area floor: faces smaller than this times the squared
/// bounding-box diagonal are rejected as degenerate.
pub const DEGENERATE_AREA_FACTOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("face {face} references vertex {index}, but the mesh has only {vertex_count} vertices")]
    InvalidIndex { face: usize, index: u32, vertex_count: usize },
    #[error("NonManifold: edge ({a}, {b}) is incident to {count} face sides (expected one per direction)")]
    NonManifold { a: u32, b: u32, count: usize },
    #[error("WrongGenus: Euler characteristic is {chi}, expected 2 (sphere type)")]
    WrongGenus { chi: i64 },
    #[error("DegenerateFace: face {face} has area {area:.3e}, below the floor {floor:.3e}")]
    DegenerateFace { face: usize, area: f64, floor: f64 },
    #[error("InwardOrientation: signed enclosed volume is {signed_volume:.6e}; faces must wind counterclockwise seen from outside")]
    InwardOrientation { signed_volume: f64 },
    #[error("LevelTooLarge: subdivision level {level} exceeds the maximum of {max}")]
    LevelTooLarge { level: u32, max: u32 },
    #[error("GridTooCoarse: revolution grid {nu}x{nv} is below the 8x8 minimum")]
    GridTooCoarse { nu: u32, nv: u32 },
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("ParseError at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("ValidationFailed: {0}")]
    ValidationFailed(#[source] Box<MeshError>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An indexed, closed, outward-oriented genus-0 triangle mesh embedded in 3-space.
///
/// Faces are ordered vertex-index triples, counterclockwise as seen from
/// outside the enclosed region.
#[derive(Clone, Debug)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[u32; 3]>,
}

impl TriangleMesh {
    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Number of undirected edges. Valid meshes are closed, so E = 3F/2.
    pub fn edge_count(&self) -> usize {
        self.faces.len() * 3 / 2
    }

    /// The three corner positions of face `f`.
    #[inline]
    pub fn face_points(&self, f: usize) -> (Vec3, Vec3, Vec3) {
        let [i, j, k] = self.faces[f];
        (self.vertices[i as usize], self.vertices[j as usize], self.vertices[k as usize])
    }

    /// Axis-aligned bounding box as (min, max) corners.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        bounding_box(&self.vertices)
    }

    /// Applies `x ↦ scale·x + offset` to every vertex.
    ///
    /// Positive scaling and translation preserve every validation invariant,
    /// so the result is constructed without re-validating. Panics if
    /// `scale <= 0` or the transform is not finite.
    pub fn transformed(&self, scale: f64, offset: Vec3) -> TriangleMesh {
        assert!(scale > 0.0 && scale.is_finite() && offset.is_finite());
        TriangleMesh {
            vertices: self.vertices.iter().map(|&v| v * scale + offset).collect(),
            faces: self.faces.clone(),
        }
    }

    /// Rescales about the origin so the total surface area equals `target_area`.
    pub fn rescaled_to_area(&self, target_area: f64) -> TriangleMesh {
        let area = crate::functionals::surface_area(self);
        self.transformed((target_area / area).sqrt(), Vec3::ZERO)
    }

}

pub(crate) fn bounding_box(vertices: &[Vec3]) -> (Vec3, Vec3) {
    let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = -lo;
    for &v in vertices {
        lo = lo.min_components(v);
        hi = hi.max_components(v);
    }
    (lo, hi)
}

/// Validates and assembles a mesh from raw vertex and face lists.
///
/// Checks, in order: index ranges, the closed-oriented-manifold edge
/// condition, Euler characteristic 2, face non-degeneracy against
/// [`DEGENERATE_AREA_FACTOR`], and outward orientation (signed volume > 0).
/// Orientation is never auto-repaired.
pub fn build_mesh(vertices: Vec<Vec3>, faces: Vec<[u32; 3]>) -> Result<TriangleMesh, MeshError> {
    let nv = vertices.len();
    for (f, tri) in faces.iter().enumerate() {
        for &i in tri {
            if i as usize >= nv {
                return Err(MeshError::InvalidIndex { face: f, index: i, vertex_count: nv });
            }
        }
        if !vertices[tri[0] as usize].is_finite()
            || !vertices[tri[1] as usize].is_finite()
            || !vertices[tri[2] as usize].is_finite()
        {
            return Err(MeshError::InvalidParameter { name: "vertex coordinate", value: f64::NAN });
        }
    }

    // Closed oriented 2-manifold: every undirected edge carries exactly two
    // face sides, one per direction. A repeated directed edge (two faces
    // agreeing on direction) is an orientation clash and also fails here.
    let mut edges: HashMap<(u32, u32), (usize, i32)> = HashMap::with_capacity(faces.len() * 3 / 2);
    for tri in &faces {
        for e in 0..3 {
            let a = tri[e];
            let b = tri[(e + 1) % 3];
            if a == b {
                // zero-length edge; the face is degenerate by construction
                let f = faces.iter().position(|t| t == tri).unwrap_or(0);
                return Err(MeshError::DegenerateFace { face: f, area: 0.0, floor: 0.0 });
            }
            let key = if a < b { (a, b) } else { (b, a) };
            let entry = edges.entry(key).or_insert((0, 0));
            entry.0 += 1;
            entry.1 += if a < b { 1 } else { -1 };
        }
    }
    for (&(a, b), &(count, balance)) in &edges {
        if count != 2 || balance != 0 {
            return Err(MeshError::NonManifold { a, b, count });
        }
    }

    let chi = nv as i64 - edges.len() as i64 + faces.len() as i64;
    if chi != 2 {
        return Err(MeshError::WrongGenus { chi });
    }

    let (lo, hi) = bounding_box(&vertices);
    let floor = DEGENERATE_AREA_FACTOR * (hi - lo).norm_squared();
    let mut signed_volume = 0.0;
    for (f, tri) in faces.iter().enumerate() {
        let a = vertices[tri[0] as usize];
        let b = vertices[tri[1] as usize];
        let c = vertices[tri[2] as usize];
        let area = 0.5 * (b - a).cross(c - a).norm();
        if area.is_nan() || area <= floor {
            return Err(MeshError::DegenerateFace { face: f, area, floor });
        }
        signed_volume += a.triple(b, c) / 6.0;
    }
    if signed_volume.is_nan() || signed_volume <= 0.0 {
        return Err(MeshError::InwardOrientation { signed_volume });
    }

    Ok(TriangleMesh { vertices, faces })
}

/// V − E + F. Always 2 for meshes that passed validation; exposed for reporting.
pub fn euler_characteristic(mesh: &TriangleMesh) -> i64 {
    mesh.vertex_count() as i64 - mesh.edge_count() as i64 + mesh.face_count() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn unit_cube() -> (Vec<Vec3>, Vec<[u32; 3]>) {
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
        // each quad split into two CCW-from-outside triangles
        let faces = vec![
            [0, 2, 1], [0, 3, 2], // bottom (z = 0, outward -z)
            [4, 5, 6], [4, 6, 7], // top
            [0, 1, 5], [0, 5, 4], // front (y = 0)
            [2, 3, 7], [2, 7, 6], // back
            [1, 2, 6], [1, 6, 5], // right (x = 1)
            [3, 0, 4], [3, 4, 7], // left
        ];
        (vertices, faces)
    }

    #[test]
    fn icosahedron_is_valid_and_sphere_type() {
        let mesh = icosphere(0).unwrap();
        assert_eq!(mesh.vertex_count(), 12);
        assert_eq!(mesh.face_count(), 20);
        assert_eq!(mesh.edge_count(), 30);
        assert_eq!(euler_characteristic(&mesh), 2);
    }

    #[test]
    fn unit_cube_is_valid() {
        let (v, f) = unit_cube();
        let mesh = build_mesh(v, f).unwrap();
        assert_eq!(euler_characteristic(&mesh), 2);
    }

    #[test]
    fn repeated_directed_edge_is_rejected() {
        // two faces sharing the edge (0,1) in the same direction
        let (v, mut f) = unit_cube();
        f[0] = [0, 1, 2]; // flips one bottom triangle
        let err = build_mesh(v, f).unwrap_err();
        assert!(
            matches!(err, MeshError::NonManifold { .. } | MeshError::InwardOrientation { .. }),
            "unexpected error: {err}"
        );
    }

    #[test]
    fn inverted_orientation_is_rejected_not_repaired() {
        let (v, f) = unit_cube();
        let flipped: Vec<[u32; 3]> = f.iter().map(|&[a, b, c]| [a, c, b]).collect();
        let err = build_mesh(v, flipped).unwrap_err();
        assert!(matches!(err, MeshError::InwardOrientation { signed_volume } if signed_volume < 0.0));
    }

    #[test]
    fn torus_is_rejected_with_wrong_genus() {
        // structured torus grid: n x m quads, each split in two
        let (n, m) = (12u32, 8u32);
        let mut vertices = Vec::new();
        for i in 0..n {
            for j in 0..m {
                let u = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                let v = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let (cr, sr) = (2.0 + 0.5 * v.cos(), 0.5 * v.sin());
                vertices.push(Vec3::new(cr * u.cos(), cr * u.sin(), sr));
            }
        }
        let idx = |i: u32, j: u32| (i % n) * m + (j % m);
        let mut faces = Vec::new();
        for i in 0..n {
            for j in 0..m {
                let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
        // chi from raw counts: V - E + F = 0 for the torus
        let mut edge_set = std::collections::HashSet::new();
        for t in &faces {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                edge_set.insert(if a < b { (a, b) } else { (b, a) });
            }
        }
        let chi = vertices.len() as i64 - edge_set.len() as i64 + faces.len() as i64;
        assert_eq!(chi, 0);
        let err = build_mesh(vertices, faces).unwrap_err();
        assert!(matches!(err, MeshError::WrongGenus { chi: 0 }));
    }

    #[test]
    fn degenerate_face_is_rejected() {
        let (mut v, f) = unit_cube();
        v[1] = v[0]; // collapse an edge
        let err = build_mesh(v, f).unwrap_err();
        assert!(matches!(
            err,
            MeshError::DegenerateFace { .. } | MeshError::NonManifold { .. }
        ));
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let (v, mut f) = unit_cube();
        f[3][2] = 99;
        let err = build_mesh(v, f).unwrap_err();
        assert!(matches!(err, MeshError::InvalidIndex { index: 99, .. }));
    }
}
