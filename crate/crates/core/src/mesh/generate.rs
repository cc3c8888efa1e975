//! Mesh generators: icosphere subdivision, spheroid surfaces of revolution,
//! and randomly perturbed "bumpy" spheres for sampling near-spherical shapes.

use super::{build_mesh, MeshError, TriangleMesh};
use crate::vec3::Vec3;
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Memory guard for [`icosphere`]: level 8 already has 655,362 vertices.
pub const MAX_ICOSPHERE_LEVEL: u32 = 8;

/// Which generator to run, with its parameters. Unused fields are ignored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShapeKind {
    Icosphere,
    Spheroid,
    BumpySphere,
}

/// Generator parameters for the three mesh families.
#[derive(Clone, Copy, Debug)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    /// Icosphere subdivision depth (also the base level for bumpy spheres).
    pub level: u32,
    /// Spheroid aspect: semi-axes (1, 1, r).
    pub r: f64,
    /// Revolution grid counts (longitudes, latitudes).
    pub nu: u32,
    pub nv: u32,
    /// Maximum spherical-harmonic degree of the bumpy perturbation.
    pub lmax: u32,
    /// Perturbation amplitude.
    pub amp: f64,
    pub seed: u64,
}

impl ShapeSpec {
    pub fn generate(&self) -> Result<TriangleMesh, MeshError> {
        match self.kind {
            ShapeKind::Icosphere => icosphere(self.level),
            ShapeKind::Spheroid => spheroid_mesh(self.r, self.nu, self.nv),
            ShapeKind::BumpySphere => bumpy_sphere(self.lmax, self.amp, self.seed, self.level),
        }
    }
}

/// Regular icosahedron inscribed in the unit sphere, 4-to-1 subdivided
/// `level` times with every new vertex projected back onto the sphere.
///
/// Vertex count is exactly 10·4^level + 2.
pub fn icosphere(level: u32) -> Result<TriangleMesh, MeshError> {
    if level > MAX_ICOSPHERE_LEVEL {
        return Err(MeshError::LevelTooLarge { level, max: MAX_ICOSPHERE_LEVEL });
    }
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let s = 1.0 / (1.0 + phi * phi).sqrt();
    let (a, b) = (s, phi * s);
    let mut vertices = vec![
        Vec3::new(-a, b, 0.0),
        Vec3::new(a, b, 0.0),
        Vec3::new(-a, -b, 0.0),
        Vec3::new(a, -b, 0.0),
        Vec3::new(0.0, -a, b),
        Vec3::new(0.0, a, b),
        Vec3::new(0.0, -a, -b),
        Vec3::new(0.0, a, -b),
        Vec3::new(b, 0.0, -a),
        Vec3::new(b, 0.0, a),
        Vec3::new(-b, 0.0, -a),
        Vec3::new(-b, 0.0, a),
    ];
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..level {
        let mut midpoint: HashMap<(u32, u32), u32> = HashMap::with_capacity(faces.len() * 3 / 2);
        let mut next_faces = Vec::with_capacity(faces.len() * 4);
        for &[i, j, k] in &faces {
            let mut mid = |p: u32, q: u32, vs: &mut Vec<Vec3>| -> u32 {
                let key = if p < q { (p, q) } else { (q, p) };
                *midpoint.entry(key).or_insert_with(|| {
                    let m = ((vs[p as usize] + vs[q as usize]) * 0.5).normalized();
                    vs.push(m);
                    u32::try_from(vs.len() - 1).expect("guarded by MAX_ICOSPHERE_LEVEL")
                })
            };
            let ij = mid(i, j, &mut vertices);
            let jk = mid(j, k, &mut vertices);
            let ki = mid(k, i, &mut vertices);
            next_faces.push([i, ij, ki]);
            next_faces.push([j, jk, ij]);
            next_faces.push([k, ki, jk]);
            next_faces.push([ij, jk, ki]);
        }
        faces = next_faces;
    }

    build_mesh(vertices, faces)
}

/// Surface-of-revolution mesh of the spheroid with semi-axes (1, 1, r):
/// profile (x cos φ, x sin φ, r√(1−x²)) sampled at x = sin of a uniform
/// colatitude grid, closed by triangle fans at both poles.
///
/// `nu` counts longitudes, `nv` latitude bands; both must be at least 8.
pub fn spheroid_mesh(r: f64, nu: u32, nv: u32) -> Result<TriangleMesh, MeshError> {
    if r.is_nan() || r <= 0.0 || !r.is_finite() {
        return Err(MeshError::InvalidParameter { name: "r", value: r });
    }
    if nu < 8 || nv < 8 {
        return Err(MeshError::GridTooCoarse { nu, nv });
    }
    // faces index vertices with u32
    if u64::from(nu) * u64::from(nv - 1) + 2 > u64::from(u32::MAX) {
        return Err(MeshError::InvalidParameter { name: "nu*nv", value: nu as f64 * nv as f64 });
    }

    let mut vertices = Vec::with_capacity(((nv - 1) * nu + 2) as usize);
    vertices.push(Vec3::new(0.0, 0.0, r)); // north pole
    for j in 1..nv {
        let theta = PI * j as f64 / nv as f64;
        let (x, z) = (theta.sin(), r * theta.cos());
        for i in 0..nu {
            let phi = 2.0 * PI * i as f64 / nu as f64;
            vertices.push(Vec3::new(x * phi.cos(), x * phi.sin(), z));
        }
    }
    let south = vertices.len() as u32;
    vertices.push(Vec3::new(0.0, 0.0, -r));

    let ring = |j: u32, i: u32| 1 + (j - 1) * nu + (i % nu);
    let mut faces = Vec::with_capacity((2 * nu * (nv - 1)) as usize);
    for i in 0..nu {
        faces.push([0, ring(1, i), ring(1, i + 1)]);
    }
    for j in 1..nv - 1 {
        for i in 0..nu {
            let (a, b) = (ring(j, i), ring(j, i + 1));
            let (d, c) = (ring(j + 1, i), ring(j + 1, i + 1));
            faces.push([a, c, b]);
            faces.push([a, d, c]);
        }
    }
    for i in 0..nu {
        faces.push([south, ring(nv - 1, i + 1), ring(nv - 1, i)]);
    }

    build_mesh(vertices, faces)
}

/// Icosphere displaced radially by a seeded random spherical-harmonic
/// expansion up to degree `lmax`, coefficient scale decaying as degree⁻².
///
/// Deterministic per (lmax, amp, seed, level); `amp = 0` reproduces the
/// icosphere bitwise. Perturbations large enough to produce a degenerate
/// face or inward volume fail validation.
pub fn bumpy_sphere(lmax: u32, amp: f64, seed: u64, level: u32) -> Result<TriangleMesh, MeshError> {
    if amp.is_nan() || amp < 0.0 || !amp.is_finite() {
        return Err(MeshError::InvalidParameter { name: "amp", value: amp });
    }
    let base = icosphere(level)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Uniform::new_inclusive(-1.0f64, 1.0).expect("constant range");
    // coefficients indexed (l, m), l = 1..=lmax, m = -l..=l, drawn in that order
    let mut coeffs = Vec::new();
    for l in 1..=lmax {
        let scale = (l as f64).powi(-2);
        for _ in 0..(2 * l + 1) {
            coeffs.push(scale * unit.sample(&mut rng));
        }
    }

    let mut sh = SphericalHarmonics::new(lmax);
    let vertices = base
        .vertices()
        .iter()
        .map(|&v| {
            let bump: f64 = sh
                .evaluate(v)
                .iter()
                .zip(&coeffs)
                .map(|(y, c)| y * c)
                .sum();
            v * (1.0 + amp * bump)
        })
        .collect();

    build_mesh(vertices, base.faces().to_vec())
        .map_err(|e| MeshError::ValidationFailed(Box::new(e)))
}

/// Real orthonormal spherical harmonics Y_lm evaluated per direction, for
/// degrees 1..=lmax, returned in (l, m) order matching the coefficient draw.
struct SphericalHarmonics {
    lmax: u32,
    /// normalized associated Legendre values, indexed by `plm_index`
    plm: Vec<f64>,
    out: Vec<f64>,
}

impl SphericalHarmonics {
    fn new(lmax: u32) -> Self {
        let l = lmax as usize;
        SphericalHarmonics {
            lmax,
            plm: vec![0.0; (l + 1) * (l + 2) / 2],
            out: vec![0.0; l * (l + 2)],
        }
    }

    #[inline]
    fn pidx(l: usize, m: usize) -> usize {
        l * (l + 1) / 2 + m
    }

    /// Evaluates all Y_lm for l = 1..=lmax at the direction of `v`.
    fn evaluate(&mut self, v: Vec3) -> &[f64] {
        let r = v.norm();
        let cos_t = (v.z / r).clamp(-1.0, 1.0);
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        let phi = v.y.atan2(v.x);
        let lmax = self.lmax as usize;

        // normalized recurrence (includes the 1/sqrt(4 pi) factor):
        // P~_0^0 = sqrt(1/4pi); P~_m^m = -sqrt((2m+1)/2m) sin(t) P~_{m-1}^{m-1}
        // P~_{m+1}^m = sqrt(2m+3) cos(t) P~_m^m
        // P~_l^m = a_lm cos(t) P~_{l-1}^m + b_lm P~_{l-2}^m
        let p = &mut self.plm;
        p[Self::pidx(0, 0)] = (1.0 / (4.0 * PI)).sqrt();
        for m in 1..=lmax {
            let mf = m as f64;
            p[Self::pidx(m, m)] =
                -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_t * p[Self::pidx(m - 1, m - 1)];
        }
        for m in 0..lmax {
            let mf = m as f64;
            p[Self::pidx(m + 1, m)] = (2.0 * mf + 3.0).sqrt() * cos_t * p[Self::pidx(m, m)];
        }
        for m in 0..=lmax {
            for l in (m + 2)..=lmax {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = -(((2.0 * lf + 1.0) * ((lf - 1.0) * (lf - 1.0) - mf * mf))
                    / ((2.0 * lf - 3.0) * (lf * lf - mf * mf)))
                    .sqrt();
                p[Self::pidx(l, m)] =
                    a * cos_t * p[Self::pidx(l - 1, m)] + b * p[Self::pidx(l - 2, m)];
            }
        }

        let sqrt2 = std::f64::consts::SQRT_2;
        let mut k = 0;
        for l in 1..=lmax {
            for m in -(l as i32)..=(l as i32) {
                let ma = usize::try_from(m.unsigned_abs()).expect("small degree");
                let plm = p[Self::pidx(l, ma)];
                self.out[k] = match m.cmp(&0) {
                    std::cmp::Ordering::Less => sqrt2 * plm * (ma as f64 * phi).sin(),
                    std::cmp::Ordering::Equal => plm,
                    std::cmp::Ordering::Greater => sqrt2 * plm * (ma as f64 * phi).cos(),
                };
                k += 1;
            }
        }
        &self.out
    }
}
