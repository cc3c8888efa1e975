//! A numerical laboratory for the control of the isoperimetric deficit by
//! the Willmore deficit on sphere-type surfaces.
//!
//! The crate computes discrete curvature functionals on closed genus-0
//! triangle meshes, evaluates the prolate spheroid family E(r) in closed
//! form with an independent quadrature oracle, estimates the comparison
//! constant empirically over generated shape families, extrapolates the
//! r ↘ 1 sharpness limit, and runs penalized Willmore descent.
//!
//! Modules:
//! - [`mesh`]: validated genus-0 triangle meshes, generators, OFF/OBJ I/O;
//! - [`curvature`]: mixed Voronoi areas, cotangent mean curvature,
//!   angle-defect Gauss curvature (discrete Gauss–Bonnet is exact);
//! - [`functionals`]: area, volume, Willmore energy, isoperimetric ratio,
//!   deficits, consistency residuals, Monte-Carlo asymmetry index;
//! - [`spheroid`]: closed forms for E(r), the quadrature oracle, and the
//!   Richardson-extrapolated deficit-ratio limit;
//! - [`optimize`]: finite-difference Willmore descent with an optional
//!   isoperimetric-ratio penalty;
//! - [`verify`]: seeded sweeps estimating the empirical constant C.

pub mod curvature;
pub mod functionals;
pub mod mesh;
pub mod optimize;
pub mod quadrature;
pub mod spheroid;
pub mod vec3;
pub mod verify;

pub use vec3::Vec3;
