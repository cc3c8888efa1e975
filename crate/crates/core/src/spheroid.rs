//! Closed-form functionals of the spheroid family E(r): the surface of
//! revolution of (x cos φ, x sin φ, r√(1−x²)), i.e. the ellipsoid with
//! semi-axes (1, 1, r). Prolate for r > 1, the unit sphere at r = 1.
//!
//! The prolate closed forms subtract nearly equal quantities as r → 1, so
//! every value function switches to a truncated series below |r − 1| = 1e-8,
//! and the deficit functions use a cancellation-free expansion in
//! u² = 1 − r⁻² whenever u² ≤ 0.2. An adaptive quadrature of the Willmore
//! integrand provides an independent oracle, and also covers the oblate
//! branch r < 1 where no closed form is available.

use crate::functionals::{isoperimetric_minimum, WILLMORE_MINIMUM};
use crate::quadrature::{integrate_adaptive, QuadratureError};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpheroidError {
    #[error("DomainError: {what} requires {requirement}, got {value}")]
    Domain { what: &'static str, requirement: &'static str, value: f64 },
    #[error("NoConvergence: {0}")]
    NoConvergence(QuadratureError),
    #[error("PrecisionLoss: extrapolants failed to converge (best spread {spread:.3e}); partial table has {} rows", table.len())]
    PrecisionLoss { spread: f64, table: Vec<(f64, f64)> },
}

/// Closed-form values of every functional at one aspect parameter.
#[derive(Clone, Copy, Debug)]
pub struct SpheroidEval {
    pub r: f64,
    pub willmore: f64,
    pub area: f64,
    pub volume: f64,
    pub isoperimetric_ratio: f64,
    pub willmore_deficit: f64,
    pub isoperimetric_deficit: f64,
    /// willmore_deficit / isoperimetric_deficit; requires r > 1.
    pub deficit_ratio: f64,
}

fn require(what: &'static str, requirement: &'static str, value: f64, ok: bool) -> Result<(), SpheroidError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(SpheroidError::Domain { what, requirement, value })
    }
}

/// Switch-over to the truncated series for the value functions.
const SERIES_GUARD: f64 = 1e-8;

/// W(E(r)) = π((7r² + 2)/(3r²) + (r²/√(r²−1))(π/2 − arctan(1/√(r²−1))))
/// for r > 1; equals 4π at r = 1.
pub fn spheroid_willmore(r: f64) -> Result<f64, SpheroidError> {
    require("spheroid_willmore", "r >= 1", r, r >= 1.0)?;
    if r - 1.0 <= SERIES_GUARD {
        let e = r - 1.0;
        return Ok(4.0 * PI * (1.0 + 8.0 / 15.0 * e * e));
    }
    let s = (r * r - 1.0).sqrt();
    Ok(PI * ((7.0 * r * r + 2.0) / (3.0 * r * r) + (r * r / s) * (PI / 2.0 - (1.0 / s).atan())))
}

/// ar(E(r)) = 2π(1 + (r²/√(r²−1))·arcsin(√(r²−1)/r)) for r > 1; 4π at r = 1.
pub fn spheroid_area(r: f64) -> Result<f64, SpheroidError> {
    require("spheroid_area", "r >= 1", r, r >= 1.0)?;
    if r - 1.0 <= SERIES_GUARD {
        let e = r - 1.0;
        return Ok(4.0 * PI * (1.0 + 2.0 / 3.0 * e + e * e / 15.0));
    }
    let s = (r * r - 1.0).sqrt();
    Ok(2.0 * PI * (1.0 + (r * r / s) * (s / r).asin()))
}

/// vol(Ω(r)) = (4π/3)·r, exact for every r > 0 (oblate included).
pub fn spheroid_volume(r: f64) -> Result<f64, SpheroidError> {
    require("spheroid_volume", "r > 0", r, r > 0.0)?;
    Ok(4.0 * PI / 3.0 * r)
}

/// I(E(r)) = (6√π)^(2/3)·½(r^(−2/3) + (r^(4/3)/√(r²−1))·arcsin(√(r²−1)/r)).
///
/// Agrees with `spheroid_area(r) / spheroid_volume(r)^(2/3)` to full
/// precision; the two expressions are algebraically identical.
pub fn spheroid_isoperimetric(r: f64) -> Result<f64, SpheroidError> {
    require("spheroid_isoperimetric", "r >= 1", r, r >= 1.0)?;
    if r - 1.0 <= SERIES_GUARD {
        let e = r - 1.0;
        return Ok(isoperimetric_minimum() * (1.0 + 8.0 / 45.0 * e * e));
    }
    let s = (r * r - 1.0).sqrt();
    Ok(isoperimetric_minimum()
        * 0.5
        * (r.powf(-2.0 / 3.0) + r.powf(4.0 / 3.0) / s * (s / r).asin()))
}

/// Willmore energy by adaptive quadrature of the surface-of-revolution
/// integrand,
/// after the substitution x = sin θ that removes the x → 1 endpoint
/// singularity of the profile slope:
///
///   W(r) = π r² ∫₀^{π/2} sin θ (1 + Q²)² / Q⁵ dθ,  Q² = 1 + (r²−1) sin²θ.
///
/// Works for every r > 0, including the oblate branch.
pub fn spheroid_willmore_quadrature(r: f64, tol: f64) -> Result<f64, SpheroidError> {
    require("spheroid_willmore_quadrature", "r > 0", r, r > 0.0)?;
    require("spheroid_willmore_quadrature", "0 < tol <= 1e-6", tol, tol > 0.0 && tol <= 1e-6)?;
    let r2m1 = r * r - 1.0;
    let factor = PI * r * r;
    let integrand = move |theta: f64| {
        let sin_t = theta.sin();
        let q2 = 1.0 + r2m1 * sin_t * sin_t;
        sin_t * (1.0 + q2) * (1.0 + q2) / (q2 * q2 * q2.sqrt())
    };
    let result = integrate_adaptive(integrand, 0.0, PI / 2.0, tol / factor)
        .map_err(SpheroidError::NoConvergence)?;
    Ok(factor * result.value)
}

// Cancellation-free deficits.
//
// With u² = 1 − r⁻² (u the eccentricity), the closed forms expand to
//   W − 4π      = π Σ_{n≥2} c_n u^{2n},            c_n = 4ⁿ n!² / (2n+1)!
//   I − I(S²)   = I(S²)·½ Σ_{n≥2} S_n u^{2n},
// where S_n collects (1−u²)^{1/3} + (1−u²)^{-1/6}·arcsin(u)/u. The n = 0, 1
// terms cancel identically (the sphere is a critical point), so summing
// from n = 2 loses nothing to rounding.
const DEFICIT_SERIES_MAX_U2: f64 = 0.2;
const SERIES_TERMS: usize = 32;

fn willmore_deficit_series(u2: f64) -> f64 {
    let mut c = 8.0 / 15.0; // c_2
    let mut term = c * u2 * u2;
    let mut sum = term;
    for n in 2..SERIES_TERMS {
        let nf = n as f64;
        c *= 2.0 * (nf + 1.0) / (2.0 * nf + 3.0);
        term = c * u2.powi(n as i32 + 1);
        sum += term;
    }
    PI * sum
}

fn isoperimetric_deficit_series(u2: f64) -> f64 {
    // series coefficients of (1-x)^(1/3), (1-x)^(-1/6), arcsinc in x = u²
    let mut a = [0.0f64; SERIES_TERMS];
    let mut d = [0.0f64; SERIES_TERMS];
    let mut e = [0.0f64; SERIES_TERMS];
    a[0] = 1.0;
    d[0] = 1.0;
    e[0] = 1.0;
    for n in 0..SERIES_TERMS - 1 {
        let nf = n as f64;
        a[n + 1] = a[n] * (nf - 1.0 / 3.0) / (nf + 1.0);
        d[n + 1] = d[n] * (nf + 1.0 / 6.0) / (nf + 1.0);
        e[n + 1] = e[n] * (2.0 * nf + 1.0) * (2.0 * nf + 1.0)
            / ((2.0 * nf + 2.0) * (2.0 * nf + 3.0));
    }
    let mut sum = 0.0;
    for n in (2..SERIES_TERMS).rev() {
        let conv: f64 = (0..=n).map(|k| d[k] * e[n - k]).sum();
        sum = sum * u2 + (a[n] + conv);
    }
    isoperimetric_minimum() * 0.5 * sum * u2 * u2
}

/// W(E(r)) − 4π, accurate to machine precision all the way down to r = 1.
pub fn spheroid_willmore_deficit(r: f64) -> Result<f64, SpheroidError> {
    require("spheroid_willmore_deficit", "r >= 1", r, r >= 1.0)?;
    let u2 = 1.0 - 1.0 / (r * r);
    if u2 <= DEFICIT_SERIES_MAX_U2 {
        Ok(willmore_deficit_series(u2))
    } else {
        Ok(spheroid_willmore(r)? - WILLMORE_MINIMUM)
    }
}

/// I(E(r)) − I(S²), accurate to machine precision all the way down to r = 1.
pub fn spheroid_isoperimetric_deficit(r: f64) -> Result<f64, SpheroidError> {
    require("spheroid_isoperimetric_deficit", "r >= 1", r, r >= 1.0)?;
    let u2 = 1.0 - 1.0 / (r * r);
    if u2 <= DEFICIT_SERIES_MAX_U2 {
        Ok(isoperimetric_deficit_series(u2))
    } else {
        Ok(spheroid_isoperimetric(r)? - isoperimetric_minimum())
    }
}

/// (W(E(r)) − 4π) / (I(E(r)) − I(S²)) for r > 1 + 10⁻⁶.
pub fn deficit_ratio(r: f64) -> Result<f64, SpheroidError> {
    require("deficit_ratio", "r > 1 + 1e-6", r, r > 1.0 + 1e-6)?;
    Ok(spheroid_willmore_deficit(r)? / spheroid_isoperimetric_deficit(r)?)
}

/// All closed-form functionals of E(r) for r > 1 + 10⁻⁶ in one struct.
pub fn spheroid_eval(r: f64) -> Result<SpheroidEval, SpheroidError> {
    require("spheroid_eval", "r > 1 + 1e-6", r, r > 1.0 + 1e-6)?;
    let willmore = spheroid_willmore(r)?;
    let area = spheroid_area(r)?;
    let volume = spheroid_volume(r)?;
    let isoperimetric_ratio = spheroid_isoperimetric(r)?;
    let willmore_deficit = spheroid_willmore_deficit(r)?;
    let isoperimetric_deficit = spheroid_isoperimetric_deficit(r)?;
    Ok(SpheroidEval {
        r,
        willmore,
        area,
        volume,
        isoperimetric_ratio,
        willmore_deficit,
        isoperimetric_deficit,
        deficit_ratio: willmore_deficit / isoperimetric_deficit,
    })
}

/// Result of the r ↘ 1 extrapolation of the deficit ratio.
#[derive(Clone, Debug)]
pub struct DeficitRatioLimit {
    /// Richardson-extrapolated limit of the deficit ratio.
    pub limit: f64,
    /// Evaluation table (r_k, ratio_k) at r_k = 1 + 2^{−k}, k = 4..=kmax.
    pub table: Vec<(f64, f64)>,
    /// Diagonal of the extrapolation tableau, one entry per elimination order.
    pub extrapolants: Vec<f64>,
}

/// The literature value 6(16π/3)^(2/3) ≈ 39.29 quoted for the r ↘ 1 limit
/// of the ratio; reported alongside the extrapolation for comparison.
pub fn literature_limit_constant() -> f64 {
    6.0 * (16.0 * PI / 3.0).powf(2.0 / 3.0)
}

/// The plain ratio W/I evaluated at the sphere, 4π/(6√π)^(2/3) ≈ 2.599.
pub fn continuous_ratio_at_unit() -> f64 {
    4.0 * PI / isoperimetric_minimum()
}

/// Evaluates the deficit ratio at r = 1 + 2^{−k}, k = 4..=kmax, and
/// Richardson-extrapolates the r ↘ 1 limit. The ratio has a regular
/// expansion in integer powers of (r − 1), so halving steps with
/// elimination factors 2^m apply; [`SpheroidError::PrecisionLoss`] is
/// raised (with the partial table) if the diagonal never settles.
pub fn deficit_ratio_limit(kmax: u32) -> Result<DeficitRatioLimit, SpheroidError> {
    require("deficit_ratio_limit", "8 <= kmax <= 40", kmax as f64, (8..=40).contains(&kmax))?;
    let ks: Vec<u32> = (4..=kmax).collect();
    let table: Vec<(f64, f64)> = ks
        .iter()
        .map(|&k| {
            let r = 1.0 + 2.0f64.powi(-(k as i32));
            let ratio = spheroid_willmore_deficit(r).expect("r > 1")
                / spheroid_isoperimetric_deficit(r).expect("r > 1");
            (r, ratio)
        })
        .collect();

    match richardson_extrapolate(table.iter().map(|&(_, v)| v).collect()) {
        Ok((limit, extrapolants)) => Ok(DeficitRatioLimit { limit, table, extrapolants }),
        Err(spread) => Err(SpheroidError::PrecisionLoss { spread, table }),
    }
}

/// Richardson tableau for a sequence f(h), f(h/2), f(h/4), ... whose error
/// expands in integer powers of h: column m eliminates the h^m term.
/// Returns the settled limit with the tableau diagonal, or the smallest
/// achieved spread when successive diagonal entries never agree to 1e-6
/// relative.
fn richardson_extrapolate(mut column: Vec<f64>) -> Result<(f64, Vec<f64>), f64> {
    let mut extrapolants = vec![*column.last().expect("nonempty sequence")];
    let mut m = 0usize;
    while column.len() > 1 {
        m += 1;
        let f = 2.0f64.powi(m as i32);
        column = column
            .windows(2)
            .map(|w| (f * w[1] - w[0]) / (f - 1.0))
            .collect();
        extrapolants.push(*column.last().expect("nonempty"));
    }

    // settle on the diagonal entry where successive extrapolants are closest
    let mut best = 1usize;
    let mut best_spread = f64::INFINITY;
    for i in 1..extrapolants.len() {
        let spread = (extrapolants[i] - extrapolants[i - 1]).abs();
        if spread < best_spread {
            best_spread = spread;
            best = i;
        }
    }
    let limit = extrapolants[best];
    if best_spread.is_nan() || best_spread > 1e-6 * limit.abs() {
        return Err(best_spread);
    }
    Ok((limit, extrapolants))
}
