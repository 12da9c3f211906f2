//! Nodal sets, extrema and monotonicity of separated eigenfunctions.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::metric::MetricSpec;
use crate::sl_solver::{eigenfunction_in_r, sign_changes, BoundaryCondition, EigenPair};
use crate::{Error, Result};

/// Samples at or below this magnitude never certify a sign change.
pub const ZERO_NOISE: f64 = 1e-9;
/// Tolerance on nonincreasing successive differences.
pub const MONOTONE_TOL: f64 = 1e-10;
const RADIUS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct NodalReport {
    /// Radii of the nodal circles, increasing, in `(0, 1)`.
    pub radii: Vec<f64>,
    pub domain_count: usize,
    /// Some nodal line reaches `r = 1`. Always true for `k ≥ 1`, whose
    /// diameters end on the boundary.
    pub touches_boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HotSpotReport {
    pub argmax_r: f64,
    pub max_value: f64,
    pub argmin_r: f64,
    pub min_value: f64,
    pub interior_max: bool,
    /// The profile is constant to rounding; the extrema carry no information.
    pub degenerate: bool,
}

fn check_metric(pair: &EigenPair, spec: &MetricSpec) -> Result<()> {
    if pair.metric().same_metric(spec) {
        Ok(())
    } else {
        Err(Error::Usage("eigenpair was computed for a different metric"))
    }
}

/// Radii of the interior zeros of the radial factor, certified by samples of
/// magnitude above [`ZERO_NOISE`] on both sides and refined by bisection.
pub fn nodal_radii(pair: &EigenPair, spec: &MetricSpec) -> Result<Vec<f64>> {
    check_metric(pair, spec)?;
    let psi = pair.psi_z();
    let z = pair.z_nodes();
    let mut radii = Vec::new();
    let mut last: Option<usize> = None;
    for (i, &v) in psi.iter().enumerate() {
        if v.abs() <= ZERO_NOISE {
            continue;
        }
        if let Some(a) = last {
            if (v > 0.0) != (psi[a] > 0.0) {
                radii.push(refine_zero(pair, spec, z[a], z[i], psi[a] > 0.0)?);
            }
        }
        last = Some(i);
    }
    Ok(radii)
}

fn refine_zero(pair: &EigenPair, spec: &MetricSpec, mut a: f64, mut b: f64, positive_left: bool) -> Result<f64> {
    let (mut ra, mut rb) = (spec.r_of_z(a)?, spec.r_of_z(b)?);
    while rb - ra > RADIUS_TOL {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let v = pair.psi_at(mid)?;
        if v == 0.0 {
            return spec.r_of_z(mid);
        }
        if (v > 0.0) == positive_left {
            a = mid;
            ra = spec.r_of_z(a)?;
        } else {
            b = mid;
            rb = spec.r_of_z(b)?;
        }
    }
    Ok(0.5 * (ra + rb))
}

/// Nodal domains of `φ(r)·cos(kθ)`.
pub fn nodal_domain_count(pair: &EigenPair) -> usize {
    let zeros = sign_changes(pair.psi_z(), ZERO_NOISE);
    if pair.k == 0 {
        zeros + 1
    } else {
        2 * pair.k as usize * (zeros + 1)
    }
}

pub fn nodal_report(pair: &EigenPair, spec: &MetricSpec) -> Result<NodalReport> {
    let radii = nodal_radii(pair, spec)?;
    let r = pair.r_nodes();
    let n = r.len() - 1;
    let spacing = r[n] - r[n - 1];
    let edge_zero = pair.bc == BoundaryCondition::Neumann && pair.psi_z()[n].abs() <= ZERO_NOISE;
    let touches_boundary = pair.k > 0 || edge_zero || radii.iter().any(|&x| x >= 1.0 - spacing);
    Ok(NodalReport { domain_count: nodal_domain_count(pair), radii, touches_boundary })
}

/// Vertex of the parabola through three points, clamped to their span.
pub(crate) fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let (d0, d1) = ((y[1] - y[0]) / (x[1] - x[0]), (y[2] - y[1]) / (x[2] - x[1]));
    let curv = (d1 - d0) / (x[2] - x[0]);
    if curv == 0.0 || !curv.is_finite() {
        return (x[1], y[1]);
    }
    // y = y1 + s (t − x1) + curv (t − x1)², s the slope at x1
    let s = d0 + curv * (x[1] - x[0]);
    let t = (x[1] - 0.5 * s / curv).clamp(x[0], x[2]);
    let dt = t - x[1];
    (t, y[1] + s * dt + curv * dt * dt)
}

/// Extremum of the samples `(x, y)` with `x` increasing, refined quadratically.
/// With `even` the data is mirrored across `x = 0`, so an extremum at the first
/// sample stays at the origin.
pub(crate) fn refine_extremum(x: &[f64], y: &[f64], maximum: bool, even: bool) -> (f64, f64) {
    let better = |a: f64, b: f64| if maximum { a > b } else { a < b };
    let mut i = 0;
    for (idx, &v) in y.iter().enumerate() {
        if better(v, y[i]) {
            i = idx;
        }
    }
    let last = y.len() - 1;
    if i == 0 && even {
        return (x[0], y[0]);
    }
    if i == 0 || i == last || y.len() < 3 {
        return (x[i], y[i]);
    }
    parabola_vertex([x[i - 1], x[i], x[i + 1]], [y[i - 1], y[i], y[i + 1]])
}

/// Extrema of the radial factor over the mapped grid.
pub fn hot_spot(pair: &EigenPair, spec: &MetricSpec) -> Result<HotSpotReport> {
    check_metric(pair, spec)?;
    let r = pair.r_nodes();
    let psi = pair.psi_z();
    let even = pair.k == 0;
    let (argmax_r, max_value) = refine_extremum(r, psi, true, even);
    let (argmin_r, min_value) = refine_extremum(r, psi, false, even);
    let degenerate = max_value - min_value <= 1e-12 * max_value.abs().max(1.0);
    let n = r.len() - 1;
    let interior_max = !degenerate && argmax_r < 1.0 - (r[n] - r[n - 1]);
    Ok(HotSpotReport { argmax_r, max_value, argmin_r, min_value, interior_max, degenerate })
}

/// Whether the radial factor is nonincreasing in `r` up to [`MONOTONE_TOL`].
pub fn monotonicity_check(pair: &EigenPair) -> bool {
    pair.psi_z().windows(2).all(|w| w[1] - w[0] <= MONOTONE_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Angular {
    Cos,
    Sin,
}

impl Angular {
    pub fn factor(self, k: u32, theta: f64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        match self {
            Angular::Cos => libm::cos(k as f64 * theta),
            Angular::Sin => libm::sin(k as f64 * theta),
        }
    }
}

/// Samples on the polar grid `rᵢ = i/(n_r − 1)`, `θ_m = 2πm/n_θ`, stored by
/// radius: `values[i·n_θ + m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscField {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub values: Vec<f64>,
}

impl DiscField {
    pub fn at(&self, i: usize, m: usize) -> f64 {
        self.values[i * self.theta.len() + m]
    }

    pub(crate) fn theta_grid(n_theta: usize) -> Vec<f64> {
        (0..n_theta).map(|m| 2.0 * PI * m as f64 / n_theta as f64).collect()
    }
}

/// `φ(r)·cos(kθ)` or `φ(r)·sin(kθ)` on a polar grid.
pub fn field_on_disc(pair: &EigenPair, angular: Angular, grid: (usize, usize)) -> Result<DiscField> {
    let (n_r, n_theta) = grid;
    if n_theta == 0 {
        return Err(crate::error::domain("angular samples", 0.0));
    }
    let radial = eigenfunction_in_r(pair, pair.metric(), n_r)?;
    let theta = DiscField::theta_grid(n_theta);
    let factors: Vec<f64> = theta.iter().map(|&t| angular.factor(pair.k, t)).collect();
    let values = radial.phi.iter().flat_map(|&p| factors.iter().map(move |&f| p * f)).collect();
    Ok(DiscField { r: radial.r, theta, values })
}
