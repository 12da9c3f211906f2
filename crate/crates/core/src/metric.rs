//! Radially symmetric conformal metrics `p(r)·(dx² + dy²)` on the unit disc.
//!
//! Besides the density itself this module carries the closed-form geometry
//! (area, Gaussian curvature, total curvature) and the area coordinate
//!
//! ```text
//! z(r) = (1/c) ∫₀ʳ s·p(s) ds,   c = ∫₀¹ s·p(s) ds = A/(2π),
//! ```
//!
//! which maps `[0,1]` onto itself and turns the weighted mass `r·p(r) dr` into
//! the flat measure `c·dz`. In that coordinate the radial operator has the
//! coefficient `w(z) = r(z)²·p(r(z))`, see [`MetricSpec::transformed_coefficient`].

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::domain;
use crate::quadrature::{integrate, Tolerance};
use crate::spline::CubicSpline;
use crate::{Error, Result};

/// Smallest accepted `δ` for the peaked family.
pub const MIN_DELTA: f64 = 1e-12;

/// Analytic density callable, `r ↦ p(r)` on `[0,1]`.
pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Normalizing factor `α(δ) = 1/log((1+δ)/δ)` of the peaked family.
pub fn alpha(delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(domain("delta", delta));
    }
    Ok(1.0 / libm::log1p(1.0 / delta))
}

#[derive(Clone)]
enum Density {
    Analytic(DensityFn),
    Table(Arc<CubicSpline>),
}

impl Density {
    fn eval(&self, r: f64) -> f64 {
        match self {
            Density::Analytic(f) => f(r),
            Density::Table(s) => s.eval(r),
        }
    }
}

#[derive(Clone)]
enum Repr {
    Peaked {
        delta: f64,
        alpha: f64,
    },
    Flat,
    /// `partial[i] = ∫₀^{i/PANELS} s·p(s) ds`.
    Custom {
        density: Density,
        half_area: f64,
        partial: Arc<Vec<f64>>,
    },
}

/// Read-only view of which metric a [`MetricSpec`] holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    /// `p(r) = α/(r² + δ)`, `α = 1/log((1+δ)/δ)`; area π for every `δ > 0`.
    Peaked { delta: f64, alpha: f64 },
    /// The Euclidean unit disc, `p ≡ 1`.
    FlatDisc,
    /// User density given as a callable.
    CustomAnalytic,
    /// User density interpolated from `samples` tabulated points.
    CustomTable { samples: usize },
}

/// A radially symmetric conformal density on the unit disc.
///
/// Values are immutable; cloning shares the custom density.
#[derive(Clone)]
pub struct MetricSpec {
    repr: Repr,
}

impl fmt::Debug for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("MetricSpec").field(&self.kind()).finish()
    }
}

/// Area, total curvature and sampled Gaussian curvature of a metric.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport {
    pub area: f64,
    pub total_curvature: f64,
    pub curvature_samples: Vec<(f64, f64)>,
}

/// Coefficients of the mode-`k` radial problem at one point of the area coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ModeCoefficients {
    /// `w = r²p`.
    pub w: f64,
    /// `β = r·(log p)'/2`; `w'(z) = 2c(1 + β)`.
    pub beta: f64,
    /// `w·K`, Gaussian curvature times `w`.
    pub wk: f64,
}

const FD_STEP: f64 = 1e-4;
const POSITIVITY_PROBES: usize = 1024;
const PANELS: usize = 256;
const Z_TOL: Tolerance = Tolerance { abs: 1e-15, rel: 1e-14, max_intervals: 2000 };

impl MetricSpec {
    /// The peaked family `α/(r²+δ)`.
    pub fn peaked(delta: f64) -> Result<Self> {
        if !(delta >= MIN_DELTA) || !delta.is_finite() {
            return Err(domain("delta", delta));
        }
        Ok(MetricSpec { repr: Repr::Peaked { delta, alpha: alpha(delta)? } })
    }

    pub fn flat_disc() -> Self {
        MetricSpec { repr: Repr::Flat }
    }

    /// A density given by a callable. It must be finite and positive on `[0,1]`.
    pub fn custom_fn<F>(density: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::custom(Density::Analytic(Arc::new(density)))
    }

    /// A density tabulated at strictly increasing radii running from 0 to 1,
    /// interpolated by a natural cubic spline.
    pub fn custom_table(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.first() != Some(&0.0) || radii.last() != Some(&1.0) {
            return Err(Error::InvalidTable("radii must run from 0 to 1"));
        }
        if values.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::InvalidTable("densities must be finite and positive"));
        }
        let spline = CubicSpline::new(radii, values)?;
        Self::custom(Density::Table(Arc::new(spline)))
    }

    fn custom(density: Density) -> Result<Self> {
        let bad = (0..=POSITIVITY_PROBES).map(|i| i as f64 / POSITIVITY_PROBES as f64).find(|&r| {
            let p = density.eval(r);
            !(p > 0.0) || !p.is_finite()
        });
        if let Some(r) = bad {
            return Err(domain("custom density at radius", r));
        }
        let mut partial = Vec::with_capacity(PANELS + 1);
        partial.push(0.0);
        let mut acc = 0.0;
        for i in 0..PANELS {
            let (a, b) = (i as f64 / PANELS as f64, (i + 1) as f64 / PANELS as f64);
            acc += integrate(|s| s * density.eval(s), a, b, Z_TOL)?;
            partial.push(acc);
        }
        Ok(MetricSpec { repr: Repr::Custom { density, half_area: acc, partial: Arc::new(partial) } })
    }

    pub fn kind(&self) -> MetricKind {
        match &self.repr {
            Repr::Peaked { delta, alpha } => MetricKind::Peaked { delta: *delta, alpha: *alpha },
            Repr::Flat => MetricKind::FlatDisc,
            Repr::Custom { density: Density::Analytic(_), .. } => MetricKind::CustomAnalytic,
            Repr::Custom { density: Density::Table(s), .. } => MetricKind::CustomTable { samples: s.len() },
        }
    }

    /// `α` for the peaked family, `None` otherwise.
    pub fn alpha(&self) -> Option<f64> {
        match self.repr {
            Repr::Peaked { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    /// True when both values describe the same metric (custom densities must
    /// share their storage).
    pub fn same_metric(&self, other: &MetricSpec) -> bool {
        match (&self.repr, &other.repr) {
            (Repr::Peaked { delta: a, .. }, Repr::Peaked { delta: b, .. }) => a == b,
            (Repr::Flat, Repr::Flat) => true,
            (Repr::Custom { density: a, .. }, Repr::Custom { density: b, .. }) => match (a, b) {
                (Density::Analytic(f), Density::Analytic(g)) => Arc::ptr_eq(f, g),
                (Density::Table(s), Density::Table(t)) => Arc::ptr_eq(s, t),
                _ => false,
            },
            _ => false,
        }
    }

    /// Tabulated knots of a table density.
    pub fn table_samples(&self) -> Option<(&[f64], &[f64])> {
        match &self.repr {
            Repr::Custom { density: Density::Table(s), .. } => Some(s.knots()),
            _ => None,
        }
    }

    pub(crate) fn p(&self, r: f64) -> f64 {
        match &self.repr {
            Repr::Peaked { delta, alpha } => alpha / (r * r + delta),
            Repr::Flat => 1.0,
            Repr::Custom { density, .. } => density.eval(r),
        }
    }

    /// `c = ∫₀¹ r·p(r) dr = A/(2π)`.
    pub fn half_area(&self) -> f64 {
        match &self.repr {
            Repr::Peaked { .. } | Repr::Flat => 0.5,
            Repr::Custom { half_area, .. } => *half_area,
        }
    }

    pub fn density(&self, r: f64) -> Result<f64> {
        check_unit(r, "radius")?;
        Ok(self.p(r))
    }

    /// Surface area `∫_D p dx dy`.
    pub fn area(&self) -> Result<f64> {
        Ok(2.0 * PI * self.half_area())
    }

    /// Area by adaptive quadrature of `2π r p(r)`, ignoring closed forms.
    pub fn area_by_quadrature(&self) -> Result<f64> {
        let c = integrate(|r| r * self.p(r), 0.0, 1.0, Tolerance::default())?;
        Ok(2.0 * PI * c)
    }

    /// Gaussian curvature `K = −Δ(log p)/(2p)` at radius `r`.
    pub fn gaussian_curvature(&self, r: f64) -> Result<f64> {
        check_unit(r, "radius")?;
        match &self.repr {
            Repr::Peaked { delta, alpha } => Ok(2.0 * delta / (alpha * (r * r + delta))),
            Repr::Flat => Ok(0.0),
            Repr::Custom { density, .. } => {
                if let Density::Table(s) = density {
                    if s.len() < 4 {
                        return Err(Error::Unsupported("curvature of a density table with fewer than 4 samples"));
                    }
                }
                let (d1, d2) = self.log_density_derivatives(r);
                let laplacian = if r == 0.0 { 2.0 * d2 } else { d2 + d1 / r };
                Ok(-laplacian / (2.0 * self.p(r)))
            }
        }
    }

    /// Total curvature `∫ K dA`.
    pub fn total_curvature(&self) -> Result<f64> {
        match &self.repr {
            Repr::Peaked { delta, .. } => Ok(2.0 * PI / (1.0 + delta)),
            Repr::Flat => Ok(0.0),
            Repr::Custom { .. } => self.total_curvature_by_quadrature(),
        }
    }

    /// Total curvature by adaptive quadrature of `2π K(r) p(r) r`.
    pub fn total_curvature_by_quadrature(&self) -> Result<f64> {
        let tol = match self.repr {
            Repr::Custom { .. } => Tolerance { abs: 1e-8, rel: 1e-8, ..Tolerance::default() },
            _ => Tolerance::default(),
        };
        // Evaluate the integrand only for r already known to be in [0,1].
        let mut failure = None;
        let v = integrate(
            |r| match self.gaussian_curvature(r) {
                Ok(k) => k * self.p(r) * r,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            },
            0.0,
            1.0,
            tol,
        )?;
        match failure {
            Some(e) => Err(e),
            None => Ok(2.0 * PI * v),
        }
    }

    pub fn geometry_report(&self, samples: usize) -> Result<GeometryReport> {
        let samples = samples.max(2);
        let curvature_samples = (0..samples)
            .map(|i| {
                let r = i as f64 / (samples - 1) as f64;
                self.gaussian_curvature(r).map(|k| (r, k))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GeometryReport { area: self.area()?, total_curvature: self.total_curvature()?, curvature_samples })
    }

    /// Area coordinate `z(r)`; strictly increasing with `z(0)=0`, `z(1)=1`.
    pub fn z_of_r(&self, r: f64) -> Result<f64> {
        check_unit(r, "radius")?;
        self.z_value(r)
    }

    fn z_value(&self, r: f64) -> Result<f64> {
        match &self.repr {
            Repr::Peaked { delta, alpha } => Ok((alpha * libm::log1p(r * r / delta)).min(1.0)),
            Repr::Flat => Ok(r * r),
            Repr::Custom { half_area, .. } => {
                if r <= 0.0 {
                    return Ok(0.0);
                }
                if r >= 1.0 {
                    return Ok(1.0);
                }
                let i = ((r * PANELS as f64) as usize).min(PANELS - 1);
                Ok((self.partial_integral(i, r)? / half_area).clamp(0.0, 1.0))
            }
        }
    }

    /// Inverse of [`MetricSpec::z_of_r`].
    pub fn r_of_z(&self, z: f64) -> Result<f64> {
        check_unit(z, "area coordinate")?;
        self.r_value(z)
    }

    pub(crate) fn r_value(&self, z: f64) -> Result<f64> {
        match &self.repr {
            // exact endpoint: rounding in expm1 lands a few ulps below 1
            Repr::Peaked { .. } if z >= 1.0 => Ok(1.0),
            Repr::Peaked { delta, alpha } => Ok(libm::sqrt(delta * libm::expm1(z / alpha)).min(1.0)),
            Repr::Flat => Ok(libm::sqrt(z)),
            Repr::Custom { half_area, partial, .. } => {
                if z <= 0.0 {
                    return Ok(0.0);
                }
                if z >= 1.0 {
                    return Ok(1.0);
                }
                let target = z * half_area;
                let i = partial.partition_point(|&v| v <= target).clamp(1, PANELS) - 1;
                let (mut lo, mut hi) = (i as f64 / PANELS as f64, (i + 1) as f64 / PANELS as f64);
                let (flo, fhi) = (partial[i], partial[i + 1]);
                // safeguarded Newton on S(r) = target, S' = r·p(r)
                let mut r = lo + (hi - lo) * ((target - flo) / (fhi - flo)).clamp(0.0, 1.0);
                for _ in 0..100 {
                    let f = self.partial_integral(i, r)? - target;
                    if f == 0.0 {
                        break;
                    }
                    if f < 0.0 {
                        lo = r;
                    } else {
                        hi = r;
                    }
                    let slope = r * self.p(r);
                    let mut next = r - f / slope;
                    if !(next > lo && next < hi) {
                        next = 0.5 * (lo + hi);
                    }
                    let done = (next - r).abs() <= 4.0 * f64::EPSILON * r || hi - lo <= 4.0 * f64::EPSILON * hi;
                    r = next;
                    if done {
                        break;
                    }
                }
                Ok(r)
            }
        }
    }

    /// `∫₀ʳ s·p(s) ds` for `r` in panel `i`.
    fn partial_integral(&self, i: usize, r: f64) -> Result<f64> {
        let Repr::Custom { density, partial, .. } = &self.repr else {
            unreachable!("panel table exists only for custom densities")
        };
        let a = i as f64 / PANELS as f64;
        Ok(partial[i] + integrate(|s| s * density.eval(s), a, r, Z_TOL)?)
    }

    /// `w(z) = r(z)²·p(r(z))`, the stiffness coefficient in the area coordinate.
    pub fn transformed_coefficient(&self, z: f64) -> Result<f64> {
        check_unit(z, "area coordinate")?;
        self.w_value(z)
    }

    pub(crate) fn w_value(&self, z: f64) -> Result<f64> {
        match &self.repr {
            Repr::Peaked { alpha, .. } => Ok(-alpha * libm::expm1(-z / alpha)),
            Repr::Flat => Ok(z),
            Repr::Custom { .. } => {
                let r = self.r_value(z)?;
                Ok(r * r * self.p(r))
            }
        }
    }

    pub(crate) fn mode_coefficients(&self, z: f64) -> Result<ModeCoefficients> {
        Ok(match &self.repr {
            Repr::Peaked { alpha, .. } => {
                let s = -libm::expm1(-z / alpha);
                ModeCoefficients { w: alpha * s, beta: -s, wk: 2.0 * s * (1.0 - s) }
            }
            Repr::Flat => ModeCoefficients { w: z, beta: 0.0, wk: 0.0 },
            Repr::Custom { .. } => {
                let r = self.r_value(z)?;
                let w = r * r * self.p(r);
                let (d1, d2) = self.log_density_derivatives(r);
                let laplacian = if r == 0.0 { 2.0 * d2 } else { d2 + d1 / r };
                let k = -laplacian / (2.0 * self.p(r));
                ModeCoefficients { w, beta: 0.5 * r * d1, wk: w * k }
            }
        })
    }

    /// Lower bound `ℓ` with `λ₁ᵏ ≥ k²·ℓ` for every mode, from the potential term
    /// `k²/w ≥ k²/max w`. For the peaked family this is `1/α`.
    pub fn potential_lower_bound(&self) -> f64 {
        match self.repr {
            Repr::Peaked { alpha, .. } => 1.0 / alpha,
            Repr::Flat => 1.0,
            Repr::Custom { .. } => {
                let wmax = (0..=1024).filter_map(|i| self.w_value(i as f64 / 1024.0).ok()).fold(0.0_f64, f64::max);
                1.0 / wmax
            }
        }
    }

    /// First and second derivative of `log p` by centered differences, with the
    /// even extension across `r = 0` and one-sided stencils at `r = 1`.
    fn log_density_derivatives(&self, r: f64) -> (f64, f64) {
        let h = FD_STEP;
        let lp = |x: f64| libm::log(self.p(x.abs()));
        if r + h <= 1.0 {
            let (lm, l0, lpl) = (lp(r - h), lp(r), lp(r + h));
            ((lpl - lm) / (2.0 * h), (lpl - 2.0 * l0 + lm) / (h * h))
        } else {
            let (l0, l1, l2, l3) = (lp(r), lp(r - h), lp(r - 2.0 * h), lp(r - 3.0 * h));
            ((3.0 * l0 - 4.0 * l1 + l2) / (2.0 * h), (2.0 * l0 - 5.0 * l1 + 4.0 * l2 - l3) / (h * h))
        }
    }
}

fn check_unit(x: f64, what: &'static str) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain(what, x))
    }
}
