//! Prüfer-angle shooting for the radial equation `(rφ')' + (λ r p − k²/r) φ = 0`.
//!
//! With `t = ln r` the equation becomes `φ_tt + (λ q(t) − k²) φ = 0`, `q = r²p`,
//! which has no singular coefficient on `[ln r_min, 0]`. Writing
//! `φ_t = ρ cos θ`, `φ = ρ sin θ` gives
//!
//! ```text
//! θ' = cos²θ + (λ q − k²) sin²θ,
//! ```
//!
//! and zeros of φ are exactly the times where θ crosses a multiple of π
//! (always upward, since θ' = 1 there). The regular solution starts from
//! `φ ~ r^k`, i.e. `θ = atan(1/k)`, or `θ = π/2` when `k = 0`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::error::domain;
use crate::metric::MetricSpec;
use crate::sl_solver::BoundaryCondition;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    /// Inner truncation radius.
    pub r_min: f64,
    /// Bound on the step-doubling estimate of the final Prüfer angle.
    pub ode_tol: f64,
    /// Relative tolerance of the eigenvalue bisection.
    pub bisect_tol: f64,
    /// RK4 steps in `ln r`; must be even.
    pub steps: usize,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig { r_min: 1e-6, ode_tol: 1e-9, bisect_tol: 1e-13, steps: 100_000 }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min <= 1e-4) {
            return Err(domain("r_min", self.r_min));
        }
        if !(self.ode_tol > 0.0) {
            return Err(domain("ode_tol", self.ode_tol));
        }
        if !(self.bisect_tol > 0.0) {
            return Err(domain("bisect_tol", self.bisect_tol));
        }
        if self.steps < 4 || self.steps % 2 != 0 {
            return Err(domain("shooting steps", self.steps as f64));
        }
        Ok(())
    }
}

/// Largest eigenvalue the bracket search will try.
pub const LAMBDA_CAP: f64 = 1e12;

/// The integrand `q = r²p` tabulated on the RK4 half-step grid for one metric.
#[derive(Debug, Clone)]
pub struct Shooter {
    cfg: ShootingConfig,
    dt: f64,
    // q at t₀ + i·dt/2, i = 0..=2·steps
    q: Vec<f64>,
}

/// Final angle and its step-doubling error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle {
    pub theta: f64,
    pub estimate: f64,
}

impl Shooter {
    pub fn new(spec: &MetricSpec, cfg: ShootingConfig) -> Result<Self> {
        cfg.validate()?;
        let t0 = libm::log(cfg.r_min);
        let dt = -t0 / cfg.steps as f64;
        let q = (0..=2 * cfg.steps)
            .map(|i| {
                let r = libm::exp(t0 + 0.5 * dt * i as f64).min(1.0);
                r * r * spec.p(r)
            })
            .collect::<Vec<_>>();
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integrator { steps: cfg.steps, estimate: f64::NAN });
        }
        Ok(Shooter { cfg, dt, q })
    }

    pub fn config(&self) -> &ShootingConfig {
        &self.cfg
    }

    fn integrate(&self, k: u32, lambda: f64, stride: usize) -> f64 {
        let kk = (k as f64) * (k as f64);
        let rhs = |theta: f64, q: f64| {
            let s = libm::sin(theta);
            1.0 + (lambda * q - kk - 1.0) * s * s
        };
        let mut theta = if k == 0 { FRAC_PI_2 } else { libm::atan(1.0 / k as f64) };
        let h = self.dt * stride as f64;
        let steps = self.cfg.steps / stride;
        for i in 0..steps {
            let base = 2 * stride * i;
            let (q0, qh, q1) = (self.q[base], self.q[base + stride], self.q[base + 2 * stride]);
            let k1 = rhs(theta, q0);
            let k2 = rhs(theta + 0.5 * h * k1, qh);
            let k3 = rhs(theta + 0.5 * h * k2, qh);
            let k4 = rhs(theta + h * k3, q1);
            theta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        theta
    }

    /// Prüfer angle at `r = 1`, compared against a run with twice the step.
    pub fn angle(&self, k: u32, lambda: f64) -> Angle {
        let fine = self.integrate(k, lambda, 1);
        let coarse = self.integrate(k, lambda, 2);
        Angle { theta: fine, estimate: (fine - coarse).abs() / 15.0 }
    }

    fn checked_angle(&self, k: u32, lambda: f64) -> Result<f64> {
        let a = self.angle(k, lambda);
        if !a.theta.is_finite() || a.estimate > self.cfg.ode_tol {
            return Err(Error::Integrator { steps: self.cfg.steps, estimate: a.estimate });
        }
        Ok(a.theta)
    }

    /// Interior zeros of the regular solution on `(r_min, 1)`.
    pub fn count_zeros(&self, k: u32, lambda: f64) -> Result<usize> {
        if !(lambda >= 0.0) {
            return Err(domain("lambda", lambda));
        }
        let theta = self.checked_angle(k, lambda)?;
        // number of m ≥ 1 with mπ < θ
        Ok((libm::ceil(theta / PI) as i64 - 1).max(0) as usize)
    }

    /// The `j`-th eigenvalue of mode `k`.
    pub fn eigenvalue(&self, k: u32, j: usize, bc: BoundaryCondition) -> Result<f64> {
        if j == 0 {
            return Err(domain("eigenvalue index", 0.0));
        }
        let target = match bc {
            BoundaryCondition::Dirichlet => j as f64 * PI,
            BoundaryCondition::Neumann => FRAC_PI_2 + (j - 1) as f64 * PI,
        };
        if k == 0 && bc == BoundaryCondition::Neumann && j == 1 {
            return Ok(0.0);
        }
        let residual = |lambda: f64| self.integrate(k, lambda, 1) - target;
        let (mut lo, mut flo) = (0.0, residual(0.0));
        let (mut hi, mut fhi) = (1.0, residual(1.0));
        while fhi <= 0.0 {
            (lo, flo) = (hi, fhi);
            hi *= 2.0;
            if hi > LAMBDA_CAP {
                return Err(Error::Bracket("eigenvalue exceeds the search cap"));
            }
            fhi = residual(hi);
        }
        // The angle is smooth and increasing in λ: Illinois iteration keeps the
        // bracket and converges superlinearly; plain bisection is the fallback.
        let mut stale = 0i8;
        for _ in 0..400 {
            if hi - lo <= self.cfg.bisect_tol * hi {
                break;
            }
            let mut x = hi - fhi * (hi - lo) / (fhi - flo);
            if !(x > lo && x < hi) {
                x = 0.5 * (lo + hi);
            }
            let fx = residual(x);
            if fx <= 0.0 {
                (lo, flo) = (x, fx);
                if stale == -1 {
                    fhi *= 0.5;
                }
                stale = -1;
            } else {
                (hi, fhi) = (x, fx);
                if stale == 1 {
                    flo *= 0.5;
                }
                stale = 1;
            }
            if fx == 0.0 {
                break;
            }
        }
        let lambda = if flo == 0.0 { lo } else { 0.5 * (lo + hi) };
        self.checked_angle(k, lambda)?;
        Ok(lambda)
    }
}

/// Interior zeros of the mode-`k` solution at `lambda`; see [`Shooter::count_zeros`].
pub fn count_zeros(spec: &MetricSpec, k: u32, lambda: f64, cfg: ShootingConfig) -> Result<usize> {
    Shooter::new(spec, cfg)?.count_zeros(k, lambda)
}

/// The `j`-th eigenvalue (1-based) of mode `k` by bisection on the Prüfer angle.
pub fn eigenvalue_by_bisection(
    spec: &MetricSpec,
    k: u32,
    j: usize,
    bc: BoundaryCondition,
    cfg: ShootingConfig,
) -> Result<f64> {
    Shooter::new(spec, cfg)?.eigenvalue(k, j, bc)
}
