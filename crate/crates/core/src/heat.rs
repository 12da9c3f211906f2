//! The heat equation `∂ₜu = Δ_S u` on the weighted disc, one angular mode at a
//! time on the eigenvalue solver's grid.
//!
//! Each initial term `f(r)·cos(kθ)` (or `sin`) is mapped to the finite element
//! factor `χ = ψ/w^{k/2}` and evolved with the mode-`k` pencil `M χ' = −S χ`,
//! either through its eigenpairs or by Crank–Nicolson.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::analysis::{refine_extremum, Angular, DiscField};
use crate::error::domain;
use crate::metric::MetricSpec;
use crate::sl_solver::{assemble, solve_lowest, BoundaryCondition, ModeOperator, ModeProblem, MIN_INTERVALS};
use crate::spline::CubicSpline;
use crate::tridiag::TridiagonalLu;
use crate::{Error, Result};

/// One separated term `f(r)·A(kθ)` of the initial datum, with `f` given by
/// samples on `[0, 1]` and interpolated by a natural cubic spline.
#[derive(Debug, Clone)]
pub struct InitialTerm {
    pub k: u32,
    pub angular: Angular,
    profile: CubicSpline,
}

impl InitialTerm {
    pub fn new(k: u32, angular: Angular, r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTable("initial profile must be finite"));
        }
        if r.first() != Some(&0.0) || r.last() != Some(&1.0) {
            return Err(Error::InvalidTable("initial profile must be sampled from r = 0 to r = 1"));
        }
        Ok(InitialTerm { k, angular, profile: CubicSpline::new(r, values)? })
    }

    /// Samples `f` at `samples` uniformly spaced radii.
    pub fn from_fn(k: u32, angular: Angular, samples: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if samples < 2 {
            return Err(domain("profile samples", samples as f64));
        }
        let r: Vec<f64> = (0..samples).map(|i| i as f64 / (samples - 1) as f64).collect();
        let values = r.iter().map(|&x| f(x)).collect();
        Self::new(k, angular, r, values)
    }

    pub fn profile(&self, r: f64) -> f64 {
        self.profile.eval(r)
    }
}

/// The datum `1 + e^{−r} + 0.3·r·cos θ`, which projects onto both the second
/// radial mode and the first angular mode.
pub fn generic_datum(samples: usize) -> Result<Vec<InitialTerm>> {
    Ok(vec![
        InitialTerm::from_fn(0, Angular::Cos, samples, |r| 1.0 + libm::exp(-r))?,
        InitialTerm::from_fn(1, Angular::Cos, samples, |r| 0.3 * r)?,
    ])
}

#[derive(Debug, Clone)]
pub struct HeatProblem {
    pub spec: MetricSpec,
    pub terms: Vec<InitialTerm>,
    pub bc: BoundaryCondition,
    /// Grid intervals in `z`.
    pub n: usize,
    pub t_end: f64,
    /// Increasing times in `[0, t_end]` at which states are recorded.
    pub output_times: Vec<f64>,
    /// Polar sampling `(n_r, n_θ)` of recorded fields.
    pub grid: (usize, usize),
}

impl HeatProblem {
    fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::Usage("heat problem needs at least one initial term"));
        }
        if self.n < MIN_INTERVALS {
            return Err(domain("grid intervals", self.n as f64));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(domain("t_end", self.t_end));
        }
        if self.output_times.is_empty() {
            return Err(Error::Usage("heat problem needs output times"));
        }
        for (i, &t) in self.output_times.iter().enumerate() {
            if !(0.0..=self.t_end).contains(&t) || (i > 0 && t <= self.output_times[i - 1]) {
                return Err(domain("output time", t));
            }
        }
        if self.grid.0 < 2 || self.grid.1 == 0 {
            return Err(Error::Usage("field grid needs n_r ≥ 2 and n_θ ≥ 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HotSpot {
    pub r: f64,
    pub theta: f64,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct HeatState {
    pub t: f64,
    pub field: DiscField,
    pub hotspot: HotSpot,
    /// `∫ u p dA`.
    pub heat_content: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeatWarning {
    /// The eigen-expansion of a term captures less than 99.9% of its energy.
    LowCapturedEnergy { term: usize, k: u32, captured: f64 },
    /// Step halving moved the final field by more than the agreement target.
    StepRefinement { estimate: f64 },
}

#[derive(Debug, Clone)]
pub struct HeatRun {
    pub states: Vec<HeatState>,
    pub warnings: Vec<HeatWarning>,
    /// Crank–Nicolson only: max-norm change of the final field under step
    /// halving, divided by 3.
    pub step_estimate: Option<f64>,
}

pub const MIN_CAPTURED_ENERGY: f64 = 0.999;
const STEP_WARNING: f64 = 1e-4;

/// Per-term operator, initial factor and evaluation weights on the field grid.
struct Prepared {
    op: ModeOperator,
    chi0: Vec<f64>,
    // field grid: element, local coordinate, w^{k/2}
    element: Vec<usize>,
    local: Vec<f64>,
    weight: Vec<f64>,
    angular: Vec<f64>,
}

impl Prepared {
    fn new(problem: &HeatProblem, term: &InitialTerm) -> Result<Self> {
        let mode = ModeProblem::new(problem.spec.clone(), term.k, problem.bc, problem.n);
        let op = assemble(&mode)?;
        let n = problem.n;
        let spec = &problem.spec;
        let mut chi = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let z = i as f64 / n as f64;
            let psi = term.profile(spec.r_of_z(z)?);
            let g = op.node_weight[i];
            chi.push(if g > 0.0 { psi / g } else { 0.0 });
        }
        if term.k > 0 {
            chi[0] = 2.0 * chi[1] - chi[2];
        }
        let chi0 = chi[op.free.clone()].to_vec();
        let (n_r, n_theta) = problem.grid;
        let mut element = Vec::with_capacity(n_r);
        let mut local = Vec::with_capacity(n_r);
        let mut weight = Vec::with_capacity(n_r);
        for i in 0..n_r {
            let z = spec.z_of_r(i as f64 / (n_r - 1) as f64)?;
            let x = z * n as f64;
            let e = (libm::floor(x) as usize).min(n - 1);
            element.push(e);
            local.push(x - e as f64);
            weight.push(if term.k == 0 { 1.0 } else { libm::pow(spec.w_value(z)?, 0.5 * term.k as f64) });
        }
        let angular = DiscField::theta_grid(n_theta).iter().map(|&t| term.angular.factor(term.k, t)).collect();
        Ok(Prepared { op, chi0, element, local, weight, angular })
    }

    fn radial(&self, chi: &[f64]) -> Vec<f64> {
        let full = self.op.embed(chi);
        self.element
            .iter()
            .zip(&self.local)
            .zip(&self.weight)
            .map(|((&e, &t), &g)| g * ((1.0 - t) * full[e] + t * full[e + 1]))
            .collect()
    }

    fn mass_sum(&self, chi: &[f64]) -> f64 {
        self.op.pencil.mass.mul_vec(chi).iter().sum()
    }
}

fn prepare_all(problem: &HeatProblem) -> Result<Vec<Prepared>> {
    problem.validate()?;
    problem.terms.iter().map(|t| Prepared::new(problem, t)).collect()
}

fn sample_field(problem: &HeatProblem, prepared: &[Prepared], chis: &[Vec<f64>]) -> DiscField {
    let (n_r, n_theta) = problem.grid;
    let mut values = vec![0.0; n_r * n_theta];
    for (p, chi) in prepared.iter().zip(chis) {
        let radial = p.radial(chi);
        for (i, &f) in radial.iter().enumerate() {
            for (m, &a) in p.angular.iter().enumerate() {
                values[i * n_theta + m] += f * a;
            }
        }
    }
    DiscField {
        r: (0..n_r).map(|i| i as f64 / (n_r - 1) as f64).collect(),
        theta: DiscField::theta_grid(n_theta),
        values,
    }
}

/// With `transient` (the state without its λ = 0 part, which is constant in
/// space) the hot spot is located on the transient field, which keeps it
/// resolvable long after the fluctuation drops below rounding of the mean.
fn state(
    problem: &HeatProblem,
    prepared: &[Prepared],
    t: f64,
    chis: &[Vec<f64>],
    transient: Option<&[Vec<f64>]>,
) -> HeatState {
    let field = sample_field(problem, prepared, chis);
    let heat: f64 = prepared.iter().zip(chis).filter(|(p, _)| p.op.k == 0).map(|(p, chi)| p.mass_sum(chi)).sum();
    let hotspot = match transient {
        Some(parts) => {
            let moving = sample_field(problem, prepared, parts);
            let mut hs = locate_hot_spot(&moving);
            hs.value += field.values[0] - moving.values[0];
            hs
        }
        None => locate_hot_spot(&field),
    };
    HeatState { t, hotspot, heat_content: 2.0 * PI * problem.spec.half_area() * heat, field }
}

/// Discrete maximum of a polar field refined quadratically in `r` and `θ`.
pub fn locate_hot_spot(field: &DiscField) -> HotSpot {
    let n_theta = field.theta.len();
    let (mut best, mut at) = (f64::NEG_INFINITY, 0);
    for (idx, &v) in field.values.iter().enumerate() {
        if v > best {
            best = v;
            at = idx;
        }
    }
    let (i, m) = (at / n_theta, at % n_theta);
    if i == 0 {
        return HotSpot { r: 0.0, theta: 0.0, value: field.values[0] };
    }
    let column: Vec<f64> = (0..field.r.len()).map(|ii| field.at(ii, m)).collect();
    let (r, value) = refine_extremum(&field.r, &column, true, true);
    let theta = if n_theta >= 3 {
        let step = 2.0 * PI / n_theta as f64;
        let (prev, next) = (field.at(i, (m + n_theta - 1) % n_theta), field.at(i, (m + 1) % n_theta));
        let (t, _) = crate::analysis::parabola_vertex([-step, 0.0, step], [prev, field.at(i, m), next]);
        let th = field.theta[m] + t;
        if th < 0.0 {
            th + 2.0 * PI
        } else if th >= 2.0 * PI {
            th - 2.0 * PI
        } else {
            th
        }
    } else {
        field.theta[m]
    };
    HotSpot { r, theta, value }
}

/// Truncated eigenfunction expansion with modes `k ≤ cutoff.0` and `cutoff.1`
/// eigenpairs per mode.
pub fn evolve_spectral(problem: &HeatProblem, cutoff: (u32, usize)) -> Result<HeatRun> {
    let prepared = prepare_all(problem)?;
    let (kmax, per_mode) = cutoff;
    if per_mode == 0 {
        return Err(domain("eigenpairs per mode", 0.0));
    }
    let mut warnings = Vec::new();
    // (λ, coefficient · eigenvector) per term
    let mut expansions: Vec<Vec<(f64, Vec<f64>)>> = Vec::with_capacity(prepared.len());
    for (idx, p) in prepared.iter().enumerate() {
        let mass = &p.op.pencil.mass;
        let energy = mass.mul_vec(&p.chi0).iter().zip(&p.chi0).map(|(a, b)| a * b).sum::<f64>();
        let mut terms = Vec::new();
        let mut captured = 0.0;
        if p.op.k <= kmax {
            let mode = ModeProblem::new(problem.spec.clone(), p.op.k, problem.bc, problem.n);
            for pair in solve_lowest(&mode, per_mode.min(problem.n / 4))? {
                let v = &pair.coefficients()[p.op.free.clone()];
                let mv = mass.mul_vec(v);
                let vv: f64 = mv.iter().zip(v).map(|(a, b)| a * b).sum();
                let c = mv.iter().zip(&p.chi0).map(|(a, b)| a * b).sum::<f64>() / vv;
                captured += c * c * vv;
                terms.push((pair.lambda, v.iter().map(|x| c * x).collect()));
            }
        }
        let fraction = if energy > 0.0 { captured / energy } else { 1.0 };
        if fraction < MIN_CAPTURED_ENERGY {
            warnings.push(HeatWarning::LowCapturedEnergy { term: idx, k: p.op.k, captured: fraction });
        }
        expansions.push(terms);
    }
    let states = problem
        .output_times
        .iter()
        .map(|&t| {
            let sum = |moving_only: bool| -> Vec<Vec<f64>> {
                prepared
                    .iter()
                    .zip(&expansions)
                    .map(|(p, terms)| {
                        let mut chi = vec![0.0; p.op.dim()];
                        for (lambda, v) in terms.iter().filter(|(l, _)| !moving_only || *l > 0.0) {
                            let decay = libm::exp(-lambda * t);
                            chi.iter_mut().zip(v).for_each(|(a, b)| *a += decay * b);
                        }
                        chi
                    })
                    .collect()
            };
            state(problem, &prepared, t, &sum(false), Some(&sum(true)))
        })
        .collect();
    Ok(HeatRun { states, warnings, step_estimate: None })
}

fn crank_nicolson(problem: &HeatProblem, prepared: &[Prepared], dt: f64) -> Result<Vec<HeatState>> {
    let mut chis: Vec<Vec<f64>> = prepared.iter().map(|p| p.chi0.clone()).collect();
    let mut states = Vec::with_capacity(problem.output_times.len());
    let mut now = 0.0;
    let mut cached: Vec<Option<(f64, TridiagonalLu)>> = prepared.iter().map(|_| None).collect();
    for &target in &problem.output_times {
        let span = target - now;
        if span > 0.0 {
            let steps = libm::ceil(span / dt - 1e-9).max(1.0) as usize;
            let h = span / steps as f64;
            // (M + h/2·S) χ⁺ = (M − h/2·S) χ  ⇔  (S − σM) χ⁺ = (−σM − S) χ,  σ = −2/h
            let sigma = -2.0 / h;
            for ((p, chi), slot) in prepared.iter().zip(chis.iter_mut()).zip(cached.iter_mut()) {
                if slot.as_ref().map(|(step, _)| *step) != Some(h) {
                    let lu = TridiagonalLu::factor(&p.op.pencil.stiffness, &p.op.pencil.mass, sigma)
                        .ok_or(Error::NoConvergence { k: p.op.k, n: problem.n })?;
                    *slot = Some((h, lu));
                }
                let lu = &slot.as_ref().expect("factor stored above").1;
                let mut cn_steps = steps;
                if now == 0.0 {
                    // Rannacher start: the first (up to) two steps become four
                    // backward Euler half-steps, (M + h/2·S) χ⁺ = M χ, which
                    // damp the stiff modes Crank–Nicolson leaves oscillating.
                    let smoothed = steps.min(2);
                    for _ in 0..2 * smoothed {
                        let rhs: Vec<f64> = p.op.pencil.mass.mul_vec(chi).iter().map(|m| -sigma * m).collect();
                        *chi = lu.solve(&rhs);
                    }
                    cn_steps -= smoothed;
                }
                for _ in 0..cn_steps {
                    let mx = p.op.pencil.mass.mul_vec(chi);
                    let sx = p.op.pencil.stiffness.mul_vec(chi);
                    let rhs: Vec<f64> = mx.iter().zip(&sx).map(|(m, s)| -sigma * m - s).collect();
                    *chi = lu.solve(&rhs);
                }
                if chi.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NoConvergence { k: p.op.k, n: problem.n });
                }
            }
            now = target;
        }
        states.push(state(problem, prepared, target, &chis, None));
    }
    Ok(states)
}

/// Crank–Nicolson with step at most `dt`, checked against a run at `dt/2`.
pub fn evolve_cn(problem: &HeatProblem, dt: f64) -> Result<HeatRun> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(domain("time step", dt));
    }
    let prepared = prepare_all(problem)?;
    let states = crank_nicolson(problem, &prepared, dt)?;
    let fine = crank_nicolson(problem, &prepared, 0.5 * dt)?;
    let last = (states.last(), fine.last());
    let estimate = match last {
        (Some(a), Some(b)) => max_difference(&a.field, &b.field) / 3.0,
        _ => 0.0,
    };
    let mut warnings = Vec::new();
    if estimate > STEP_WARNING {
        warnings.push(HeatWarning::StepRefinement { estimate });
    }
    Ok(HeatRun { states, warnings, step_estimate: Some(estimate) })
}

/// Largest pointwise difference of two fields on the same grid.
pub fn max_difference(a: &DiscField, b: &DiscField) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `(t, r, θ)` of the hot spot of each state.
pub fn hot_spot_trajectory(states: &[HeatState]) -> Vec<(f64, f64, f64)> {
    states.iter().map(|s| (s.t, s.hotspot.r, s.hotspot.theta)).collect()
}
