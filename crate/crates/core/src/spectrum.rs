//! The two-dimensional spectrum assembled from the angular modes.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::domain;
use crate::metric::MetricSpec;
use crate::sl_solver::{solve_lowest, BoundaryCondition, EigenPair, ModeProblem};
use crate::{Error, Result};

/// One eigenfunction of the surface. Modes `k ≥ 1` contribute the pair
/// `φ cos kθ`, `φ sin kθ`; both appear as separate entries with multiplicity 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub value: f64,
    pub k: u32,
    pub j: usize,
    pub multiplicity: u8,
    pub invariant: bool,
}

impl SpectrumEntry {
    fn new(value: f64, k: u32, j: usize) -> Self {
        SpectrumEntry { value, k, j, multiplicity: if k == 0 { 1 } else { 2 }, invariant: k == 0 }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumTable {
    /// Ascending by value, ties by `(k, j)`.
    pub entries: Vec<SpectrumEntry>,
    pub metric: MetricSpec,
    pub bc: BoundaryCondition,
    /// Highest angular mode solved.
    pub mode_cutoff: u32,
    /// Eigenvalues solved in mode 0; modes `k ≥ 1` solve half as many.
    pub per_mode: usize,
}

impl SpectrumTable {
    /// The `m`-th eigenvalue counted with multiplicity (1-based).
    pub fn value(&self, m: usize) -> Option<f64> {
        m.checked_sub(1).and_then(|i| self.entries.get(i)).map(|e| e.value)
    }
}

/// Smallest `K` such that every mode `k > K` has all eigenvalues above `budget`,
/// from `λ₁ᵏ ≥ k²·ℓ` with `ℓ` the metric's potential bound.
pub fn mode_truncation(spec: &MetricSpec, budget: f64) -> u32 {
    let ell = spec.potential_lower_bound();
    if !(budget > 0.0) {
        return 0;
    }
    let mut k = (libm::sqrt(budget / ell) as u32).saturating_sub(1);
    while k > 0 && (k as f64) * (k as f64) * ell > budget {
        k -= 1;
    }
    while ((k + 1) as f64) * ((k + 1) as f64) * ell <= budget {
        k += 1;
    }
    k
}

/// Solves batches of independent mode problems. Implementations may run the
/// jobs concurrently; results must come back in job order.
pub trait ModeSolver {
    fn solve(&self, jobs: &[(ModeProblem, usize)]) -> Result<Vec<Vec<EigenPair>>>;
}

/// Solves jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ModeSolver for Sequential {
    fn solve(&self, jobs: &[(ModeProblem, usize)]) -> Result<Vec<Vec<EigenPair>>> {
        jobs.iter().map(|(p, count)| solve_lowest(p, *count)).collect()
    }
}

const INITIAL_CUTOFF: u32 = 4;

/// The first `m` eigenvalues of the surface (with multiplicity); see
/// [`assemble_spectrum_with`].
pub fn assemble_spectrum(spec: &MetricSpec, bc: BoundaryCondition, m: usize, n: usize) -> Result<SpectrumTable> {
    assemble_spectrum_with(spec, bc, m, n, &Sequential)
}

/// Solves modes `0..=K` with `K` iterated to a fixed point of
/// [`mode_truncation`] at the current `m`-th value. The table holds every
/// entry up to that value, so it never splits a multiplicity pair.
pub fn assemble_spectrum_with(
    spec: &MetricSpec,
    bc: BoundaryCondition,
    m: usize,
    n: usize,
    solver: &dyn ModeSolver,
) -> Result<SpectrumTable> {
    if m == 0 {
        return Err(domain("eigenvalue count", 0.0));
    }
    let paired = m.div_ceil(2);
    let mut cutoff = INITIAL_CUTOFF;
    loop {
        let jobs: Vec<(ModeProblem, usize)> =
            (0..=cutoff).map(|k| (ModeProblem::new(spec.clone(), k, bc, n), if k == 0 { m } else { paired })).collect();
        let solved = solver.solve(&jobs)?;
        let mut entries = Vec::new();
        for pairs in &solved {
            for p in pairs {
                let e = SpectrumEntry::new(p.lambda, p.k, p.j);
                entries.push(e);
                if p.k > 0 {
                    entries.push(e);
                }
            }
        }
        entries.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.k.cmp(&b.k)).then(a.j.cmp(&b.j)));
        let top = entries[m - 1].value;
        let needed = mode_truncation(spec, top);
        if needed <= cutoff {
            entries.retain(|e| e.value <= top);
            return Ok(SpectrumTable { entries, metric: spec.clone(), bc, mode_cutoff: cutoff, per_mode: m });
        }
        cutoff = needed;
    }
}

/// `1/(e^{(2j−1)π} − 1)`: below this δ the first `j` invariant eigenvalues of
/// the peaked family lie under every non-invariant one.
pub fn separation_threshold(j: u32) -> f64 {
    1.0 / libm::expm1((2.0 * j as f64 - 1.0) * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `λ_j⁰ ≤ α(2j−1)²π²` (Dirichlet).
    InvariantDirichletUpper,
    /// `μ_j⁰ ≤ 4α(j−1)²π²` (Neumann).
    InvariantNeumannUpper,
    /// `λ₁ᵏ ≥ k²/α`.
    ModeLower,
    /// `μ_j ≤ λ_j` for the full spectra.
    NeumannBelowDirichlet,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::InvariantDirichletUpper => "invariant_dirichlet_upper",
            BoundKind::InvariantNeumannUpper => "invariant_neumann_upper",
            BoundKind::ModeLower => "mode_lower",
            BoundKind::NeumannBelowDirichlet => "neumann_below_dirichlet",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRecord {
    pub kind: BoundKind,
    pub k: u32,
    pub j: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// Distance to violation; positive when the bound holds with room.
    pub margin: f64,
    pub satisfied: bool,
}

/// Relative slack allowed on every bound.
pub const BOUND_SLACK: f64 = 1e-8;

impl BoundRecord {
    fn upper(kind: BoundKind, k: u32, j: usize, lhs: f64, rhs: f64) -> Self {
        Self::finish(kind, k, j, lhs, rhs, rhs - lhs)
    }

    fn lower(kind: BoundKind, k: u32, j: usize, lhs: f64, rhs: f64) -> Self {
        Self::finish(kind, k, j, lhs, rhs, lhs - rhs)
    }

    fn finish(kind: BoundKind, k: u32, j: usize, lhs: f64, rhs: f64, margin: f64) -> Self {
        let satisfied = margin >= -BOUND_SLACK * rhs.abs();
        BoundRecord { kind, k, j, lhs, rhs, margin, satisfied }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BoundsReport {
    pub records: Vec<BoundRecord>,
}

impl BoundsReport {
    pub fn all_satisfied(&self) -> bool {
        self.records.iter().all(|r| r.satisfied)
    }
}

/// Evaluates the closed-form bounds of the peaked family with computed
/// eigenvalues: the invariant upper bound for `bc` (`j ≤ jmax`), the mode
/// lower bound (`1 ≤ k ≤ kmax`), and `μ_j ≤ λ_j` for the first `jmax`
/// eigenvalues of the surface.
pub fn verify_bounds(
    spec: &MetricSpec,
    bc: BoundaryCondition,
    jmax: usize,
    kmax: u32,
    n: usize,
) -> Result<BoundsReport> {
    verify_bounds_with(spec, bc, jmax, kmax, n, &Sequential)
}

pub fn verify_bounds_with(
    spec: &MetricSpec,
    bc: BoundaryCondition,
    jmax: usize,
    kmax: u32,
    n: usize,
    solver: &dyn ModeSolver,
) -> Result<BoundsReport> {
    let alpha = spec.alpha().ok_or(Error::Unsupported("bounds are stated for the peaked family"))?;
    if jmax == 0 {
        return Err(domain("jmax", 0.0));
    }
    let mut jobs = Vec::new();
    jobs.push((ModeProblem::new(spec.clone(), 0, bc, n), jmax));
    for k in 1..=kmax {
        jobs.push((ModeProblem::new(spec.clone(), k, bc, n), 1));
    }
    let solved = solver.solve(&jobs)?;
    let mut records = Vec::new();
    let pi2 = PI * PI;
    for p in &solved[0] {
        let jf = p.j as f64;
        records.push(match bc {
            BoundaryCondition::Dirichlet => {
                let rhs = alpha * (2.0 * jf - 1.0) * (2.0 * jf - 1.0) * pi2;
                BoundRecord::upper(BoundKind::InvariantDirichletUpper, 0, p.j, p.lambda, rhs)
            }
            BoundaryCondition::Neumann => {
                let rhs = 4.0 * alpha * (jf - 1.0) * (jf - 1.0) * pi2;
                BoundRecord::upper(BoundKind::InvariantNeumannUpper, 0, p.j, p.lambda, rhs)
            }
        });
    }
    for pairs in &solved[1..] {
        let p = &pairs[0];
        let kf = p.k as f64;
        records.push(BoundRecord::lower(BoundKind::ModeLower, p.k, 1, p.lambda, kf * kf / alpha));
    }
    let neumann = assemble_spectrum_with(spec, BoundaryCondition::Neumann, jmax, n, solver)?;
    let dirichlet = assemble_spectrum_with(spec, BoundaryCondition::Dirichlet, jmax, n, solver)?;
    for j in 1..=jmax {
        if let (Some(mu), Some(lambda)) = (neumann.value(j), dirichlet.value(j)) {
            records.push(BoundRecord::upper(BoundKind::NeumannBelowDirichlet, 0, j, mu, lambda));
        }
    }
    Ok(BoundsReport { records })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingReport {
    /// Estimated crossing; when `bracketed` is false, the top of the range.
    pub delta: f64,
    /// Whether `f = λ_m⁰ − λ₁¹` changed sign inside the range.
    pub bracketed: bool,
    pub iterations: usize,
    /// `f` at the returned δ.
    pub gap: f64,
}

pub const CROSSING_MAX_ITERATIONS: usize = 40;

fn crossing_gap(m: usize, bc: BoundaryCondition, delta: f64, n: usize, solver: &dyn ModeSolver) -> Result<f64> {
    let spec = MetricSpec::peaked(delta)?;
    let jobs = [(ModeProblem::new(spec.clone(), 0, bc, n), m), (ModeProblem::new(spec, 1, bc, n), 1)];
    let solved = solver.solve(&jobs)?;
    Ok(solved[0][m - 1].lambda - solved[1][0].lambda)
}

/// The δ of the peaked family at which the `m`-th invariant eigenvalue meets
/// the first non-invariant one, by bisection in `log₁₀ δ`.
///
/// If the invariant eigenvalue stays below on the whole range (always the
/// case for `m = 1`), the top of the range is returned with `bracketed` unset:
/// any crossing lies above it.
pub fn crossing_delta(
    m: usize,
    bc: BoundaryCondition,
    range: (f64, f64),
    n: usize,
    tol: f64,
) -> Result<CrossingReport> {
    crossing_delta_with(m, bc, range, n, tol, &Sequential)
}

pub fn crossing_delta_with(
    m: usize,
    bc: BoundaryCondition,
    range: (f64, f64),
    n: usize,
    tol: f64,
    solver: &dyn ModeSolver,
) -> Result<CrossingReport> {
    if m == 0 {
        return Err(domain("eigenvalue index", 0.0));
    }
    if !(tol > 0.0) {
        return Err(domain("tolerance", tol));
    }
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Bracket("delta range must satisfy 0 < lo < hi"));
    }
    let f_hi = crossing_gap(m, bc, hi, n, solver)?;
    if f_hi < 0.0 {
        return Ok(CrossingReport { delta: hi, bracketed: false, iterations: 0, gap: f_hi });
    }
    let f_lo = crossing_gap(m, bc, lo, n, solver)?;
    if f_lo >= 0.0 {
        return Err(Error::Bracket("no sign change: invariant eigenvalue is not below at the range bottom"));
    }
    let (mut a, mut b) = (libm::log10(lo), libm::log10(hi));
    let mut iterations = 0;
    while iterations < CROSSING_MAX_ITERATIONS && libm::exp10(b) - libm::exp10(a) > tol * libm::exp10(b) {
        let mid = 0.5 * (a + b);
        if crossing_gap(m, bc, libm::exp10(mid), n, solver)? < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        iterations += 1;
    }
    let delta = libm::exp10(0.5 * (a + b));
    Ok(CrossingReport { delta, bracketed: true, iterations, gap: crossing_gap(m, bc, delta, n, solver)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_examples() {
        assert_eq!(mode_truncation(&MetricSpec::peaked(1e-3).unwrap(), 10.0), 1);
        assert_eq!(mode_truncation(&MetricSpec::peaked(1.0).unwrap(), 100.0), 12);
        assert_eq!(mode_truncation(&MetricSpec::peaked(0.2).unwrap(), 0.0), 0);
        assert_eq!(mode_truncation(&MetricSpec::flat_disc(), 3.9), 1);
        assert_eq!(mode_truncation(&MetricSpec::flat_disc(), 4.0), 2);
    }

    #[test]
    fn thresholds() {
        assert!((separation_threshold(1) / 4.5166e-2 - 1.0).abs() < 1e-4);
        assert!((separation_threshold(2) / 8.0706e-5 - 1.0).abs() < 1e-4);
        assert!((separation_threshold(3) / 1.5070e-7 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn flat_dirichlet_labels() {
        let t = assemble_spectrum(&MetricSpec::flat_disc(), BoundaryCondition::Dirichlet, 3, 512).unwrap();
        let labels: Vec<(u32, usize, u8)> = t.entries[..3].iter().map(|e| (e.k, e.j, e.multiplicity)).collect();
        assert_eq!(labels, [(0, 1, 1), (1, 1, 2), (1, 1, 2)]);
        assert!(t.entries[0].invariant && !t.entries[1].invariant);
    }

    #[test]
    fn multiplicity_bookkeeping() {
        let spec = MetricSpec::peaked(0.05).unwrap();
        let t = assemble_spectrum(&spec, BoundaryCondition::Neumann, 12, 256).unwrap();
        let top = t.value(12).unwrap();
        let mut direct = 0;
        for k in 0..=t.mode_cutoff {
            let pairs = solve_lowest(&ModeProblem::new(spec.clone(), k, BoundaryCondition::Neumann, 256), 12).unwrap();
            let fold = if k == 0 { 1 } else { 2 };
            direct += fold * pairs.iter().filter(|p| p.lambda <= top).count();
        }
        assert_eq!(direct, t.entries.len());
        assert!(t.entries.windows(2).all(|w| w[0].value <= w[1].value));
    }

    #[test]
    fn bounds_need_peaked_metric() {
        let err = verify_bounds(&MetricSpec::flat_disc(), BoundaryCondition::Dirichlet, 2, 2, 64).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn crossing_range_errors() {
        assert!(matches!(
            crossing_delta(2, BoundaryCondition::Dirichlet, (1e-2, 1e-3), 64, 1e-6),
            Err(Error::Bracket(_))
        ));
        // Invariant eigenvalue already above at the bottom of the range.
        assert!(matches!(
            crossing_delta(2, BoundaryCondition::Dirichlet, (0.5, 1.0), 64, 1e-6),
            Err(Error::Bracket(_))
        ));
    }

    #[test]
    fn ground_state_never_crosses() {
        let r = crossing_delta(1, BoundaryCondition::Dirichlet, (1e-6, 1.0), 128, 1e-6).unwrap();
        assert!(!r.bracketed);
        assert_eq!(r.delta, 1.0);
        assert!(r.gap < 0.0);
    }
}
