//! Finite elements for one angular mode of the separated problem.
//!
//! After separation `u = φ(r)·cos(kθ)` and the change to the area coordinate
//! `z`, the mode-`k` eigenvalues are the critical values of
//!
//! ```text
//! (1/c²) ∫ w ψ'² dz + k² ∫ ψ²/w dz   over   ∫ ψ² dz,      w = r²p.
//! ```
//!
//! Near `z = 0` the regular solution behaves like `ψ ~ z^{k/2}`, which is not
//! smooth for odd `k`. We therefore write `ψ = w^{k/2}·χ` with `χ` piecewise
//! linear on the uniform grid `zᵢ = i/n` and integrate the cross term by parts:
//!
//! ```text
//! E(χ) = (1/c²) ∫ w^{k+1} χ'² + ∫ V w^{k−1} χ² + (k/c) w(1)^k (1+β(1)) χ(1)²
//! M(χ) = ∫ w^k χ²
//! V    = −k² β(2+β) + k w K,        β = r (log p)'/2,
//! ```
//!
//! where `K` is the Gaussian curvature. The integrands are smooth, the scheme is
//! second order for every `k`, and `k = 0` reduces to plain P1 elements in ψ.
//! Coefficients are sampled at element midpoints (never at `z = 0`); the mass
//! matrix is the average of the lumped and consistent element masses.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::domain;
use crate::metric::MetricSpec;
use crate::tridiag::{Pencil, SymTridiagonal};
use crate::{Error, Result};

/// Condition at the outer boundary `r = 1`. The inner condition is fixed by the
/// mode: natural for `k = 0`, `ψ(0) = 0` for `k ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        }
    }
}

/// Smallest grid accepted by [`solve_lowest`].
pub const MIN_INTERVALS: usize = 16;

/// One angular mode on one grid.
#[derive(Debug, Clone)]
pub struct ModeProblem {
    pub spec: MetricSpec,
    pub k: u32,
    pub bc: BoundaryCondition,
    /// Number of grid intervals in `z`.
    pub n: usize,
}

impl ModeProblem {
    pub fn new(spec: MetricSpec, k: u32, bc: BoundaryCondition, n: usize) -> Self {
        ModeProblem { spec, k, bc, n }
    }
}

/// Assembled pencil of a mode together with the node bookkeeping needed to map
/// coefficient vectors back to ψ.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    pub pencil: Pencil,
    /// Grid nodes carrying unknowns.
    pub free: Range<usize>,
    /// `w(zᵢ)^{k/2}` at every node.
    pub node_weight: Vec<f64>,
    pub k: u32,
    pub n: usize,
    pub bc: BoundaryCondition,
}

impl ModeOperator {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Embeds a free-node vector into all `n + 1` nodes (eliminated nodes are zero).
    pub fn embed(&self, x: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n + 1];
        full[self.free.clone()].copy_from_slice(x);
        full
    }
}

const MASS_DIAG: f64 = 5.0 / 12.0;
const MASS_OFF: f64 = 1.0 / 12.0;

/// Builds the stiffness/mass pencil of `problem`.
pub fn assemble(problem: &ModeProblem) -> Result<ModeOperator> {
    let ModeProblem { spec, k, bc, n } = problem;
    let (k, n) = (*k, *n);
    if n < 2 {
        return Err(Error::Assembly { k, n, reason: "need at least two intervals" });
    }
    let h = 1.0 / n as f64;
    let c = spec.half_area();
    let kf = k as f64;
    let mut stiffness = SymTridiagonal::zeros(n + 1);
    let mut mass = SymTridiagonal::zeros(n + 1);
    for e in 0..n {
        let mid = (e as f64 + 0.5) * h;
        let coeff = spec.mode_coefficients(mid)?;
        let w = coeff.w;
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::Assembly { k, n, reason: "coefficient w vanishes at an interior midpoint" });
        }
        let wk = libm::pow(w, kf);
        if !(wk > 0.0) {
            return Err(Error::Assembly { k, n, reason: "mode weight underflows near the origin" });
        }
        let s = w * wk / (h * c * c);
        stiffness.diag[e] += s;
        stiffness.diag[e + 1] += s;
        stiffness.off[e] -= s;
        if k > 0 {
            let v = -kf * kf * coeff.beta * (2.0 + coeff.beta) + kf * coeff.wk;
            let q = 0.25 * v * (wk / w) * h;
            stiffness.diag[e] += q;
            stiffness.diag[e + 1] += q;
            stiffness.off[e] += q;
        }
        let mw = h * wk;
        mass.diag[e] += MASS_DIAG * mw;
        mass.diag[e + 1] += MASS_DIAG * mw;
        mass.off[e] += MASS_OFF * mw;
    }
    if k > 0 {
        let edge = spec.mode_coefficients(1.0)?;
        stiffness.diag[n] += kf / c * libm::pow(edge.w, kf) * (1.0 + edge.beta);
    }
    let free = match bc {
        BoundaryCondition::Dirichlet => 0..n,
        BoundaryCondition::Neumann => 0..n + 1,
    };
    let node_weight = (0..=n)
        .map(|i| if k == 0 { Ok(1.0) } else { spec.w_value(i as f64 * h).map(|w| libm::pow(w, 0.5 * kf)) })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeOperator {
        pencil: Pencil { stiffness: stiffness.restrict(free.clone()), mass: mass.restrict(free.clone()) },
        free,
        node_weight,
        k,
        n,
        bc: *bc,
    })
}

/// One eigenvalue of a mode with its radial eigenfunction.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    pub k: u32,
    /// 1-based index within the mode.
    pub j: usize,
    pub bc: BoundaryCondition,
    z: Vec<f64>,
    r: Vec<f64>,
    psi: Vec<f64>,
    chi: Vec<f64>,
    metric: MetricSpec,
}

impl EigenPair {
    /// Number of grid intervals.
    pub fn n(&self) -> usize {
        self.z.len() - 1
    }

    pub fn z_nodes(&self) -> &[f64] {
        &self.z
    }

    /// `r(zᵢ)` at the grid nodes.
    pub fn r_nodes(&self) -> &[f64] {
        &self.r
    }

    /// ψ at the uniform `z` nodes, normalized by `∫ψ² dz = 1` (trapezoid).
    pub fn psi_z(&self) -> &[f64] {
        &self.psi
    }

    /// `(rᵢ, φ(rᵢ))` on the mapped grid `rᵢ = r(zᵢ)`.
    pub fn phi_r(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.r.iter().copied().zip(self.psi.iter().copied())
    }

    /// Nodal values of `χ = ψ/w^{k/2}`, the piecewise-linear factor.
    pub fn coefficients(&self) -> &[f64] {
        &self.chi
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    /// The finite element function `ψ(z) = w(z)^{k/2}·χ(z)`.
    pub fn psi_at(&self, z: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&z) {
            return Err(domain("area coordinate", z));
        }
        let n = self.n();
        let x = z * n as f64;
        let e = (libm::floor(x) as usize).min(n - 1);
        let t = x - e as f64;
        let chi = (1.0 - t) * self.chi[e] + t * self.chi[e + 1];
        if self.k == 0 {
            return Ok(chi);
        }
        let w = self.metric.w_value(z)?;
        Ok(libm::pow(w, 0.5 * self.k as f64) * chi)
    }

    /// Sign changes of the nodal samples, ignoring samples with magnitude at
    /// most `noise`.
    pub fn sign_changes(&self, noise: f64) -> usize {
        sign_changes(&self.psi, noise)
    }
}

pub(crate) fn sign_changes(values: &[f64], noise: f64) -> usize {
    let mut last = 0.0_f64;
    let mut changes = 0;
    for &v in values.iter().filter(|v| v.abs() > noise) {
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = v;
    }
    changes
}

/// Trapezoid rule on the uniform grid of `n = values.len() - 1` intervals.
pub(crate) fn trapezoid(values: &[f64]) -> f64 {
    let n = values.len() - 1;
    let inner: f64 = values[1..n].iter().sum();
    (inner + 0.5 * (values[0] + values[n])) / n as f64
}

/// The `count` smallest eigenpairs of a mode, in increasing order.
pub fn solve_lowest(problem: &ModeProblem, count: usize) -> Result<Vec<EigenPair>> {
    let n = problem.n;
    if n < MIN_INTERVALS {
        return Err(domain("grid intervals", n as f64));
    }
    if count == 0 || count > n / 4 {
        return Err(Error::Resolution { n, count });
    }
    let op = assemble(problem)?;
    let failure = |_| Error::NoConvergence { k: problem.k, n };
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut lambdas = Vec::with_capacity(count);
    let natural_start = problem.k == 0 && problem.bc == BoundaryCondition::Neumann;
    if natural_start {
        // Constants span the kernel exactly: every row of S sums to zero.
        let ones = vec![1.0; op.dim()];
        let norm = libm::sqrt(op.pencil.mass.mul_vec(&ones).iter().sum::<f64>());
        vectors.push(ones.iter().map(|v| v / norm).collect());
        lambdas.push(0.0);
    }
    let values = op.pencil.lowest_eigenvalues(count, -1.0, 1e-12).map_err(failure)?;
    for &lambda in values.iter().skip(lambdas.len()) {
        let v = op.pencil.eigenvector(lambda, &vectors).map_err(failure)?;
        vectors.push(v);
        lambdas.push(lambda);
    }
    let h = 1.0 / n as f64;
    let z: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let r = z.iter().map(|&zi| problem.spec.r_value(zi)).collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::with_capacity(count);
    for (idx, (lambda, v)) in lambdas.into_iter().zip(vectors).enumerate() {
        let mut chi = op.embed(&v);
        let mut psi: Vec<f64> = chi.iter().zip(&op.node_weight).map(|(c, g)| c * g).collect();
        let sq: Vec<f64> = psi.iter().map(|v| v * v).collect();
        let norm = libm::sqrt(trapezoid(&sq));
        let peak = psi.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let first = psi.iter().copied().find(|v| v.abs() > 1e-14 * peak).unwrap_or(1.0);
        let scale = if first < 0.0 { -1.0 / norm } else { 1.0 / norm };
        chi.iter_mut().for_each(|v| *v *= scale);
        psi.iter_mut().for_each(|v| *v *= scale);
        pairs.push(EigenPair {
            lambda,
            k: problem.k,
            j: idx + 1,
            bc: problem.bc,
            z: z.clone(),
            r: r.clone(),
            psi,
            chi,
            metric: problem.spec.clone(),
        });
    }
    Ok(pairs)
}

/// A radial function sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSamples {
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
}

/// `φ(r) = ψ(z(r))` on `samples` uniformly spaced radii in `[0, 1]`.
pub fn eigenfunction_in_r(pair: &EigenPair, spec: &MetricSpec, samples: usize) -> Result<RadialSamples> {
    if !pair.metric.same_metric(spec) {
        return Err(Error::Usage("eigenpair was computed for a different metric"));
    }
    if samples < 2 {
        return Err(domain("radial samples", samples as f64));
    }
    let r: Vec<f64> = (0..samples).map(|i| i as f64 / (samples - 1) as f64).collect();
    let phi = r.iter().map(|&ri| spec.z_of_r(ri).and_then(|z| pair.psi_at(z))).collect::<Result<Vec<_>>>()?;
    Ok(RadialSamples { r, phi })
}
