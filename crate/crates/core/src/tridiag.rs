//! Symmetric tridiagonal pencils `(S, M)` with `M` positive definite.
//!
//! Eigenvalues come from bisection on inertia counts: by Sylvester's law the
//! number of negative pivots in the `LDLᵀ` factorization of `S − σM` equals the
//! number of pencil eigenvalues below `σ`. Eigenvectors come from inverse
//! iteration with a pivoted tridiagonal LU.

use alloc::vec;
use alloc::vec::Vec;

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn zeros(dim: usize) -> Self {
        SymTridiagonal { diag: vec![0.0; dim], off: vec![0.0; dim.saturating_sub(1)] }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    fn dot(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(y).map(|(a, b)| a * b).sum()
    }

    /// Keeps rows and columns `range` only.
    pub fn restrict(&self, range: core::ops::Range<usize>) -> SymTridiagonal {
        let diag = self.diag[range.clone()].to_vec();
        let off = if range.len() > 1 { self.off[range.start..range.end - 1].to_vec() } else { Vec::new() };
        SymTridiagonal { diag, off }
    }
}

/// A generalized eigenproblem `S x = λ M x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub stiffness: SymTridiagonal,
    pub mass: SymTridiagonal,
}

/// Eigensolver failure modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveFailure {
    NoUpperBound,
    InverseIteration,
}

impl Pencil {
    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let s = &self.stiffness;
        let m = &self.mass;
        let n = self.dim();
        let scale = s.diag.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let pivmin = f64::EPSILON * f64::EPSILON * scale;
        let mut count = 0;
        let mut d = 0.0;
        for i in 0..n {
            let a = s.diag[i] - sigma * m.diag[i];
            d = if i == 0 {
                a
            } else {
                let b = s.off[i - 1] - sigma * m.off[i - 1];
                a - b * b / d
            };
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `count` smallest eigenvalues, ascending, each to within `tol`
    /// (absolute, widened to a few ulps of the eigenvalue).
    pub fn lowest_eigenvalues(&self, count: usize, lower: f64, tol: f64) -> Result<Vec<f64>, SolveFailure> {
        let count = count.min(self.dim());
        if count == 0 {
            return Ok(Vec::new());
        }
        let mut lo = lower;
        while self.count_below(lo) > 0 {
            lo = if lo < 0.0 { 2.0 * lo } else { -1.0 };
        }
        let mut hi = 1.0_f64;
        while self.count_below(hi) < count {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(SolveFailure::NoUpperBound);
            }
        }
        let mut values = Vec::with_capacity(count);
        let mut left = lo;
        for j in 1..=count {
            // Invariant: count_below(left) < j <= count_below(right).
            let (mut a, mut b) = (left, hi);
            loop {
                let width = b - a;
                let eps = tol.max(4.0 * f64::EPSILON * a.abs().max(b.abs()));
                if width <= eps {
                    break;
                }
                let mid = a + 0.5 * width;
                if mid <= a || mid >= b {
                    break;
                }
                if self.count_below(mid) >= j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            let value = 0.5 * (a + b);
            values.push(value);
            left = a;
        }
        Ok(values)
    }

    /// Eigenvector for the eigenvalue estimate `lambda`, M-orthogonalized
    /// against `previous` and normalized to unit M-norm.
    pub fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>, SolveFailure> {
        let n = self.dim();
        let scale = lambda.abs().max(1.0);
        let mut shift = lambda;
        let lu = loop {
            if let Some(lu) = TridiagonalLu::factor(&self.stiffness, &self.mass, shift) {
                break lu;
            }
            shift += 64.0 * f64::EPSILON * scale;
        };
        // Deterministic start with components in every direction.
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * libm::sin(1.0 + i as f64)).collect();
        let mut last_residual = f64::INFINITY;
        for _ in 0..8 {
            let rhs = self.mass.mul_vec(&x);
            let mut y = lu.solve(&rhs);
            for v in previous {
                let c = self.mass.dot(v, &y);
                for (yi, vi) in y.iter_mut().zip(v) {
                    *yi -= c * vi;
                }
            }
            let norm = libm::sqrt(self.mass.dot(&y, &y));
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(SolveFailure::InverseIteration);
            }
            y.iter_mut().for_each(|v| *v /= norm);
            let sy = self.stiffness.mul_vec(&y);
            let my = self.mass.mul_vec(&y);
            let residual = sy.iter().zip(&my).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max);
            x = y;
            let converged = residual <= 1e-9 * scale * my.iter().map(|v| v.abs()).fold(0.0, f64::max)
                || residual >= 0.5 * last_residual;
            last_residual = residual;
            if converged {
                break;
            }
        }
        Ok(x)
    }

    /// Solves `(S − σM) x = b` by pivoted LU.
    pub fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Option<Vec<f64>> {
        TridiagonalLu::factor(&self.stiffness, &self.mass, sigma).map(|lu| lu.solve(b))
    }
}

/// LU factorization with partial pivoting of a general tridiagonal matrix.
pub(crate) struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    /// Factors `A − σB` for symmetric tridiagonal `A`, `B`.
    pub(crate) fn factor(a: &SymTridiagonal, b: &SymTridiagonal, sigma: f64) -> Option<Self> {
        let n = a.dim();
        let d: Vec<f64> = (0..n).map(|i| a.diag[i] - sigma * b.diag[i]).collect();
        let off: Vec<f64> = (0..n.saturating_sub(1)).map(|i| a.off[i] - sigma * b.off[i]).collect();
        Self::factor_general(off.clone(), d, off)
    }

    /// Factors the matrix with sub-diagonal `dl`, diagonal `d`, super-diagonal `du`.
    pub(crate) fn factor_general(mut dl: Vec<f64>, mut d: Vec<f64>, mut du: Vec<f64>) -> Option<Self> {
        let n = d.len();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    return None;
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let t = du[i];
                du[i] = d[i + 1];
                d[i + 1] = t - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            return None;
        }
        Some(TridiagonalLu { dl, d, du, du2, swapped })
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let t = x[i];
                x[i] = x[i + 1];
                x[i + 1] = t - self.dl[i] * x[i];
            } else {
                x[i + 1] -= self.dl[i] * x[i];
            }
        }
        if n == 0 {
            return x;
        }
        x[n - 1] /= self.d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.du[i] * x[i + 1] - self.du2[i] * x[i + 2]) / self.d[i];
        }
        x
    }
}
