use alloc::vec::Vec;

use crate::{Error, Result};

/// Natural cubic spline through strictly increasing abscissae.
#[derive(Debug, Clone)]
pub(crate) struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl CubicSpline {
    pub(crate) fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::InvalidTable("column lengths differ"));
        }
        if n < 2 {
            return Err(Error::InvalidTable("need at least two samples"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTable("abscissae must be strictly increasing"));
        }
        let mut m = alloc::vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior knots.
            let k = n - 2;
            let mut c = alloc::vec![0.0; k];
            let mut d = alloc::vec![0.0; k];
            for i in 0..k {
                let h0 = x[i + 1] - x[i];
                let h1 = x[i + 2] - x[i + 1];
                let diag = 2.0 * (h0 + h1);
                let rhs = 6.0 * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0);
                if i == 0 {
                    c[i] = h1 / diag;
                    d[i] = rhs / diag;
                } else {
                    let denom = diag - h0 * c[i - 1];
                    c[i] = h1 / denom;
                    d[i] = (rhs - h0 * d[i - 1]) / denom;
                }
            }
            m[k] = d[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = d[i] - c[i] * m[i + 2];
            }
        }
        Ok(CubicSpline { x, y, m })
    }

    pub(crate) fn len(&self) -> usize {
        self.x.len()
    }

    pub(crate) fn knots(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    pub(crate) fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_lines() {
        let x: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let s = CubicSpline::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((s.eval(*xi) - yi).abs() < 1e-14);
        }
        assert!((s.eval(0.55) - 3.65).abs() < 1e-14);
    }

    #[test]
    fn smooth_function_is_close() {
        let x: Vec<f64> = (0..201).map(|i| i as f64 / 200.0).collect();
        let y: Vec<f64> = x.iter().map(|v| libm::cos(*v)).collect();
        let s = CubicSpline::new(x, y).unwrap();
        assert!((s.eval(0.3333) - libm::cos(0.3333)).abs() < 1e-8);
    }

    #[test]
    fn rejects_unsorted() {
        assert!(CubicSpline::new(alloc::vec![0.0, 0.5, 0.5], alloc::vec![1.0, 1.0, 1.0]).is_err());
    }
}
