#![allow(dead_code)]

/// Bessel function of the first kind by its power series.
pub fn bessel_j(nu: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=nu {
        term *= half / i as f64;
    }
    let q = -half * half;
    let mut sum = term;
    let mut m = 1.0;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) || m < 5.0 {
        term *= q / (m * (m + nu as f64));
        sum += term;
        m += 1.0;
        if m > 500.0 {
            break;
        }
    }
    sum
}

/// Root of `f` in `[a, b]` by bisection; `f(a)` and `f(b)` must differ in sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    assert!(fa * f(b) < 0.0, "no sign change on [{a}, {b}]");
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if (f(mid) > 0.0) == (fa > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// The `s`-th positive zero of `J_ν`, bracketed by scanning in steps of 0.1.
pub fn bessel_zero(nu: u32, s: usize) -> f64 {
    let mut found = 0;
    let mut x = if nu == 0 { 0.1 } else { nu as f64 };
    let mut fx = bessel_j(nu, x);
    loop {
        let y = x + 0.1;
        let fy = bessel_j(nu, y);
        if fx * fy < 0.0 {
            found += 1;
            if found == s {
                return bisect(|t| bessel_j(nu, t), x, y);
            }
        }
        x = y;
        fx = fy;
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
