//! Gauss-Legendre quadrature for complex-valued integrands on real intervals.

use num_complex::Complex64;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P'_n(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl15() -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CACHE.get_or_init(|| gauss_legendre(15))
}

fn gl30() -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CACHE.get_or_init(|| gauss_legendre(30))
}

/// Fixed-order Gauss-Legendre rule over [a, b].
pub fn integrate_gl<F>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut sum = Complex64::new(0.0, 0.0);
    for (x, w) in rule.0.iter().zip(rule.1.iter()) {
        sum += *w * f(c + h * x);
    }
    sum * h
}

struct Adaptive<'a, F> {
    f: &'a F,
    tol: f64,
    max_depth: usize,
    worst: f64,
}

impl<F: Fn(f64) -> Complex64> Adaptive<'_, F> {
    fn go(&mut self, a: f64, b: f64, coarse: Complex64, depth: usize) -> Complex64 {
        let mid = 0.5 * (a + b);
        let left = integrate_gl(self.f, a, mid, gl15());
        let right = integrate_gl(self.f, mid, b, gl15());
        let fine = left + right;
        let err = (fine - coarse).norm();
        if err <= self.tol * (1.0 + fine.norm()) || depth >= self.max_depth {
            if depth >= self.max_depth {
                self.worst = self.worst.max(err / (1.0 + fine.norm()));
            }
            fine
        } else {
            self.go(a, mid, left, depth + 1) + self.go(mid, b, right, depth + 1)
        }
    }
}

/// Adaptive quadrature over [a, b] with forced subdivision at `splits`
/// (integrand kinks, e.g. the |x -+ a| corners).
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, splits: &[f64], tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(b > a) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut pts: Vec<f64> = vec![a];
    let mut s: Vec<f64> = splits.iter().copied().filter(|&x| x > a && x < b).collect();
    s.sort_by(|p, q| p.partial_cmp(q).unwrap());
    pts.extend(s);
    pts.push(b);
    let mut total = Complex64::new(0.0, 0.0);
    let mut ad = Adaptive { f: &f, tol, max_depth: 28, worst: 0.0 };
    for w in pts.windows(2) {
        let coarse = integrate_gl(&f, w[0], w[1], gl15());
        total += ad.go(w[0], w[1], coarse, 0);
    }
    if ad.worst > 0.0 {
        return Err(Error::Quadrature { wanted: tol, got: ad.worst });
    }
    Ok(total)
}

/// Same as [`integrate_adaptive`] but with a higher-order base rule; used for
/// smooth oscillatory integrands where order beats subdivision.
pub fn integrate_panels<F>(f: F, edges: &[f64]) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let rule = gl30();
    let mut total = Complex64::new(0.0, 0.0);
    for w in edges.windows(2) {
        total += integrate_gl(&f, w[0], w[1], rule);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // degree 15 is exact for 8 nodes
        let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14, "got {s}");
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kink() {
        let f = |x: f64| Complex64::new(x.abs().sqrt(), 0.0);
        let v = integrate_adaptive(f, -1.0, 1.0, &[0.0], 1e-12).unwrap();
        assert!((v.re - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn adaptive_oscillatory() {
        let f = |x: f64| (Complex64::i() * 40.0 * x).exp();
        let v = integrate_adaptive(f, 0.0, 1.0, &[], 1e-12).unwrap();
        let exact = ((Complex64::i() * 40.0).exp() - 1.0) / (Complex64::i() * 40.0);
        assert!((v - exact).norm() < 1e-10);
    }
}
