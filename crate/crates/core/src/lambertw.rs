//! All branches of the complex Lambert W function.
//!
//! W_m(z) is the m-th branch of the inverse of w -> w e^w. Evaluation uses a
//! branch-aware seed (power series near 0, Puiseux corner series near the
//! branch point -1/e, logarithmic asymptotic expansion elsewhere) refined by
//! Halley iteration on w e^w - z.
//!
//! Branch cuts follow the usual convention: (-inf, -1/e] for W_0, the double
//! cut (-inf, -1/e] and (-inf, 0] for W_{+-1}, and (-inf, 0] for |m| >= 2.
//! Values on a cut are the limit from above (counterclockwise continuity),
//! which is what the principal complex logarithm gives.

use num_complex::Complex64;
use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

const MAX_HALLEY: usize = 64;
const RTOL: f64 = 1e-13;
const ATOL: f64 = 1e-300;

/// Unsigned Stirling number of the first kind (cycle count), via the
/// recurrence s(n+1, k) = n s(n, k) + s(n, k-1).
pub fn stirling_cycle(n: u32, k: u32) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    if n == 0 {
        return Ok(1); // s(0,0)
    }
    // row-by-row table; only rows up to n are needed
    let mut row: Vec<u128> = vec![0; n as usize + 1];
    row[0] = 1; // s(0,0)
    for i in 0..n {
        let mut next = vec![0u128; n as usize + 1];
        for j in 1..=(i + 1) as usize {
            let a = row[j]
                .checked_mul(i as u128)
                .ok_or_else(|| Error::Overflow(format!("stirling_cycle({n},{k})")))?;
            next[j] = a
                .checked_add(row[j - 1])
                .ok_or_else(|| Error::Overflow(format!("stirling_cycle({n},{k})")))?;
        }
        row = next;
    }
    Ok(row[k as usize])
}

/// Partial sum of the principal-branch Taylor series sum (-n)^{n-1}/n! z^n.
///
/// Only valid inside the radius of convergence |z| < 1/e.
pub fn lambert_w_series_principal(z: Complex64, n_terms: usize) -> Result<Complex64> {
    if z.norm() >= 1.0 / E {
        return Err(Error::Domain(format!(
            "|z| = {:.6} is outside the series radius of convergence 1/e",
            z.norm()
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut coeff = 1.0f64; // (-n)^{n-1}/n! ; n = 1 gives 1
    let mut zn = z;
    for n in 1..=n_terms {
        sum += coeff * zn;
        zn *= z;
        // c_{n+1}/c_n = -( (n+1)/n )^{n-1} * (n+1)/(n+1)! * ... worked out:
        // c_n = (-n)^{n-1}/n!  =>  c_{n+1}/c_n = -((n+1)/n)^{n-1} * (n+1)/(n+1)
        let nf = n as f64;
        coeff *= -((nf + 1.0) / nf).powi(n as i32 - 1);
    }
    Ok(sum)
}

/// Truncation of the large-argument expansion
/// W_m(z) ~ L - ln L + sum_{k<=kmax, 1<=j<=jmax} c_kj ln^j(L) / L^{j+k},
/// with L = ln z + 2 pi i m and c_kj = (-1)^k / j! * s(k+j, k+1).
pub fn lambert_w_asymptotic_seed(m: i32, z: Complex64, kmax: u32, jmax: u32) -> Result<Complex64> {
    let l = z.ln() + Complex64::new(0.0, 2.0 * PI * m as f64);
    lambert_w_asymptotic_from_log(l, kmax, jmax)
}

/// Same expansion but taking L = ln z + 2 pi i m directly; usable when z
/// itself would overflow a double.
pub fn lambert_w_asymptotic_from_log(l: Complex64, kmax: u32, jmax: u32) -> Result<Complex64> {
    if l.norm() == 0.0 {
        return Err(Error::Domain("ln(z) + 2 pi i m vanishes".into()));
    }
    let ll = l.ln();
    let mut w = l - ll;
    let mut fact_j = 1.0f64;
    for j in 1..=jmax {
        fact_j *= j as f64;
        for k in 0..=kmax {
            let s = stirling_cycle(k + j, k + 1)? as f64;
            let c = if k % 2 == 0 { s / fact_j } else { -s / fact_j };
            w += c * ll.powi(j as i32) / l.powi((j + k) as i32);
        }
    }
    Ok(w)
}

/// Puiseux (square-root) corner expansion about the branch point z = -1/e.
/// `sign` selects the sheet: +1 for W_0, -1 for the W_{+-1} side that meets
/// the branch point.
fn branch_point_series(z: Complex64, sign: f64) -> Complex64 {
    let p = (2.0 * (E * z + 1.0)).sqrt() * sign;
    // W = -1 + p - p^2/3 + 11 p^3/72 - 43 p^4/540 + ...
    -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))))
}

fn halley(mut w: Complex64, z: Complex64) -> Result<Complex64> {
    let tol = RTOL * z.norm().max(ATOL);
    for _ in 0..MAX_HALLEY {
        let ew = w.exp();
        let f = w * ew - z;
        if f.norm() <= tol {
            return Ok(w);
        }
        let fp = ew * (w + 1.0);
        let denom = fp - (w + 2.0) * f / (2.0 * w + 2.0);
        let step = f / denom;
        w -= step;
    }
    let res = (w * w.exp() - z).norm();
    if res <= tol * 10.0 {
        // accept marginal convergence near branch cuts
        return Ok(w);
    }
    Err(Error::Convergence(MAX_HALLEY, res))
}

fn seed(m: i32, z: Complex64) -> Result<Complex64> {
    let near_bp = (z + 1.0 / E).norm() < 0.3;
    match m {
        0 => {
            if near_bp {
                Ok(branch_point_series(z, 1.0))
            } else if z.norm() < 0.3 {
                lambert_w_series_principal(z, 12)
            } else if z.ln().norm() > 1.7 {
                lambert_w_asymptotic_seed(0, z, 2, 2)
            } else {
                // moderate |z|: ln(1+z) tracks W_0 well enough for Halley
                Ok((z + 1.0).ln())
            }
        }
        -1 => {
            if near_bp && (z.im > 0.0 || (z.im == 0.0 && z.re > -1.0 / E)) {
                Ok(branch_point_series(z, -1.0))
            } else if z.im == 0.0 && z.re < 0.0 && z.re > -1.0 / E {
                // real segment (-1/e, 0): W_{-1} is real, seed from the real
                // asymptotic W_{-1}(x) ~ ln(-x) - ln(-ln(-x))
                let l = (-z.re).ln();
                Ok(Complex64::new(l - (-l).ln(), 0.0))
            } else {
                lambert_w_asymptotic_seed(-1, z, 2, 2)
            }
        }
        1 => {
            if near_bp && z.im < 0.0 {
                Ok(branch_point_series(z, -1.0))
            } else {
                lambert_w_asymptotic_seed(1, z, 2, 2)
            }
        }
        _ => lambert_w_asymptotic_seed(m, z, 2, 2),
    }
}

/// W_m(z) for any integer branch m, to near machine precision
/// (back-substitution residual |w e^w - z| <= 1e-13 |z|).
pub fn lambert_w(m: i32, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return if m == 0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::BranchPoint(m))
        };
    }
    // exact branch-point value shared by W_0 and W_{-1}
    if (z + 1.0 / E).norm() < 1e-300 && (m == 0 || m == -1) {
        return Ok(Complex64::new(-1.0, 0.0));
    }
    // beyond ~1e150 the Halley residual w e^w - z overflows in complex
    // division; the logarithmic form is exact there and loses nothing
    if z.norm() > 1e150 {
        return lambert_w_from_ln(m, z.ln());
    }
    halley(seed(m, z)?, z)
}

/// W_m(e^{ln_z}) where only ln_z is representable (e.g. z = a alpha e^{a alpha}
/// with a alpha large). Solves w + Log w = ln_z + 2 pi i m by Newton, valid in
/// the large-|L| regime where that relation holds on branch m.
pub fn lambert_w_from_ln(m: i32, ln_z: Complex64) -> Result<Complex64> {
    let l = ln_z + Complex64::new(0.0, 2.0 * PI * m as f64);
    let mut w = lambert_w_asymptotic_from_log(l, 2, 2)?;
    for _ in 0..MAX_HALLEY {
        let f = w + w.ln() - l;
        if f.norm() <= 1e-15 * l.norm().max(1.0) {
            return Ok(w);
        }
        w -= f / (1.0 + 1.0 / w);
    }
    let res = (w + w.ln() - l).norm();
    Err(Error::Convergence(MAX_HALLEY, res))
}
