//! Resonances of the double-barrier Hamiltonian in closed form via Lambert W
//! branches, with an independent Newton refiner on the transcendental
//! resonance equation and the large-alpha expansion.
//!
//! The resonance condition alpha e^{2ika} +- i(2k + i alpha) = 0 has two
//! solution families
//!   k_{1,m} = (i/2a)[W_m(-a alpha e^{a alpha}) - a alpha]   (minus sign)
//!   k_{2,m} = (i/2a)[W_m(+a alpha e^{a alpha}) - a alpha]   (plus sign)
//! and the physical resonances are indexed n = 1, 2, 3, ... with odd n on
//! family 1 (branch -(n+1)/2) and even n on family 2 (branch -n/2).

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::barrier::BarrierParams;
use crate::error::{Error, Result};
use crate::lambertw::{lambert_w, lambert_w_from_ln};
use crate::parallel;

/// Which sign of the resonance equation a root solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    One,
    Two,
}

/// One resonance: momentum, energy = k^2, bookkeeping and residual.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Resonance {
    pub family: Family,
    pub branch_m: i32,
    pub k: Complex64,
    pub energy: Complex64,
    pub residual: f64,
}

/// Physical resonances E_{alpha,n} ordered by n.
#[derive(Debug, Clone)]
pub struct ResonanceTable {
    pub params: BarrierParams,
    pub entries: Vec<Resonance>,
}

/// Large-argument threshold above which a alpha e^{a alpha} must not be
/// formed in doubles; the Lambert value is then computed from ln z directly.
const LOG_ARG_LIMIT: f64 = 700.0;

/// Closed-form resonance momentum k_{family,m}.
pub fn resonance_k(family: Family, m: i32, params: &BarrierParams) -> Result<Complex64> {
    let a = params.a();
    let alpha = params.alpha_finite()?;
    if alpha == 0.0 {
        return Err(Error::Domain("the free Laplacian has no resonances".into()));
    }
    if family == Family::Two && m == 0 {
        return Err(Error::ExcludedRoot);
    }
    let aa = a * alpha;
    let w = if aa > LOG_ARG_LIMIT {
        // z = -+ a alpha e^{a alpha} overflows; pass ln z symbolically.
        // ln(-x) for x > 0 is ln x + i pi (limit from above the cut).
        let ln_z = match family {
            Family::One => Complex64::new(aa + aa.ln(), PI),
            Family::Two => Complex64::new(aa + aa.ln(), 0.0),
        };
        lambert_w_from_ln(m, ln_z)?
    } else {
        let z = match family {
            Family::One => -aa * aa.exp(),
            Family::Two => aa * aa.exp(),
        };
        lambert_w(m, Complex64::new(z, 0.0))?
    };
    Ok(Complex64::i() / (2.0 * a) * (w - aa))
}

/// Modulus of the resonance equation |alpha e^{2ika} -+ i(2k + i alpha)| at k.
pub fn resonance_residual(k: Complex64, family: Family, params: &BarrierParams) -> f64 {
    equation(k, family, params).norm()
}

fn equation(k: Complex64, family: Family, params: &BarrierParams) -> Complex64 {
    let a = params.a();
    let alpha = params.alpha().finite().unwrap_or(f64::INFINITY);
    let e = (2.0 * Complex64::i() * k * a).exp();
    let lin = Complex64::i() * (2.0 * k + Complex64::i() * alpha);
    match family {
        Family::One => alpha * e - lin,
        Family::Two => alpha * e + lin,
    }
}

/// The quadratic form of the resonance equation,
/// e^{4ika} alpha^2 + 4k^2 + 4ik alpha - alpha^2, which factors as the
/// product of the two family equations; exposed for cross-validation.
pub fn equation_quadratic(k: Complex64, params: &BarrierParams) -> Complex64 {
    let a = params.a();
    let alpha = params.alpha().finite().unwrap_or(f64::INFINITY);
    let e4 = (4.0 * Complex64::i() * k * a).exp();
    e4 * alpha * alpha + 4.0 * k * k + 4.0 * Complex64::i() * k * alpha - alpha * alpha
}

/// Full resonance record for index n (Lemma-style family/branch assignment).
pub fn resonance_energy(n: u32, params: &BarrierParams) -> Result<Resonance> {
    if n == 0 {
        return Err(Error::Domain("resonance index n must be >= 1".into()));
    }
    let (family, m) = if n % 2 == 1 {
        (Family::One, -((n as i32 + 1) / 2))
    } else {
        (Family::Two, -(n as i32 / 2))
    };
    let k = resonance_k(family, m, params)?;
    let alpha = params.alpha_finite()?;
    Ok(Resonance {
        family,
        branch_m: m,
        k,
        energy: k * k,
        residual: resonance_residual(k, family, params) / alpha.max(1.0),
    })
}

/// Resonance table for n = 1..=n_max (parallel over n).
pub fn resonance_table(n_max: u32, params: &BarrierParams) -> Result<ResonanceTable> {
    let ns: Vec<u32> = (1..=n_max).collect();
    let entries = parallel::map(&ns, |&n| resonance_energy(n, params));
    let entries: Result<Vec<_>> = entries.into_iter().collect();
    Ok(ResonanceTable { params: *params, entries: entries? })
}

/// Independent Newton refiner on the family equation; verifies the
/// Lambert-W closed form.
pub fn refine_resonance_newton(
    k_seed: Complex64,
    family: Family,
    params: &BarrierParams,
) -> Result<Complex64> {
    let a = params.a();
    let alpha = params.alpha_finite()?;
    let mut k = k_seed;
    let scale = alpha.max(1.0);
    for _ in 0..100 {
        let f = equation(k, family, params);
        if f.norm() <= 1e-12 * scale {
            return Ok(k);
        }
        let e = (2.0 * Complex64::i() * k * a).exp();
        let fp = match family {
            Family::One => 2.0 * Complex64::i() * a * alpha * e - 2.0 * Complex64::i(),
            Family::Two => 2.0 * Complex64::i() * a * alpha * e + 2.0 * Complex64::i(),
        };
        k -= f / fp;
        if !k.re.is_finite() || !k.im.is_finite() {
            return Err(Error::Convergence(100, f64::INFINITY));
        }
    }
    Err(Error::Convergence(100, equation(k, family, params).norm()))
}

/// Remark-1 large-alpha expansion of E_{alpha,n} (the bracketed-square form).
pub fn resonance_large_alpha(n: u32, params: &BarrierParams) -> Complex64 {
    let a = params.a();
    let alpha = params.alpha().finite().unwrap_or(f64::INFINITY);
    let aa = a * alpha;
    let npi = n as f64 * PI;
    let re = npi / (2.0 * a) * (1.0 - 1.0 / aa + 1.0 / (aa * aa));
    let im = -1.0 / (2.0 * a) * ((aa.ln() / aa).powi(2) + npi * npi / (2.0 * aa * aa));
    let bracket = Complex64::new(re, im);
    bracket * bracket
}

/// The simplified leading form (n pi/2a)^2 - i (n pi/2a^2)(ln(a alpha)/(a alpha))^2.
pub fn resonance_large_alpha_simple(n: u32, params: &BarrierParams) -> Complex64 {
    let a = params.a();
    let alpha = params.alpha().finite().unwrap_or(f64::INFINITY);
    let aa = a * alpha;
    let npi = n as f64 * PI;
    Complex64::new(
        (npi / (2.0 * a)).powi(2),
        -npi / (2.0 * a * a) * (aa.ln() / aa).powi(2),
    )
}
