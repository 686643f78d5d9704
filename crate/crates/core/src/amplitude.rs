//! The momentum-space amplitude F_alpha(k) = k [G_0(k) + g(k) G_r(k)] for a
//! pair of compactly supported test functions.
//!
//! G_0 is the free-resolvent double integral and G_r collects the barrier
//! contribution through the quartet of one-dimensional integrals
//! ell_1, ell_2, m_1, m_2. Closed forms are used when the test functions are
//! box eigenstates; everything else goes through adaptive quadrature with
//! forced splits at the kinks x = -+a of |x -+ a|.
//!
//! For psi = phi = psi_1 the whole amplitude collapses to
//!   F_alpha(k) = (4a/Delta^2) [ -a k Delta + 2 i pi^2 k (1 + E) / D ],
//! Delta = 4k^2a^2 - pi^2, E = e^{2ika}, D = (2k + i alpha) + i alpha E,
//! which makes F_alpha(0) = 0 manifest and confines the poles to the zeros
//! of D (the first resonance family).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::barrier::{BarrierParams, EigenstateInf};
use crate::error::{Error, Result};
use crate::quad::integrate_adaptive;
use crate::resolvent::{g_denominator, g_of_k};

/// Tolerance for the one-dimensional quartet quadratures.
const QUAD_TOL: f64 = 1e-11;
/// Tolerance for the 2-D free-kernel quadrature (outer integral).
const QUAD2D_TOL: f64 = 1e-9;

/// A real-valued test function of compact support.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// A Dirichlet box eigenstate psi_n (support [-a, a]).
    Eigenstate(EigenstateInf),
    /// Tabulated samples with local polynomial interpolation.
    Sampled(SampledFunction),
}

/// Samples (x_i, v_i) with strictly increasing x_i; the function is the
/// continuous piecewise-Lagrange interpolant of the given order inside
/// [x_0, x_last] and zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    xs: Vec<f64>,
    vals: Vec<f64>,
    order: usize,
}

impl SampledFunction {
    pub fn new(xs: Vec<f64>, vals: Vec<f64>, order: usize) -> Result<Self> {
        if xs.len() != vals.len() {
            return Err(Error::Domain("positions/values length mismatch".into()));
        }
        if xs.len() < 2 {
            return Err(Error::Domain("need at least two samples".into()));
        }
        if order == 0 {
            return Err(Error::Domain("interpolation order must be >= 1".into()));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain(format!(
                    "sample positions must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if xs.iter().any(|v| !v.is_finite()) || vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("samples must be finite".into()));
        }
        let order = order.min(xs.len() - 1);
        Ok(Self { xs, vals, order })
    }

    /// Parse a two-column whitespace-delimited text table; `#` starts a
    /// comment, blank lines are skipped.
    pub fn from_text(text: &str, order: usize) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vals = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64> {
                tok.ok_or_else(|| {
                    Error::Domain(format!("line {}: expected two columns", lineno + 1))
                })?
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("line {}: not a number", lineno + 1)))
            };
            let x = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Domain(format!(
                    "line {}: expected exactly two columns",
                    lineno + 1
                )));
            }
            xs.push(x);
            vals.push(v);
        }
        Self::new(xs, vals, order)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Interpolated value; zero outside the support. The interpolating
    /// polynomial is chosen per sample interval (through order+1 nearby
    /// nodes), which keeps the interpolant continuous at the nodes.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        let n = self.xs.len();
        // interval index i with xs[i] <= x < xs[i+1]
        let i = match self.xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(j) => j.min(n - 2),
            Err(j) => j.saturating_sub(1).min(n - 2),
        };
        let w = self.order + 1; // window size
        let start = i.saturating_sub((self.order - 1) / 2).min(n - w);
        // Lagrange interpolation over xs[start..start+w]
        let mut acc = 0.0;
        for j in start..start + w {
            let mut term = self.vals[j];
            for l in start..start + w {
                if l != j {
                    term *= (x - self.xs[l]) / (self.xs[j] - self.xs[l]);
                }
            }
            acc += term;
        }
        acc
    }
}

/// Parity of a test function, when known a priori.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Unknown,
}

impl TestFunction {
    pub fn eigenstate(n: u32, params: &BarrierParams) -> Result<Self> {
        Ok(TestFunction::Eigenstate(EigenstateInf::new(n, params)?))
    }

    /// A Gaussian envelope amp * e^{-b x^2} centered at `center`, truncated at
    /// 12 standard deviations (truncation error ~ e^{-72}) and tabulated for
    /// the sampled-function path.
    pub fn gaussian(center: f64, amp: f64, b: f64, n_samples: usize, order: usize) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::Domain(format!("gaussian width b = {b} must be > 0")));
        }
        let sigma = (0.5 / b).sqrt();
        let half = 12.0 * sigma;
        let n = n_samples.max(order + 1).max(8);
        let mut xs = Vec::with_capacity(n);
        let mut vals = Vec::with_capacity(n);
        for i in 0..n {
            let x = center - half + 2.0 * half * i as f64 / (n - 1) as f64;
            xs.push(x);
            vals.push(amp * (-b * (x - center) * (x - center)).exp());
        }
        Ok(TestFunction::Sampled(SampledFunction::new(xs, vals, order)?))
    }

    pub fn support(&self, params: &BarrierParams) -> (f64, f64) {
        match self {
            TestFunction::Eigenstate(_) => (-params.a(), params.a()),
            TestFunction::Sampled(s) => s.support(),
        }
    }

    pub fn eval(&self, params: &BarrierParams, x: f64) -> f64 {
        match self {
            TestFunction::Eigenstate(s) => crate::barrier::eigenstate_eval(s, params, x),
            TestFunction::Sampled(s) => s.eval(x),
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            TestFunction::Eigenstate(s) => {
                if s.is_even_parity() {
                    Parity::Even
                } else {
                    Parity::Odd
                }
            }
            TestFunction::Sampled(_) => Parity::Unknown,
        }
    }

    /// L2 norm by quadrature.
    pub fn norm_l2(&self, params: &BarrierParams) -> Result<f64> {
        let (lo, hi) = self.support(params);
        let v = integrate_adaptive(
            |x| Complex64::new(self.eval(params, x).powi(2), 0.0),
            lo,
            hi,
            &[-params.a(), params.a()],
            QUAD_TOL,
        )?;
        Ok(v.re.sqrt())
    }
}

/// The four one-dimensional amplitudes of the barrier term:
/// ell_1 = int e^{ik|x+a|} conj(psi) dx, ell_2 = int e^{ik|x-a|} conj(psi) dx,
/// and m_1, m_2 the same integrals with phi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeQuartet {
    pub ell1: Complex64,
    pub ell2: Complex64,
    pub m1: Complex64,
    pub m2: Complex64,
}

/// sin(q a)/q continued through q = 0 (Taylor for small |q a|).
fn sinc_a(q: Complex64, a: f64) -> Complex64 {
    let qa = q * a;
    if qa.norm() < 1e-4 {
        let q2 = qa * qa;
        a * (1.0 - q2 / 6.0 + q2 * q2 / 120.0)
    } else {
        qa.sin() / q
    }
}

/// (ell_1, ell_2) for one test function.
fn ell_pair(f: &TestFunction, k: Complex64, params: &BarrierParams) -> Result<(Complex64, Complex64)> {
    let a = params.a();
    match f {
        TestFunction::Eigenstate(s) => {
            // on [-a, a]: |x+a| = x+a, so ell_1 = e^{ika} int e^{ikx} psi_n dx,
            // which reduces to shifted sinc integrals
            let kn = s.k_n;
            let phase = (Complex64::i() * k * a).exp();
            let sm = sinc_a(k - kn, a);
            let sp = sinc_a(k + kn, a);
            let norm = 1.0 / a.sqrt();
            let (e1, e2);
            if s.is_even_parity() {
                e1 = phase * norm * (sm + sp);
                e2 = e1;
            } else {
                e1 = phase * norm * Complex64::i() * (sm - sp);
                e2 = -e1;
            }
            Ok((e1, e2))
        }
        TestFunction::Sampled(_) => {
            let (lo, hi) = f.support(params);
            let i = Complex64::i();
            let e1 = integrate_adaptive(
                |x| (i * k * (x + a).abs()).exp() * f.eval(params, x),
                lo,
                hi,
                &[-a],
                QUAD_TOL,
            )?;
            let e2 = integrate_adaptive(
                |x| (i * k * (x - a).abs()).exp() * f.eval(params, x),
                lo,
                hi,
                &[a],
                QUAD_TOL,
            )?;
            Ok((e1, e2))
        }
    }
}

/// Quartet (ell_1, ell_2, m_1, m_2) for the pair (psi, phi) at momentum k.
pub fn amplitude_quartet(
    psi: &TestFunction,
    phi: &TestFunction,
    k: Complex64,
    params: &BarrierParams,
) -> Result<AmplitudeQuartet> {
    let (ell1, ell2) = ell_pair(psi, k, params)?;
    let (m1, m2) = ell_pair(phi, k, params)?;
    Ok(AmplitudeQuartet { ell1, ell2, m1, m2 })
}

/// ell(k) = 2 pi sqrt(a) (e^{2ika} + 1)/(pi^2 - 4k^2a^2) for psi_1, with the
/// removable singularities at k = +-pi/2a continued by their limit (i sqrt(a)
/// at +pi/2a).
pub fn ell_closed_psi1(k: Complex64, params: &BarrierParams) -> Complex64 {
    let a = params.a();
    let k1 = PI / (2.0 * a);
    let phase = (Complex64::i() * k * a).exp();
    (phase / a.sqrt()) * (sinc_a(k - k1, a) + sinc_a(k + k1, a))
}

/// k G_0(k) for psi = phi = psi_1 in closed form:
/// 4ia [ iak Delta + pi^2 (1 + e^{2ika}) ] / Delta^2, Delta = 4k^2a^2 - pi^2,
/// Taylor-continued through the double zeros of the numerator at k = +-pi/2a.
pub fn k_g0_psi1(k: Complex64, params: &BarrierParams) -> Complex64 {
    let a = params.a();
    let k1 = PI / (2.0 * a);
    let i = Complex64::i();
    // expansion about the nearer removable point k0 = +-k1 when within 1e-3
    for k0 in [k1, -k1] {
        let d = k - k0;
        if d.norm() < 1e-3 {
            // N(k0 + d) = n2 d^2 + n3 d^3 + n4 d^4 + n5 d^5 + ...
            let a3 = a * a * a;
            let n2 = i * 12.0 * a3 * k0 + Complex64::new(2.0 * PI * PI * a * a, 0.0);
            let n3 = i * 4.0 * a3 * (1.0 + PI * PI / 3.0);
            let n4 = Complex64::new(-2.0 / 3.0 * PI * PI * a3 * a, 0.0);
            let n5 = -i * 4.0 / 15.0 * PI * PI * a3 * a * a;
            let num = n2 + d * (n3 + d * (n4 + d * n5));
            let den = 4.0 * a3 * a * (d + 2.0 * k0) * (d + 2.0 * k0);
            return i * a * num / den;
        }
    }
    let delta = 4.0 * k * k * a * a - PI * PI;
    let e = (2.0 * i * k * a).exp();
    4.0 * i * a * (i * a * k * delta + PI * PI * (1.0 + e)) / (delta * delta)
}

/// k G_0(k) for a general pair: (i/2) iint e^{ik|x-y|} psi(x) phi(y) dy dx.
/// This combination (not G_0 alone) extends continuously through k = 0.
pub fn k_g0_amplitude(
    psi: &TestFunction,
    phi: &TestFunction,
    k: Complex64,
    params: &BarrierParams,
) -> Result<Complex64> {
    if let (TestFunction::Eigenstate(s), TestFunction::Eigenstate(t)) = (psi, phi) {
        if s.n == 1 && t.n == 1 {
            return Ok(k_g0_psi1(k, params));
        }
    }
    let (plo, phi_hi) = psi.support(params);
    let (qlo, qhi) = phi.support(params);
    let i = Complex64::i();
    let outer = integrate_adaptive(
        |x| {
            let inner = integrate_adaptive(
                |y| (i * k * (x - y).abs()).exp() * phi.eval(params, y),
                qlo,
                qhi,
                &[x],
                QUAD_TOL,
            )
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            inner * psi.eval(params, x)
        },
        plo,
        phi_hi,
        &[qlo, qhi],
        QUAD2D_TOL,
    )?;
    if !outer.re.is_finite() || !outer.im.is_finite() {
        return Err(Error::Quadrature { wanted: QUAD_TOL, got: f64::NAN });
    }
    Ok(0.5 * i * outer)
}

/// G_0 itself (k != 0).
pub fn g0_amplitude(
    psi: &TestFunction,
    phi: &TestFunction,
    k: Complex64,
    params: &BarrierParams,
) -> Result<Complex64> {
    if k.norm() == 0.0 {
        return Err(Error::Domain("G_0 alone is singular at k = 0; use k_g0_amplitude".into()));
    }
    Ok(k_g0_amplitude(psi, phi, k, params)? / k)
}

/// G_r from the quartet:
/// -alpha (2k + i alpha) [ell_1 m_1 + ell_2 m_2] + i alpha^2 e^{2ika} [ell_1 m_2 + ell_2 m_1].
pub fn gr_amplitude(
    q: &AmplitudeQuartet,
    k: Complex64,
    params: &BarrierParams,
) -> Result<Complex64> {
    let a = params.a();
    let alpha = params.alpha_finite()?;
    let i = Complex64::i();
    let e = (2.0 * i * k * a).exp();
    Ok(-alpha * (2.0 * k + i * alpha) * (q.ell1 * q.m1 + q.ell2 * q.m2)
        + i * alpha * alpha * e * (q.ell1 * q.m2 + q.ell2 * q.m1))
}

/// Parity shortcut for even psi = phi with common amplitude ell:
/// 2 ell^2 [-alpha(2k + i alpha) + i alpha^2 e^{2ika}].
pub fn gr_even_shortcut(ell: Complex64, k: Complex64, params: &BarrierParams) -> Result<Complex64> {
    let alpha = params.alpha_finite()?;
    let i = Complex64::i();
    let e = (2.0 * i * k * params.a()).exp();
    Ok(2.0 * ell * ell * (-alpha * (2.0 * k + i * alpha) + i * alpha * alpha * e))
}

/// Parity shortcut for odd psi = phi (ell_2 = -ell_1 flips the cross term).
pub fn gr_odd_shortcut(ell: Complex64, k: Complex64, params: &BarrierParams) -> Result<Complex64> {
    let alpha = params.alpha_finite()?;
    let i = Complex64::i();
    let e = (2.0 * i * k * params.a()).exp();
    Ok(2.0 * ell * ell * (-alpha * (2.0 * k + i * alpha) - i * alpha * alpha * e))
}

/// Relative closeness of k to a family-1 pole of the psi_1 amplitude,
/// measured through D = (2k + i alpha) + i alpha e^{2ika}.
fn family1_denominator(k: Complex64, params: &BarrierParams) -> Result<Complex64> {
    let alpha = params.alpha_finite()?;
    let i = Complex64::i();
    let e = (2.0 * i * k * params.a()).exp();
    Ok(2.0 * k + i * alpha + i * alpha * e)
}

/// F_alpha(k) for psi = phi = psi_1 (closed form, no quadrature).
pub fn f_alpha_psi1(k: Complex64, params: &BarrierParams) -> Result<Complex64> {
    let a = params.a();
    let alpha = params.alpha_finite()?;
    let d = family1_denominator(k, params)?;
    if d.norm() < 1e-10 * alpha.max(1.0) {
        return Err(Error::Pole(d.norm()));
    }
    let k1 = PI / (2.0 * a);
    if (k - k1).norm() < 1e-3 || (k + k1).norm() < 1e-3 {
        // near the removable points split into the two separately-stabilized
        // pieces k G_0 + alpha ell^2 / D
        let ell = ell_closed_psi1(k, params);
        return Ok(k_g0_psi1(k, params) + alpha * ell * ell / d);
    }
    let i = Complex64::i();
    let delta = 4.0 * k * k * a * a - PI * PI;
    let w = 2.0 * i * k * a;
    // (1 + e^w)/D: for large Re w scale both sides by e^{-w} so that neither
    // the numerator nor the complex division can overflow
    let ratio = if w.re > 200.0 {
        let inv = (-w).exp();
        (inv + 1.0) / ((2.0 * k + i * alpha) * inv + i * alpha)
    } else {
        (1.0 + w.exp()) / d
    };
    Ok(4.0 * a / (delta * delta) * (-a * k * delta + 2.0 * i * PI * PI * k * ratio))
}

/// F_alpha(k) = k [G_0(k) + g(k) G_r(k)] for a general pair.
///
/// F_alpha(0) = 0 exactly: writing 1/g = -2kP, both kG_0(0) = (i/2) I_psi I_phi
/// and the limit -G_r'(0)/(2P'(0)) evaluate to (i/2) I_psi I_phi with opposite
/// signs in the sum (G_r'(0) = -4 alpha (1 + a alpha) I_psi I_phi while
/// 2P'(0) = 8 i alpha (1 + a alpha)), so the k -> 0 limit cancels identically
/// for every test pair.
pub fn f_alpha(
    psi: &TestFunction,
    phi: &TestFunction,
    k: Complex64,
    params: &BarrierParams,
) -> Result<Complex64> {
    if let (TestFunction::Eigenstate(s), TestFunction::Eigenstate(t)) = (psi, phi) {
        if s.n == 1 && t.n == 1 {
            return f_alpha_psi1(k, params);
        }
    }
    let alpha = params.alpha_finite()?;
    if k.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // pole proximity through the g denominator, normalized by its parts
    let den = g_denominator(k, params)?;
    let q = 2.0 * k + Complex64::i() * alpha;
    let scale = (2.0 * k).norm() * (q * q).norm().max(1.0);
    if den.norm() < 1e-10 * scale.max(1e-30) {
        return Err(Error::Pole(den.norm()));
    }
    let quartet = amplitude_quartet(psi, phi, k, params)?;
    let gr = gr_amplitude(&quartet, k, params)?;
    let g = g_of_k(k, params)?;
    Ok(k_g0_amplitude(psi, phi, k, params)? + k * g * gr)
}
