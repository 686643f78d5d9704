//! The physical configuration and the alpha = infinity (Dirichlet box)
//! reference problem.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Delta strength: a positive finite value or the Dirichlet limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Finite(f64),
    Infinite,
}

impl Alpha {
    pub fn finite(self) -> Option<f64> {
        match self {
            Alpha::Finite(v) => Some(v),
            Alpha::Infinite => None,
        }
    }
}

/// Barrier configuration in the rescaled units (hbar^2/2m = 1): deltas of
/// strength `alpha` sit at x = +-a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierParams {
    a: f64,
    alpha: Alpha,
}

impl BarrierParams {
    /// Construct directly in rescaled units.
    pub fn new(a: f64, alpha: Alpha) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("half-separation a = {a} must be > 0")));
        }
        if let Alpha::Finite(v) = alpha {
            // alpha = 0 is the free Laplacian, a valid comparison case
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("alpha = {v} must be >= 0 (or infinite)")));
            }
        }
        Ok(Self { a, alpha })
    }

    /// Construct from original units, applying the rescaling
    /// x -> x sqrt(2m/hbar^2) once at this boundary.
    pub fn from_physical(a: f64, alpha: Alpha, hbar: f64, mass: f64) -> Result<Self> {
        let s = (2.0 * mass).sqrt() / hbar; // length -> rescaled length
        let alpha = match alpha {
            Alpha::Finite(v) => Alpha::Finite(v * (2.0 * mass) / (hbar * hbar) / s),
            Alpha::Infinite => Alpha::Infinite,
        };
        Self::new(a * s, alpha)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    /// Finite alpha or a domain error (for operations that require it).
    pub fn alpha_finite(&self) -> Result<f64> {
        self.alpha
            .finite()
            .ok_or_else(|| Error::Domain("operation requires finite alpha".into()))
    }
}

/// One Dirichlet eigenstate of the alpha = infinity box on [-a, a].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenstateInf {
    pub n: u32,
    pub k_n: f64,
}

impl EigenstateInf {
    pub fn new(n: u32, params: &BarrierParams) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("quantum number n must be >= 1".into()));
        }
        Ok(Self { n, k_n: n as f64 * PI / (2.0 * params.a()) })
    }

    pub fn is_even_parity(&self) -> bool {
        self.n % 2 == 1 // odd n: cosine, even in x
    }
}

/// E_{inf,n} = (n pi / 2a)^2.
pub fn eigen_energy_inf(n: u32, params: &BarrierParams) -> Result<f64> {
    let s = EigenstateInf::new(n, params)?;
    Ok(s.k_n * s.k_n)
}

/// Normalized eigenvector value: cos/sin(k_n x)/sqrt(a) on [-a, a], 0 outside.
pub fn eigenstate_eval(state: &EigenstateInf, params: &BarrierParams, x: f64) -> f64 {
    let a = params.a();
    if x < -a || x > a {
        return 0.0;
    }
    let norm = 1.0 / a.sqrt();
    if state.is_even_parity() {
        norm * (state.k_n * x).cos()
    } else {
        norm * (state.k_n * x).sin()
    }
}

/// Closed-form unitary Fourier transform (1/sqrt(2 pi)) int e^{-i w x} psi_1 dx:
/// psi1_hat(w) = sqrt(2 pi a) (1 + e^{2 i w a}) / (e^{i w a} (pi^2 - 4 w^2 a^2))
///             = sqrt(2 pi a) * 2 cos(w a) / (pi^2 - 4 w^2 a^2),
/// real and even, with removable singularities at w = +-pi/2a.
pub fn eigenstate_fourier_psi1(params: &BarrierParams, omega: f64) -> Complex64 {
    let a = params.a();
    let k1 = PI / (2.0 * a);
    // remove the removable singularity at omega = +-pi/2a
    if (omega.abs() - k1).abs() < 1e-4 {
        // expand about the nearer root: with s = w - sign(w) k1,
        // cos(w a) = -sign(w) sin(s a) and
        // pi^2 - 4 w^2 a^2 = -4 a^2 s (w + sign(w) k1)
        let s = omega - k1.copysign(omega);
        let other = omega + k1.copysign(omega);
        let sa = s * a;
        let sinc = if sa.abs() < 1e-8 { a } else { (sa).sin() / s };
        let val =
            omega.signum() * (2.0 * PI * a).sqrt() * 2.0 * sinc / (4.0 * a * a * other);
        return Complex64::new(val, 0.0);
    }
    let val = (2.0 * PI * a).sqrt() * 2.0 * (omega * a).cos()
        / (PI * PI - 4.0 * omega * omega * a * a);
    Complex64::new(val, 0.0)
}

/// Leading free-evolution amplitude <psi_1, e^{-itH_0} psi_1> ~
/// 8 a sqrt(-pi i) / (t^{1/2} pi^3) = (8a/pi^{5/2}) e^{-i pi/4} t^{-1/2}.
pub fn free_decay_reference(params: &BarrierParams, t: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be > 0")));
    }
    let a = params.a();
    let mag = 8.0 * a / PI.powf(2.5) / t.sqrt();
    Ok(Complex64::from_polar(mag, -PI / 4.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_adaptive;

    fn p(a: f64) -> BarrierParams {
        BarrierParams::new(a, Alpha::Finite(1.0)).unwrap()
    }

    #[test]
    fn dirichlet_energies() {
        let params = p(0.5);
        assert!((eigen_energy_inf(1, &params).unwrap() - PI * PI).abs() < 1e-12);
        assert!((eigen_energy_inf(2, &params).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
        let params = p(1.0);
        assert!((eigen_energy_inf(1, &params).unwrap() - PI * PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn eigenstate_values() {
        let params = p(0.5);
        let s1 = EigenstateInf::new(1, &params).unwrap();
        assert!((eigenstate_eval(&s1, &params, 0.0) - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(eigenstate_eval(&s1, &params, 0.7), 0.0);
        let s2 = EigenstateInf::new(2, &params).unwrap();
        assert_eq!(eigenstate_eval(&s2, &params, 0.0), 0.0);
    }

    #[test]
    fn normalization_and_orthogonality() {
        let params = p(0.5);
        let a = params.a();
        for n in 1..=10 {
            let s = EigenstateInf::new(n, &params).unwrap();
            let norm = integrate_adaptive(
                |x| Complex64::new(eigenstate_eval(&s, &params, x).powi(2), 0.0),
                -a,
                a,
                &[],
                1e-12,
            )
            .unwrap();
            assert!((norm.re - 1.0).abs() < 1e-10, "n={n}");
        }
        for n in 1..=6u32 {
            for m in (n + 1)..=6 {
                let sn = EigenstateInf::new(n, &params).unwrap();
                let sm = EigenstateInf::new(m, &params).unwrap();
                let ip = integrate_adaptive(
                    |x| {
                        Complex64::new(
                            eigenstate_eval(&sn, &params, x) * eigenstate_eval(&sm, &params, x),
                            0.0,
                        )
                    },
                    -a,
                    a,
                    &[],
                    1e-12,
                )
                .unwrap();
                assert!(ip.norm() < 1e-10, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn dirichlet_boundary_values() {
        let params = p(0.5);
        for n in 1..=6 {
            let s = EigenstateInf::new(n, &params).unwrap();
            assert!(eigenstate_eval(&s, &params, params.a()).abs() <= 1e-13);
            assert!(eigenstate_eval(&s, &params, -params.a()).abs() <= 1e-13);
        }
    }

    #[test]
    fn fourier_closed_form_vs_quadrature() {
        let params = p(0.5);
        let a = params.a();
        let s1 = EigenstateInf::new(1, &params).unwrap();
        let mut omega = -20.0;
        while omega <= 20.0 {
            let direct = integrate_adaptive(
                |x| {
                    Complex64::from_polar(1.0, -omega * x) * eigenstate_eval(&s1, &params, x)
                },
                -a,
                a,
                &[],
                1e-12,
            )
            .unwrap()
                / (2.0 * PI).sqrt();
            let closed = eigenstate_fourier_psi1(&params, omega);
            assert!((direct - closed).norm() < 1e-10, "omega={omega}");
            omega += 0.7;
        }
        // exactly at the removable singularity
        let k1 = PI / (2.0 * a);
        let closed = eigenstate_fourier_psi1(&params, k1);
        let direct = integrate_adaptive(
            |x| Complex64::from_polar(1.0, -k1 * x) * eigenstate_eval(&s1, &params, x),
            -a,
            a,
            &[],
            1e-12,
        )
        .unwrap()
            / (2.0 * PI).sqrt();
        assert!((direct - closed).norm() < 1e-10);
        // conjugate symmetry for a real even function
        let w = 3.3;
        let plus = eigenstate_fourier_psi1(&params, w);
        let minus = eigenstate_fourier_psi1(&params, -w);
        assert!((minus - plus.conj()).norm() < 1e-13);
    }

    #[test]
    fn fourier_at_zero() {
        let params = p(0.5);
        let v = eigenstate_fourier_psi1(&params, 0.0);
        let expect = (2.0 * PI * 0.5).sqrt() * 2.0 / (PI * PI);
        assert!((v.re - expect).abs() < 1e-14 && v.im == 0.0);
    }

    #[test]
    fn free_reference_magnitude_and_scaling() {
        let params = p(0.5);
        let v = free_decay_reference(&params, 1.0).unwrap();
        assert!((v.norm() - 4.0 / PI.powf(2.5)).abs() < 1e-13);
        let v4 = free_decay_reference(&params, 4.0).unwrap();
        assert!((v4.norm() * 2.0 - v.norm()).abs() < 1e-13);
        assert!((v.arg() + PI / 4.0).abs() < 1e-13);
        assert!(free_decay_reference(&params, 0.0).is_err());
    }

    #[test]
    fn physical_units_round_trip() {
        // with hbar^2/2m = 1 the rescaling is the identity
        let p1 = BarrierParams::from_physical(0.5, Alpha::Finite(10.0), 2f64.sqrt(), 1.0).unwrap();
        assert!((p1.a() - 0.5).abs() < 1e-12);
        assert!((p1.alpha_finite().unwrap() - 10.0).abs() < 1e-12);
    }
}
