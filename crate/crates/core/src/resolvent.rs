//! The integral kernel of [H_alpha - k^2]^{-1} and its pole-carrying factor
//! g(k).
//!
//! The kernel splits as K_alpha = K_0 + g(k) (L_1 + L_2 + L_3 + L_4) with
//! K_0(x,y;k) = (i/2k) e^{ik|x-y|} the free resolvent kernel. All resonance
//! poles enter through g alone, whose reciprocal factors into the two
//! resonance-family equations: 1/g = -2k f_1(k) f_2(k).

use num_complex::Complex64;

use crate::barrier::BarrierParams;
use crate::error::{Error, Result};

/// Evaluation point for the kernel: positions x, y and complex momentum k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub x: f64,
    pub y: f64,
    pub k: Complex64,
}

/// Denominator of g: 2k((2k + i alpha)^2 + alpha^2 e^{4ika}).
pub fn g_denominator(k: Complex64, params: &BarrierParams) -> Result<Complex64> {
    let a = params.a();
    let alpha = params.alpha_finite()?;
    let q = 2.0 * k + Complex64::i() * alpha;
    let e = (4.0 * Complex64::i() * k * a).exp();
    Ok(2.0 * k * (q * q + alpha * alpha * e))
}

/// g(k) = -[2k((2k + i alpha)^2 + alpha^2 e^{4ika})]^{-1}.
pub fn g_of_k(k: Complex64, params: &BarrierParams) -> Result<Complex64> {
    let d = g_denominator(k, params)?;
    if d.norm() < 1e-300 {
        return Err(Error::Pole(d.norm()));
    }
    Ok(-1.0 / d)
}

/// K_alpha(x, y; k): free kernel plus the four barrier images weighted by g.
pub fn kernel_eval(p: &KernelPoint, params: &BarrierParams) -> Result<Complex64> {
    let KernelPoint { x, y, k } = *p;
    if k.norm() == 0.0 {
        return Err(Error::Domain("kernel is singular at k = 0".into()));
    }
    let a = params.a();
    let alpha = params.alpha_finite()?;
    let g = g_of_k(k, params)?;
    let i = Complex64::i();
    let k0 = i / (2.0 * k) * (i * k * (x - y).abs()).exp();
    let q = 2.0 * k + i * alpha;
    let e2 = (2.0 * i * k * a).exp();
    // L_1 and its reflection L_4(x,y) = L_1(-x,-y); likewise L_3(x,y) = L_2(-x,-y)
    let l1 = -alpha * q * (i * k * ((x + a).abs() + (y + a).abs())).exp();
    let l4 = -alpha * q * (i * k * ((x - a).abs() + (y - a).abs())).exp();
    let l2 = i * alpha * alpha * e2 * (i * k * ((x + a).abs() + (y - a).abs())).exp();
    let l3 = i * alpha * alpha * e2 * (i * k * ((x - a).abs() + (y + a).abs())).exp();
    Ok(k0 + g * (l1 + l2 + l3 + l4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::{Alpha, BarrierParams, EigenstateInf, eigenstate_eval};
    use crate::quad::integrate_adaptive;
    use crate::resonance::resonance_energy;

    fn params(a: f64, alpha: f64) -> BarrierParams {
        BarrierParams::new(a, Alpha::Finite(alpha)).unwrap()
    }

    #[test]
    fn pole_at_resonances() {
        let p = params(0.5, 10.0);
        for n in 1..=6 {
            let r = resonance_energy(n, &p).unwrap();
            let d = g_denominator(r.k, &p).unwrap();
            // normalize by the size of the two terms being cancelled
            let q = 2.0 * r.k + Complex64::i() * 10.0;
            let scale = (2.0 * r.k).norm() * (q * q).norm().max(1.0);
            assert!(d.norm() / scale < 1e-8, "n={n} |d|={}", d.norm());
            assert!(matches!(g_of_k(r.k, &p), Ok(_) | Err(Error::Pole(_))));
        }
    }

    #[test]
    fn large_k_asymptotics() {
        let p = params(0.5, 10.0);
        let k = Complex64::new(1e4, 0.0);
        let g = g_of_k(k, &p).unwrap();
        let lead = -1.0 / (8.0 * k * k * k);
        assert!((g - lead).norm() / lead.norm() < 1e-2);
    }

    #[test]
    fn reciprocal_factorizes_into_family_equations() {
        let p = params(0.5, 7.0);
        let a = p.a();
        let alpha = 7.0;
        for j in 0..40 {
            let k = Complex64::new(-3.0 + 0.37 * j as f64, 0.9 - 0.11 * j as f64);
            if k.norm() < 1e-6 {
                continue;
            }
            let e = (2.0 * Complex64::i() * k * a).exp();
            let q = 2.0 * k + Complex64::i() * alpha;
            let f1 = alpha * e - Complex64::i() * q;
            let f2 = alpha * e + Complex64::i() * q;
            let d = g_denominator(k, &p).unwrap();
            let prod = -2.0 * k * f1 * f2;
            assert!((d + prod).norm() <= 1e-10 * d.norm().max(1.0), "k={k}");
        }
    }

    #[test]
    fn weak_coupling_limit_is_free_kernel() {
        let pt = KernelPoint { x: 0.3, y: -0.2, k: Complex64::new(1.1, 0.4) };
        let k0 = Complex64::i() / (2.0 * pt.k) * (Complex64::i() * pt.k * 0.5).exp();
        let mut prev = f64::INFINITY;
        for &alpha in &[1e-2, 1e-4, 1e-6] {
            let p = params(0.5, alpha);
            let v = kernel_eval(&pt, &p).unwrap();
            let err = (v - k0).norm();
            assert!(err < prev / 50.0, "alpha={alpha} err={err}");
            prev = err;
        }
    }

    #[test]
    fn kernel_symmetry_random_triples() {
        let p = params(0.5, 10.0);
        // deterministic pseudo-random triples
        let mut s = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let x = 4.0 * next() - 2.0;
            let y = 4.0 * next() - 2.0;
            let k = Complex64::new(3.0 * next() - 1.5, 2.0 * next() - 1.0);
            if k.norm() < 1e-3 {
                continue;
            }
            let kxy = kernel_eval(&KernelPoint { x, y, k }, &p).unwrap();
            let kyx = kernel_eval(&KernelPoint { x: y, y: x, k }, &p).unwrap();
            assert!((kxy - kyx).norm() <= 1e-12 * kxy.norm().max(1.0));
        }
    }

    #[test]
    fn continuity_across_real_axis() {
        let p = params(0.5, 10.0);
        for &kre in &[0.7, 2.3, 5.1] {
            let above = kernel_eval(
                &KernelPoint { x: 0.2, y: -0.4, k: Complex64::new(kre, 1e-9) },
                &p,
            )
            .unwrap();
            let below = kernel_eval(
                &KernelPoint { x: 0.2, y: -0.4, k: Complex64::new(kre, -1e-9) },
                &p,
            )
            .unwrap();
            assert!((above - below).norm() < 1e-6);
        }
    }

    #[test]
    fn k_zero_is_domain_error() {
        let p = params(0.5, 10.0);
        let r = kernel_eval(&KernelPoint { x: 0.1, y: 0.2, k: Complex64::new(0.0, 0.0) }, &p);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    /// u(x) = integral K(x,y;k) psi_1(y) dy by adaptive quadrature (kink at y = x).
    fn apply_kernel(p: &BarrierParams, k: Complex64, x: f64) -> Complex64 {
        let a = p.a();
        let s1 = EigenstateInf::new(1, p).unwrap();
        let split = x.clamp(-a, a);
        integrate_adaptive(
            |y| {
                kernel_eval(&KernelPoint { x, y, k }, p).unwrap()
                    * eigenstate_eval(&s1, p, y)
            },
            -a,
            a,
            &[split],
            1e-11,
        )
        .unwrap()
    }

    #[test]
    fn resolvent_identity_oracle() {
        // (H_alpha - E) [R(E) psi_1] = psi_1 for E = -4 (k = 2i), checked by
        // a central second difference away from the deltas
        let p = params(0.5, 10.0);
        let e_val = -4.0;
        let k = Complex64::new(0.0, 2.0);
        let s1 = EigenstateInf::new(1, &p).unwrap();
        let h = 1e-4;
        for &x in &[0.2, -0.35, 0.8, 0.0] {
            let um = apply_kernel(&p, k, x - h);
            let u0 = apply_kernel(&p, k, x);
            let up = apply_kernel(&p, k, x + h);
            let upp = (up - 2.0 * u0 + um) / (h * h);
            let resid = -upp - e_val * u0 - eigenstate_eval(&s1, &p, x);
            assert!(resid.norm() < 1e-5, "x={x} resid={}", resid.norm());
        }
    }

    #[test]
    fn jump_condition_oracle() {
        // u'(c+) - u'(c-) = alpha u(c) at c = +-a (second-order one-sided
        // differences)
        let alpha = 10.0;
        let p = params(0.5, alpha);
        let k = Complex64::new(0.0, 2.0);
        let h = 1e-5;
        for &c in &[0.5, -0.5] {
            let u0 = apply_kernel(&p, k, c);
            let dp = (-3.0 * u0 + 4.0 * apply_kernel(&p, k, c + h)
                - apply_kernel(&p, k, c + 2.0 * h))
                / (2.0 * h);
            let dm = (3.0 * u0 - 4.0 * apply_kernel(&p, k, c - h)
                + apply_kernel(&p, k, c - 2.0 * h))
                / (2.0 * h);
            let jump = dp - dm;
            let target = alpha * u0;
            assert!(
                (jump - target).norm() <= 1e-4 * target.norm().max(1e-3),
                "c={c} jump={jump} target={target}"
            );
        }
    }
}
