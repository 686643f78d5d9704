//! End-to-end acceptance gate: ten numbered criteria covering the resonance
//! table, Lambert-W soundness, the three survival-amplitude methods, the
//! asymptotic decomposition, scaling laws, the crossover window and the
//! qualitative decay-curve properties. One pass/fail line is printed per
//! criterion.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;

use double_barrier::amplitude::TestFunction;
use double_barrier::barrier::{Alpha, BarrierParams};
use double_barrier::decay::{
    crossover_window, f_alpha_contour, f_alpha_direct, fit_power_coefficient,
    loglog_slope, residue_coefficient_psi1, residue_sum, survival_asymptotic,
    tdse_oracle, TdseConfig,
};
use double_barrier::lambertw::lambert_w;
use double_barrier::resonance::{
    refine_resonance_newton, resonance_energy, resonance_residual,
};

fn params(a: f64, alpha: f64) -> BarrierParams {
    BarrierParams::new(a, Alpha::Finite(alpha)).unwrap()
}

fn psi1(p: &BarrierParams) -> TestFunction {
    TestFunction::eigenstate(1, p).unwrap()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

/// Complex least-squares coefficient of t^p.
fn fit_complex_power(ts: &[f64], vals: &[Complex64], p: f64) -> Complex64 {
    let mut numer = Complex64::new(0.0, 0.0);
    let mut denom = 0.0;
    for (&t, &v) in ts.iter().zip(vals) {
        let basis = t.powf(p);
        numer += v * basis;
        denom += basis * basis;
    }
    numer / denom
}

fn criterion_1() -> Result<String, String> {
    let start = Instant::now();
    // published two-to-four significant-digit resonance energies at a = 1/2
    let table: [(f64, [(f64, f64); 4]); 4] = [
        (1.0, [(0.57, -2.31), (13.78, -19.35), (49.60, -41.74), (106.16, -66.64)]),
        (10.0, [(6.99, -0.56), (29.26, -3.86), (69.10, -10.55), (127.91, -19.99)]),
        (100.0, [(9.49, -1.14e-2), (37.95, -9.1e-2), (85.41, -3.05e-1), (151.89, -7.13e-1)]),
        (1000.0, [(9.83, -1.23e-4), (39.32, -9.84e-4), (88.47, -3.32e-3), (157.28, -7.87e-3)]),
    ];
    for (alpha, rows) in table {
        let p = params(0.5, alpha);
        for (i, (re, im)) in rows.into_iter().enumerate() {
            let e = resonance_energy(i as u32 + 1, &p).map_err(|e| e.to_string())?.energy;
            let (dre, dim) =
                ((e.re - re).abs() / re.abs(), (e.im - im).abs() / im.abs());
            if dre > 0.01 || dim > 0.01 {
                return Err(format!(
                    "alpha={alpha} n={}: got {e}, table ({re}, {im}), rel dev ({dre:.1e}, {dim:.1e})",
                    i + 1
                ));
            }
        }
    }
    // Dirichlet column
    let p = params(0.5, 1.0);
    for n in 1..=4u32 {
        let exact = (n as f64 * PI / (2.0 * 0.5)).powi(2);
        let expect = [9.87f64, 39.48, 88.83, 157.91][n as usize - 1];
        if (exact - expect).abs() / expect > 0.001 {
            return Err(format!("Dirichlet n={n}: {exact} vs {expect}"));
        }
        let _ = p;
    }
    let dt = start.elapsed();
    if dt.as_secs_f64() >= 1.0 {
        return Err(format!("runtime {dt:?} >= 1 s"));
    }
    Ok(format!("resonance table reproduced (all digits within 1%), {dt:?}"))
}

fn criterion_2() -> Result<String, String> {
    let start = Instant::now();
    let radii = [1e-3, 0.2, 0.999, 2.5, 40.0, 1e4, 1e8];
    let angles: Vec<f64> = (1..12).map(|i| i as f64 * PI / 6.2).collect();
    let mut worst = 0.0f64;
    for m in -4i32..=4 {
        for &r in &radii {
            for &th in &angles {
                let z = Complex64::from_polar(r, th);
                let w = lambert_w(m, z).map_err(|e| format!("m={m} z={z}: {e}"))?;
                let resid = (w * w.exp() - z).norm() / z.norm();
                worst = worst.max(resid);
                if resid > 1e-12 {
                    return Err(format!("m={m} z={z}: residual {resid:.2e}"));
                }
                // conjugate symmetry
                let wc = lambert_w(-m, z.conj()).map_err(|e| e.to_string())?;
                let sym = (wc - w.conj()).norm() / w.norm().max(1.0);
                if sym > 1e-12 {
                    return Err(format!("m={m} z={z}: conjugate symmetry {sym:.2e}"));
                }
            }
        }
    }
    let dt = start.elapsed();
    if dt.as_secs_f64() >= 5.0 {
        return Err(format!("runtime {dt:?} >= 5 s"));
    }
    Ok(format!("back-substitution residual <= {worst:.1e}, symmetry ok, {dt:?}"))
}

fn criterion_3() -> Result<String, String> {
    for &alpha in &[0.5, 1.0, 10.0, 100.0, 1000.0] {
        let p = params(0.5, alpha);
        for n in 1..=8u32 {
            let r = resonance_energy(n, &p).map_err(|e| e.to_string())?;
            let resid = resonance_residual(r.k, r.family, &p) / alpha.max(1.0);
            if resid > 1e-10 {
                return Err(format!("alpha={alpha} n={n}: residual {resid:.2e}"));
            }
            let refined =
                refine_resonance_newton(r.k, r.family, &p).map_err(|e| e.to_string())?;
            if (refined - r.k).norm() > 1e-10 {
                return Err(format!(
                    "alpha={alpha} n={n}: Newton moved root by {:.2e}",
                    (refined - r.k).norm()
                ));
            }
        }
    }
    Ok("equation residual <= 1e-10 max(1, alpha); Newton agrees to 1e-10".into())
}

fn criterion_4() -> Result<String, String> {
    let start = Instant::now();
    let p = params(0.5, 10.0);
    let f = psi1(&p);
    let mut worst_direct = 0.0f64;
    for &t in &[0.5, 1.0, 2.0, 5.0] {
        let c = f_alpha_contour(&f, &f, &p, t).map_err(|e| e.to_string())?;
        let d = f_alpha_direct(&f, &f, &p, t).map_err(|e| e.to_string())?;
        worst_direct = worst_direct.max((c - d).norm());
        if (c - d).norm() > 1e-6 {
            return Err(format!("t={t}: |contour - direct| = {:.2e}", (c - d).norm()));
        }
    }
    let grid: Vec<f64> = (0..20).map(|i| 0.5 + 9.5 * i as f64 / 19.0).collect();
    let curve = tdse_oracle(&f, &f, &p, &grid, &TdseConfig::default())
        .map_err(|e| e.to_string())?;
    let mut worst_tdse = 0.0f64;
    for (i, &t) in grid.iter().enumerate() {
        let c = f_alpha_contour(&f, &f, &p, t).map_err(|e| e.to_string())?;
        worst_tdse = worst_tdse.max((c - curve.values[i]).norm());
        if (c - curve.values[i]).norm() > 1e-2 {
            return Err(format!(
                "t={t}: |contour - tdse| = {:.2e}",
                (c - curve.values[i]).norm()
            ));
        }
    }
    let dt = start.elapsed();
    if dt.as_secs_f64() >= 120.0 {
        return Err(format!("runtime {dt:?} >= 2 min"));
    }
    Ok(format!(
        "contour vs direct <= {worst_direct:.1e}, vs tdse <= {worst_tdse:.1e}, {dt:?}"
    ))
}

fn fitted_tail_coefficient(alpha: f64) -> Result<Complex64, String> {
    let p = params(0.5, alpha);
    let f = psi1(&p);
    let ts = log_grid(20.0, 200.0, 10);
    let vals: Vec<Complex64> = ts
        .iter()
        .map(|&t| {
            Ok(f_alpha_contour(&f, &f, &p, t).map_err(|e| e.to_string())?
                - residue_sum(&f, &f, &p, t, 16).map_err(|e| e.to_string())?)
        })
        .collect::<Result<_, String>>()?;
    Ok(fit_complex_power(&ts, &vals, -1.5))
}

fn criterion_5() -> Result<String, String> {
    let p = params(0.5, 10.0);
    let f = psi1(&p);
    let free_coeff = 8.0 * 0.5 / PI.powf(2.5);
    // (a) no t^{-1/2} term survives
    let ts = log_grid(50.0, 500.0, 8);
    let mags: Vec<f64> = ts
        .iter()
        .map(|&t| Ok(f_alpha_contour(&f, &f, &p, t).map_err(|e| e.to_string())?.norm()))
        .collect::<Result<_, String>>()?;
    let half_fit = fit_power_coefficient(&ts, &mags, -0.5).abs();
    if half_fit >= 1e-3 * free_coeff {
        return Err(format!("t^-1/2 coefficient {half_fit:.2e} >= 1e-3 * {free_coeff:.3e}"));
    }
    // (b) the subtracted tail carries c_alpha
    let dec = survival_asymptotic(&p, 16).map_err(|e| e.to_string())?;
    let c_fit = fitted_tail_coefficient(10.0)?;
    let dev = (c_fit - dec.c_alpha).norm() / dec.c_alpha.norm();
    if dev > 0.05 {
        return Err(format!(
            "fitted c = {c_fit}, closed form {}, dev {:.2}%",
            dec.c_alpha,
            dev * 100.0
        ));
    }
    // (c) remainder slope
    let ts = log_grid(20.0, 200.0, 8);
    let rem: Vec<f64> = ts
        .iter()
        .map(|&t| {
            Ok((f_alpha_contour(&f, &f, &p, t).map_err(|e| e.to_string())? - dec.value(t))
                .norm())
        })
        .collect::<Result<_, String>>()?;
    let slope = loglog_slope(&ts, &rem);
    if !(-2.8..=-2.2).contains(&slope) {
        return Err(format!("remainder slope {slope:.3} outside [-2.8, -2.2]"));
    }
    Ok(format!(
        "t^-1/2 coeff {half_fit:.1e}; fitted c_alpha dev {:.2}%; remainder slope {slope:.2}",
        dev * 100.0
    ))
}

fn criterion_6() -> Result<String, String> {
    let mut products = Vec::new();
    for &alpha in &[1.0, 10.0, 100.0] {
        let dec = survival_asymptotic(&params(0.5, alpha), 4).map_err(|e| e.to_string())?;
        products.push(dec.c_alpha.norm() * alpha * alpha);
    }
    for w in products.windows(2) {
        if (w[0] - w[1]).abs() > 1e-10 {
            return Err(format!("closed-form |c| alpha^2 varies: {products:?}"));
        }
    }
    let fit1 = fitted_tail_coefficient(1.0)?.norm() * 1.0;
    let fit10 = fitted_tail_coefficient(10.0)?.norm() * 100.0;
    let ratio = fit1 / fit10;
    if !(0.9..=1.1).contains(&ratio) {
        return Err(format!("fitted |c| alpha^2 ratio {ratio:.3} outside 10%"));
    }
    Ok(format!(
        "closed-form |c| alpha^2 = {:.12e} (const to 1e-10); fitted ratio {ratio:.3}",
        products[0]
    ))
}

fn criterion_7() -> Result<String, String> {
    // bisection on a*alpha for the nonempty boundary
    let a = 0.5;
    let window = |aa: f64| crossover_window(&params(a, aa / a)).unwrap();
    let (mut lo, mut hi) = (0.5f64, 0.9f64);
    assert!(!window(lo).nonempty && window(hi).nonempty);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if window(mid).nonempty {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let boundary = 0.5 * (lo + hi);
    if (boundary - 0.635).abs() > 0.001 {
        return Err(format!("boundary a*alpha = {boundary:.5} vs 0.635 +- 0.001"));
    }
    // dominance inequality inside and outside a nonempty window
    let alpha = 10.0;
    let w = window(a * alpha);
    for i in 1..=10 {
        let t = w.t1 + (w.t2 - w.t1) * i as f64 / 11.0;
        if w.power_term(alpha, t) >= w.exponential_term(a, alpha, t) {
            return Err(format!("power term not dominated inside the window at t = {t}"));
        }
    }
    for t in [w.t1 * 0.8, w.t2 * 1.2] {
        if w.power_term(alpha, t) <= w.exponential_term(a, alpha, t) {
            return Err(format!("power term not dominant outside the window at t = {t}"));
        }
    }
    Ok(format!("boundary a*alpha = {boundary:.4}; dominance holds inside/outside"))
}

fn criterion_8() -> Result<String, String> {
    let p = params(0.5, 0.0);
    let f = psi1(&p);
    let ts = log_grid(50.0, 500.0, 8);
    let mags: Vec<f64> = ts
        .iter()
        .map(|&t| Ok(f_alpha_contour(&f, &f, &p, t).map_err(|e| e.to_string())?.norm()))
        .collect::<Result<_, String>>()?;
    let fitted = fit_power_coefficient(&ts, &mags, -0.5);
    let want = 8.0 * 0.5 / PI.powf(2.5);
    let dev = (fitted - want).abs() / want;
    if dev > 0.02 {
        return Err(format!(
            "fitted {fitted:.6} vs 8a/pi^(5/2) = {want:.6}, dev {:.2}%",
            dev * 100.0
        ));
    }
    Ok(format!(
        "free t^-1/2 coefficient {fitted:.6} vs {want:.6} (dev {:.2}%)",
        dev * 100.0
    ))
}

fn criterion_9() -> Result<String, String> {
    let p = params(0.5, 1000.0);
    let f = psi1(&p);
    let r1 = resonance_energy(1, &p).map_err(|e| e.to_string())?;
    let c1 = residue_coefficient_psi1(r1.k, &p).map_err(|e| e.to_string())?;
    if (c1.norm() - 1.0).abs() > 0.05 {
        return Err(format!("|c1| = {} not within 5% of 1", c1.norm()));
    }
    let mut sup = 0.0f64;
    for i in 1..=30 {
        let t = 5.0 * i as f64 / 30.0;
        let fc = f_alpha_contour(&f, &f, &p, t).map_err(|e| e.to_string())?;
        let model = c1 * (-Complex64::i() * r1.energy * t).exp();
        sup = sup.max((fc - model).norm());
    }
    if sup > 5e-2 {
        return Err(format!("sup |f - c1 e^(-iE1 t)| = {sup:.3e} > 5e-2"));
    }
    Ok(format!("|c1| = {:.4}; sup deviation {sup:.2e} <= 5e-2", c1.norm()))
}

fn criterion_10() -> Result<String, String> {
    let a = 0.5;
    let p0 = params(a, 0.0);
    let f0 = psi1(&p0);
    let grid = log_grid(0.2, 30.0, 24);
    let free: Vec<f64> = grid
        .iter()
        .map(|&t| Ok(f_alpha_contour(&f0, &f0, &p0, t).map_err(|e| e.to_string())?.norm()))
        .collect::<Result<_, String>>()?;
    for &alpha in &[0.1, 1.0, 10.0] {
        let p = params(a, alpha);
        let f = psi1(&p);
        let mags: Vec<f64> = grid
            .iter()
            .map(|&t| Ok(f_alpha_contour(&f, &f, &p, t).map_err(|e| e.to_string())?.norm()))
            .collect::<Result<_, String>>()?;
        if !mags.iter().zip(&free).any(|(m, fr)| m > fr) {
            return Err(format!("alpha={alpha}: curve never exceeds the free envelope"));
        }
        let w = crossover_window(&p).map_err(|e| e.to_string())?;
        let t_late =
            if w.nonempty && w.t2.is_finite() { 10.0 * w.t2 } else { 300.0 };
        let late = f_alpha_contour(&f, &f, &p, t_late).map_err(|e| e.to_string())?.norm();
        let late_free =
            f_alpha_contour(&f0, &f0, &p0, t_late).map_err(|e| e.to_string())?.norm();
        if late >= late_free {
            return Err(format!(
                "alpha={alpha}: |f|({t_late}) = {late:.3e} not below free {late_free:.3e}"
            ));
        }
    }
    Ok("each barrier curve crosses the free envelope and lies below it at late times".into())
}

#[test]
fn acceptance() {
    let criteria: Vec<(u32, &str, fn() -> Result<String, String>)> = vec![
        (1, "resonance table", criterion_1),
        (2, "Lambert-W soundness", criterion_2),
        (3, "resonance equation residual", criterion_3),
        (4, "method cross-validation", criterion_4),
        (5, "asymptotic decomposition", criterion_5),
        (6, "alpha scaling of c_alpha", criterion_6),
        (7, "crossover window", criterion_7),
        (8, "free-evolution reference", criterion_8),
        (9, "large-alpha single-resonance limit", criterion_9),
        (10, "decay-curve figure properties", criterion_10),
    ];
    let mut failures = Vec::new();
    for (n, name, f) in criteria {
        match f() {
            Ok(msg) => println!("criterion {n:2} ({name}): PASS - {msg}"),
            Err(msg) => {
                println!("criterion {n:2} ({name}): FAIL - {msg}");
                failures.push(n);
            }
        }
    }
    assert!(failures.is_empty(), "failed acceptance criteria: {failures:?}");
}
