#![allow(dead_code)]

use lfdecay::bessel::bessel_j;
use lfdecay::params::{DerivedParams, DriveParams};
use num_complex::Complex64;
use std::f64::consts::PI;

/// J_n(z) from the integral representation by the trapezoid rule.
pub fn bessel_trapezoid(n: i64, z: f64, points: usize) -> f64 {
    let h = 2.0 * PI / points as f64;
    (0..points)
        .map(|i| {
            let tau = i as f64 * h;
            (n as f64 * tau - z * tau.sin()).cos()
        })
        .sum::<f64>()
        / points as f64
}

/// One order-8 channel amplitude written out term by term.
pub fn chi8_direct(n: i64, m: i64, s: i64, r: i64, d: &DerivedParams) -> f64 {
    let x2 = d.x * d.x;
    let jn = bessel_j(n, d.eta_bar).unwrap();
    let jm = bessel_j(m, d.xi_bar).unwrap();
    let js = bessel_j(s, d.beta_bar).unwrap();
    let jr = bessel_j(r, d.rho).unwrap();
    let c0 = 1.0 - x2 / 4.0 + 9.0 * x2.powi(2) / 64.0 - 25.0 * x2.powi(3) / 256.0 + 1225.0 * x2.powi(4) / 16384.0;
    let cn = -(x2 / 4.0) * (1.0 - 3.0 * x2 / 4.0 + 75.0 * x2.powi(2) / 128.0 - 245.0 * x2.powi(3) / 512.0);
    let cm = (3.0 * x2.powi(2) / 64.0) * (1.0 - 5.0 * x2 / 4.0 + 245.0 * x2.powi(2) / 192.0);
    let cs = -(5.0 * x2.powi(3) / 512.0) * (1.0 - 7.0 * x2 / 4.0);
    let cr = 35.0 * x2.powi(4) / 16384.0;
    let prod = jn * jm * js * jr;
    c0 * prod
        + cn * n as f64 * jn / d.eta_bar * jm * js * jr
        + cm * m as f64 * jm / d.xi_bar * jn * js * jr
        + cs * s as f64 * js / d.beta_bar * jn * jm * jr
        + cr * r as f64 * jr / d.rho * jn * jm * js
}

/// Every (n, m, s, r) with |index| ≤ n0, its amplitude and harmonic index.
pub fn order8_tuples(d: &DerivedParams, n0: i64) -> Vec<(i64, f64)> {
    let mut out = Vec::new();
    for n in -n0..=n0 {
        for m in -n0..=n0 {
            for s in -n0..=n0 {
                for r in -n0..=n0 {
                    let k = n - 2 * m + 3 * s - 4 * r;
                    out.push((k, chi8_direct(n, m, s, r, d)));
                }
            }
        }
    }
    out
}

/// A_k by enumerating tuples, as (k_min, values), with the channel
/// restriction |2kω/ω₀| < 1 applied.
pub fn order8_brute_force(d: &DerivedParams, n0: i64) -> (i64, Vec<f64>) {
    let reach = 10 * n0;
    let mut a = vec![0.0; (2 * reach + 1) as usize];
    for (k, chi) in order8_tuples(d, n0) {
        if (2.0 * k as f64 / d.freq_ratio).abs() < 1.0 {
            a[(k + reach) as usize] += chi;
        }
    }
    (-reach, a)
}

/// γ(t)/γ as the double sum over channel pairs,
/// (1/2)ΣΣ χ χ' (Δ + 2kω/ω₀)³ e^{2i(k−k')φ(t)}.
pub fn order8_double_sum(d: &DerivedParams, p: &DriveParams, n0: i64, delta: f64, t: f64) -> Complex64 {
    let tuples: Vec<(i64, f64)> = order8_tuples(d, n0)
        .into_iter()
        .filter(|(k, _)| (2.0 * *k as f64 / d.freq_ratio).abs() < 1.0)
        .collect();
    let phase = p.omega * t + p.phase;
    let reach = 20 * n0;
    let phasors: Vec<Complex64> = (-reach..=reach)
        .map(|q| Complex64::from_polar(1.0, 2.0 * q as f64 * phase))
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for &(k, chi) in &tuples {
        let w = (delta + 2.0 * k as f64 / d.freq_ratio).powi(3) * chi;
        let mut inner = Complex64::new(0.0, 0.0);
        for &(k2, chi2) in &tuples {
            inner += chi2 * phasors[(k - k2 + reach) as usize];
        }
        acc += w * inner;
    }
    0.5 * acc
}
