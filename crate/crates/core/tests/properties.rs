mod common;

use lfdecay::bessel::{bessel_j, bessel_j_seq, index_over_arg};
use lfdecay::dynamics::{heisenberg_rhs, lindblad_rhs, sz_lab, QubitState};
use lfdecay::params::{derive, gen_rabi_exact, shifted_frequency, theta, DriveParams, ModelOrder};
use lfdecay::spectrum::{gamma_bar, gamma_t, harmonic_amplitudes, select_truncation, TruncationPolicy};
use lfdecay::spin::{commutator, s_z, to_rotated, Mat2, SpinOps};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_abs(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn density(a: [f64; 8]) -> Mat2 {
    let m = Mat2::new(c(a[0], a[1]), c(a[2], a[3]), c(a[4], a[5]), c(a[6], a[7]));
    let m = m * m.adjoint() + Mat2::identity() * c(1e-3, 0.0);
    m / m.trace()
}

fn hermitian(a: [f64; 4]) -> Mat2 {
    Mat2::new(c(a[0], 0.0), c(a[1], a[2]), c(a[1], -a[2]), c(a[3], 0.0))
}

fn params() -> impl Strategy<Value = DriveParams> {
    (0.0..0.95f64, 120.0..3e4f64, 0.01..5.0f64, -PI..PI)
        .prop_map(|(x, ratio, w, phase)| DriveParams::from_ratios(x, ratio, w, phase).unwrap())
}

/// Moderate η keeps the spectra small enough for many cases.
fn modest_params() -> impl Strategy<Value = DriveParams> {
    (0.0..0.9f64, 120.0..400.0f64, 0.02..3.0f64, -PI..PI)
        .prop_map(|(x, ratio, w, phase)| DriveParams::from_ratios(x, ratio, w, phase).unwrap())
}

#[test]
fn quasi_spin_commutators_for_100_angles() {
    for i in 0..100 {
        let th = -PI + 2.0 * PI * i as f64 / 99.0;
        let ops = SpinOps::at(th);
        let two = c(2.0, 0.0);
        assert!(max_abs(&(commutator(&ops.rplus, &ops.rminus) - ops.rz * two)) < 1e-14);
        assert!(max_abs(&(commutator(&ops.rz, &ops.rplus) - ops.rplus)) < 1e-14);
        assert!(max_abs(&(commutator(&ops.rz, &ops.rminus) + ops.rminus)) < 1e-14);
    }
}

#[test]
fn normalization_at_listed_arguments() {
    for &z in &[0.1, 1.0, 32.0, 1600.0] {
        let j = bessel_j_seq(z as usize + 120, z).unwrap();
        let even = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
        assert!((even - 1.0).abs() < 1e-10, "z={z}");
    }
}

#[test]
fn jacobi_anger_with_selected_truncation() {
    let p = DriveParams::from_ratios(0.8, 2e4, 0.05, 0.0).unwrap();
    for &z in &[0.1, 1.0, 32.0, 1600.0] {
        let n0 = select_truncation(z, &p, &TruncationPolicy::default()).unwrap();
        let j = bessel_j_seq(n0, z).unwrap();
        for i in 0..64 {
            let phi = PI * i as f64 / 64.0;
            let mut sum = c(j[0], 0.0);
            for m in 1..=n0 {
                let odd = if m % 2 == 0 { 1.0 } else { -1.0 };
                sum += j[m] * (Complex64::from_polar(1.0, 2.0 * m as f64 * phi) + odd * Complex64::from_polar(1.0, -2.0 * m as f64 * phi));
            }
            let exact = Complex64::from_polar(1.0, z * (2.0 * phi).sin());
            assert!((sum - exact).norm() < 1e-8, "z={z} n0={n0} phi={phi}: {:e}", (sum - exact).norm());
        }
    }
}

#[test]
fn factorized_rate_equals_harmonic_double_sum_fig3a() {
    let p = DriveParams::from_ratios(0.8, 2e4, 1.1, 0.0).unwrap();
    let d = derive(&p, ModelOrder::Order8).unwrap();
    let spec = harmonic_amplitudes(&d, &p, ModelOrder::Order8, &TruncationPolicy::default()).unwrap();
    let terms: Vec<(i64, f64, f64)> = spec.iter().filter(|(_, a, _)| *a != 0.0).collect();
    for i in 0..32 {
        let t = 4.0 * i as f64 / 31.0;
        let phase = p.drive_phase(t);
        let mut direct = c(0.0, 0.0);
        for &(k, _, b) in &terms {
            let mut inner = c(0.0, 0.0);
            for &(k2, a2, _) in &terms {
                inner += a2 * Complex64::from_polar(1.0, 2.0 * (k - k2) as f64 * phase);
            }
            direct += b * inner;
        }
        direct *= 0.5;
        let fact = gamma_t(t, &spec, &p);
        assert!((fact - direct).norm() <= 1e-12 * direct.norm(), "t={t}: {fact} vs {direct}");
    }
}

#[test]
fn order8_approaches_order2_as_x_to_the_fourth() {
    let deviation = |x: f64| {
        let p = DriveParams::from_ratios(x, 150.0, 0.5, 0.3).unwrap();
        let d = derive(&p, ModelOrder::Order8).unwrap();
        let policy = TruncationPolicy {
            tail_tol: 1e-15,
            ..Default::default()
        };
        let s2 = harmonic_amplitudes(&d, &p, ModelOrder::Order2, &policy).unwrap();
        let s8 = harmonic_amplitudes(&d, &p, ModelOrder::Order8, &policy).unwrap();
        (0..64)
            .map(|i| {
                let t = p.rate_period() * i as f64 / 64.0;
                (gamma_t(t, &s8, &p) - gamma_t(t, &s2, &p)).norm()
            })
            .fold(0.0, f64::max)
    };
    let xs = [0.02, 0.04, 0.08, 0.16, 0.2];
    let devs: Vec<f64> = xs.iter().map(|&x| deviation(x)).collect();
    // slope of log(dev) against log(x) over the decade
    let slope = (devs[4] / devs[0]).ln() / (xs[4] / xs[0]).ln();
    assert!((slope - 4.0).abs() < 0.3, "slope {slope}, deviations {devs:?}");
}

#[test]
fn h0_stays_far_below_the_shifted_splitting() {
    use lfdecay::dynamics::h0_coherent;
    let p = DriveParams::from_ratios(0.8, 2e4, 0.05, 0.0).unwrap();
    let d = derive(&p, ModelOrder::Order8).unwrap();
    let spec = harmonic_amplitudes(&d, &p, ModelOrder::Order8, &TruncationPolicy::default()).unwrap();
    let bound = d.x * p.omega * spec.coherent.iter().map(|v| v.abs()).sum::<f64>();
    let mut worst: f64 = 0.0;
    for i in 0..512 {
        let t = p.rate_period() * i as f64 / 512.0;
        let h = h0_coherent(t, &d, &p, ModelOrder::Order8, &spec);
        worst = worst.max(h[(1, 0)].norm());
    }
    assert!(worst > 0.0 && worst <= bound, "{worst} vs {bound}");
    assert!(worst < 1e-3 * d.omega0_tilde);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_is_odd_under_drive_sign(p in params(), t in 0.0..100.0f64) {
        let mut flipped = p;
        flipped.phase += PI;
        prop_assert!((theta(&p, t) + theta(&flipped, t)).abs() < 1e-12);
    }

    #[test]
    fn rabi_frequency_periodic_and_bounded(p in params(), t in 0.0..50.0f64) {
        let g = gen_rabi_exact(&p, t);
        prop_assert!(g >= 0.5 * p.omega0 * (1.0 - 1e-15));
        let later = gen_rabi_exact(&p, t + p.rate_period());
        prop_assert!((g - later).abs() <= 1e-9 * g);
    }

    #[test]
    fn shifted_frequencies_are_above_bare(p in params()) {
        prop_assume!(p.x() <= 0.9);
        prop_assert!(shifted_frequency(&p, ModelOrder::Order2) >= p.omega0);
        prop_assert!(shifted_frequency(&p, ModelOrder::Order8) >= p.omega0);
        let d = derive(&p, ModelOrder::Order8).unwrap();
        prop_assert!(d.eta_bar <= d.eta && d.xi_bar <= d.xi && d.beta_bar <= d.beta);
        prop_assert!((d.eta - d.x * d.x * d.freq_ratio / 8.0).abs() <= 1e-12 * d.eta.max(1e-300));
    }

    #[test]
    fn adjoint_duality(
        a in prop::array::uniform8(-1.0..1.0f64),
        q in prop::array::uniform4(-2.0..2.0f64),
        h in prop::array::uniform4(-2.0..2.0f64),
        re in -3.0..3.0f64,
        im in -3.0..3.0f64,
    ) {
        let rho = density(a);
        let (q, h0) = (hermitian(q), hermitian(h));
        let rate = c(re, im);
        let dot = lindblad_rhs(&QubitState { rho, t: 0.0 }, rate, &h0);
        let lhs = (q * dot).trace();
        prop_assert!((lhs - heisenberg_rhs(&rho, &q, rate, &h0)).norm() < 1e-12);
        prop_assert!(dot.trace().norm() < 1e-14);
    }

    #[test]
    fn rotation_then_readout_is_identity(a in prop::array::uniform8(-1.0..1.0f64), p in params(), t in 0.0..20.0f64) {
        let lab = density(a);
        let rho = to_rotated(&lab, theta(&p, t));
        let sz = sz_lab(&QubitState { rho, t }, &p, ModelOrder::Order8);
        prop_assert!((sz - (s_z() * lab).trace().re).abs() < 1e-12);
    }

    #[test]
    fn bessel_recurrence_parity_and_oracle(z in 0.01..2000.0f64, n in 1usize..2500) {
        let j = bessel_j_seq(n + 1, z).unwrap();
        let lhs = j[n - 1] + j[n + 1];
        prop_assert!((lhs - 2.0 * index_over_arg(n as i64, j[n], z)).abs() < 1e-10);
        let odd = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(bessel_j(-(n as i64), z).unwrap(), odd * bessel_j(n as i64, z).unwrap());
        prop_assert_eq!(bessel_j(n as i64, -z).unwrap(), odd * bessel_j(n as i64, z).unwrap());
        prop_assert!((j[n] - common::bessel_trapezoid(n as i64, z, 8192)).abs() < 1e-12);
    }

    #[test]
    fn jacobi_anger_random(z in 0.0..300.0f64, psi in -PI..PI) {
        let nmax = (z + 20.0 * z.cbrt() + 60.0) as usize;
        let j = bessel_j_seq(nmax, z).unwrap();
        let mut sum = c(j[0], 0.0);
        for n in 1..=nmax {
            let odd = if n % 2 == 0 { 1.0 } else { -1.0 };
            sum += j[n] * (Complex64::from_polar(1.0, n as f64 * psi) + odd * Complex64::from_polar(1.0, -(n as f64) * psi));
        }
        prop_assert!((sum - Complex64::from_polar(1.0, z * psi.sin())).norm() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rate_is_periodic_real_structured_and_phase_covariant(p in modest_params(), t in 0.0..10.0f64, shift in -3.0..3.0f64) {
        for order in [ModelOrder::Order2, ModelOrder::Order8] {
            let d = derive(&p, order).unwrap();
            let spec = harmonic_amplitudes(&d, &p, order, &TruncationPolicy::default()).unwrap();
            prop_assert!(spec.norm_sq() > 0.0);
            let g = gamma_bar(t, &spec, &p);
            prop_assert!((g - gamma_bar(t + p.rate_period(), &spec, &p)).abs() <= 1e-9 * g.abs().max(1.0));
            let mut moved = p;
            moved.phase -= p.omega * shift;
            prop_assert!((g - gamma_bar(t + shift, &spec, &moved)).abs() <= 1e-9 * g.abs().max(1.0));
            let direct = gamma_t(t, &spec, &p);
            prop_assert!((g - (direct + direct.conj()).re).abs() < 1e-15 * g.abs().max(1.0));
        }
    }

    #[test]
    fn rate_is_even_at_zero_phase(p in modest_params(), t in 0.0..10.0f64) {
        let mut p = p;
        p.phase = 0.0;
        let d = derive(&p, ModelOrder::Order8).unwrap();
        let spec = harmonic_amplitudes(&d, &p, ModelOrder::Order8, &TruncationPolicy::default()).unwrap();
        let a = gamma_bar(t, &spec, &p);
        prop_assert!((a - gamma_bar(-t, &spec, &p)).abs() <= 1e-9 * a.abs().max(1.0));
    }
}
