//! Bessel functions of the first kind for integer order.
//!
//! Whole sequences J_0..J_N are produced by downward recurrence from an order
//! well past both N and the argument, normalized with
//! J_0 + 2ΣJ_2k = 1 (Miller's method). Small arguments, and single values
//! far below the turning point, use the ascending series instead.
//!
//! The downward recurrence grows by hundreds of decades for orders far above
//! the argument, so the running values are rescaled in epochs of 1e-200 and
//! entries stored in older epochs are scaled down at the end (underflowing to
//! zero where the true value is below the f64 range).

use crate::error::BesselError;

/// Largest order accepted.
pub const MAX_ORDER: i64 = 1_000_000;
/// Largest argument accepted.
pub const MAX_ARG: f64 = 1e6;

const SERIES_ARG: f64 = 0.5;
const RESCALE_AT: f64 = 1e200;
const RESCALE_BY: f64 = 1e-200;

fn check(order: i64, arg: f64) -> Result<(), BesselError> {
    if !arg.is_finite() || arg.abs() > MAX_ARG || order.abs() > MAX_ORDER {
        return Err(BesselError::OutOfRange { order, arg });
    }
    Ok(())
}

/// J_n(arg) for any integer order, using J_{-n} = (-1)ⁿJ_n and
/// J_n(-z) = (-1)ⁿJ_n(z).
pub fn bessel_j(n: i64, arg: f64) -> Result<f64, BesselError> {
    check(n, arg)?;
    let order = n.unsigned_abs() as usize;
    let z = arg.abs();
    let mut sign = 1.0;
    if n < 0 && order % 2 == 1 {
        sign = -sign;
    }
    if arg < 0.0 && order % 2 == 1 {
        sign = -sign;
    }
    if z == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    let value = if z < SERIES_ARG || 0.25 * z * z <= (order + 1) as f64 {
        ascending_series(order, z)
    } else {
        miller(order, z)?[order]
    };
    Ok(sign * value)
}

/// J_0(arg), …, J_nmax(arg) for arg ≥ 0.
pub fn bessel_j_seq(nmax: usize, arg: f64) -> Result<Vec<f64>, BesselError> {
    check(nmax as i64, arg)?;
    if arg < 0.0 {
        return Err(BesselError::OutOfRange {
            order: nmax as i64,
            arg,
        });
    }
    if arg == 0.0 {
        let mut out = vec![0.0; nmax + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    if arg < SERIES_ARG {
        return Ok((0..=nmax).map(|n| ascending_series(n, arg)).collect());
    }
    let mut out = miller(nmax, arg)?;
    out.truncate(nmax + 1);
    Ok(out)
}

/// n·J_n(z)/z, continued to z = 0 (1/2 for |n| = 1, zero otherwise).
pub fn index_over_arg(n: i64, jn: f64, z: f64) -> f64 {
    if z == 0.0 {
        match n {
            1 | -1 => 0.5,
            _ => 0.0,
        }
    } else {
        n as f64 * jn / z
    }
}

/// Σ_k (-1)^k (z/2)^{2k+n} / (k!(n+k)!).
fn ascending_series(n: usize, z: f64) -> f64 {
    let half = 0.5 * z;
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= half / k as f64;
        if lead == 0.0 {
            return 0.0;
        }
    }
    let q = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        term *= -q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn start_order(nmax: usize, z: f64) -> usize {
    let top = (nmax as f64).max(z.ceil());
    let m = top + 20.0 + (60.0 * top).sqrt().ceil();
    // even start keeps the normalization sum aligned with the stored parity
    let m = m as usize;
    m + (m % 2)
}

fn miller(nmax: usize, z: f64) -> Result<Vec<f64>, BesselError> {
    let m = start_order(nmax, z);
    let mut raw = vec![0.0; m + 1];
    let mut epoch = vec![0u32; m + 1];
    let mut current_epoch = 0u32;

    let mut above = 0.0; // J_{k+1}
    let mut here = 1e-300; // J_k
    let mut norm = 0.0;
    let two_over_z = 2.0 / z;
    let mut k = m;
    loop {
        raw[k] = here;
        epoch[k] = current_epoch;
        if k % 2 == 0 {
            norm += if k == 0 { here } else { 2.0 * here };
        }
        if k == 0 {
            break;
        }
        let below = (k as f64) * two_over_z * here - above;
        above = here;
        here = below;
        k -= 1;
        if here.abs() > RESCALE_AT {
            here *= RESCALE_BY;
            above *= RESCALE_BY;
            norm *= RESCALE_BY;
            current_epoch += 1;
        }
    }
    if !norm.is_finite() || norm == 0.0 {
        return Err(BesselError::NoConvergence { arg: z });
    }
    let out = raw
        .iter()
        .zip(&epoch)
        .map(|(&v, &e)| match current_epoch - e {
            0 => v / norm,
            1 => v * RESCALE_BY / norm,
            _ => 0.0,
        })
        .collect::<Vec<_>>();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(BesselError::NoConvergence { arg: z });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// J_n(z) = (1/2π)∮cos(nτ − z sin τ)dτ by the trapezoid rule, which is
    /// exact up to aliasing of J_{m±n} for m sample points.
    fn trapezoid_oracle(n: i64, z: f64, points: usize) -> f64 {
        let h = 2.0 * PI / points as f64;
        (0..points)
            .map(|i| {
                let tau = i as f64 * h;
                (n as f64 * tau - z * tau.sin()).cos()
            })
            .sum::<f64>()
            / points as f64
    }

    #[test]
    fn small_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
        assert!((bessel_j(1, 1.0).unwrap() - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(0, 1600.0).unwrap() + 0.019_741_050_858_018_02).abs() < 1e-13);
        assert!((bessel_j(1600, 1600.0).unwrap() - 0.038_244_210_879_651_32).abs() < 1e-13);
        assert!((bessel_j(1700, 1600.0).unwrap() - 1.035_799_954_389_519e-12).abs() < 1e-20);
        let far = bessel_j(2000, 1600.0).unwrap();
        assert!((far - 1.427_389_926_333_618e-83).abs() < 1e-93, "{far:e}");
    }

    #[test]
    fn negative_order_and_argument() {
        for n in 1..6 {
            let jn = bessel_j(n, 2.5).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(bessel_j(-n, 2.5).unwrap(), sign * jn);
            assert_eq!(bessel_j(n, -2.5).unwrap(), sign * jn);
        }
    }

    #[test]
    fn sequence_matches_trapezoid_oracle() {
        for &z in &[0.1, 0.7, 3.0, 32.0, 250.0, 1600.0] {
            let nmax = (z as usize) + 200;
            let seq = bessel_j_seq(nmax, z).unwrap();
            for n in (0..=nmax).step_by(7) {
                let oracle = trapezoid_oracle(n as i64, z, 8192);
                assert!((seq[n] - oracle).abs() < 1e-12, "J_{n}({z}) {} vs {}", seq[n], oracle);
            }
        }
    }

    #[test]
    fn single_matches_sequence() {
        let seq = bessel_j_seq(2500, 1370.5).unwrap();
        for n in [0usize, 1, 17, 700, 1370, 1400, 1500, 2500] {
            let single = bessel_j(n as i64, 1370.5).unwrap();
            assert!((single - seq[n]).abs() < 1e-13);
        }
    }

    #[test]
    fn deep_underflow_is_zero() {
        let v = bessel_j(100_000, 1.0).unwrap();
        assert_eq!(v, 0.0);
        let seq = bessel_j_seq(3000, 10.0).unwrap();
        assert!(seq[3000] == 0.0 && seq[10].abs() > 1e-3);
    }

    #[test]
    fn out_of_range_is_an_error() {
        assert!(bessel_j(2_000_000, 1.0).is_err());
        assert!(bessel_j(1, f64::NAN).is_err());
        assert!(bessel_j(1, 1e7).is_err());
        assert!(bessel_j_seq(3, -1.0).is_err());
    }

    #[test]
    fn index_over_arg_limits() {
        assert_eq!(index_over_arg(1, 0.0, 0.0), 0.5);
        assert_eq!(index_over_arg(-1, 0.0, 0.0), 0.5);
        assert_eq!(index_over_arg(2, 0.0, 0.0), 0.0);
        let z = 1e-6;
        let lim = index_over_arg(-1, bessel_j(-1, z).unwrap(), z);
        assert!((lim - 0.5).abs() < 1e-12);
    }
}
