//! Dormand–Prince 5(4) integrator with step-size control and the standard
//! fourth-order continuous extension for dense output.

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on any single step.
    pub h_max: f64,
    /// Steps below this (relative to |t| + 1) abort the run.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-9,
            atol: 1e-9,
            h_max: f64::INFINITY,
            h_min_rel: 1e-14,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense output
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        let hc = h * c;
        for i in 0..N {
            out[i] += hc * k[i];
        }
    }
    out
}

/// Integrates y' = f(t, y) from `t0` to the last entry of `samples`, calling
/// `observe` with the interpolated state at every sample time (which must be
/// non-decreasing and start at or after `t0`).
pub fn integrate<const N: usize, F, O, E>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    samples: &[f64],
    opts: &OdeOptions,
    mut observe: O,
) -> Result<OdeStats, E>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]) -> Result<(), E>,
    E: From<Error>,
{
    let mut stats = OdeStats::default();
    let Some(&t_end) = samples.last() else {
        return Ok(stats);
    };
    let mut next = 0usize;
    while next < samples.len() && samples[next] <= t0 {
        observe(samples[next], &y0)?;
        next += 1;
    }
    if next == samples.len() {
        return Ok(stats);
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    let mut h = initial_step(&mut f, t, &y, &k1, opts, &mut stats).min(opts.h_max).min(t_end - t0);
    let mut err_prev: f64 = 1e-4;

    while next < samples.len() {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepBudget {
                t,
                steps: opts.max_steps,
            }
            .into());
        }
        if h < opts.h_min_rel * (t.abs() + 1.0) {
            return Err(Error::StepUnderflow { t, h }.into());
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t_new = if last { t_end } else { t + h };
        let k7 = f(t_new, &y_new);
        stats.evaluations += 6;

        let mut err = 0.0f64;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / scale).abs());
        }
        if !err.is_finite() {
            stats.rejected += 1;
            h *= 0.1;
            continue;
        }

        if err <= 1.0 {
            stats.accepted += 1;
            // continuous extension over [t, t_new]
            let dense = DenseStep::new(&y, &y_new, h, &k1, &k3, &k4, &k5, &k6, &k7);
            while next < samples.len() && samples[next] <= t_new {
                let s = samples[next];
                let theta = ((s - t) / h).clamp(0.0, 1.0);
                let state = if s == t_new { y_new } else { dense.eval(theta) };
                observe(s, &state)?;
                next += 1;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            if last {
                break;
            }
            // PI controller
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0)).clamp(0.2, 5.0)
            };
            err_prev = err.max(1e-4);
            h = (h * factor).min(opts.h_max);
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).max(0.1);
        }
    }
    Ok(stats)
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    opts: &OdeOptions,
    stats: &mut OdeStats,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let norm = |v: &[f64; N]| {
        let mut acc = 0.0;
        for i in 0..N {
            let sc = opts.atol + opts.rtol * y[i].abs();
            acc += (v[i] / sc).powi(2);
        }
        (acc / N as f64).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(opts.h_max);
    let y1 = axpy(y, h0, &[(1.0, f0)]);
    let f1 = f(t + h0, &y1);
    stats.evaluations += 1;
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

struct DenseStep<const N: usize> {
    r1: [f64; N],
    r2: [f64; N],
    r3: [f64; N],
    r4: [f64; N],
    r5: [f64; N],
}

impl<const N: usize> DenseStep<N> {
    #[allow(clippy::too_many_arguments)]
    fn new(
        y0: &[f64; N],
        y1: &[f64; N],
        h: f64,
        k1: &[f64; N],
        k3: &[f64; N],
        k4: &[f64; N],
        k5: &[f64; N],
        k6: &[f64; N],
        k7: &[f64; N],
    ) -> Self {
        let mut r2 = [0.0; N];
        let mut r3 = [0.0; N];
        let mut r4 = [0.0; N];
        let mut r5 = [0.0; N];
        for i in 0..N {
            let dy = y1[i] - y0[i];
            let bspl = h * k1[i] - dy;
            r2[i] = dy;
            r3[i] = bspl;
            r4[i] = dy - h * k7[i] - bspl;
            r5[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        DenseStep { r1: *y0, r2, r3, r4, r5 }
    }

    fn eval(&self, theta: f64) -> [f64; N] {
        let th1 = 1.0 - theta;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = self.r1[i] + theta * (self.r2[i] + th1 * (self.r3[i] + theta * (self.r4[i] + th1 * self.r5[i])));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(t_end: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn exponential_with_dense_output() {
        let samples = grid(5.0, 777);
        let mut worst = 0.0f64;
        integrate::<1, _, _, Error>(
            |_, y| [-y[0]],
            0.0,
            [1.0],
            &samples,
            &OdeOptions::default(),
            |t, y| {
                worst = worst.max((y[0] - (-t).exp()).abs());
                Ok(())
            },
        )
        .unwrap();
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn oscillator_dense_output_between_steps() {
        // few wide steps, many samples inside each
        let samples = grid(20.0, 5001);
        let mut worst = 0.0f64;
        let stats = integrate::<2, _, _, Error>(
            |_, y| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            &samples,
            &OdeOptions {
                rtol: 1e-10,
                atol: 1e-10,
                ..Default::default()
            },
            |t, y| {
                worst = worst.max((y[0] - t.cos()).abs()).max((y[1] + t.sin()).abs());
                Ok(())
            },
        )
        .unwrap();
        assert!(stats.accepted < 5000);
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn error_shrinks_with_tolerance() {
        let run = |tol: f64| {
            let mut end = 0.0;
            integrate::<2, _, _, Error>(
                |t, y| [y[1], -(1.0 + 0.5 * t.sin()) * y[0]],
                0.0,
                [1.0, 0.0],
                &[10.0],
                &OdeOptions {
                    rtol: tol,
                    atol: tol,
                    ..Default::default()
                },
                |_, y| {
                    end = y[0];
                    Ok(())
                },
            )
            .unwrap();
            end
        };
        let reference = run(1e-13);
        let coarse = (run(1e-6) - reference).abs();
        let fine = (run(5e-7) - reference).abs();
        assert!(fine < coarse, "{fine} !< {coarse}");
    }

    #[test]
    fn underflow_reports_time() {
        let err = integrate::<1, _, _, Error>(
            |t, _| [1.0 / (1.0 - t)],
            0.0,
            [0.0],
            &[2.0],
            &OdeOptions::default(),
            |_, _| Ok(()),
        )
        .unwrap_err();
        match err {
            Error::StepUnderflow { t, .. } => assert!((t - 1.0).abs() < 1e-3, "{t}"),
            other => panic!("{other}"),
        }
    }
}
