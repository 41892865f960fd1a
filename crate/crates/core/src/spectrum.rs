//! Multiphoton decay-rate spectrum.
//!
//! The decay rate is a double Fourier sum over multi-index tuples. Both the
//! phase factor and the cubed channel-frequency factor depend on a tuple only
//! through its harmonic index k = n − 2m + 3s − 4r, so the tuples are first
//! collapsed into one real amplitude per harmonic,
//!
//! ```text
//! A_k = Σ_{n−2m+3s−4r=k} χ_nmsr,      B_k = A_k·(Δ + 2kω/ω₀)³,
//! ```
//!
//! and the rate factorizes into two single sums,
//!
//! ```text
//! γ(t) = (γ/2)·[Σ_k B_k e^{2ikφ(t)}]·[Σ_k A_k e^{−2ikφ(t)}].
//! ```
//!
//! The collapse itself is a chain of strided convolutions. The χ bracket is
//! split into a separable product plus four rank-one corrections (one per
//! index), each of which is again a product of per-index sequences.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j, bessel_j_seq, index_over_arg};
use crate::error::{Error, RegimeError, Result};
use crate::params::{shift_factor, DerivedParams, DriveParams, ModelOrder};

/// How far each Bessel series is summed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// |J_n| must stay below this for n₀ ≤ n ≤ n₀ + guard.
    pub tail_tol: f64,
    /// Width of the window that guards against Bessel zeros.
    pub guard: usize,
    /// Use this n₀ for every argument instead of scanning the tail.
    pub fixed: Option<usize>,
    /// Largest harmonic support a spectrum may have.
    pub max_support: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            tail_tol: 1e-8,
            guard: 10,
            fixed: None,
            max_support: 1 << 22,
        }
    }
}

impl TruncationPolicy {
    pub fn fixed(n0: usize) -> Self {
        TruncationPolicy {
            fixed: Some(n0),
            ..Default::default()
        }
    }
}

/// Largest index allowed by 2n₀ω/ω₀ < 1.
pub fn hard_cap(p: &DriveParams) -> usize {
    let limit = p.omega0 / (2.0 * p.omega);
    let cap = limit.ceil() as usize;
    if cap as f64 >= limit {
        cap.saturating_sub(1)
    } else {
        cap
    }
}

/// Smallest n₀ whose tail window is below `tail_tol` and whose two-sided
/// remainder 2Σ_{n>n₀}|J_n| is too, checked against the
/// hard cap. The sums then run over |n| ≤ n₀.
pub fn select_truncation(arg: f64, p: &DriveParams, policy: &TruncationPolicy) -> Result<usize> {
    let cap = hard_cap(p);
    let n0 = match policy.fixed {
        Some(n0) => n0,
        None => scan_tail(arg, policy)?,
    };
    if n0 > cap {
        return Err(RegimeError::TruncationCap { arg, needed: n0, cap }.into());
    }
    Ok(n0)
}

fn scan_tail(arg: f64, policy: &TruncationPolicy) -> Result<usize> {
    let z = arg.abs();
    // past the turning point J_n decays like Ai((n−z)/(z/2)^{1/3})
    let mut reach = (z + 30.0 * z.cbrt() + 50.0) as usize + policy.guard;
    loop {
        let seq = bessel_j_seq(reach, z)?;
        let mut run = 0usize;
        for (n, v) in seq.iter().enumerate() {
            if v.abs() < policy.tail_tol {
                run += 1;
                if run > policy.guard {
                    // also bound the two-sided remainder 2Σ_{m>n₀}|J_m|
                    let mut n0 = n - policy.guard;
                    let mut rest: f64 = seq[n0 + 1..].iter().map(|v| v.abs()).sum();
                    while 2.0 * rest >= policy.tail_tol {
                        n0 += 1;
                        rest -= seq[n0].abs();
                    }
                    return Ok(n0);
                }
            } else {
                run = 0;
            }
        }
        reach *= 2;
    }
}

/// Order-2 coefficient χ_n = (1 − x²(1 + n/η)/4)·J_n(η).
pub fn chi_order2(n: i64, d: &DerivedParams) -> Result<f64> {
    let jn = bessel_j(n, d.eta)?;
    Ok(chi2_from(n, jn, d))
}

fn chi2_from(n: i64, jn: f64, d: &DerivedParams) -> f64 {
    let x2 = d.x * d.x;
    (1.0 - x2 / 4.0) * jn - 0.25 * x2 * index_over_arg(n, jn, d.eta)
}

/// Coefficients of the order-8 bracket: the index-free constant and the
/// multipliers of n/η̄, m/ξ̄, s/β̄ and r/ρ.
#[derive(Debug, Clone, Copy)]
struct Bracket {
    constant: f64,
    per_index: [f64; 4],
}

impl Bracket {
    fn new(x: f64) -> Self {
        let x2 = x * x;
        let x4 = x2 * x2;
        let x6 = x4 * x2;
        let x8 = x4 * x4;
        Bracket {
            constant: 1.0 - x2 / 4.0 + 9.0 * x4 / 64.0 - 25.0 * x6 / 256.0 + 1225.0 * x8 / 16384.0,
            per_index: [
                -x2 * (1.0 - 3.0 * x2 / 4.0 + 75.0 * x4 / 128.0 - 245.0 * x6 / 512.0) / 4.0,
                3.0 * x4 * (1.0 - 5.0 * x2 / 4.0 + 245.0 * x4 / 192.0) / 64.0,
                -5.0 * x6 * (1.0 - 7.0 * x2 / 4.0) / 512.0,
                35.0 * x8 / 16384.0,
            ],
        }
    }
}

/// The four order-8 Bessel arguments (η̄, ξ̄, β̄, ρ) and the stride with which
/// each index enters the harmonic index.
fn order8_args(d: &DerivedParams) -> [(f64, i64); 4] {
    [(d.eta_bar, 1), (d.xi_bar, -2), (d.beta_bar, 3), (d.rho, -4)]
}

/// Order-8 coefficient χ_nmsr, evaluated directly from the printed product
/// form (used for single tuples and as the brute-force reference).
pub fn chi_order8(n: i64, m: i64, s: i64, r: i64, d: &DerivedParams) -> Result<f64> {
    let idx = [n, m, s, r];
    let args = order8_args(d);
    let mut j = [0.0; 4];
    for i in 0..4 {
        j[i] = bessel_j(idx[i], args[i].0)?;
    }
    let bracket = Bracket::new(d.x);
    let mut total = bracket.constant * j.iter().product::<f64>();
    for i in 0..4 {
        if bracket.per_index[i] == 0.0 {
            continue;
        }
        let mut term = bracket.per_index[i] * index_over_arg(idx[i], j[i], args[i].0);
        for (k, jk) in j.iter().enumerate() {
            if k != i {
                term *= jk;
            }
        }
        total += term;
    }
    Ok(total)
}

/// A finite Laurent series Σ c_j z^{lo+j}.
#[derive(Debug, Clone, PartialEq)]
struct Laurent {
    lo: i64,
    coeffs: Vec<f64>,
}

impl Laurent {
    /// Places `values[i]` (index i − n0) at power stride·(i − n0).
    fn placed(values: &[f64], n0: usize, stride: i64) -> Laurent {
        let reach = n0 as i64 * stride.abs();
        let mut coeffs = vec![0.0; (2 * reach + 1) as usize];
        for (i, v) in values.iter().enumerate() {
            let pos = stride * (i as i64 - n0 as i64) + reach;
            coeffs[pos as usize] = *v;
        }
        Laurent { lo: -reach, coeffs }
    }

    fn convolve(&self, other: &Laurent) -> Laurent {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (j, &b) in other.coeffs.iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            for (i, &a) in self.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Laurent {
            lo: self.lo + other.lo,
            coeffs,
        }
    }
}

/// Bessel values and their n·J_n/z companions over |n| ≤ n₀.
struct IndexSeries {
    n0: usize,
    values: Vec<f64>,
    scaled: Vec<f64>,
}

impl IndexSeries {
    fn new(arg: f64, n0: usize) -> Result<Self> {
        let seq = bessel_j_seq(n0, arg.abs())?;
        let mut values = Vec::with_capacity(2 * n0 + 1);
        let mut scaled = Vec::with_capacity(2 * n0 + 1);
        for n in -(n0 as i64)..=(n0 as i64) {
            let mut jn = seq[n.unsigned_abs() as usize];
            // odd orders flip under n → −n and under z → −z
            if n % 2 != 0 && ((n < 0) != (arg < 0.0)) {
                jn = -jn;
            }
            values.push(jn);
            scaled.push(index_over_arg(n, jn, arg));
        }
        Ok(IndexSeries { n0, values, scaled })
    }
}

/// Truncation used for one Bessel argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationEntry {
    pub name: String,
    pub arg: f64,
    pub n0: usize,
}

/// Collapsed harmonic amplitudes of the decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum {
    pub order: ModelOrder,
    /// Harmonic index of the first stored coefficient.
    pub k_min: i64,
    /// A_k.
    pub amplitudes: Vec<f64>,
    /// B_k = A_k·(Δ + 2kω/ω₀)³.
    pub weighted: Vec<f64>,
    /// Σ of the bare Bessel products per harmonic (no bracket); these
    /// multiply the coherent term.
    pub coherent: Vec<f64>,
    pub truncation: Vec<TruncationEntry>,
    /// Σ A_k² removed by the |2kω/ω₀| < 1 restriction.
    pub discarded_weight: f64,
}

impl HarmonicSpectrum {
    pub fn k_max(&self) -> i64 {
        self.k_min + self.amplitudes.len() as i64 - 1
    }

    pub fn support(&self) -> usize {
        self.amplitudes.len()
    }

    fn at(&self, v: &[f64], k: i64) -> f64 {
        let i = k - self.k_min;
        if i < 0 || i as usize >= v.len() {
            0.0
        } else {
            v[i as usize]
        }
    }

    pub fn amplitude(&self, k: i64) -> f64 {
        self.at(&self.amplitudes, k)
    }

    pub fn weighted_amplitude(&self, k: i64) -> f64 {
        self.at(&self.weighted, k)
    }

    /// (k, A_k, B_k) over the stored support.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        self.amplitudes
            .iter()
            .zip(&self.weighted)
            .enumerate()
            .map(move |(i, (&a, &b))| (self.k_min + i as i64, a, b))
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    /// Rate at drive phase φ(t) = ωt + φ, in units of the bare rate:
    /// (1/2)·b(z)·conj(a(z)) with z = e^{2iφ(t)}.
    pub fn rate_at_phase(&self, drive_phase: f64) -> Complex64 {
        let (a, b) = self.sums_at(drive_phase);
        0.5 * b * a.conj()
    }

    /// (Σ A_k z^k, Σ B_k z^k) by a shared Horner pass, z = e^{2iφ}.
    pub fn sums_at(&self, drive_phase: f64) -> (Complex64, Complex64) {
        let z = Complex64::from_polar(1.0, 2.0 * drive_phase);
        let (mut ar, mut ai, mut br, mut bi) = (0.0, 0.0, 0.0, 0.0);
        for (&a, &b) in self.amplitudes.iter().rev().zip(self.weighted.iter().rev()) {
            let t = ar * z.re - ai * z.im + a;
            ai = ar * z.im + ai * z.re;
            ar = t;
            let t = br * z.re - bi * z.im + b;
            bi = br * z.im + bi * z.re;
            br = t;
        }
        let shift = z.powi(self.k_min as i32);
        (Complex64::new(ar, ai) * shift, Complex64::new(br, bi) * shift)
    }

    /// Σ P_k e^{−2ikφ(t)} for the coherent-term products.
    pub fn coherent_sum(&self, drive_phase: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, -2.0 * drive_phase);
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coherent.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.k_min as i32)
    }

    /// Writes the diagnostic dump, one `k,A,B` record per harmonic.
    pub fn write_dump<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,A,B")?;
        for (k, a, b) in self.iter() {
            writeln!(out, "{k},{a:.15e},{b:.15e}")?;
        }
        Ok(())
    }
}

/// Builds the collapsed spectrum for a rotated model.
pub fn harmonic_amplitudes(
    d: &DerivedParams,
    p: &DriveParams,
    order: ModelOrder,
    policy: &TruncationPolicy,
) -> Result<HarmonicSpectrum> {
    let (amps, coherent, truncation) = match order {
        ModelOrder::Order2 => {
            let n0 = select_truncation(d.eta, p, policy)?;
            let series = IndexSeries::new(d.eta, n0)?;
            let amps: Vec<f64> = (0..series.values.len())
                .map(|i| {
                    let n = i as i64 - n0 as i64;
                    chi2_from(n, series.values[i], d)
                })
                .collect();
            let amps = Laurent {
                lo: -(n0 as i64),
                coeffs: amps,
            };
            let coherent = Laurent::placed(&series.values, n0, 1);
            let trunc = vec![TruncationEntry {
                name: "eta".into(),
                arg: d.eta,
                n0,
            }];
            (amps, coherent, trunc)
        }
        ModelOrder::Order8 => collapse_order8(d, p, policy)?,
        ModelOrder::StandardME => {
            return Err(Error::Config("the standard master equation has no harmonic spectrum".into()))
        }
    };
    if amps.coeffs.len() > policy.max_support {
        return Err(Error::SpectrumTooLarge {
            support: amps.coeffs.len(),
            cap: policy.max_support,
        });
    }

    let delta = shift_factor(d.x, order);
    let step = 2.0 / d.freq_ratio;
    let mut amplitudes = amps.coeffs;
    let mut coherent_c = coherent.coeffs;
    let mut discarded = 0.0;
    let mut weighted = Vec::with_capacity(amplitudes.len());
    for (i, a) in amplitudes.iter_mut().enumerate() {
        let k = amps.lo + i as i64;
        if (k as f64 * step).abs() >= 1.0 {
            discarded += *a * *a;
            *a = 0.0;
            coherent_c[i] = 0.0;
        }
        let channel = delta + k as f64 * step;
        weighted.push(*a * channel * channel * channel);
    }
    if discarded > 0.0 {
        log::info!("harmonic restriction discarded spectral weight {discarded:e}");
    }
    Ok(HarmonicSpectrum {
        order,
        k_min: amps.lo,
        amplitudes,
        weighted,
        coherent: coherent_c,
        truncation,
        discarded_weight: discarded,
    })
}

type Collapsed = (Laurent, Laurent, Vec<TruncationEntry>);

fn collapse_order8(d: &DerivedParams, p: &DriveParams, policy: &TruncationPolicy) -> Result<Collapsed> {
    const NAMES: [&str; 4] = ["eta_bar", "xi_bar", "beta_bar", "rho"];
    let args = order8_args(d);
    let mut series = Vec::with_capacity(4);
    let mut truncation = Vec::with_capacity(4);
    for (i, &(arg, _)) in args.iter().enumerate() {
        let n0 = select_truncation(arg, p, policy)?;
        truncation.push(TruncationEntry {
            name: NAMES[i].into(),
            arg,
            n0,
        });
        series.push(IndexSeries::new(arg, n0)?);
    }
    let support: usize = args
        .iter()
        .zip(&series)
        .map(|(a, s)| 2 * s.n0 * a.1.unsigned_abs() as usize)
        .sum::<usize>()
        + 1;
    if support > policy.max_support {
        return Err(Error::SpectrumTooLarge {
            support,
            cap: policy.max_support,
        });
    }

    let plain: Vec<Laurent> = series
        .iter()
        .zip(&args)
        .map(|(s, a)| Laurent::placed(&s.values, s.n0, a.1))
        .collect();
    let scaled: Vec<Laurent> = series
        .iter()
        .zip(&args)
        .map(|(s, a)| Laurent::placed(&s.scaled, s.n0, a.1))
        .collect();

    // product of the four per-index series with factor `swap` replaced
    let chain = |swap: Option<usize>| -> Laurent {
        let pick = |i: usize| if swap == Some(i) { &scaled[i] } else { &plain[i] };
        // widest factor (η̄) last keeps the inner loops long
        let tail = pick(3).convolve(pick(2)).convolve(pick(1));
        tail.convolve(pick(0))
    };

    let bracket = Bracket::new(d.x);
    let separable = chain(None);
    let mut total = separable.clone();
    for c in total.coeffs.iter_mut() {
        *c *= bracket.constant;
    }
    for i in 0..4 {
        if bracket.per_index[i] == 0.0 {
            continue;
        }
        let corr = chain(Some(i));
        debug_assert_eq!(corr.lo, total.lo);
        for (t, c) in total.coeffs.iter_mut().zip(&corr.coeffs) {
            *t += bracket.per_index[i] * c;
        }
    }
    Ok((total, separable, truncation))
}

/// Complex decay rate γ(t) in the units of `p.gamma`.
pub fn gamma_t(t: f64, spec: &HarmonicSpectrum, p: &DriveParams) -> Complex64 {
    p.gamma * spec.rate_at_phase(p.drive_phase(t))
}

/// Physical rate γ̄(t) = γ(t) + γ(t)* = 2 Re γ(t).
pub fn gamma_bar(t: f64, spec: &HarmonicSpectrum, p: &DriveParams) -> f64 {
    2.0 * gamma_t(t, spec, p).re
}

/// Time average of γ̄ over a drive period: γ·Σ_k A_k B_k.
pub fn gamma_bar_mean(spec: &HarmonicSpectrum, p: &DriveParams) -> f64 {
    p.gamma * spec.amplitudes.iter().zip(&spec.weighted).map(|(a, b)| a * b).sum::<f64>()
}
