//! Named parameter sets, single runs, two-model
//! comparisons and parameter sweeps.
//!
//! Preset parameters are in units of the bare decay rate (γ = 1).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::str::FromStr;

use crate::dynamics::{bare_decay, evolve, EvolveOptions, Trajectory};
use crate::error::{Error, Result};
use crate::params::{derive, DerivedParams, DriveParams, ModelOrder};

/// Output channel a preset is meant to display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Sz,
    Gbar,
    ResidualExp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPreset {
    pub name: String,
    pub params: DriveParams,
    pub order: ModelOrder,
    /// Horizon in units of 1/γ.
    pub t_end: f64,
    pub outputs: Vec<Channel>,
}

pub const PRESET_NAMES: [&str; 7] = ["fig1a", "fig1b", "fig2", "fig3a", "fig3b", "fig4", "sec3a"];

/// x = 0.8, ω₀/ω = 2×10⁴, φ = 0 with the given ω/γ.
fn strong(omega_over_gamma: f64) -> DriveParams {
    DriveParams::from_ratios(0.8, 2e4, omega_over_gamma, 0.0).expect("preset parameters are in regime")
}

/// Looks up a preset.
///
/// | name  | ω/γ  | model    | γt horizon |
/// |-------|------|----------|------------|
/// | fig1a | 0.05 | order 8  | 4          |
/// | fig1b | 0.05 | order 8  | 40         |
/// | fig2  | 10   | order 8  | 4          |
/// | fig3a | 1.1  | order 8  | 4          |
/// | fig3b | 1.1  | standard | 4          |
/// | fig4  | 1.1  | order 8  | 4 (rate)   |
/// | sec3a | 0.05 | order 2  | 5          |
///
/// All but sec3a use x = 0.8 and ω₀/ω = 2×10⁴; sec3a uses x = 10⁻² and
/// ω₀/ω = 8×10³ (η = 0.1). Horizons are the shortest that show the decay
/// and, for fig1b, several drive periods after it.
pub fn preset(name: &str) -> Result<ScenarioPreset> {
    use Channel::*;
    let (params, order, t_end, outputs) = match name {
        "fig1a" => (strong(0.05), ModelOrder::Order8, 4.0, vec![Sz, ResidualExp]),
        "fig1b" => (strong(0.05), ModelOrder::Order8, 40.0, vec![Sz, ResidualExp]),
        "fig2" => (strong(10.0), ModelOrder::Order8, 4.0, vec![Sz]),
        "fig3a" => (strong(1.1), ModelOrder::Order8, 4.0, vec![Sz]),
        "fig3b" => (strong(1.1), ModelOrder::StandardME, 4.0, vec![Sz]),
        "fig4" => (strong(1.1), ModelOrder::Order8, 4.0, vec![Gbar]),
        "sec3a" => (
            DriveParams::from_ratios(1e-2, 8e3, 0.05, 0.0).expect("preset parameters are in regime"),
            ModelOrder::Order2,
            5.0,
            vec![Sz, ResidualExp],
        ),
        _ => {
            return Err(Error::UnknownPreset {
                name: name.to_string(),
                valid: PRESET_NAMES.join(", "),
            })
        }
    };
    Ok(ScenarioPreset {
        name: name.to_string(),
        params,
        order,
        t_end,
        outputs,
    })
}

pub fn presets() -> Vec<ScenarioPreset> {
    PRESET_NAMES.iter().map(|n| preset(n).expect("known preset")).collect()
}

impl ScenarioPreset {
    pub fn derived(&self) -> DerivedParams {
        derive(&self.params, self.order).expect("preset parameters are in regime")
    }

    /// Default solver settings with this preset's horizon.
    pub fn options(&self) -> EvolveOptions {
        EvolveOptions {
            t_end: self.t_end,
            ..Default::default()
        }
    }

    pub fn with_order(&self, order: ModelOrder) -> ScenarioPreset {
        ScenarioPreset {
            order,
            ..self.clone()
        }
    }
}

/// Short content hash of a parameter set, model and solver settings.
pub fn param_hash(params: &DriveParams, order: ModelOrder, opts: &EvolveOptions) -> String {
    let text = serde_json::to_string(&(params, order, opts)).expect("plain data serializes");
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// A trajectory with the settings that produced it.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub preset: ScenarioPreset,
    pub options: EvolveOptions,
    pub param_hash: String,
    pub trajectory: Trajectory,
}

pub fn run(preset: &ScenarioPreset) -> Result<ScenarioRun> {
    run_with(preset, &preset.options())
}

pub fn run_with(preset: &ScenarioPreset, opts: &EvolveOptions) -> Result<ScenarioRun> {
    let trajectory = evolve(&preset.params, preset.order, opts)?;
    trajectory.check_invariants()?;
    Ok(ScenarioRun {
        preset: preset.clone(),
        options: *opts,
        param_hash: param_hash(&preset.params, preset.order, opts),
        trajectory,
    })
}

/// Dominant nonzero DFT bin of `series` restricted to the last `fraction`
/// of the grid, after removing the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominantFrequency {
    /// Angular frequency in units of γ.
    pub frequency: f64,
    /// Spacing of the DFT bins in the same units.
    pub bin_width: f64,
    pub bin: usize,
}

pub fn dominant_frequency(grid: &[f64], series: &[f64], fraction: f64) -> DominantFrequency {
    let start = ((1.0 - fraction) * (grid.len() - 1) as f64).round() as usize;
    let window = &series[start..];
    let n = window.len();
    let dt = grid[1] - grid[0];
    let mean = window.iter().sum::<f64>() / n as f64;
    let bin_width = 2.0 * PI / (n as f64 * dt);
    let mut best = (1, -1.0);
    for k in 1..=n / 2 {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, v) in window.iter().enumerate() {
            let arg = -2.0 * PI * ((k * j) % n) as f64 / n as f64;
            re += (v - mean) * arg.cos();
            im += (v - mean) * arg.sin();
        }
        let power = re * re + im * im;
        if power > best.1 {
            best = (k, power);
        }
    }
    DominantFrequency {
        frequency: best.0 as f64 * bin_width,
        bin_width,
        bin: best.0,
    }
}

/// Late-time drive-following check: the dominant oscillation of ⟨S_z⟩ over
/// the final quarter sits at 2ω within one bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveFollowing {
    pub dominant: DominantFrequency,
    pub target: f64,
    pub within_one_bin: bool,
}

pub fn drive_following(traj: &Trajectory, omega: f64) -> DriveFollowing {
    let dominant = dominant_frequency(&traj.grid, &traj.sz, 0.25);
    let target = 2.0 * omega;
    DriveFollowing {
        dominant,
        target,
        within_one_bin: (dominant.frequency - target).abs() <= dominant.bin_width,
    }
}

/// First γt at which the series crosses zero (half the excitation gone),
/// linearly interpolated.
pub fn half_life(grid: &[f64], series: &[f64]) -> Option<f64> {
    grid.windows(2).zip(series.windows(2)).find_map(|(t, s)| {
        (s[0] > 0.0 && s[1] <= 0.0).then(|| t[0] + (t[1] - t[0]) * s[0] / (s[0] - s[1]))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonMetrics {
    /// max |a − b| of the carrier-averaged inversion.
    pub max_abs_diff: f64,
    /// Mean of (a − b) over γt < 2; negative when `a` decays faster.
    pub early_signed_diff: f64,
    /// Dominant late-time oscillation of each series.
    pub late_frequency: [DominantFrequency; 2],
    pub half_life: [Option<f64>; 2],
}

/// Two runs on a shared grid and the metrics relating them.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub labels: [String; 2],
    pub grid: Vec<f64>,
    /// Instantaneous ⟨S_z⟩.
    pub series: [Vec<f64>; 2],
    /// Carrier-averaged ⟨S_z⟩, on which the metrics are computed.
    pub secular: [Vec<f64>; 2],
    pub metrics: ComparisonMetrics,
}

impl ComparisonReport {
    pub fn from_trajectories(labels: [String; 2], a: &Trajectory, b: &Trajectory) -> Result<Self> {
        if a.grid != b.grid {
            return Err(Error::Config("comparison runs do not share a grid".into()));
        }
        let grid = a.grid.clone();
        let secular = [a.sz_secular.clone(), b.sz_secular.clone()];
        let diff: Vec<f64> = secular[0].iter().zip(&secular[1]).map(|(x, y)| x - y).collect();
        let early: Vec<f64> = grid.iter().zip(&diff).filter(|(t, _)| **t < 2.0).map(|(_, d)| *d).collect();
        let metrics = ComparisonMetrics {
            max_abs_diff: diff.iter().fold(0.0, |m, d| m.max(d.abs())),
            early_signed_diff: early.iter().sum::<f64>() / early.len().max(1) as f64,
            late_frequency: [
                dominant_frequency(&grid, &secular[0], 0.25),
                dominant_frequency(&grid, &secular[1], 0.25),
            ],
            half_life: [half_life(&grid, &secular[0]), half_life(&grid, &secular[1])],
        };
        Ok(ComparisonReport {
            labels,
            grid,
            series: [a.sz.clone(), b.sz.clone()],
            secular,
            metrics,
        })
    }

    /// Whether the first series loses its excitation faster at early times.
    pub fn first_faster_early(&self) -> bool {
        self.metrics.early_signed_diff < 0.0
    }
}

/// Runs two presets that differ at most in model order on a shared grid.
pub fn compare(a: &ScenarioPreset, b: &ScenarioPreset) -> Result<ComparisonReport> {
    compare_with(a, b, &a.options())
}

pub fn compare_with(a: &ScenarioPreset, b: &ScenarioPreset, opts: &EvolveOptions) -> Result<ComparisonReport> {
    if a.params != b.params {
        return Err(Error::Config(format!(
            "presets `{}` and `{}` differ in drive parameters",
            a.name, b.name
        )));
    }
    let (ra, rb) = rayon::join(|| run_with(a, opts), || run_with(b, opts));
    let (ra, rb) = (ra?, rb?);
    ComparisonReport::from_trajectories(
        [a.name.clone(), b.name.clone()],
        &ra.trajectory,
        &rb.trajectory,
    )
}

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Rabi,
    Omega,
    Phase,
    Order,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rabi" => Ok(SweepAxis::Rabi),
            "omega" => Ok(SweepAxis::Omega),
            "phase" => Ok(SweepAxis::Phase),
            "order" => Ok(SweepAxis::Order),
            other => Err(Error::Config(format!(
                "unknown sweep axis `{other}` (expected rabi, omega, phase or order)"
            ))),
        }
    }
}

/// One value along a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweepPoint {
    Rabi(f64),
    Omega(f64),
    Phase(f64),
    Order(ModelOrder),
}

impl SweepAxis {
    pub fn point(self, value: &str) -> Result<SweepPoint> {
        let number = || {
            value
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("sweep value `{value}` is not a number")))
        };
        Ok(match self {
            SweepAxis::Rabi => SweepPoint::Rabi(number()?),
            SweepAxis::Omega => SweepPoint::Omega(number()?),
            SweepAxis::Phase => SweepPoint::Phase(number()?),
            SweepAxis::Order => SweepPoint::Order(value.parse().map_err(Error::Config)?),
        })
    }
}

impl SweepPoint {
    pub fn apply(&self, base: &ScenarioPreset) -> ScenarioPreset {
        let mut p = base.clone();
        match *self {
            SweepPoint::Rabi(v) => p.params.rabi = v,
            SweepPoint::Omega(v) => p.params.omega = v,
            SweepPoint::Phase(v) => p.params.phase = v,
            SweepPoint::Order(o) => p.order = o,
        }
        p
    }
}

/// Independent runs, one per point, in input order. A point that fails
/// (for instance by leaving the regime) reports its error without stopping
/// the others.
pub fn sweep(base: &ScenarioPreset, points: &[SweepPoint]) -> Vec<Result<ScenarioRun>> {
    sweep_with(base, points, &base.options())
}

pub fn sweep_with(base: &ScenarioPreset, points: &[SweepPoint], opts: &EvolveOptions) -> Vec<Result<ScenarioRun>> {
    points.par_iter().map(|pt| run_with(&pt.apply(base), opts)).collect()
}

/// Largest departure of the carrier-averaged inversion from −1/2 + e^{−γt}.
pub fn departure_from_exponential(traj: &Trajectory) -> f64 {
    traj.grid
        .iter()
        .zip(&traj.sz_secular)
        .fold(0.0, |m, (t, s)| m.max((s - bare_decay(*t)).abs()))
}
