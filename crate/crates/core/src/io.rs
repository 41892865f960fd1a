//! Run configuration files, CSV output, manifests and plot scripts.
//!
//! Configurations are flat JSON objects holding the drive parameters in SI
//! units (rad/s, s⁻¹) plus solver keys. A manifest is a configuration with
//! the run's derived quantities and output hash added, so it can be fed back
//! as a configuration.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::dynamics::{bare_decay, EvolveOptions, Trajectory};
use crate::error::{Error, Result};
use crate::ode::OdeStats;
use crate::params::{derive, DerivedParams, DriveParams, ModelOrder};
use crate::scenarios::{ComparisonReport, ScenarioPreset};
use crate::spectrum::{TruncationEntry, TruncationPolicy};

pub const CSV_HEADER: &str = "t_gamma,sz,gbar,residual_exp";
pub const RATE_HEADER: &str = "t_gamma,gbar";
pub const COMPARE_HEADER: &str = "t_gamma,sz_a,sz_b,sz_secular_a,sz_secular_b";

fn default_t_end() -> f64 {
    EvolveOptions::default().t_end
}
fn default_tol() -> f64 {
    EvolveOptions::default().tol
}
fn default_samples() -> usize {
    EvolveOptions::default().samples
}
fn default_tail_tol() -> f64 {
    TruncationPolicy::default().tail_tol
}
fn default_window() -> f64 {
    EvolveOptions::default().secular_window
}
fn default_order() -> ModelOrder {
    ModelOrder::Order8
}

/// Flat run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub omega0: f64,
    pub omega: f64,
    pub rabi: f64,
    #[serde(default)]
    pub phase: f64,
    pub gamma: f64,
    #[serde(default = "default_order")]
    pub order: ModelOrder,
    #[serde(default = "default_t_end")]
    pub t_end_gamma: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub include_h0: bool,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    #[serde(default = "default_window")]
    pub secular_window: f64,
}

impl RunConfig {
    pub fn from_preset(p: &ScenarioPreset) -> Self {
        let opts = p.options();
        RunConfig {
            omega0: p.params.omega0,
            omega: p.params.omega,
            rabi: p.params.rabi,
            phase: p.params.phase,
            gamma: p.params.gamma,
            order: p.order,
            t_end_gamma: p.t_end,
            tol: opts.tol,
            include_h0: opts.include_h0,
            samples: opts.samples,
            tail_tol: opts.policy.tail_tol,
            secular_window: opts.secular_window,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        RunConfig::from_json(&text)
    }

    /// Physical parameters in the file's units, unvalidated.
    pub fn params(&self) -> DriveParams {
        DriveParams {
            omega0: self.omega0,
            omega: self.omega,
            rabi: self.rabi,
            phase: self.phase,
            gamma: self.gamma,
        }
    }

    pub fn options(&self) -> EvolveOptions {
        EvolveOptions {
            t_end: self.t_end_gamma,
            tol: self.tol,
            include_h0: self.include_h0,
            samples: self.samples,
            policy: TruncationPolicy {
                tail_tol: self.tail_tol,
                ..Default::default()
            },
            secular_window: self.secular_window,
            ..Default::default()
        }
    }

    /// Validates parameters and solver keys.
    pub fn validate(&self) -> Result<()> {
        self.params().validate()?;
        if self.samples < 2 {
            return Err(Error::Config(format!("samples={} must be at least 2", self.samples)));
        }
        let positive = [
            ("t_end_gamma", self.t_end_gamma),
            ("tol", self.tol),
            ("tail_tol", self.tail_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name}={v} must be positive")));
            }
        }
        if !(self.secular_window >= 0.0) {
            return Err(Error::Config(format!("secular_window={} must be non-negative", self.secular_window)));
        }
        Ok(())
    }
}

/// Sidecar describing a finished run. Its configuration fields sit at the
/// top level, so a manifest parses as a [`RunConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    #[serde(flatten)]
    pub config: RunConfig,
    pub scaled: DriveParams,
    pub derived: DerivedParams,
    pub truncation: Vec<TruncationEntry>,
    pub stats: OdeStats,
    pub param_hash: String,
    pub wall_seconds: f64,
    pub csv_sha256: String,
}

impl RunManifest {
    pub fn new(config: &RunConfig, traj: &Trajectory, param_hash: &str, wall_seconds: f64, csv_sha256: &str) -> Result<Self> {
        let params = config.params();
        Ok(RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            scaled: params.scaled(),
            derived: derive(&params.scaled(), config.order)?,
            truncation: traj.truncation.clone(),
            stats: traj.stats,
            param_hash: param_hash.to_string(),
            wall_seconds,
            csv_sha256: csv_sha256.to_string(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// `<out>.manifest.json` next to an output file.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn num(v: f64) -> String {
    format!("{v:.14e}")
}

/// CSV text of a trajectory; every value carries 15 significant digits.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(80 * (traj.grid.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for i in 0..traj.grid.len() {
        let t = traj.grid[i];
        let sz = traj.sz[i];
        let _ = writeln!(out, "{},{},{},{}", num(t), num(sz), num(traj.gbar[i]), num(sz - bare_decay(t)));
    }
    out
}

/// Writes the trajectory CSV and returns the SHA-256 of its bytes.
pub fn write_csv(traj: &Trajectory, path: &Path) -> Result<String> {
    let text = trajectory_csv(traj);
    fs::write(path, &text)?;
    Ok(sha256_hex(text.as_bytes()))
}

/// CSV text of γ̄(t)/γ samples.
pub fn rate_csv(grid: &[f64], gbar: &[f64]) -> String {
    let mut out = String::from(RATE_HEADER);
    out.push('\n');
    for (t, g) in grid.iter().zip(gbar) {
        let _ = writeln!(out, "{},{}", num(*t), num(*g));
    }
    out
}

pub fn write_rate_csv(grid: &[f64], gbar: &[f64], path: &Path) -> Result<String> {
    let text = rate_csv(grid, gbar);
    fs::write(path, &text)?;
    Ok(sha256_hex(text.as_bytes()))
}

pub fn comparison_csv(report: &ComparisonReport) -> String {
    let mut out = String::from(COMPARE_HEADER);
    out.push('\n');
    for i in 0..report.grid.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(report.grid[i]),
            num(report.series[0][i]),
            num(report.series[1][i]),
            num(report.secular[0][i]),
            num(report.secular[1][i])
        );
    }
    out
}

pub fn write_comparison_csv(report: &ComparisonReport, path: &Path) -> Result<String> {
    let text = comparison_csv(report);
    fs::write(path, &text)?;
    Ok(sha256_hex(text.as_bytes()))
}

/// What a plot script draws from its CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// ⟨S_z⟩ against γt with the dashed bare-decay reference.
    Inversion,
    /// γ̄(t)/γ against γt.
    Rate,
    /// Both carrier-averaged series of a comparison with the reference.
    Comparison,
}

/// Gnuplot commands rendering `csv` to `<csv>.png`.
pub fn plot_script(csv: &Path, kind: PlotKind, title: &str) -> String {
    let data = csv.display();
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 800,560");
    let _ = writeln!(s, "set output '{data}.png'");
    let _ = writeln!(s, "set title '{title}'");
    let _ = writeln!(s, "set xlabel 'γt'");
    let _ = writeln!(s, "set key top right");
    match kind {
        PlotKind::Inversion => {
            let _ = writeln!(s, "set ylabel '<S_z(t)>'");
            let _ = writeln!(s, "set yrange [-0.5:0.5]");
            let _ = writeln!(
                s,
                "plot '{data}' using 1:2 skip 1 with lines lw 2 title '<S_z>', \\\n     -0.5 + exp(-x) with lines dt 2 lc rgb 'black' title 'e^{{-γt}}'"
            );
        }
        PlotKind::Rate => {
            let _ = writeln!(s, "set ylabel 'γ̄(t)/γ'");
            let _ = writeln!(s, "plot '{data}' using 1:2 skip 1 with lines lw 2 title 'γ̄/γ'");
        }
        PlotKind::Comparison => {
            let _ = writeln!(s, "set ylabel '<S_z(t)>'");
            let _ = writeln!(s, "set yrange [-0.5:0.5]");
            let _ = writeln!(
                s,
                "plot '{data}' using 1:4 skip 1 with lines lw 2 title 'a', \\\n     '{data}' using 1:5 skip 1 with lines lw 2 title 'b', \\\n     -0.5 + exp(-x) with lines dt 2 lc rgb 'black' title 'e^{{-γt}}'"
            );
        }
    }
    s
}

pub fn emit_plot_script(csv: &Path, kind: PlotKind, title: &str, path: &Path) -> Result<()> {
    fs::write(path, plot_script(csv, kind, title))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::preset;

    #[test]
    fn header_is_fixed() {
        assert_eq!(CSV_HEADER, "t_gamma,sz,gbar,residual_exp");
    }

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(num(0.1), "1.00000000000000e-1");
        assert_eq!(num(-0.5), "-5.00000000000000e-1");
        let back: f64 = num(std::f64::consts::PI).parse().unwrap();
        assert!((back - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn config_defaults_and_errors() {
        let c = RunConfig::from_json(r#"{"omega0":1000,"omega":0.05,"rabi":400,"gamma":1}"#).unwrap();
        assert_eq!(c.order, ModelOrder::Order8);
        assert_eq!(c.samples, 2000);
        assert_eq!(c.tol, 1e-9);
        let c = RunConfig::from_json(r#"{"omega0":1000,"omega":0.05,"rabi":400,"gamma":1,"order":"standard"}"#).unwrap();
        assert_eq!(c.order, ModelOrder::StandardME);
        assert!(RunConfig::from_json(r#"{"omega0":1000}"#).is_err());
        let bad = RunConfig::from_json(r#"{"omega0":1000,"omega":0.05,"rabi":600,"gamma":1}"#).unwrap();
        let err = bad.validate().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("x<1"), "{err}");
    }

    #[test]
    fn preset_config_round_trip() {
        let c = RunConfig::from_preset(&preset("fig3b").unwrap());
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains(r#""order":"standard""#));
        assert_eq!(RunConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn manifest_path_appends_suffix() {
        assert_eq!(manifest_path(Path::new("out/run.csv")), PathBuf::from("out/run.csv.manifest.json"));
    }

    #[test]
    fn plot_scripts_draw_reference() {
        let s = plot_script(Path::new("a.csv"), PlotKind::Inversion, "fig1a");
        assert!(s.contains("dt 2") && s.contains("exp(-x)") && s.contains("'a.csv' using 1:2"));
        let s = plot_script(Path::new("r.csv"), PlotKind::Rate, "fig4");
        assert!(s.contains("using 1:2") && !s.contains("exp(-x)"));
    }
}
