//! Drive parameters, the expansion quantities derived from them, and the
//! instantaneous frame quantities (rotation angle, generalized Rabi frequency,
//! shifted transition frequency).
//!
//! All quantities are unit-agnostic: frequencies and rates share one unit and
//! times are in the inverse of that unit. [`DriveParams::scaled`] rescales a
//! parameter set so that the bare decay rate is one, which is the convention
//! used by the dynamics.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::RegimeError;

/// Which dynamical model a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelOrder {
    /// Rotated-frame model with the generalized Rabi frequency expanded to x².
    #[serde(rename = "2", alias = "order2")]
    Order2,
    /// Rotated-frame model with the expansion carried to x⁸.
    #[serde(rename = "8", alias = "order8")]
    Order8,
    /// Lab-frame Lindblad equation with constant rate and the full drive term.
    #[serde(rename = "standard")]
    StandardME,
}

impl ModelOrder {
    pub fn is_rotated(self) -> bool {
        !matches!(self, ModelOrder::StandardME)
    }

    pub fn label(self) -> &'static str {
        match self {
            ModelOrder::Order2 => "2",
            ModelOrder::Order8 => "8",
            ModelOrder::StandardME => "standard",
        }
    }
}

impl fmt::Display for ModelOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for ModelOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "2" | "order2" => Ok(ModelOrder::Order2),
            "8" | "order8" => Ok(ModelOrder::Order8),
            "standard" | "standardme" | "std" => Ok(ModelOrder::StandardME),
            other => Err(format!("unknown model order `{other}` (expected 2, 8 or standard)")),
        }
    }
}

/// Configurable bounds of the strong, low-frequency regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeBounds {
    /// Strict upper bound on x = 2Ω/ω₀.
    pub max_x: f64,
    /// Strict upper bound on ω/ω₀.
    pub max_freq_ratio: f64,
}

impl Default for RegimeBounds {
    fn default() -> Self {
        RegimeBounds {
            max_x: 1.0,
            max_freq_ratio: 1e-2,
        }
    }
}

/// The five physical inputs of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Bare transition frequency ω₀.
    pub omega0: f64,
    /// Drive frequency ω.
    pub omega: f64,
    /// Rabi frequency Ω.
    pub rabi: f64,
    /// Absolute laser phase φ (rad).
    pub phase: f64,
    /// Bare spontaneous decay rate γ.
    pub gamma: f64,
}

impl DriveParams {
    /// Builds and validates a parameter set against the default regime bounds.
    pub fn new(omega0: f64, omega: f64, rabi: f64, phase: f64, gamma: f64) -> Result<Self, RegimeError> {
        let p = DriveParams {
            omega0,
            omega,
            rabi,
            phase,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters in units of γ from the dimensionless ratios
    /// x = 2Ω/ω₀, ω₀/ω and ω/γ.
    pub fn from_ratios(x: f64, omega0_over_omega: f64, omega_over_gamma: f64, phase: f64) -> Result<Self, RegimeError> {
        let omega = omega_over_gamma;
        let omega0 = omega0_over_omega * omega;
        DriveParams::new(omega0, omega, 0.5 * x * omega0, phase, 1.0)
    }

    pub fn validate(&self) -> Result<(), RegimeError> {
        self.validate_with(&RegimeBounds::default())
    }

    pub fn validate_with(&self, bounds: &RegimeBounds) -> Result<(), RegimeError> {
        let positive = [("omega0", self.omega0), ("omega", self.omega), ("gamma", self.gamma)];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(RegimeError::NonPositive { field, value });
            }
        }
        if !(self.rabi.is_finite() && self.rabi >= 0.0) {
            return Err(RegimeError::NonPositive {
                field: "rabi",
                value: self.rabi,
            });
        }
        if !self.phase.is_finite() {
            return Err(RegimeError::NonPositive {
                field: "phase",
                value: self.phase,
            });
        }
        let x = self.x();
        if x >= bounds.max_x {
            return Err(RegimeError::StrongCoupling { x, bound: bounds.max_x });
        }
        let ratio = self.omega / self.omega0;
        if ratio >= bounds.max_freq_ratio {
            return Err(RegimeError::DriveTooFast {
                ratio,
                bound: bounds.max_freq_ratio,
            });
        }
        Ok(())
    }

    /// x = 2Ω/ω₀.
    pub fn x(&self) -> f64 {
        2.0 * self.rabi / self.omega0
    }

    /// Copy of the parameters with every frequency divided by γ (so γ = 1).
    pub fn scaled(&self) -> DriveParams {
        DriveParams {
            omega0: self.omega0 / self.gamma,
            omega: self.omega / self.gamma,
            rabi: self.rabi / self.gamma,
            phase: self.phase,
            gamma: 1.0,
        }
    }

    /// Instantaneous drive phase φ(t) = ωt + φ.
    #[inline]
    pub fn drive_phase(&self, t: f64) -> f64 {
        self.omega * t + self.phase
    }

    /// Period of every rate and frame quantity, π/ω.
    pub fn rate_period(&self) -> f64 {
        PI / self.omega
    }
}

/// Dimensionless expansion quantities of a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub x: f64,
    pub eta: f64,
    pub xi: f64,
    pub beta: f64,
    pub rho: f64,
    pub eta_bar: f64,
    pub xi_bar: f64,
    pub beta_bar: f64,
    /// Transition frequency shifted to second order, ω₀(1 + x²/4).
    pub omega0_bar: f64,
    /// Transition frequency shifted to eighth order.
    pub omega0_tilde: f64,
    /// ω₀/ω, kept for the channel-frequency factors.
    pub freq_ratio: f64,
}

/// Computes the derived quantities. The order only selects which bounds are
/// checked; every field is populated for both rotated orders.
pub fn derive(p: &DriveParams, order: ModelOrder) -> Result<DerivedParams, RegimeError> {
    p.validate()?;
    let _ = order;
    Ok(derive_unchecked(p))
}

pub(crate) fn derive_unchecked(p: &DriveParams) -> DerivedParams {
    let x = p.x();
    let x2 = x * x;
    let r = p.omega0 / p.omega;
    // x²ω₀/(8ω) is algebraically Ω²/(2ωω₀)
    let eta = x2 * r / 8.0;
    let xi = r * (x / 4.0).powi(4);
    let beta = r * x2 * x2 * x2 / 3072.0;
    let rho = 10.0 * r * (x2 * x2) * (x2 * x2) / 262_144.0;
    DerivedParams {
        x,
        eta,
        xi,
        beta,
        rho,
        eta_bar: eta * (1.0 - x2 / 4.0 + 15.0 * x2 * x2 / 128.0 - 35.0 * x2 * x2 * x2 / 512.0),
        xi_bar: xi * (1.0 - 3.0 * x2 / 4.0 + 35.0 * x2 * x2 / 64.0),
        beta_bar: beta * (1.0 - 5.0 * x2 / 4.0),
        omega0_bar: p.omega0 * shift_factor(x, ModelOrder::Order2),
        omega0_tilde: p.omega0 * shift_factor(x, ModelOrder::Order8),
        freq_ratio: r,
    }
}

/// Constant part of 2Ω̄(t)/ω₀ for the given expansion order.
pub fn shift_factor(x: f64, order: ModelOrder) -> f64 {
    let x2 = x * x;
    match order {
        ModelOrder::Order2 => 1.0 + x2 / 4.0,
        ModelOrder::Order8 | ModelOrder::StandardME => {
            1.0 + x2 / 4.0 - 3.0 * x2 * x2 / 64.0 + 5.0 * x2 * x2 * x2 / 256.0 - 175.0 * (x2 * x2) * (x2 * x2) / 16384.0
        }
    }
}

/// Shifted transition frequency ω̄₀ (order 2) or ω̃₀ (order 8).
pub fn shifted_frequency(p: &DriveParams, order: ModelOrder) -> f64 {
    p.omega0 * shift_factor(p.x(), order)
}

/// Rotation angle θ(t) = arctan[x cos(ωt+φ)]/2.
pub fn theta(p: &DriveParams, t: f64) -> f64 {
    0.5 * (p.x() * p.drive_phase(t).cos()).atan()
}

/// Generalized Rabi frequency √[(ω₀/2)² + Ω²cos²(ωt+φ)].
pub fn gen_rabi_exact(p: &DriveParams, t: f64) -> f64 {
    let c = p.drive_phase(t).cos();
    (0.25 * p.omega0 * p.omega0 + p.rabi * p.rabi * c * c).sqrt()
}

/// Binomial coefficients of √(1+u) through u⁴.
const SQRT_SERIES: [f64; 5] = [1.0, 0.5, -0.125, 0.0625, -0.0390625];

/// Truncated expansion of the generalized Rabi frequency in x: through x² for
/// order 2, through x⁸ otherwise.
pub fn gen_rabi_series(p: &DriveParams, t: f64, order: ModelOrder) -> f64 {
    let x = p.x();
    let c = p.drive_phase(t).cos();
    let u = x * x * c * c;
    let terms = match order {
        ModelOrder::Order2 => 2,
        _ => 5,
    };
    let mut acc = 0.0;
    let mut pow = 1.0;
    for coeff in &SQRT_SERIES[..terms] {
        acc += coeff * pow;
        pow *= u;
    }
    0.5 * p.omega0 * acc
}

/// Accumulated frame phase Φ(t) = ∫₀ᵗ 2Ω̄(t')dt' for the expanded Rabi
/// frequency of the given order, in closed form. This is the phase that
/// separates the rotated frame from its interaction picture.
pub fn frame_phase(p: &DriveParams, d: &DerivedParams, t: f64, order: ModelOrder) -> f64 {
    let now = p.drive_phase(t);
    let diff = |h: f64| (h * now).sin() - (h * p.phase).sin();
    match order {
        ModelOrder::Order2 => d.omega0_bar * t + d.eta * diff(2.0),
        _ => {
            d.omega0_tilde * t + d.eta_bar * diff(2.0) - d.xi_bar * diff(4.0) + d.beta_bar * diff(6.0)
                - d.rho * diff(8.0)
        }
    }
}
