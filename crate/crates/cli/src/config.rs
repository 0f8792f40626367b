//! Run configuration, read from a flat TOML file.
//!
//! Rates are in units of the coupling scale `G0` and durations in units of
//! `1/G0`, so `G0 = 1` throughout.
//!
//! ```toml
//! gamma = 0.25
//! kappa = 0.0025          # or kappa1 / kappa2
//! tf = 8.0                # G0 * t_f
//! n = 4                   # Fourier order N
//! pulse = "analytic-opt"  # ramp | explicit | analytic-opt | numeric-opt
//! ```

use std::path::Path;

use fstirap_core::optimize::{alpha_opt, log_grid, optimize_numerical, NumericOptions};
use fstirap_core::{Error as CoreError, PulseProfile64, SweepMode, SystemParams64};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PulseKind {
    #[default]
    Ramp,
    Explicit,
    AnalyticOpt,
    NumericOpt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    Numeric,
    #[default]
    Both,
}

impl From<Mode> for SweepMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Analytic => SweepMode::Analytic,
            Mode::Numeric => SweepMode::Numeric,
            Mode::Both => SweepMode::Both,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gamma: Option<f64>,
    pub kappa: Option<f64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub tf: Option<f64>,
    pub n: Option<usize>,
    #[serde(default)]
    pub pulse: PulseKind,
    /// Full coefficient list `a_0..a_2N` for `pulse = "explicit"`.
    pub alpha: Option<Vec<f64>>,
    /// Harmonics `a_1..a_2N` for `pulse = "explicit"`, with `a_0` fixing the endpoint.
    pub harmonics: Option<Vec<f64>>,
    pub steps: Option<usize>,
    pub stride: Option<usize>,
    pub budget: Option<usize>,
    pub free_endpoint: Option<bool>,
    pub record_history: Option<bool>,
    pub orders: Option<Vec<usize>>,
    pub grid: Option<Vec<f64>>,
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub mode: Option<Mode>,
    /// Seed for the randomized cases of `validate`.
    pub seed: Option<u64>,
    pub cases: Option<usize>,
}

pub const DEFAULT_BUDGET: usize = 2000;
pub const DEFAULT_GRID: (f64, f64, usize) = (2.0, 40.0, 60);

fn config_error(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{field}`: {reason}"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn params(&self) -> Result<SystemParams64, CliError> {
        let gamma = self
            .gamma
            .ok_or_else(|| config_error("gamma", "required"))?;
        let (k1, k2) = match (self.kappa, self.kappa1, self.kappa2) {
            (Some(k), None, None) => (k, k),
            (None, Some(k1), Some(k2)) => (k1, k2),
            (None, None, None) => {
                return Err(config_error("kappa", "required (or kappa1 and kappa2)"))
            }
            _ => {
                return Err(config_error(
                    "kappa",
                    "give either kappa or both kappa1 and kappa2",
                ))
            }
        };
        SystemParams64::new(1.0, gamma, k1, k2).map_err(CliError::from)
    }

    pub fn t_f(&self) -> Result<f64, CliError> {
        let t_f = self.tf.ok_or_else(|| config_error("tf", "required"))?;
        if !(t_f > 0.0 && t_f.is_finite()) {
            return Err(config_error("tf", "must be positive and finite"));
        }
        Ok(t_f)
    }

    pub fn order(&self) -> usize {
        self.n.unwrap_or(0)
    }

    pub fn numeric_options(&self, steps: Option<usize>, free_endpoint: bool) -> NumericOptions {
        NumericOptions {
            n_steps: steps.or(self.steps),
            budget: self.budget.unwrap_or(DEFAULT_BUDGET),
            free_endpoint: free_endpoint || self.free_endpoint.unwrap_or(false),
            record_history: self.record_history.unwrap_or(false),
        }
    }

    /// Pulse selected by `pulse`.
    pub fn profile(
        &self,
        params: &SystemParams64,
        opts: &NumericOptions,
    ) -> Result<PulseProfile64, CliError> {
        let t_f = self.t_f()?;
        let order = self.order();
        match self.pulse {
            PulseKind::Ramp => Ok(PulseProfile64::linear_ramp(t_f)?),
            PulseKind::Explicit => match (&self.alpha, &self.harmonics) {
                (Some(a), None) => {
                    PulseProfile64::new(t_f, a.clone()).map_err(|e| config_error("alpha", e))
                }
                (None, Some(h)) => {
                    PulseProfile64::fixed_endpoint(t_f, h).map_err(|e| config_error("harmonics", e))
                }
                _ => Err(config_error(
                    "alpha",
                    "explicit pulse needs exactly one of alpha or harmonics",
                )),
            },
            PulseKind::AnalyticOpt => Ok(PulseProfile64::new(t_f, alpha_opt(params, t_f, order)?)?),
            PulseKind::NumericOpt => Ok(optimize_numerical(params, t_f, order, opts)?.profile),
        }
    }

    pub fn orders(&self) -> Vec<usize> {
        self.orders.clone().unwrap_or_else(|| vec![self.order()])
    }

    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        if let Some(g) = &self.grid {
            if self.grid_min.is_some() || self.grid_max.is_some() || self.grid_points.is_some() {
                return Err(config_error(
                    "grid",
                    "conflicts with grid_min/grid_max/grid_points",
                ));
            }
            return Ok(g.clone());
        }
        let (lo, hi, n) = DEFAULT_GRID;
        let lo = self.grid_min.unwrap_or(lo);
        let hi = self.grid_max.unwrap_or(hi);
        let n = self.grid_points.unwrap_or(n);
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(config_error("grid_min", "need 0 < grid_min < grid_max"));
        }
        if n == 0 {
            return Err(config_error("grid_points", "must be positive"));
        }
        Ok(log_grid(lo, hi, n))
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. }
            | CoreError::StepGuard { .. }
            | CoreError::Contract(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}
