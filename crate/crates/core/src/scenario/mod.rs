//! Named experiments driven by a config file: each run produces a
//! trajectory table and a report of derived quantities and
//! closed-form-versus-integration residuals.

mod config;
mod runners;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

pub use config::{
    parse_config, parse_config_str, ConfigError, MatrixRole, MatrixSpec, ScenarioConfig, ScenarioKind,
    ValidatedMatrix,
};

use crate::infoexchange::ExchangeRecord;
use crate::trajectory::{CsvTable, Trajectory};

/// Derived quantities, residuals and pass/fail checks of one run.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub n: usize,
    pub t_final: f64,
    pub dt: f64,
    pub gamma: f64,
    pub quantities: BTreeMap<String, f64>,
    /// |analytic − numeric| for every quantity with a closed form.
    pub residuals: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exchange: Option<ExchangeRecord>,
    pub exit_status: i32,
}

impl RunReport {
    fn new(cfg: &ScenarioConfig) -> Self {
        Self {
            scenario: cfg.scenario.name().to_string(),
            n: cfg.n,
            t_final: cfg.t_final,
            dt: cfg.dt,
            gamma: cfg.gamma,
            quantities: BTreeMap::new(),
            residuals: BTreeMap::new(),
            checks: BTreeMap::new(),
            exchange: None,
            exit_status: 0,
        }
    }

    fn quantity(&mut self, name: &str, value: f64) {
        self.quantities.insert(name.to_string(), value);
    }

    fn residual(&mut self, name: &str, value: f64) {
        self.residuals.insert(name.to_string(), value);
    }

    fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.to_string(), ok);
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Compact human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "scenario {}  n={}  t_final={}  dt={}  gamma={}",
            self.scenario, self.n, self.t_final, self.dt, self.gamma
        );
        let width = self
            .quantities
            .keys()
            .chain(self.residuals.keys())
            .chain(self.checks.keys())
            .map(String::len)
            .max()
            .unwrap_or(0);
        if let Some(x) = &self.exchange {
            let eta = x.eta.map_or("absent".to_string(), |e| format!("{e:.12}"));
            let _ = writeln!(
                out,
                "exchange ({}): delta_i={:.12}  delta_s={:.12}  eta={eta}",
                x.regime.as_str(),
                x.delta_i,
                x.delta_s
            );
        }
        let _ = writeln!(out, "quantities:");
        for (k, v) in &self.quantities {
            let _ = writeln!(out, "  {k:<width$}  {v:.12}");
        }
        let _ = writeln!(out, "residuals:");
        for (k, v) in &self.residuals {
            let _ = writeln!(out, "  {k:<width$}  {v:.3e}");
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "checks:");
            for (k, v) in &self.checks {
                let _ = writeln!(out, "  {k:<width$}  {}", if *v { "pass" } else { "FAIL" });
            }
        }
        out
    }
}

/// A finished run, not yet written anywhere.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub table: CsvTable,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("ValidationError: {0}")]
    Validation(#[source] crate::Error),
    #[error("numerical guard: {0}")]
    Numerical(#[source] crate::Error),
    #[error("{0}")]
    Infeasible(#[source] crate::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// 1 parse, 2 validation, 3 numerical guard, 4 infeasible regime, 5 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(ConfigError::Parse { .. }) => 1,
            Self::Config(ConfigError::Read { .. }) | Self::Io { .. } => 5,
            Self::Config(ConfigError::Validation { .. }) | Self::Validation(_) => 2,
            Self::Numerical(_) => 3,
            Self::Infeasible(_) => 4,
        }
    }
}

impl From<crate::Error> for RunError {
    fn from(e: crate::Error) -> Self {
        use crate::Error as E;
        match e {
            E::StepRejected { .. } | E::NoConvergence { .. } | E::NonFinite { .. } => Self::Numerical(e),
            E::Infeasible { .. } => Self::Infeasible(e),
            _ => Self::Validation(e),
        }
    }
}

/// Runs the configured scenario. Pure: nothing is written.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, RunError> {
    config::check_horizon_fields(cfg.t_final, cfg.dt, cfg.gamma)?;
    let mut report = RunReport::new(cfg);
    let table = match cfg.scenario {
        ScenarioKind::Attractor => runners::attractor(cfg, &mut report)?,
        ScenarioKind::SwapExchange => runners::swap_exchange(cfg, &mut report)?,
        ScenarioKind::Optimal => runners::optimal(cfg, &mut report)?,
        ScenarioKind::Isoenergetic => runners::isoenergetic(cfg, &mut report)?,
        ScenarioKind::Additive => runners::additive(cfg, &mut report)?,
        ScenarioKind::Multiplicative => runners::multiplicative(cfg, &mut report)?,
        ScenarioKind::NeutronSpin => runners::neutron_spin(cfg, &mut report)?,
    };
    Ok(RunOutput { report, table })
}

/// Writes `table` in the fixed CSV format, overwriting any existing file.
pub fn emit_plot_data(table: &CsvTable, path: &Path) -> Result<(), RunError> {
    table.write(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Convenience for a bare trajectory.
pub fn emit_trajectory(traj: &Trajectory, path: &Path) -> Result<(), RunError> {
    emit_plot_data(&traj.to_table(), path)
}

/// Writes `<stem>.csv` and `<stem>.report.json` into the configured
/// directory and returns both paths.
pub fn emit(cfg: &ScenarioConfig, out: &RunOutput) -> Result<(PathBuf, PathBuf), RunError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    std::fs::create_dir_all(&cfg.output_dir).map_err(io(&cfg.output_dir))?;
    let csv = cfg.csv_path();
    emit_plot_data(&out.table, &csv)?;
    let json = cfg.report_path();
    std::fs::write(&json, out.report.to_json()).map_err(io(&json))?;
    Ok((csv, json))
}
