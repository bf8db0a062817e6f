//! TOML scenario files.
//!
//! ```toml
//! scenario = "optimal"
//! n = 2
//! t_final = 20.0   # optional
//! dt = 0.001       # optional
//! gamma = 1.0      # optional
//!
//! [matrices]
//! rho_s0 = [[[1.0, 0.0], [0.0, 0.0]],
//!           [[0.0, 0.0], [0.0, 0.0]]]
//!
//! [output]         # optional
//! dir = "out"
//! stem = "optimal"
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;
use toml::{Table, Value};

use crate::lindblad::{DEFAULT_DT, DEFAULT_T_FINAL};
use crate::matrix::{ComplexMatrix, C64};
use crate::state::{DensityMatrix, HermitianObservable, UnitaryMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScenarioKind {
    Attractor,
    SwapExchange,
    Optimal,
    Isoenergetic,
    Additive,
    Multiplicative,
    NeutronSpin,
}

/// Role a named matrix plays, which decides its validator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixRole {
    State,
    Observable,
    Unitary,
}

pub struct MatrixSpec {
    pub name: &'static str,
    pub role: MatrixRole,
    pub required: bool,
    /// `true` when the matrix lives on the sender factor, whose dimension
    /// may differ from `n` in the additive/multiplicative scenarios.
    pub sender_side: bool,
}

const fn spec(name: &'static str, role: MatrixRole, required: bool, sender_side: bool) -> MatrixSpec {
    MatrixSpec {
        name,
        role,
        required,
        sender_side,
    }
}

use MatrixRole::{Observable, State, Unitary};

const ATTRACTOR: &[MatrixSpec] = &[spec("rho0", State, false, false)];
const SWAP_EXCHANGE: &[MatrixSpec] = &[
    spec("rho_r0", State, true, false),
    spec("rho_s0", State, true, false),
    spec("h_r", Observable, false, false),
    spec("h_s", Observable, false, false),
    spec("u", Unitary, false, false),
];
const OPTIMAL: &[MatrixSpec] = &[
    spec("rho_s0", State, true, false),
    spec("h_r", Observable, false, false),
    spec("h_s", Observable, false, false),
    spec("u", Unitary, false, false),
];
const ISOENERGETIC: &[MatrixSpec] = &[
    spec("rho_s0", State, true, false),
    spec("h_r", Observable, true, false),
    spec("h_s", Observable, false, false),
    spec("u", Unitary, false, false),
];
const DEPHASING: &[MatrixSpec] = &[
    spec("a_r", Observable, true, false),
    spec("b_s", Observable, true, true),
    spec("rho_r0", State, true, false),
    spec("rho_s0", State, true, true),
];
const NEUTRON: &[MatrixSpec] = &[
    spec("rho_r0", State, false, false),
    spec("rho_s0", State, false, false),
    spec("h_r", Observable, false, false),
];

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        Self::Attractor,
        Self::SwapExchange,
        Self::Optimal,
        Self::Isoenergetic,
        Self::Additive,
        Self::Multiplicative,
        Self::NeutronSpin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Attractor => "attractor",
            Self::SwapExchange => "swap-exchange",
            Self::Optimal => "optimal",
            Self::Isoenergetic => "isoenergetic",
            Self::Additive => "additive",
            Self::Multiplicative => "multiplicative",
            Self::NeutronSpin => "neutron-spin",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::Attractor => "two-level decay R = |g><e|: any state purifies into |g><g|",
            Self::SwapExchange => "swap measurement from a given (rho_r0, rho_s0) pair",
            Self::Optimal => "swap measurement with the information-optimal receiver state",
            Self::Isoenergetic => "optimal exchange with equal initial subsystem energies",
            Self::Additive => "measurement of A_R x 1 + 1 x B_S: both parts decohere",
            Self::Multiplicative => "measurement of A_R x B_S from a product state",
            Self::NeutronSpin => "two spin-1/2 beams under measurement of the spin swap",
        }
    }

    pub fn matrices(self) -> &'static [MatrixSpec] {
        match self {
            Self::Attractor => ATTRACTOR,
            Self::SwapExchange => SWAP_EXCHANGE,
            Self::Optimal => OPTIMAL,
            Self::Isoenergetic => ISOENERGETIC,
            Self::Additive | Self::Multiplicative => DEPHASING,
            Self::NeutronSpin => NEUTRON,
        }
    }

    /// Fixed part dimension, if the scenario has one.
    pub fn fixed_dim(self) -> Option<usize> {
        match self {
            Self::Attractor | Self::NeutronSpin => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A matrix after its role validator ran.
#[derive(Debug, Clone)]
pub enum ValidatedMatrix {
    State(DensityMatrix),
    Observable(HermitianObservable),
    Unitary(UnitaryMap),
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub n: usize,
    pub t_final: f64,
    pub dt: f64,
    pub gamma: f64,
    pub matrices: BTreeMap<String, ValidatedMatrix>,
    pub output_dir: PathBuf,
    pub stem: String,
}

impl ScenarioConfig {
    pub fn state(&self, name: &str) -> Option<&DensityMatrix> {
        match self.matrices.get(name) {
            Some(ValidatedMatrix::State(s)) => Some(s),
            _ => None,
        }
    }

    pub fn observable(&self, name: &str) -> Option<&HermitianObservable> {
        match self.matrices.get(name) {
            Some(ValidatedMatrix::Observable(o)) => Some(o),
            _ => None,
        }
    }

    pub fn unitary(&self, name: &str) -> Option<&UnitaryMap> {
        match self.matrices.get(name) {
            Some(ValidatedMatrix::Unitary(u)) => Some(u),
            _ => None,
        }
    }

    pub fn csv_path(&self) -> PathBuf {
        self.output_dir.join(format!("{}.csv", self.stem))
    }

    pub fn report_path(&self) -> PathBuf {
        self.output_dir.join(format!("{}.report.json", self.stem))
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{}: ParseError in '{field}': {message}", line.map_or("?".to_string(), |l| format!("line {l}")))]
    Parse {
        line: Option<usize>,
        field: String,
        message: String,
    },
    #[error("ValidationError in '{field}': {source}")]
    Validation {
        field: String,
        #[source]
        source: crate::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub fn parse_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    /// 1-based line of the first `key =` assignment, for error messages.
    fn line_of(&self, key: &str) -> Option<usize> {
        self.text
            .lines()
            .position(|l| {
                let l = l.trim_start();
                l.strip_prefix(key)
                    .is_some_and(|rest| rest.trim_start().starts_with('='))
            })
            .map(|k| k + 1)
    }

    fn parse_err(&self, field: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Parse {
            line: self.line_of(field.rsplit('.').next().unwrap_or(field)),
            field: field.to_string(),
            message: message.into(),
        }
    }
}

const TOP_KEYS: &[&str] = &["scenario", "n", "t_final", "dt", "gamma", "matrices", "output"];

pub fn parse_config_str(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let src = Source { text };
    let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse {
        line: e.span().map(|s| text[..s.start].matches('\n').count() + 1),
        field: "<document>".into(),
        message: e.message().to_string(),
    })?;

    if let Some(k) = table.keys().find(|k| !TOP_KEYS.contains(&k.as_str())) {
        return Err(src.parse_err(k, "unknown key"));
    }

    let scenario_name = match table.get("scenario") {
        Some(Value::String(s)) => s.as_str(),
        Some(_) => return Err(src.parse_err("scenario", "expected a string")),
        None => return Err(src.parse_err("scenario", "missing")),
    };
    let scenario = ScenarioKind::from_name(scenario_name)
        .ok_or_else(|| src.parse_err("scenario", format!("unknown scenario '{scenario_name}'")))?;

    let n = match table.get("n") {
        Some(Value::Integer(k)) if *k >= 1 => *k as usize,
        Some(_) => return Err(src.parse_err("n", "expected a positive integer")),
        None => match scenario.fixed_dim() {
            Some(d) => d,
            None => return Err(src.parse_err("n", "missing")),
        },
    };
    if let Some(d) = scenario.fixed_dim() {
        if n != d {
            return Err(ConfigError::Validation {
                field: "n".into(),
                source: crate::Error::InvalidArgument(format!("scenario {scenario} needs n = {d}")),
            });
        }
    }

    let t_final = number(&src, &table, "t_final")?.unwrap_or(DEFAULT_T_FINAL);
    let dt = number(&src, &table, "dt")?.unwrap_or(DEFAULT_DT);
    let gamma = number(&src, &table, "gamma")?.unwrap_or(1.0);
    check_horizon_fields(t_final, dt, gamma)?;

    let empty = Table::new();
    let raw_matrices = match table.get("matrices") {
        Some(Value::Table(t)) => t,
        Some(_) => return Err(src.parse_err("matrices", "expected a table")),
        None => &empty,
    };
    let specs = scenario.matrices();
    if let Some(k) = raw_matrices
        .keys()
        .find(|k| !specs.iter().any(|s| s.name == k.as_str()))
    {
        return Err(src.parse_err(
            &format!("matrices.{k}"),
            format!("not a matrix of scenario {scenario}"),
        ));
    }

    let mut parsed = BTreeMap::new();
    for s in specs {
        let field = format!("matrices.{}", s.name);
        let Some(value) = raw_matrices.get(s.name) else {
            if s.required {
                return Err(ConfigError::Validation {
                    field,
                    source: crate::Error::InvalidArgument(format!(
                        "scenario {scenario} requires matrix '{}'",
                        s.name
                    )),
                });
            }
            continue;
        };
        let m = matrix_literal(&src, &field, value)?;
        parsed.insert(s.name, m);
    }

    // Sender-side dimension defaults to n but may differ for the
    // additive/multiplicative scenarios, where it is read off b_s.
    let m_dim = specs
        .iter()
        .filter(|s| s.sender_side)
        .find_map(|s| parsed.get(s.name).map(ComplexMatrix::rows))
        .unwrap_or(n);

    let mut matrices = BTreeMap::new();
    for s in specs {
        let Some(m) = parsed.remove(s.name) else {
            continue;
        };
        let field = format!("matrices.{}", s.name);
        let want = if s.sender_side { m_dim } else { n };
        if m.rows() != want || m.cols() != want {
            return Err(ConfigError::Validation {
                field,
                source: crate::Error::Dimension {
                    context: "config matrix",
                    expected: want,
                    found: if m.rows() != want { m.rows() } else { m.cols() },
                },
            });
        }
        let validated = match s.role {
            State => DensityMatrix::new(m).map(ValidatedMatrix::State),
            Observable => HermitianObservable::new(m).map(ValidatedMatrix::Observable),
            Unitary => UnitaryMap::new(m).map(ValidatedMatrix::Unitary),
        }
        .map_err(|source| ConfigError::Validation {
            field: field.clone(),
            source,
        })?;
        matrices.insert(s.name.to_string(), validated);
    }
    if specs.iter().filter(|s| s.sender_side).count() > 1 {
        // every sender-side matrix must agree on the dimension
        for s in specs.iter().filter(|s| s.sender_side) {
            if let Some(v) = matrices.get(s.name) {
                let d = match v {
                    ValidatedMatrix::State(x) => x.dim(),
                    ValidatedMatrix::Observable(x) => x.dim(),
                    ValidatedMatrix::Unitary(x) => x.dim(),
                };
                debug_assert_eq!(d, m_dim);
            }
        }
    }

    let (output_dir, stem) = match table.get("output") {
        None => (PathBuf::from("."), scenario.name().to_string()),
        Some(Value::Table(t)) => {
            if let Some(k) = t.keys().find(|k| k.as_str() != "dir" && k.as_str() != "stem") {
                return Err(src.parse_err(&format!("output.{k}"), "unknown key"));
            }
            let dir = match t.get("dir") {
                None => PathBuf::from("."),
                Some(Value::String(s)) => PathBuf::from(s),
                Some(_) => return Err(src.parse_err("output.dir", "expected a string")),
            };
            let stem = match t.get("stem") {
                None => scenario.name().to_string(),
                Some(Value::String(s)) if !s.is_empty() => s.clone(),
                Some(_) => return Err(src.parse_err("output.stem", "expected a non-empty string")),
            };
            (dir, stem)
        }
        Some(_) => return Err(src.parse_err("output", "expected a table")),
    };

    Ok(ScenarioConfig {
        scenario,
        n,
        t_final,
        dt,
        gamma,
        matrices,
        output_dir,
        stem,
    })
}

pub(crate) fn check_horizon_fields(t_final: f64, dt: f64, gamma: f64) -> Result<(), ConfigError> {
    let bad = |field: &str, msg: String| ConfigError::Validation {
        field: field.into(),
        source: crate::Error::InvalidArgument(msg),
    };
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(bad("t_final", format!("must be > 0, got {t_final}")));
    }
    if !(dt.is_finite() && dt > 0.0 && dt <= t_final) {
        return Err(bad("dt", format!("must satisfy 0 < dt <= t_final, got {dt}")));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(bad("gamma", format!("must be > 0, got {gamma}")));
    }
    Ok(())
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(k) => Some(*k as f64),
        _ => None,
    }
}

fn number(src: &Source, table: &Table, key: &str) -> Result<Option<f64>, ConfigError> {
    match table.get(key) {
        None => Ok(None),
        Some(v) => as_f64(v)
            .map(Some)
            .ok_or_else(|| src.parse_err(key, "expected a number")),
    }
}

fn matrix_literal(src: &Source, field: &str, value: &Value) -> Result<ComplexMatrix, ConfigError> {
    let err = |msg: &str| src.parse_err(field, msg);
    let rows = value.as_array().ok_or_else(|| err("expected a list of rows"))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| err("each row must be a list of [re, im] pairs"))?;
        let mut entries = Vec::with_capacity(row.len());
        for entry in row {
            let pair = entry
                .as_array()
                .ok_or_else(|| err("each entry must be a [re, im] pair"))?;
            let [re, im] = pair.as_slice() else {
                return Err(err("each entry must have exactly two numbers"));
            };
            let (Some(re), Some(im)) = (as_f64(re), as_f64(im)) else {
                return Err(err("entries must be numbers"));
            };
            entries.push(C64::new(re, im));
        }
        out.push(entries);
    }
    if out.is_empty() {
        return Err(err("matrix has no rows"));
    }
    ComplexMatrix::from_rows(&out).map_err(|e| err(&e.to_string()))
}
