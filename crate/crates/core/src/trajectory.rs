//! Time-ordered state snapshots and the CSV table they export to.

use std::fs;
use std::io;
use std::path::Path;

use crate::state::DensityMatrix;

#[derive(Debug, Clone)]
pub struct Sample {
    pub t: f64,
    pub state: DensityMatrix,
    /// tr(ρ²)
    pub purity: f64,
    pub linear_entropy: f64,
    pub von_neumann_entropy: f64,
    /// tr(ρH) when the generator carries a Hamiltonian.
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    samples: Vec<Sample>,
}

impl Trajectory {
    pub fn new(samples: Vec<Sample>) -> Self {
        debug_assert!(samples.windows(2).all(|w| w[0].t < w[1].t));
        Self { samples }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    /// `t, purity, S_lin, S_vn`.
    pub fn to_table(&self) -> CsvTable {
        let mut table = CsvTable::new(&["t", "purity", "S_lin", "S_vn"]);
        for s in &self.samples {
            table.push_row(vec![s.t, s.purity, s.linear_entropy, s.von_neumann_entropy]);
        }
        table
    }
}

/// A numeric table with the fixed export format: comma separated, 12
/// significant digits in scientific notation, `\n` line endings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.header.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let header: Vec<String> = lines
            .next()
            .ok_or("empty csv")?
            .split(',')
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|e| format!("line {}: {e}", k + 2)))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != header.len() {
                return Err(format!("line {}: expected {} cells", k + 2, header.len()));
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    /// Overwrites `path` with the table.
    pub fn write(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_csv_string())
    }
}

/// 12 significant digits, scientific notation, no negative zero.
pub fn format_number(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}
