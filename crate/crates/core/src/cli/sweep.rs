//! μ sweeps and their CSV output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use super::format::fmt_opt;
use super::CliError;
use crate::bounds::{compare_bounds, BoundKind, BoundParams, BoundReport, VIOLATION_TOL};
use crate::entanglement::EntanglementVector;
use crate::states::{acin_state, w_mixture, DensityMatrix, PureState};

/// Grid points are rounded to this many decimals so `min + i·step` prints cleanly.
const GRID_DECIMALS: i32 = 12;

/// `MIN:MAX:STEP`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl FromStr for MuRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, step] = parts.as_slice() else {
            return Err(format!("expected MIN:MAX:STEP, got {s:?}"));
        };
        let num = |name: &str, t: &str| -> Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|_| format!("{name}: {t:?} is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("{name}: {t:?} is not finite"))
            }
        };
        Ok(MuRange {
            min: num("MIN", min)?,
            max: num("MAX", max)?,
            step: num("STEP", step)?,
        })
    }
}

impl fmt::Display for MuRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub mu: MuRange,
    pub alpha: f64,
    pub gamma: f64,
    pub gamma_prime: Option<f64>,
}

impl SweepSpec {
    pub fn new(mu: MuRange, alpha: f64, gamma: f64, gamma_prime: Option<f64>) -> Result<Self, CliError> {
        if mu.min < 1.0 {
            return Err(CliError::Usage(format!("mu min {} < 1", mu.min)));
        }
        if mu.step <= 0.0 {
            return Err(CliError::Usage(format!("mu step {} must be positive", mu.step)));
        }
        if mu.max < mu.min {
            return Err(CliError::Usage(format!("mu max {} < min {}", mu.max, mu.min)));
        }
        let spec = Self {
            mu,
            alpha,
            gamma,
            gamma_prime,
        };
        spec.params(mu.min).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(spec)
    }

    /// `min + i·step` for every `i` with the point not past `max`.
    pub fn grid(&self) -> Vec<f64> {
        let MuRange { min, max, step } = self.mu;
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        let scale = 10f64.powi(GRID_DECIMALS);
        (0..count).map(|i| ((min + i as f64 * step) * scale).round() / scale).collect()
    }

    pub fn params(&self, mu: f64) -> Result<BoundParams, crate::bounds::BoundError> {
        let p = BoundParams::from_mu(self.alpha, mu, self.gamma)?;
        match self.gamma_prime {
            Some(g) => p.with_gamma_prime(g),
            None => Ok(p),
        }
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub mu: f64,
    pub eta: f64,
    pub report: BoundReport,
}

impl SweepRow {
    /// `E^η` of the whole state, when known.
    pub fn state_value(&self) -> Option<f64> {
        self.report.total
    }

    /// Ordering-chain breaks on this row, as readable strings.
    pub fn violations(&self) -> Vec<String> {
        self.report
            .ordering_violations(VIOLATION_TOL)
            .iter()
            .map(|v| format!("mu={}: {v}", self.mu))
            .collect()
    }
}

pub fn run_sweep(ev: &EntanglementVector, spec: &SweepSpec) -> Vec<SweepRow> {
    spec.grid()
        .into_iter()
        .map(|mu| {
            let p = spec.params(mu).expect("validated in SweepSpec::new");
            SweepRow {
                mu,
                eta: p.eta(),
                report: compare_bounds(ev, &p),
            }
        })
        .collect()
}

/// A CSV column: header name and how to read it off a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Mu,
    Eta,
    StateValue,
    PartitionM,
    Bound(BoundKind),
    Warnings,
}

impl Column {
    pub fn header(self) -> &'static str {
        match self {
            Column::Mu => "mu",
            Column::Eta => "eta",
            Column::StateValue => "state_value",
            Column::PartitionM => "partition_m",
            Column::Bound(k) => k.name(),
            Column::Warnings => "warnings",
        }
    }

    fn cell(self, row: &SweepRow) -> String {
        match self {
            Column::Mu => fmt_opt(Some(row.mu)),
            Column::Eta => fmt_opt(Some(row.eta)),
            Column::StateValue => fmt_opt(row.state_value()),
            Column::PartitionM => row.report.partition_m.map(|m| m.to_string()).unwrap_or_default(),
            Column::Bound(k) => fmt_opt(row.report.get(k)),
            Column::Warnings => row.report.warnings.iter().cloned().chain(row.violations()).collect::<Vec<_>>().join("; "),
        }
    }
}

/// Column order of `bounds` output.
pub fn full_columns() -> Vec<Column> {
    let mut cols = vec![Column::Mu, Column::Eta, Column::StateValue, Column::PartitionM];
    cols.extend(BoundKind::ALL.iter().map(|&k| Column::Bound(k)));
    cols.push(Column::Warnings);
    cols
}

pub fn figure_columns(with_state: bool) -> Vec<Column> {
    let mut cols = vec![Column::Mu];
    if with_state {
        cols.push(Column::StateValue);
    }
    cols.extend([
        Column::Bound(BoundKind::Thm3),
        Column::Bound(BoundKind::BaselineLemma1),
        Column::Bound(BoundKind::BaselineSimple),
    ]);
    cols
}

pub fn write_csv<W: Write>(out: W, rows: &[SweepRow], columns: &[Column]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(e.to_string());
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(columns.iter().map(|c| c.header())).map_err(io)?;
    for row in rows {
        w.write_record(columns.iter().map(|c| c.cell(row))).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn csv_string(rows: &[SweepRow], columns: &[Column]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows, columns).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

/// Three-qubit pure state with C(A|BC) = 2√2/3, C(A|B) = √6/3, C(A|C) = √2/3.
pub fn example1_state() -> PureState {
    acin_state([3f64.sqrt() / 3.0, 0.0, 6f64.sqrt() / 6.0, 2f64.sqrt() / 2.0, 0.0], 0.0).expect("normalized coefficients")
}

/// `¾|W⟩⟨W| + ¼|000⟩⟨000|` with `a = (√2/3, √6/3, 1/3)`.
pub fn example2_state() -> DensityMatrix {
    w_mixture([2f64.sqrt() / 3.0, 6f64.sqrt() / 3.0, 1.0 / 3.0], 0.75).expect("normalized coefficients")
}

/// α = 2, γ = √2 (so k = 2), μ from 2 to 10 in steps of 0.05.
pub fn figure_sweep() -> SweepSpec {
    SweepSpec::new(
        MuRange {
            min: 2.0,
            max: 10.0,
            step: 0.05,
        },
        2.0,
        2f64.sqrt(),
        None,
    )
    .expect("fixed figure parameters")
}
