//! Figures of merit of an ESR line and comparison tables.

pub mod design;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldSample;
use crate::netline::{Excitation, NetworkPoint};

pub use design::{
    compare_configurations, compare_environment, compare_stacks, evaluate_design, Design,
    DesignError, DesignResult, Drive, EnvVariant, Environment, SolverSettings,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FomError {
    #[error("no probe samples")]
    EmptyProbes,
    #[error("B and E samples are not over the same probe points")]
    MismatchedProbeSets,
}

/// Figures of merit averaged over the probe points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FomReport {
    pub label: String,
    /// Mean `|B|` (T).
    pub avg_b: f64,
    /// Mean `|E|` (V/m).
    pub avg_e: f64,
    /// `avg_b / avg_e` (T·m/V); `+∞` when `avg_e` is zero.
    pub ratio_b_over_e: f64,
    pub ratio_is_infinite: bool,
    /// `avg_b / sqrt(available power)` (T/√W).
    pub conversion_efficiency: f64,
    pub s11_db: f64,
    /// W
    pub dissipated_power: f64,
    /// Standard deviation over mean of `|B|`.
    pub homogeneity_b: f64,
    /// Mean `|B_c|` and `|E_c|` per Cartesian component.
    pub avg_b_components: [f64; 3],
    pub avg_e_components: [f64; 3],
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

pub fn evaluate_fom(
    b_samples: &[FieldSample],
    e_samples: &[FieldSample],
    network: &NetworkPoint,
    excitation: &Excitation,
    label: &str,
) -> Result<FomReport, FomError> {
    if b_samples.is_empty() || e_samples.is_empty() {
        return Err(FomError::EmptyProbes);
    }
    if b_samples.len() != e_samples.len()
        || b_samples
            .iter()
            .zip(e_samples)
            .any(|(b, e)| b.point != e.point)
    {
        return Err(FomError::MismatchedProbeSets);
    }
    let bmag: Vec<f64> = b_samples.iter().map(|s| s.b_magnitude()).collect();
    let avg_b = mean(bmag.iter().copied());
    let avg_e = mean(e_samples.iter().map(|s| s.e_magnitude()));
    let homogeneity_b = if avg_b > 0.0 {
        mean(bmag.iter().map(|b| (b - avg_b).powi(2))).sqrt() / avg_b
    } else {
        0.0
    };
    let (ratio_b_over_e, ratio_is_infinite) = if avg_e > 0.0 {
        (avg_b / avg_e, false)
    } else {
        (f64::INFINITY, true)
    };
    let p = excitation.available_power;
    let conversion_efficiency = if p > 0.0 { avg_b / p.sqrt() } else { 0.0 };
    let avg_b_components = [0, 1, 2].map(|c| mean(b_samples.iter().map(|s| s.b[c].norm())));
    let avg_e_components = [0, 1, 2].map(|c| mean(e_samples.iter().map(|s| s.e[c].norm())));
    Ok(FomReport {
        label: label.to_string(),
        avg_b,
        avg_e,
        ratio_b_over_e,
        ratio_is_infinite,
        conversion_efficiency,
        s11_db: 20.0 * network.s11.norm().log10(),
        dissipated_power: crate::netline::dissipated_power(excitation),
        homogeneity_b,
        avg_b_components,
        avg_e_components,
    })
}

/// Column names of a normalized comparison row, in order.
pub const COLUMNS: [&str; 7] = [
    "avg_B",
    "avg_E",
    "B_over_E",
    "conversion_efficiency",
    "s11_dB",
    "dissipated_power",
    "homogeneity_B",
];

impl FomReport {
    pub fn columns(&self) -> [f64; 7] {
        [
            self.avg_b,
            self.avg_e,
            self.ratio_b_over_e,
            self.conversion_efficiency,
            self.s11_db,
            self.dissipated_power,
            self.homogeneity_b,
        ]
    }
}

/// Rows of reports with every column divided by the reference row's value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub title: String,
    pub reference: usize,
    pub rows: Vec<FomReport>,
    pub normalized: Vec<[f64; 7]>,
}

fn normalize(x: f64, r: f64) -> f64 {
    if x == r {
        1.0
    } else {
        x / r
    }
}

impl ComparisonTable {
    pub fn new(title: &str, rows: Vec<FomReport>, reference: usize) -> Self {
        assert!(reference < rows.len(), "reference row out of range");
        let r = rows[reference].columns();
        let normalized = rows
            .iter()
            .map(|row| {
                let c = row.columns();
                std::array::from_fn(|k| normalize(c[k], r[k]))
            })
            .collect();
        Self {
            title: title.to_string(),
            reference,
            rows,
            normalized,
        }
    }

    pub fn row(&self, label: &str) -> Option<&FomReport> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,reference");
        for c in COLUMNS {
            out.push_str(&format!(",{c}"));
        }
        for c in COLUMNS {
            out.push_str(&format!(",{c}_norm"));
        }
        out.push('\n');
        for (k, (row, norm)) in self.rows.iter().zip(&self.normalized).enumerate() {
            out.push_str(&format!("{},{}", row.label, u8::from(k == self.reference)));
            for v in row.columns().iter().chain(norm.iter()) {
                out.push_str(&format!(",{v:.9e}"));
            }
            out.push('\n');
        }
        out
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.label.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let mut out = format!("{}\n", self.title);
        out.push_str(&format!("{:<width$}", "label"));
        for c in COLUMNS {
            out.push_str(&format!(" {c:>22}"));
        }
        out.push('\n');
        for (k, (row, norm)) in self.rows.iter().zip(&self.normalized).enumerate() {
            let mark = if k == self.reference { "*" } else { "" };
            out.push_str(&format!("{:<width$}", format!("{}{mark}", row.label)));
            for (v, n) in row.columns().iter().zip(norm) {
                out.push_str(&format!(" {:>13.4e} ({n:>5.3})", v));
            }
            out.push('\n');
        }
        out
    }
}
