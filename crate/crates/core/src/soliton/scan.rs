//! Parallel shooting over a grid of start radii.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shoot::{shoot, StepControl};
use super::SolitonProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub start_r: f64,
    pub closed: bool,
    pub classification: String,
    pub closure_defect: f64,
    pub max_residual: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub p_spread: f64,
    pub length: f64,
    pub samples: usize,
    /// Set when the shot could not start; the numeric columns are then NaN.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn closed(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| r.closed)
    }
}

/// Shoots from every start radius in `grid`; rows are ordered by start
/// radius.
pub fn scan(prob: &SolitonProblem, grid: &[f64], ctrl: &StepControl) -> ScanTable {
    let mut rows: Vec<ScanRow> = grid
        .par_iter()
        .map(|&start_r| match shoot(prob, start_r, ctrl) {
            Ok(t) => ScanRow {
                start_r,
                closed: t.classification.is_closed(),
                classification: t.classification.label().to_string(),
                closure_defect: t.closure_defect,
                max_residual: t.max_residual,
                r_min: t.r_min,
                r_max: t.r_max,
                p_spread: t.p_max - t.p_min,
                length: t.samples.last().map_or(0.0, |x| x.geom.s),
                samples: t.samples.len(),
                error: None,
            },
            Err(e) => ScanRow {
                start_r,
                closed: false,
                classification: "error".into(),
                closure_defect: f64::NAN,
                max_residual: f64::NAN,
                r_min: f64::NAN,
                r_max: f64::NAN,
                p_spread: f64::NAN,
                length: f64::NAN,
                samples: 0,
                error: Some(e.to_string()),
            },
        })
        .collect();
    rows.sort_by(|a, b| a.start_r.total_cmp(&b.start_r));
    ScanTable { rows }
}
