use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::function::CurvatureFunction;
use super::kappa::KappaVector;
use crate::error::{Error, Result};

/// One failed inequality of the structural condition. `i` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "inequality")]
pub enum ConditionFailure {
    /// `Σ f^i >= 1`
    TraceSum { value: f64 },
    /// `Σ f^i κ_i^2 >= f^2`
    QuadraticSum { value: f64 },
    /// `f - f^i κ_i >= 0`
    Margin { i: usize, value: f64 },
}

/// Slack of the three inequality families at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    /// `Σ f^i - 1`
    pub s1: f64,
    /// `Σ f^i κ_i^2 - f^2`
    pub s2: f64,
    /// `m_i = f - f^i κ_i`
    pub margins: Vec<f64>,
    pub tol: f64,
    pub failures: Vec<ConditionFailure>,
    pub pass: bool,
}

impl ConditionReport {
    /// Smallest of all slack values.
    pub fn worst(&self) -> f64 {
        self.margins.iter().copied().fold(self.s1.min(self.s2), f64::min)
    }

    pub fn worst_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates the trace, quadratic and per-index margin inequalities of `f`
/// at `kappa`; each passes when its slack is `>= -tol`.
pub fn check_condition_v(
    f: &CurvatureFunction,
    kappa: &KappaVector,
    tol: f64,
) -> Result<ConditionReport> {
    let (v, g) = f.value_and_gradient(kappa)?;
    let x = kappa.as_slice();
    let s1 = g.iter().sum::<f64>() - 1.0;
    let s2 = g.iter().zip(x).map(|(gi, xi)| gi * xi * xi).sum::<f64>() - v * v;
    let margins: Vec<f64> = g.iter().zip(x).map(|(gi, xi)| v - gi * xi).collect();
    let mut failures = Vec::new();
    if s1 < -tol {
        failures.push(ConditionFailure::TraceSum { value: s1 });
    }
    if s2 < -tol {
        failures.push(ConditionFailure::QuadraticSum { value: s2 });
    }
    for (i, &m) in margins.iter().enumerate() {
        if m < -tol {
            failures.push(ConditionFailure::Margin { i: i + 1, value: m });
        }
    }
    Ok(ConditionReport { s1, s2, margins, tol, pass: failures.is_empty(), failures })
}

/// Largest second central difference of `t ↦ f(κ + t d)` at `t = 0` over
/// `trials` random unit directions. A concave `f` gives a value `<= 0` up
/// to rounding. The step shrinks when the stencil leaves the cone.
pub fn concavity_probe(
    f: &CurvatureFunction,
    kappa: &KappaVector,
    trials: usize,
    step: f64,
    seed: u64,
) -> Result<f64> {
    let f0 = f.value(kappa)?;
    let n = kappa.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let mut d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        d.iter_mut().for_each(|v| *v /= norm);
        let mut h = step;
        let second = loop {
            let plus: Vec<f64> = kappa.as_slice().iter().zip(&d).map(|(x, di)| x + h * di).collect();
            let minus: Vec<f64> = kappa.as_slice().iter().zip(&d).map(|(x, di)| x - h * di).collect();
            let plus = KappaVector::new(plus)?;
            let minus = KappaVector::new(minus)?;
            if f.cone().contains(&plus) && f.cone().contains(&minus) {
                let fp = f.value(&plus)?;
                let fm = f.value(&minus)?;
                break (fp - 2.0 * f0 + fm) / (h * h);
            }
            h *= 0.5;
            if h < 1e-8 * step.max(1e-300) {
                return Err(Error::ConeViolation {
                    cone: f.cone().to_string(),
                    witness: "difference stencil cannot fit inside the cone".into(),
                });
            }
        };
        worst = worst.max(second);
    }
    Ok(worst)
}
