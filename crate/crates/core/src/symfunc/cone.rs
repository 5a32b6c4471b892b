use std::fmt;

use serde::{Deserialize, Serialize};

use super::kappa::{elementary_symmetric, sigma_omit_table, KappaVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "cone", content = "k")]
pub enum ConeKind {
    /// `σ_m > 0` for `1 <= m <= k`.
    GammaK(usize),
    /// `σ_m > 0` for `m < k` and `σ_k(κ|i) > -(k-1) σ_k(κ)` for every `i`.
    GammaTildeK(usize),
    /// All entries positive.
    GammaPlus,
}

/// An open symmetric cone in `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub kind: ConeKind,
    pub n: usize,
}

impl ConeSpec {
    pub fn new(kind: ConeKind, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("cone dimension {n} < 2")));
        }
        match kind {
            ConeKind::GammaK(k) if k == 0 || k > n => return Err(Error::OrderOutOfRange { k, n }),
            ConeKind::GammaTildeK(k) if k == 0 || k >= n => {
                return Err(Error::OrderOutOfRange { k, n })
            }
            _ => {}
        }
        Ok(ConeSpec { kind, n })
    }

    pub fn gamma_k(n: usize, k: usize) -> Result<Self> {
        Self::new(ConeKind::GammaK(k), n)
    }

    pub fn gamma_tilde_k(n: usize, k: usize) -> Result<Self> {
        Self::new(ConeKind::GammaTildeK(k), n)
    }

    pub fn gamma_plus(n: usize) -> Self {
        ConeSpec { kind: ConeKind::GammaPlus, n }
    }

    pub fn contains(&self, kappa: &KappaVector) -> bool {
        cone_member(self, kappa).inside
    }

    /// Whether this cone contains the positive cone `Γ_+`. True for every
    /// kind this type can represent.
    pub fn contains_positive_cone(&self) -> bool {
        true
    }
}

impl fmt::Display for ConeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ConeKind::GammaK(k) => write!(f, "gamma_{k}(n={})", self.n),
            ConeKind::GammaTildeK(k) => write!(f, "gamma_tilde_{k}(n={})", self.n),
            ConeKind::GammaPlus => write!(f, "gamma_plus(n={})", self.n),
        }
    }
}

/// The first defining inequality that fails. Indices are 1-based, matching
/// the usual labelling of the inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum ConeWitness {
    /// `σ_m(κ) > 0` fails.
    Sigma { m: usize, value: f64 },
    /// `σ_k(κ|i) > -(k-1) σ_k(κ)` fails.
    Omit { i: usize, lhs: f64, rhs: f64 },
    /// `κ_i > 0` fails.
    Entry { i: usize, value: f64 },
    /// Dimension of the point differs from the cone's.
    Dimension { expected: usize, got: usize },
}

impl fmt::Display for ConeWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ConeWitness::Sigma { m, value } => write!(f, "sigma_{m} = {value} <= 0"),
            ConeWitness::Omit { i, lhs, rhs } => {
                write!(f, "sigma_k(kappa|{i}) = {lhs} <= {rhs}")
            }
            ConeWitness::Entry { i, value } => write!(f, "kappa_{i} = {value} <= 0"),
            ConeWitness::Dimension { expected, got } => {
                write!(f, "dimension {got} != {expected}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub inside: bool,
    pub witness: Option<ConeWitness>,
}

impl Membership {
    fn yes() -> Self {
        Membership { inside: true, witness: None }
    }
    fn no(w: ConeWitness) -> Self {
        Membership { inside: false, witness: Some(w) }
    }
}

/// Strict membership test with zero margin.
pub fn cone_member(spec: &ConeSpec, kappa: &KappaVector) -> Membership {
    cone_member_with_margin(spec, kappa, 0.0)
}

/// Membership test where every defining quantity must exceed `margin`.
pub fn cone_member_with_margin(spec: &ConeSpec, kappa: &KappaVector, margin: f64) -> Membership {
    if kappa.n() != spec.n {
        return Membership::no(ConeWitness::Dimension { expected: spec.n, got: kappa.n() });
    }
    let x = kappa.as_slice();
    match spec.kind {
        ConeKind::GammaPlus => {
            for (i, &v) in x.iter().enumerate() {
                if v <= margin {
                    return Membership::no(ConeWitness::Entry { i: i + 1, value: v });
                }
            }
            Membership::yes()
        }
        ConeKind::GammaK(k) => {
            let e = elementary_symmetric(x);
            for (m, &value) in e.iter().enumerate().take(k + 1).skip(1) {
                if value <= margin {
                    return Membership::no(ConeWitness::Sigma { m, value });
                }
            }
            Membership::yes()
        }
        ConeKind::GammaTildeK(k) => {
            let e = elementary_symmetric(x);
            for (m, &value) in e.iter().enumerate().take(k).skip(1) {
                if value <= margin {
                    return Membership::no(ConeWitness::Sigma { m, value });
                }
            }
            let rhs = -((k - 1) as f64) * e[k];
            let omit = sigma_omit_table(x);
            for (i, row) in omit.iter().enumerate() {
                if row[k] - rhs <= margin {
                    return Membership::no(ConeWitness::Omit { i: i + 1, lhs: row[k], rhs });
                }
            }
            Membership::yes()
        }
    }
}
