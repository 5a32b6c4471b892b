use std::fmt;

use serde::Serialize;

use super::cone::{cone_member, ConeKind, ConeSpec};
use super::kappa::{elementary_symmetric, sigma_omit_table, KappaVector};
use crate::error::{Error, Result};
use crate::numeric::binomial;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FunctionKind {
    /// `H_k^{1/k}`.
    HkRoot { k: usize },
    /// `σ_n^{1/n}`, the geometric mean.
    SigmaNRoot,
    /// Power mean `((1/n) Σ κ_i^p)^{1/p}` with `p ∈ [-1, 1] \ {0}`.
    PowerMean { p: f64 },
    /// `(H_k / H_l)^{1/(k-l)}` with `0 <= l < k <= n`.
    QuotientRoot { k: usize, l: usize },
    /// `λ f_1 + (1-λ) f_2`.
    ConvexCombo {
        a: Box<CurvatureFunction>,
        b: Box<CurvatureFunction>,
        weight: f64,
    },
    /// `f_1^λ f_2^{1-λ}`.
    GeomCombo {
        a: Box<CurvatureFunction>,
        b: Box<CurvatureFunction>,
        weight: f64,
    },
    /// `f*(κ) = 1 / f(1/κ_1, …, 1/κ_n)`.
    InverseStar { inner: Box<CurvatureFunction> },
}

/// A symmetric, 1-homogeneous curvature speed together with the cone on
/// which it is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureFunction {
    kind: FunctionKind,
    cone: ConeSpec,
}

impl CurvatureFunction {
    /// `H_k^{1/k}` on `Γ̃_k` for `k < n`; on `Γ_+` for `k = n`.
    pub fn hk_root(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::OrderOutOfRange { k, n });
        }
        let cone = if k < n {
            ConeSpec::gamma_tilde_k(n, k)?
        } else {
            ConeSpec::gamma_plus(n)
        };
        Ok(CurvatureFunction { kind: FunctionKind::HkRoot { k }, cone })
    }

    /// Normalized mean curvature `H = σ_1 / n` on `Γ̃_1`.
    pub fn mean_curvature(n: usize) -> Result<Self> {
        Self::hk_root(n, 1)
    }

    pub fn sigma_n_root(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension {n} < 2")));
        }
        Ok(CurvatureFunction { kind: FunctionKind::SigmaNRoot, cone: ConeSpec::gamma_plus(n) })
    }

    pub fn power_mean(n: usize, p: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&p) || p == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "power mean exponent {p} outside [-1, 1] \\ {{0}}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension {n} < 2")));
        }
        Ok(CurvatureFunction { kind: FunctionKind::PowerMean { p }, cone: ConeSpec::gamma_plus(n) })
    }

    pub fn quotient_root(n: usize, k: usize, l: usize) -> Result<Self> {
        if k > n || l >= k {
            return Err(Error::InvalidParameter(format!(
                "quotient orders need 0 <= l < k <= n, got k={k}, l={l}, n={n}"
            )));
        }
        Ok(CurvatureFunction {
            kind: FunctionKind::QuotientRoot { k, l },
            cone: ConeSpec::gamma_plus(n),
        })
    }

    /// `H_k^{1/k}` evaluated on the larger Gårding cone `Γ_k`, where it is
    /// well defined but the margin inequalities may fail.
    pub fn widened(&self) -> Result<Self> {
        match self.kind {
            FunctionKind::HkRoot { k } => Ok(CurvatureFunction {
                kind: self.kind.clone(),
                cone: ConeSpec::gamma_k(self.n(), k)?,
            }),
            _ => Err(Error::InvalidParameter(format!(
                "{self} has no widened cone"
            ))),
        }
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    pub fn n(&self) -> usize {
        self.cone.n
    }

    fn check(&self, kappa: &KappaVector) -> Result<()> {
        if kappa.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: kappa.n() });
        }
        let m = cone_member(&self.cone, kappa);
        if !m.inside {
            return Err(Error::ConeViolation {
                cone: self.cone.to_string(),
                witness: m.witness.map(|w| w.to_string()).unwrap_or_default(),
            });
        }
        Ok(())
    }

    /// `f(κ)`; fails with `ConeViolation` outside the declared cone.
    pub fn value(&self, kappa: &KappaVector) -> Result<f64> {
        self.check(kappa)?;
        Ok(self.raw(kappa.as_slice(), false).0)
    }

    /// `(∂f/∂κ_i)_i`.
    pub fn gradient(&self, kappa: &KappaVector) -> Result<Vec<f64>> {
        Ok(self.value_and_gradient(kappa)?.1)
    }

    pub fn value_and_gradient(&self, kappa: &KappaVector) -> Result<(f64, Vec<f64>)> {
        self.check(kappa)?;
        let (v, g) = self.raw(kappa.as_slice(), true);
        Ok((v, g.expect("gradient requested")))
    }

    /// Value (and optionally gradient) with no cone check. Callers guarantee
    /// the point lies where the formula is defined.
    pub(crate) fn raw(&self, x: &[f64], want_grad: bool) -> (f64, Option<Vec<f64>>) {
        let n = x.len();
        match &self.kind {
            FunctionKind::HkRoot { k } => {
                let k = *k;
                let e = elementary_symmetric(x);
                let hk = e[k] / binomial(n, k);
                let f = hk.powf(1.0 / k as f64);
                let grad = want_grad.then(|| {
                    let omit = sigma_omit_table(x);
                    let c = f / (k as f64 * e[k]);
                    omit.iter().map(|row| c * row[k - 1]).collect()
                });
                (f, grad)
            }
            FunctionKind::SigmaNRoot => {
                let e = elementary_symmetric(x);
                let f = e[n].powf(1.0 / n as f64);
                let grad = want_grad.then(|| {
                    let omit = sigma_omit_table(x);
                    let c = f / (n as f64 * e[n]);
                    omit.iter().map(|row| c * row[n - 1]).collect()
                });
                (f, grad)
            }
            FunctionKind::PowerMean { p } => {
                let p = *p;
                let mean = x.iter().map(|v| v.powf(p)).sum::<f64>() / n as f64;
                let f = mean.powf(1.0 / p);
                let grad = want_grad.then(|| {
                    let c = f.powf(1.0 - p) / n as f64;
                    x.iter().map(|v| c * v.powf(p - 1.0)).collect()
                });
                (f, grad)
            }
            FunctionKind::QuotientRoot { k, l } => {
                let (k, l) = (*k, *l);
                let e = elementary_symmetric(x);
                let ratio = (e[k] / binomial(n, k)) / (e[l] / binomial(n, l));
                let f = ratio.powf(1.0 / (k - l) as f64);
                let grad = want_grad.then(|| {
                    let omit = sigma_omit_table(x);
                    let c = f / (k - l) as f64;
                    omit.iter()
                        .map(|row| {
                            let lower = if l == 0 { 0.0 } else { row[l - 1] / e[l] };
                            c * (row[k - 1] / e[k] - lower)
                        })
                        .collect()
                });
                (f, grad)
            }
            FunctionKind::ConvexCombo { a, b, weight } => {
                let (fa, ga) = a.raw(x, want_grad);
                let (fb, gb) = b.raw(x, want_grad);
                let w = *weight;
                let grad = want_grad.then(|| {
                    ga.unwrap()
                        .iter()
                        .zip(gb.unwrap())
                        .map(|(p, q)| w * p + (1.0 - w) * q)
                        .collect()
                });
                (w * fa + (1.0 - w) * fb, grad)
            }
            FunctionKind::GeomCombo { a, b, weight } => {
                let (fa, ga) = a.raw(x, want_grad);
                let (fb, gb) = b.raw(x, want_grad);
                let w = *weight;
                let f = fa.powf(w) * fb.powf(1.0 - w);
                let grad = want_grad.then(|| {
                    ga.unwrap()
                        .iter()
                        .zip(gb.unwrap())
                        .map(|(p, q)| f * (w / fa * p + (1.0 - w) / fb * q))
                        .collect()
                });
                (f, grad)
            }
            FunctionKind::InverseStar { inner } => {
                let recip: Vec<f64> = x.iter().map(|v| 1.0 / v).collect();
                let (g, gg) = inner.raw(&recip, want_grad);
                let grad = want_grad.then(|| {
                    gg.unwrap()
                        .iter()
                        .zip(x)
                        .map(|(gi, xi)| gi / (g * g * xi * xi))
                        .collect()
                });
                (1.0 / g, grad)
            }
        }
    }
}

impl fmt::Display for CurvatureFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::HkRoot { k } if *k == 1 => write!(f, "H")?,
            FunctionKind::HkRoot { k } => write!(f, "H_{k}^(1/{k})")?,
            FunctionKind::SigmaNRoot => write!(f, "sigma_n^(1/n)")?,
            FunctionKind::PowerMean { p } => write!(f, "power_mean({p})")?,
            FunctionKind::QuotientRoot { k, l } => write!(f, "(H_{k}/H_{l})^(1/{})", k - l)?,
            FunctionKind::ConvexCombo { a, b, weight } => {
                write!(f, "({weight}*{a} + {}*{b})", 1.0 - weight)?
            }
            FunctionKind::GeomCombo { a, b, weight } => {
                write!(f, "({a}^{weight} * {b}^{})", 1.0 - weight)?
            }
            FunctionKind::InverseStar { inner } => write!(f, "({inner})*")?,
        }
        if let FunctionKind::HkRoot { k } = self.kind {
            if self.cone.kind == ConeKind::GammaK(k) && k < self.n() {
                write!(f, "[widened]")?;
            }
        }
        Ok(())
    }
}

fn check_weight(w: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidParameter(format!("weight {w} outside [0, 1]")));
    }
    Ok(())
}

/// `λ f_1 + (1-λ) f_2` on the shared cone.
pub fn convex_combine(
    a: &CurvatureFunction,
    b: &CurvatureFunction,
    weight: f64,
) -> Result<CurvatureFunction> {
    check_weight(weight)?;
    if a.cone != b.cone {
        return Err(Error::ConeMismatch { left: a.cone.to_string(), right: b.cone.to_string() });
    }
    Ok(CurvatureFunction {
        cone: a.cone,
        kind: FunctionKind::ConvexCombo { a: Box::new(a.clone()), b: Box::new(b.clone()), weight },
    })
}

/// `f_1^λ f_2^{1-λ}` on the shared cone.
pub fn geometric_combine(
    a: &CurvatureFunction,
    b: &CurvatureFunction,
    weight: f64,
) -> Result<CurvatureFunction> {
    check_weight(weight)?;
    if a.cone != b.cone {
        return Err(Error::ConeMismatch { left: a.cone.to_string(), right: b.cone.to_string() });
    }
    Ok(CurvatureFunction {
        cone: a.cone,
        kind: FunctionKind::GeomCombo { a: Box::new(a.clone()), b: Box::new(b.clone()), weight },
    })
}

/// The dual function `f*`, defined on `Γ_+`.
pub fn inverse_star(f: &CurvatureFunction) -> Result<CurvatureFunction> {
    if !f.cone.contains_positive_cone() {
        return Err(Error::InvalidParameter(format!("{f} is not defined on the positive cone")));
    }
    Ok(CurvatureFunction {
        cone: ConeSpec::gamma_plus(f.n()),
        kind: FunctionKind::InverseStar { inner: Box::new(f.clone()) },
    })
}
