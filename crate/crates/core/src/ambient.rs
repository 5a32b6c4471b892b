//! Warped product ambients `[0, r̄) ×_λ N^n` whose fiber has constant
//! sectional curvature `c`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::Jet;
use crate::numeric::{integrate, linspace};

/// Spacing of the cached Φ nodes for custom warping functions.
const PHI_NODE_SPACING: f64 = 0.25;
/// Cached Φ nodes never extend past this radius.
const PHI_TABLE_CAP: f64 = 64.0;
const PHI_TOL: f64 = 1e-13;
const FRAME_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Warping {
    /// `λ = r`
    Euclidean,
    /// `λ = sin r`
    Sphere,
    /// `λ = sinh r`
    Hyperbolic,
    Custom(Expr),
}

#[derive(Debug)]
pub struct WarpedAmbient {
    warping: Warping,
    c: f64,
    r_max: f64,
    phi_nodes: OnceLock<Vec<f64>>,
}

impl Clone for WarpedAmbient {
    fn clone(&self) -> Self {
        WarpedAmbient {
            warping: self.warping.clone(),
            c: self.c,
            r_max: self.r_max,
            phi_nodes: self.phi_nodes.clone(),
        }
    }
}

impl PartialEq for WarpedAmbient {
    fn eq(&self, other: &Self) -> bool {
        self.warping == other.warping && self.c == other.c && self.r_max == other.r_max
    }
}

impl WarpedAmbient {
    fn preset(warping: Warping, r_max: f64) -> Self {
        WarpedAmbient { warping, c: 1.0, r_max, phi_nodes: OnceLock::new() }
    }

    pub fn euclidean() -> Self {
        Self::preset(Warping::Euclidean, f64::INFINITY)
    }

    pub fn sphere() -> Self {
        Self::preset(Warping::Sphere, PI)
    }

    pub fn hyperbolic() -> Self {
        Self::preset(Warping::Hyperbolic, f64::INFINITY)
    }

    /// Custom warping `λ(r)` given as an expression in `r`.
    pub fn custom(lambda: &str, c: f64, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0) {
            return Err(Error::InvalidParameter(format!("r_max must be positive, got {r_max}")));
        }
        if !c.is_finite() {
            return Err(Error::InvalidParameter("fiber curvature must be finite".into()));
        }
        let expr = Expr::parse(lambda)?;
        Ok(WarpedAmbient { warping: Warping::Custom(expr), c, r_max, phi_nodes: OnceLock::new() })
    }

    pub fn warping(&self) -> &Warping {
        &self.warping
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn is_space_form(&self) -> bool {
        !matches!(self.warping, Warping::Custom(_))
    }

    pub fn name(&self) -> String {
        match &self.warping {
            Warping::Euclidean => "euclidean".into(),
            Warping::Sphere => "sphere".into(),
            Warping::Hyperbolic => "hyperbolic".into(),
            Warping::Custom(e) => format!("custom({})", e.source()),
        }
    }

    /// `(λ, λ', λ'')` at `r` as a jet.
    pub fn lambda_jet(&self, r: f64) -> Jet {
        match &self.warping {
            Warping::Euclidean => Jet::new(r, 1.0, 0.0),
            Warping::Sphere => {
                let (s, c) = r.sin_cos();
                Jet::new(s, c, -s)
            }
            Warping::Hyperbolic => Jet::new(r.sinh(), r.cosh(), r.sinh()),
            Warping::Custom(e) => e.eval_jet(Jet::variable(r)),
        }
    }

    pub fn lambda(&self, r: f64) -> f64 {
        match &self.warping {
            Warping::Euclidean => r,
            Warping::Sphere => r.sin(),
            Warping::Hyperbolic => r.sinh(),
            Warping::Custom(e) => e.eval(r),
        }
    }

    /// `(sn_c(θ), sn_c'(θ))`, writing the fiber as `dθ² + sn_c(θ)² g_{S^{n-1}}`.
    pub fn fiber_sn(&self, theta: f64) -> (f64, f64) {
        let c = self.c;
        if c > 0.0 {
            let k = c.sqrt();
            let (s, co) = (k * theta).sin_cos();
            (s / k, co)
        } else if c < 0.0 {
            let k = (-c).sqrt();
            ((k * theta).sinh() / k, (k * theta).cosh())
        } else {
            (theta, 1.0)
        }
    }

    /// Polar angle of the antipodal axis point of the fiber; infinite when
    /// `c <= 0`.
    pub fn theta_max(&self) -> f64 {
        if self.c > 0.0 {
            PI / self.c.sqrt()
        } else {
            f64::INFINITY
        }
    }

    fn check_domain(&self, r: f64, open_at_zero: bool) -> Result<()> {
        let low_ok = if open_at_zero { r > 0.0 } else { r >= 0.0 };
        if !(low_ok && r < self.r_max) {
            return Err(Error::DomainError { r, r_max: self.r_max });
        }
        Ok(())
    }

    fn phi_table(&self) -> &Vec<f64> {
        self.phi_nodes.get_or_init(|| {
            let cap = self.r_max.min(PHI_TABLE_CAP);
            let count = (cap / PHI_NODE_SPACING).floor() as usize;
            let mut acc = 0.0;
            let mut nodes = Vec::with_capacity(count + 1);
            nodes.push(0.0);
            for j in 0..count {
                let a = j as f64 * PHI_NODE_SPACING;
                acc += integrate(|s| self.lambda(s), a, a + PHI_NODE_SPACING, PHI_TOL);
                nodes.push(acc);
            }
            nodes
        })
    }

    /// `Φ(r) = ∫_0^r λ(s) ds`.
    pub fn phi(&self, r: f64) -> Result<f64> {
        self.check_domain(r, false)?;
        Ok(match &self.warping {
            Warping::Euclidean => 0.5 * r * r,
            // 1 - cos r, written to avoid cancellation near 0
            Warping::Sphere => 2.0 * (0.5 * r).sin().powi(2),
            Warping::Hyperbolic => 2.0 * (0.5 * r).sinh().powi(2),
            Warping::Custom(_) => {
                let table = self.phi_table();
                let j = ((r / PHI_NODE_SPACING).floor() as usize).min(table.len() - 1);
                let a = j as f64 * PHI_NODE_SPACING;
                table[j] + integrate(|s| self.lambda(s), a, r, PHI_TOL)
            }
        })
    }

    /// `Φ` with its first two derivatives. Presets differentiate their
    /// closed forms; custom warpings use `Φ' = λ`.
    pub fn phi_jet(&self, r: f64) -> Result<Jet> {
        self.check_domain(r, false)?;
        let x = Jet::variable(r);
        Ok(match &self.warping {
            Warping::Euclidean => x * x * 0.5,
            Warping::Sphere => (x * 0.5).sin().powi(2) * 2.0,
            Warping::Hyperbolic => (x * 0.5).sinh().powi(2) * 2.0,
            Warping::Custom(_) => {
                let l = self.lambda_jet(r);
                Jet::new(self.phi(r)?, l.v, l.d1)
            }
        })
    }

    /// `λ''/λ + (c - λ'^2)/λ^2`.
    pub fn curvature_coeff(&self, r: f64) -> Result<f64> {
        self.check_domain(r, true)?;
        Ok(match &self.warping {
            // identically zero for space forms with c = 1
            Warping::Euclidean | Warping::Sphere | Warping::Hyperbolic if self.c == 1.0 => 0.0,
            _ => {
                let l = self.lambda_jet(r);
                l.d2 / l.v + (self.c - l.d1 * l.d1) / (l.v * l.v)
            }
        })
    }

    /// Same quantity as [`curvature_coeff`](Self::curvature_coeff) but
    /// always computed from the formula, even for presets.
    pub fn curvature_coeff_formula(&self, r: f64) -> Result<f64> {
        self.check_domain(r, true)?;
        let l = self.lambda_jet(r);
        Ok(l.d2 / l.v + (self.c - l.d1 * l.d1) / (l.v * l.v))
    }

    /// Pointwise check of `λ' > 0`, the curvature inequality and the fiber
    /// Ricci bound `c >= λ'^2 - λλ''` on `grid`.
    pub fn check_assumptions(&self, grid: &[f64], tol: f64) -> Result<AmbientReport> {
        let mut rows = Vec::with_capacity(grid.len());
        for &r in grid {
            let l = self.lambda_jet(r);
            let coeff = self.curvature_coeff_formula(r)?;
            rows.push(AmbientRow {
                r,
                lambda: l.v,
                lambda_prime: l.d1,
                coeff,
                lambda_prime_positive: l.d1 > 0.0 && l.v > 0.0,
                coeff_nonneg: coeff >= -tol,
                ric_condition: self.c >= l.d1 * l.d1 - l.v * l.d2 - tol,
            });
        }
        Ok(AmbientReport {
            ambient: self.name(),
            lambda_prime_positive: rows.iter().all(|r| r.lambda_prime_positive),
            coeff_nonneg: rows.iter().all(|r| r.coeff_nonneg),
            ric_condition: rows.iter().all(|r| r.ric_condition),
            rows,
        })
    }

    /// Grid of `points` radii covering `(eps, r̄ - eps)`, truncated at
    /// `r_cap` when `r̄` is infinite.
    pub fn interior_grid(&self, points: usize, eps: f64, r_cap: f64) -> Vec<f64> {
        let hi = if self.r_max.is_finite() { self.r_max - eps } else { r_cap };
        linspace(eps, hi, points)
    }

    /// `F^{ij} R̄_{νjli} ḡ(λ∂_r, e_l)` in a principal frame, where
    /// `r_tan[i] = ḡ(∂_r, e_i)`, `r_nu = ḡ(∂_r, ν)` and `fgrad[i] = ∂f/∂κ_i`.
    pub fn rbar_contract(&self, r: f64, r_tan: &[f64], r_nu: f64, fgrad: &[f64]) -> Result<f64> {
        if r_tan.len() != fgrad.len() {
            return Err(Error::DimensionMismatch { expected: r_tan.len(), got: fgrad.len() });
        }
        let tan_sq: f64 = r_tan.iter().map(|x| x * x).sum();
        let norm_sq = tan_sq + r_nu * r_nu;
        if (norm_sq - 1.0).abs() > FRAME_TOL {
            return Err(Error::FrameError { norm_sq });
        }
        let coeff = self.curvature_coeff(r)?;
        let u = self.lambda(r) * r_nu;
        let trace: f64 = fgrad.iter().sum();
        let weighted: f64 = fgrad.iter().zip(r_tan).map(|(f, x)| f * x * x).sum();
        Ok(-u * coeff * (tan_sq * trace - weighted))
    }

    /// `Ric̄(ν, λ ∂_r^T)` for a hypersurface of dimension `r_tan.len()`.
    pub fn ricci_normal_tangent(&self, r: f64, r_tan: &[f64], r_nu: f64) -> Result<f64> {
        let n = r_tan.len();
        let ones = vec![1.0; n];
        self.rbar_contract(r, r_tan, r_nu, &ones)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbientRow {
    pub r: f64,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub coeff: f64,
    pub lambda_prime_positive: bool,
    pub coeff_nonneg: bool,
    pub ric_condition: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbientReport {
    pub ambient: String,
    pub lambda_prime_positive: bool,
    pub coeff_nonneg: bool,
    pub ric_condition: bool,
    pub rows: Vec<AmbientRow>,
}

/// Serializable description of an ambient, as used in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AmbientSpec {
    /// `euclidean`, `sphere` or `hyperbolic`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Custom warping expression in `r`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Upper end of the radial domain; absent means unbounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
}

impl AmbientSpec {
    pub fn preset(name: &str) -> Self {
        AmbientSpec { preset: Some(name.into()), ..Default::default() }
    }

    pub fn build(&self) -> Result<WarpedAmbient> {
        match (&self.preset, &self.lambda) {
            (Some(p), None) => {
                if self.c.is_some_and(|c| c != 1.0) {
                    return Err(Error::InvalidParameter("presets carry c = 1".into()));
                }
                match p.as_str() {
                    "euclidean" => Ok(WarpedAmbient::euclidean()),
                    "sphere" => Ok(WarpedAmbient::sphere()),
                    "hyperbolic" => Ok(WarpedAmbient::hyperbolic()),
                    other => Err(Error::InvalidParameter(format!("unknown preset '{other}'"))),
                }
            }
            (None, Some(expr)) => WarpedAmbient::custom(
                expr,
                self.c.unwrap_or(1.0),
                self.r_max.unwrap_or(f64::INFINITY),
            ),
            _ => Err(Error::InvalidParameter(
                "ambient needs exactly one of 'preset' or 'lambda'".into(),
            )),
        }
    }

    pub fn describe(ambient: &WarpedAmbient) -> Self {
        match ambient.warping() {
            Warping::Euclidean => Self::preset("euclidean"),
            Warping::Sphere => Self::preset("sphere"),
            Warping::Hyperbolic => Self::preset("hyperbolic"),
            Warping::Custom(e) => AmbientSpec {
                preset: None,
                lambda: Some(e.source().to_string()),
                c: Some(ambient.c()),
                r_max: ambient.r_max().is_finite().then_some(ambient.r_max()),
            },
        }
    }
}
