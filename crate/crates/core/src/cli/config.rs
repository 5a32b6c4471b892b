//! Run configuration read from TOML.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ambient::AmbientSpec;
use crate::error::{Error, Result};
use crate::rotgeo::ProfileCurve;
use crate::soliton::StepControl;
use crate::symfunc::{convex_combine, geometric_combine, inverse_star, ConeSpec, CurvatureFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Hypersurface dimension.
    pub n: usize,
    pub alpha: f64,
    pub ambient: AmbientSpec,
    pub function: FunctionSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check_cone: Option<ConeCheckConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check_condition: Option<ConditionCheckConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shoot: Option<ShootConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            n: 2,
            alpha: 2.0,
            ambient: AmbientSpec::preset("euclidean"),
            function: FunctionSpec::Widened { inner: Box::new(FunctionSpec::MeanCurvature) },
            check_cone: None,
            check_condition: None,
            verify: None,
            slice: None,
            shoot: None,
            scan: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn function(&self) -> Result<CurvatureFunction> {
        self.function.build(self.n)
    }
}

/// Curvature speed descriptor, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    MeanCurvature,
    HkRoot { k: usize },
    SigmaNRoot,
    PowerMean { p: f64 },
    QuotientRoot { k: usize, l: usize },
    Convex { a: Box<FunctionSpec>, b: Box<FunctionSpec>, weight: f64 },
    Geometric { a: Box<FunctionSpec>, b: Box<FunctionSpec>, weight: f64 },
    InverseStar { inner: Box<FunctionSpec> },
    /// `H_k^{1/k}` on `Γ_k` instead of its default cone.
    Widened { inner: Box<FunctionSpec> },
}

impl FunctionSpec {
    pub fn build(&self, n: usize) -> Result<CurvatureFunction> {
        match self {
            FunctionSpec::MeanCurvature => CurvatureFunction::mean_curvature(n),
            FunctionSpec::HkRoot { k } => CurvatureFunction::hk_root(n, *k),
            FunctionSpec::SigmaNRoot => CurvatureFunction::sigma_n_root(n),
            FunctionSpec::PowerMean { p } => CurvatureFunction::power_mean(n, *p),
            FunctionSpec::QuotientRoot { k, l } => CurvatureFunction::quotient_root(n, *k, *l),
            FunctionSpec::Convex { a, b, weight } => convex_combine(&a.build(n)?, &b.build(n)?, *weight),
            FunctionSpec::Geometric { a, b, weight } => geometric_combine(&a.build(n)?, &b.build(n)?, *weight),
            FunctionSpec::InverseStar { inner } => inverse_star(&inner.build(n)?),
            FunctionSpec::Widened { inner } => inner.build(n)?.widened(),
        }
    }
}

/// A cone named in a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeRef {
    /// `gamma_k`, `gamma_tilde_k` or `gamma_plus`.
    pub cone: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl ConeRef {
    pub fn build(&self, n: usize) -> Result<ConeSpec> {
        let k = || self.k.ok_or_else(|| Error::InvalidParameter(format!("cone '{}' needs k", self.cone)));
        match self.cone.as_str() {
            "gamma_k" => ConeSpec::gamma_k(n, k()?),
            "gamma_tilde_k" => ConeSpec::gamma_tilde_k(n, k()?),
            "gamma_plus" if self.k.is_none() => Ok(ConeSpec::gamma_plus(n)),
            "gamma_plus" => Err(Error::InvalidParameter("gamma_plus takes no k".into())),
            other => Err(Error::InvalidParameter(format!("unknown cone '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeExpectation {
    pub cone: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub inside: bool,
}

impl ConeExpectation {
    pub fn cone_ref(&self) -> ConeRef {
        ConeRef { cone: self.cone.clone(), k: self.k }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub cone: ConeRef,
    pub count: usize,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
}

fn default_half_width() -> f64 {
    crate::symfunc::sampling::DEFAULT_BOX
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConeCheckConfig {
    /// Explicit points; their length fixes the dimension.
    pub kappa: Vec<Vec<f64>>,
    pub sample: Option<SampleSpec>,
    /// Required value of every defining quantity.
    pub margin: f64,
    /// Expected membership, applied to every point.
    pub expect: Vec<ConeExpectation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConditionCheckConfig {
    pub kappa: Vec<Vec<f64>>,
    /// Number of seeded samples from the function's own cone.
    pub samples: usize,
    pub half_width: f64,
    pub tol: f64,
    /// Whether every point is expected to pass.
    pub expect_pass: bool,
}

impl Default for ConditionCheckConfig {
    fn default() -> Self {
        ConditionCheckConfig {
            kappa: Vec::new(),
            samples: 0,
            half_width: default_half_width(),
            tol: 1e-12,
            expect_pass: true,
        }
    }
}

/// Profile curve of a hypersurface of revolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Ellipsoid {
        a: f64,
        b: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_t0")]
        t0: f64,
        #[serde(default = "default_t1")]
        t1: f64,
    },
    Torus {
        big_r: f64,
        rho: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    PerturbedSphere {
        r0: f64,
        eps: f64,
        k: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_t0")]
        t0: f64,
        #[serde(default = "default_t1")]
        t1: f64,
    },
    Slice {
        r0: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_t0")]
        t0: f64,
        #[serde(default = "default_t1")]
        t1: f64,
    },
    /// Sampled profile in the CSV layout `s, r, theta, dr, dtheta`.
    Csv { path: String },
    /// Surface file written by the JSON exporter; carries its own ambient.
    Json { path: String },
}

fn default_samples() -> usize {
    801
}

fn default_t0() -> f64 {
    0.05
}

fn default_t1() -> f64 {
    PI - 0.05
}

impl SurfaceSpec {
    pub fn curve(&self) -> Result<Option<ProfileCurve>> {
        Ok(Some(match *self {
            SurfaceSpec::Ellipsoid { a, b, samples, t0, t1 } => ProfileCurve::ellipsoid(a, b, t0, t1, samples)?,
            SurfaceSpec::Torus { big_r, rho, samples } => ProfileCurve::torus(big_r, rho, samples)?,
            SurfaceSpec::PerturbedSphere { r0, eps, k, samples, t0, t1 } => {
                ProfileCurve::perturbed_sphere(r0, eps, k, t0, t1, samples)?
            }
            SurfaceSpec::Slice { r0, samples, t0, t1 } => ProfileCurve::slice(r0, t0, t1, samples)?,
            SurfaceSpec::Csv { .. } | SurfaceSpec::Json { .. } => return Ok(None),
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSpec>,
    #[serde(default = "default_identity_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceCheckConfig>,
}

fn default_identity_tol() -> f64 {
    1e-6
}

/// Term decomposition of `ℒP` at evenly spaced points of a shooting trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceCheckConfig {
    pub start_r: f64,
    #[serde(default = "default_trace_points")]
    pub points: usize,
    #[serde(default = "default_lp_tol")]
    pub tol: f64,
    #[serde(default)]
    pub control: StepControl,
}

fn default_trace_points() -> usize {
    20
}

fn default_lp_tol() -> f64 {
    1e-5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceExpectation {
    Root,
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceConfig {
    pub bracket: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<SliceExpectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_r0: Option<f64>,
    #[serde(default = "default_slice_tol")]
    pub tol: f64,
}

fn default_slice_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShootConfig {
    pub start_r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_closed: Option<bool>,
    #[serde(default)]
    pub control: StepControl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.count < 2 || !(self.start < self.stop) {
            return Err(Error::InvalidParameter(format!(
                "grid needs start < stop and count >= 2, got {self:?}"
            )));
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.start + step * i as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScanExpectation {
    AllClosed,
    NoneClosed,
    /// Closed rows are exactly those within `tol` of `target`.
    ClosedNear { target: f64, tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<ScanExpectation>,
    /// Largest accepted deviation of a closed profile from the sphere of
    /// its start radius, when `alpha = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_tol: Option<f64>,
    #[serde(default)]
    pub control: StepControl,
}

impl ScanConfig {
    pub fn points(&self) -> Result<Vec<f64>> {
        let mut pts = self.values.clone();
        if let Some(g) = &self.grid {
            pts.extend(g.points()?);
        }
        if pts.is_empty() {
            return Err(Error::InvalidParameter("scan needs 'grid' or 'values'".into()));
        }
        Ok(pts)
    }
}
