//! Profile curves `s ↦ (r(s), θ(s))` in the two-dimensional slice
//! `dr² + λ(r)² dθ²`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::numeric::linspace;

/// A scalar map carried through [`Jet`] arithmetic.
pub type JetMap = Arc<dyn Fn(Jet) -> Jet + Send + Sync>;

/// Closed-form curve `t ↦ (r(t), θ(t))` sampled on a uniform `t` grid.
/// The parameter need not be arclength.
#[derive(Clone)]
pub struct ParametricCurve {
    pub(crate) r: JetMap,
    pub(crate) theta: JetMap,
    pub(crate) t: Vec<f64>,
    pub(crate) label: String,
}

/// Unit-speed curve given by samples of `(s, r, θ, r', θ')`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub s: Vec<f64>,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub dr: Vec<f64>,
    pub dtheta: Vec<f64>,
}

#[derive(Clone)]
pub enum ProfileCurve {
    Parametric(ParametricCurve),
    Sampled(SampledCurve),
}

impl fmt::Debug for ProfileCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileCurve::Parametric(p) => f
                .debug_struct("Parametric")
                .field("label", &p.label)
                .field("samples", &p.t.len())
                .finish(),
            ProfileCurve::Sampled(c) => f.debug_struct("Sampled").field("samples", &c.s.len()).finish(),
        }
    }
}

/// Value, first and second derivative in `t` of `(r, θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub r: Jet,
    pub theta: Jet,
}

impl ParametricCurve {
    pub fn eval(&self, t: f64) -> CurveJet {
        let x = Jet::variable(t);
        CurveJet { r: (self.r)(x), theta: (self.theta)(x) }
    }

    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl SampledCurve {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

impl ProfileCurve {
    /// Closed-form curve on `samples` uniform parameter values in `[t0, t1]`.
    pub fn parametric(
        r: impl Fn(Jet) -> Jet + Send + Sync + 'static,
        theta: impl Fn(Jet) -> Jet + Send + Sync + 'static,
        t0: f64,
        t1: f64,
        samples: usize,
        label: &str,
    ) -> Result<Self> {
        if !(t1 > t0) || samples < 9 {
            return Err(Error::InvalidParameter(format!(
                "parametric curve needs t0 < t1 and at least 9 samples (got [{t0}, {t1}], {samples})"
            )));
        }
        Ok(ProfileCurve::Parametric(ParametricCurve {
            r: Arc::new(r),
            theta: Arc::new(theta),
            t: linspace(t0, t1, samples),
            label: label.to_string(),
        }))
    }

    /// Sampled unit-speed curve; `s` must be strictly increasing.
    pub fn sampled(curve: SampledCurve) -> Result<Self> {
        let m = curve.s.len();
        if [curve.r.len(), curve.theta.len(), curve.dr.len(), curve.dtheta.len()]
            .iter()
            .any(|&l| l != m)
        {
            return Err(Error::Format("sampled curve columns differ in length".into()));
        }
        if m < 9 {
            return Err(Error::InvalidParameter(format!("need at least 9 samples, got {m}")));
        }
        if curve.s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("arclength samples must increase strictly".into()));
        }
        Ok(ProfileCurve::Sampled(curve))
    }

    pub fn len(&self) -> usize {
        match self {
            ProfileCurve::Parametric(p) => p.t.len(),
            ProfileCurve::Sampled(c) => c.s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Euclidean ellipsoid of revolution with semi-axes `(a, …, a, b)`,
    /// parametrised by `x = a sin t`, `z = b cos t`.
    pub fn ellipsoid(a: f64, b: f64, t0: f64, t1: f64, samples: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || t0 <= 0.0 || t1 >= std::f64::consts::PI {
            return Err(Error::InvalidParameter(format!(
                "ellipsoid needs positive semi-axes and 0 < t0 < t1 < pi (a={a}, b={b}, t=[{t0}, {t1}])"
            )));
        }
        let x = move |t: Jet| t.sin() * a;
        let z = move |t: Jet| t.cos() * b;
        Self::parametric(
            move |t| (x(t) * x(t) + z(t) * z(t)).sqrt(),
            move |t| x(t).atan2(z(t)),
            t0,
            t1,
            samples,
            &format!("ellipsoid(a={a}, b={b})"),
        )
    }

    /// Euclidean torus of revolution: tube radius `rho` around the circle
    /// of radius `big_r` in the orbit plane.
    pub fn torus(big_r: f64, rho: f64, samples: usize) -> Result<Self> {
        if !(rho > 0.0 && big_r > rho) {
            return Err(Error::InvalidParameter(format!("torus needs 0 < rho < R (R={big_r}, rho={rho})")));
        }
        let x = move |t: Jet| t.cos() * rho + big_r;
        let z = move |t: Jet| t.sin() * rho;
        Self::parametric(
            move |t| (x(t) * x(t) + z(t) * z(t)).sqrt(),
            move |t| x(t).atan2(z(t)),
            0.0,
            2.0 * std::f64::consts::PI,
            samples,
            &format!("torus(R={big_r}, rho={rho})"),
        )
    }

    /// `r = r0 (1 + eps cos(k θ))` over `θ ∈ [t0, t1]`.
    pub fn perturbed_sphere(r0: f64, eps: f64, k: f64, t0: f64, t1: f64, samples: usize) -> Result<Self> {
        if !(r0 > 0.0) || eps.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!("perturbed sphere needs r0 > 0, |eps| < 1 (r0={r0}, eps={eps})")));
        }
        Self::parametric(
            move |t| ((t * k).cos() * eps + 1.0) * r0,
            |t| t,
            t0,
            t1,
            samples,
            &format!("perturbed_sphere(r0={r0}, eps={eps}, k={k})"),
        )
    }

    /// The slice `r ≡ r0` over `θ ∈ [t0, t1]`.
    pub fn slice(r0: f64, t0: f64, t1: f64, samples: usize) -> Result<Self> {
        if !(r0 > 0.0) {
            return Err(Error::InvalidParameter(format!("slice radius must be positive, got {r0}")));
        }
        Self::parametric(move |_| Jet::constant(r0), |t| t, t0, t1, samples, &format!("slice(r0={r0})"))
    }
}
