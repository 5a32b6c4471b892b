//! Rotationally symmetric hypersurfaces in a warped product.
//!
//! A hypersurface invariant under the isometries of the fiber is generated
//! by a profile curve in the slice `(r, θ)`, where the fiber is written as
//! `dθ² + sn_c(θ)² g_{S^{n-1}}` (`sn_1 = sin`). Along the profile we use the orthonormal slice
//! frame `E_r = ∂_r`, `E_θ = λ⁻¹∂_θ`; the unit tangent is
//! `T = cos ψ E_r + sin ψ E_θ` and the normal is
//! `ν = σ (sin ψ E_r − cos ψ E_θ)` for an orientation `σ = ±1`.
//! The principal directions are `T` (curvature `κ_p`) and the `n − 1`
//! orbit directions (curvature `κ_o`).

mod identities;
mod io;
mod profile;

use serde::{Deserialize, Serialize};

pub use identities::{verify_identities, verify_identities_with, IdentityOptions, IdentityResiduals, Residual};
pub use io::{read_csv, read_json, write_csv, write_json, CurveRow, SurfaceFile};
pub use profile::{CurveJet, JetMap, ParametricCurve, ProfileCurve, SampledCurve};

use crate::ambient::WarpedAmbient;
use crate::error::{Error, Result};
use crate::numeric::{fornberg_weights, integrate};
use crate::symfunc::KappaVector;

/// Orbit radius below which orbit quantities switch to their axis limits.
pub const AXIS_EPS: f64 = 1e-4;
/// Tolerance of the unit-speed check on sampled curves.
pub const UNIT_SPEED_TOL: f64 = 1e-10;

/// Geometry of the hypersurface at one point of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometrySample {
    /// Arclength along the profile.
    pub s: f64,
    pub r: f64,
    pub theta: f64,
    /// Angle of the tangent measured from `E_r` towards `E_θ`.
    pub psi: f64,
    /// `(ν^r, ν^θ)` in the orthonormal slice frame.
    pub nu: [f64; 2],
    /// `ḡ(∂_r, T)`; the orbit components vanish.
    pub r_1: f64,
    /// `ḡ(∂_r, ν)`.
    pub r_nu: f64,
    /// `ḡ(λ∂_r, ν) = λ r_ν`.
    pub u: f64,
    pub kappa_p: f64,
    /// Orbit curvature, of multiplicity `n − 1`.
    pub kappa_o: f64,
    /// Orbit radius `λ(r) sn_c(θ)`.
    pub w: f64,
    /// `dW/ds`.
    pub w_prime: f64,
    /// `W < AXIS_EPS`; `kappa_o` then holds its axis limit `kappa_p`.
    pub near_axis: bool,
}

impl GeometrySample {
    /// Assembles a sample from position, tangent angle and profile
    /// curvature.
    pub fn from_frame(
        ambient: &WarpedAmbient,
        s: f64,
        r: f64,
        theta: f64,
        psi: f64,
        kappa_p: f64,
        sigma: f64,
    ) -> Result<Self> {
        let (sp, cp) = psi.sin_cos();
        Self::from_parts(ambient, s, r, theta, psi, [cp, sp], kappa_p, sigma)
    }

    /// As [`from_frame`](Self::from_frame) with `(cos ψ, sin ψ)` supplied,
    /// so that axis-parallel and orbit-parallel tangents are exact.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        ambient: &WarpedAmbient,
        s: f64,
        r: f64,
        theta: f64,
        psi: f64,
        dir: [f64; 2],
        kappa_p: f64,
        sigma: f64,
    ) -> Result<Self> {
        check_position(ambient, r, theta)?;
        let l = ambient.lambda_jet(r);
        let [cp, sp] = dir;
        let (st, ct) = ambient.fiber_sn(theta);
        let w = l.v * st;
        let w_prime = cp * l.d1 * st + sp * ct;
        let near_axis = w < AXIS_EPS;
        let kappa_o = if near_axis { kappa_p } else { sigma * (l.d1 / l.v * sp - cp * ct / w) };
        Ok(GeometrySample {
            s,
            r,
            theta,
            psi,
            nu: [sigma * sp, -sigma * cp],
            r_1: cp,
            r_nu: sigma * sp,
            u: l.v * sigma * sp,
            kappa_p,
            kappa_o,
            w,
            w_prime,
            near_axis,
        })
    }

    /// `(κ_p, κ_o, …, κ_o)` in dimension `n`.
    pub fn kappa_vector(&self, n: usize) -> Result<KappaVector> {
        let mut k = vec![self.kappa_o; n];
        k[0] = self.kappa_p;
        KappaVector::new(k)
    }

    /// `(r_1, 0, …, 0)` in dimension `n`.
    pub fn r_tan(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[0] = self.r_1;
        v
    }
}

fn check_position(ambient: &WarpedAmbient, r: f64, theta: f64) -> Result<()> {
    if !(r > 0.0 && r < ambient.r_max()) {
        return Err(Error::DomainError { r, r_max: ambient.r_max() });
    }
    if !(0.0..=ambient.theta_max()).contains(&theta) {
        return Err(Error::InvalidParameter(format!("theta = {theta} outside [0, {}]", ambient.theta_max())));
    }
    Ok(())
}

/// Hypersurface of dimension `n` generated by a profile curve.
#[derive(Debug, Clone)]
pub struct RotationalSurface {
    ambient: WarpedAmbient,
    n: usize,
    curve: ProfileCurve,
    sigma: f64,
    samples: Vec<GeometrySample>,
    /// Curve parameter at each sample (`t` or `s`).
    param: Vec<f64>,
    /// `ds/dt` and `d²s/dt²` at each sample.
    speed: Vec<[f64; 2]>,
}

struct RawNode {
    s_rate: [f64; 2],
    r: f64,
    theta: f64,
    psi: f64,
    dir: [f64; 2],
    psi_s: f64,
}

impl RotationalSurface {
    /// Builds the surface, orienting `ν` so that `u` is positive on most of
    /// the profile.
    pub fn new(ambient: WarpedAmbient, n: usize, curve: ProfileCurve) -> Result<Self> {
        Self::build(ambient, n, curve, None)
    }

    /// Builds the surface with a prescribed orientation `σ = ±1`.
    pub fn with_orientation(ambient: WarpedAmbient, n: usize, curve: ProfileCurve, sigma: f64) -> Result<Self> {
        if sigma != 1.0 && sigma != -1.0 {
            return Err(Error::InvalidParameter(format!("orientation must be +1 or -1, got {sigma}")));
        }
        Self::build(ambient, n, curve, Some(sigma))
    }

    fn build(ambient: WarpedAmbient, n: usize, curve: ProfileCurve, sigma: Option<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("hypersurface dimension must be at least 2, got {n}")));
        }
        let (param, s, nodes) = match &curve {
            ProfileCurve::Parametric(p) => parametric_nodes(&ambient, p)?,
            ProfileCurve::Sampled(c) => sampled_nodes(&ambient, c)?,
        };
        let sigma = sigma.unwrap_or_else(|| {
            let total: f64 = nodes.iter().map(|q| ambient.lambda(q.r) * q.dir[1]).sum();
            if total >= 0.0 { 1.0 } else { -1.0 }
        });
        let mut samples = Vec::with_capacity(nodes.len());
        let mut speed = Vec::with_capacity(nodes.len());
        for (q, &sj) in nodes.iter().zip(&s) {
            let l = ambient.lambda_jet(q.r);
            let kappa_p = sigma * (q.psi_s + l.d1 / l.v * q.dir[1]);
            samples.push(GeometrySample::from_parts(&ambient, sj, q.r, q.theta, q.psi, q.dir, kappa_p, sigma)?);
            speed.push(q.s_rate);
        }
        Ok(RotationalSurface { ambient, n, curve, sigma, samples, param, speed })
    }

    pub fn ambient(&self) -> &WarpedAmbient {
        &self.ambient
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn curve(&self) -> &ProfileCurve {
        &self.curve
    }

    pub fn orientation(&self) -> f64 {
        self.sigma
    }

    pub fn samples(&self) -> &[GeometrySample] {
        &self.samples
    }

    pub(crate) fn param(&self) -> &[f64] {
        &self.param
    }

    pub(crate) fn speed(&self) -> &[[f64; 2]] {
        &self.speed
    }

    /// Largest deviation of `r'^2 + λ^2 θ'^2` from one and of
    /// `r_1^2 + r_ν^2` from one over all samples.
    pub fn frame_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|g| {
                let l = self.ambient.lambda(g.r);
                let dr = g.r_1;
                let dth = self.sigma * g.r_nu / l;
                let speed = (dr * dr + l * l * dth * dth - 1.0).abs();
                let frame = (g.r_1 * g.r_1 + g.r_nu * g.r_nu - 1.0).abs();
                let normal = (g.nu[0] * g.nu[0] + g.nu[1] * g.nu[1] - 1.0).abs();
                speed.max(frame).max(normal)
            })
            .fold(0.0, f64::max)
    }

    /// Principal curvatures `(κ_p, κ_o)` at arclength `s`.
    pub fn curvatures(&self, s: f64) -> Result<(f64, f64)> {
        let g = self.sample_at(s)?;
        if g.w < AXIS_EPS {
            return Err(Error::AxisSingularity { w: g.w });
        }
        Ok((g.kappa_p, g.kappa_o))
    }

    /// Geometry at arclength `s`, exact for closed-form curves and
    /// interpolated from the five nearest samples otherwise.
    pub fn sample_at(&self, s: f64) -> Result<GeometrySample> {
        let first = self.samples[0].s;
        let last = self.samples[self.samples.len() - 1].s;
        let slack = 1e-12 * (1.0 + last.abs());
        if !(s >= first - slack && s <= last + slack) {
            return Err(Error::InvalidParameter(format!("s = {s} outside sampled range [{first}, {last}]")));
        }
        let j = self.samples.partition_point(|g| g.s < s).min(self.samples.len() - 1);
        if (self.samples[j].s - s).abs() <= slack {
            return Ok(self.samples[j]);
        }
        match &self.curve {
            ProfileCurve::Parametric(p) => {
                let (t_lo, t_hi) = (self.param[j - 1], self.param[j]);
                let s_lo = self.samples[j - 1].s;
                let speed = |t: f64| parametric_speed(&self.ambient, p, t);
                let target = s - s_lo;
                let mut lo = t_lo;
                let mut hi = t_hi;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if integrate(speed, t_lo, mid, 1e-15) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
                        break;
                    }
                }
                let t = 0.5 * (lo + hi);
                let q = parametric_node(&self.ambient, p, t)?;
                let l = self.ambient.lambda_jet(q.r);
                let kappa_p = self.sigma * (q.psi_s + l.d1 / l.v * q.dir[1]);
                GeometrySample::from_parts(&self.ambient, s, q.r, q.theta, q.psi, q.dir, kappa_p, self.sigma)
            }
            ProfileCurve::Sampled(_) => {
                let m = self.samples.len();
                let start = j.saturating_sub(3).min(m - 5);
                let nodes: Vec<f64> = self.samples[start..start + 5].iter().map(|g| g.s).collect();
                let w = &fornberg_weights(s, &nodes, 0)[0];
                let interp = |f: fn(&GeometrySample) -> f64| -> f64 {
                    self.samples[start..start + 5].iter().zip(w).map(|(g, c)| c * f(g)).sum()
                };
                let r = interp(|g| g.r);
                let theta = interp(|g| g.theta);
                let psi = interp(|g| g.psi);
                let kappa_p = interp(|g| g.kappa_p);
                GeometrySample::from_frame(&self.ambient, s, r, theta, psi, kappa_p, self.sigma)
            }
        }
    }
}

fn parametric_speed(ambient: &WarpedAmbient, p: &ParametricCurve, t: f64) -> f64 {
    let c = p.eval(t);
    let l = ambient.lambda(c.r.v);
    c.r.d1.hypot(l * c.theta.d1)
}

fn parametric_node(ambient: &WarpedAmbient, p: &ParametricCurve, t: f64) -> Result<RawNode> {
    let c = p.eval(t);
    check_position(ambient, c.r.v, c.theta.v)?;
    let l = ambient.lambda_jet(c.r.v);
    let a = c.r.d1;
    let b = l.v * c.theta.d1;
    let a_t = c.r.d2;
    let b_t = l.d1 * c.r.d1 * c.theta.d1 + l.v * c.theta.d2;
    let v = a.hypot(b);
    if !(v > 0.0) {
        return Err(Error::InvalidParameter(format!("profile parametrisation is singular at t = {t}")));
    }
    let psi_t = (a * b_t - b * a_t) / (v * v);
    Ok(RawNode {
        s_rate: [v, (a * a_t + b * b_t) / v],
        r: c.r.v,
        theta: c.theta.v,
        psi: b.atan2(a),
        dir: [a / v, b / v],
        psi_s: psi_t / v,
    })
}

type Nodes = (Vec<f64>, Vec<f64>, Vec<RawNode>);

fn parametric_nodes(ambient: &WarpedAmbient, p: &ParametricCurve) -> Result<Nodes> {
    let mut nodes = Vec::with_capacity(p.t.len());
    let mut s = Vec::with_capacity(p.t.len());
    let mut acc = 0.0;
    for (j, &t) in p.t.iter().enumerate() {
        if j > 0 {
            acc += integrate(|x| parametric_speed(ambient, p, x), p.t[j - 1], t, 1e-15);
        }
        s.push(acc);
        nodes.push(parametric_node(ambient, p, t)?);
    }
    unwrap_angles(&mut nodes);
    Ok((p.t.clone(), s, nodes))
}

fn sampled_nodes(ambient: &WarpedAmbient, c: &SampledCurve) -> Result<Nodes> {
    let m = c.s.len();
    let mut nodes = Vec::with_capacity(m);
    for j in 0..m {
        check_position(ambient, c.r[j], c.theta[j])?;
        let l = ambient.lambda(c.r[j]);
        let b = l * c.dtheta[j];
        let speed = c.dr[j] * c.dr[j] + b * b;
        if (speed - 1.0).abs() > UNIT_SPEED_TOL {
            return Err(Error::InvalidParameter(format!(
                "sampled curve is not unit speed at s = {} (|γ'|^2 = {speed})",
                c.s[j]
            )));
        }
        nodes.push(RawNode {
            s_rate: [1.0, 0.0],
            r: c.r[j],
            theta: c.theta[j],
            psi: b.atan2(c.dr[j]),
            dir: [c.dr[j], b],
            psi_s: 0.0,
        });
    }
    unwrap_angles(&mut nodes);
    for j in 0..m {
        let start = j.saturating_sub(2).min(m - 5);
        let w = fornberg_weights(c.s[j], &c.s[start..start + 5], 1);
        nodes[j].psi_s = (0..5).map(|k| w[1][k] * nodes[start + k].psi).sum();
    }
    Ok((c.s.clone(), c.s.clone(), nodes))
}

fn unwrap_angles(nodes: &mut [RawNode]) {
    use std::f64::consts::TAU;
    for j in 1..nodes.len() {
        let prev = nodes[j - 1].psi;
        let mut x = nodes[j].psi;
        while x - prev > std::f64::consts::PI {
            x -= TAU;
        }
        while prev - x > std::f64::consts::PI {
            x += TAU;
        }
        nodes[j].psi = x;
    }
}

/// Geometry of the slice `{r0} × N^n`, which is umbilic with
/// `κ = λ'(r0)/λ(r0)` and `u = λ(r0)`.
pub fn slice_geometry(ambient: &WarpedAmbient, n: usize, r0: f64) -> Result<GeometrySample> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("hypersurface dimension must be at least 2, got {n}")));
    }
    if !(r0 > 0.0 && r0 < ambient.r_max()) {
        return Err(Error::DomainError { r: r0, r_max: ambient.r_max() });
    }
    let l = ambient.lambda_jet(r0);
    let kappa = l.d1 / l.v;
    Ok(GeometrySample {
        s: 0.0,
        r: r0,
        theta: std::f64::consts::FRAC_PI_2,
        psi: std::f64::consts::FRAC_PI_2,
        nu: [1.0, 0.0],
        r_1: 0.0,
        r_nu: 1.0,
        u: l.v,
        kappa_p: kappa,
        kappa_o: kappa,
        w: l.v,
        w_prime: 0.0,
        near_axis: false,
    })
}
