//! Finite-difference verification of the structure equations of a
//! rotational hypersurface.
//!
//! Left sides are difference quotients along the profile; right sides are
//! built from the curvature data. For a rotationally invariant function
//! `ψ(s)` the Hessian in the principal frame is `Hess(e_1, e_1) = ψ''` and
//! `Hess(e_o, e_o) = (W'/W) ψ'`.

use serde::Serialize;

use super::{RotationalSurface, AXIS_EPS};
use crate::error::{Error, Result};
use super::ProfileCurve;
use crate::numeric::{d1_central4, d2_central4, fornberg_weights};
use crate::symfunc::CurvatureFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityOptions {
    /// Largest accepted relative gap between the step-`h` and step-`2h`
    /// difference quotients.
    pub richardson_tol: f64,
    /// Samples with orbit radius below this are skipped.
    pub axis_eps: f64,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        IdentityOptions { richardson_tol: 1e-5, axis_eps: AXIS_EPS }
    }
}

/// Largest relative residual `|lhs − rhs| / max(1, |lhs|, |rhs|)` of one
/// identity over the interior samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct Residual {
    pub max: f64,
    /// Arclength where the maximum is attained.
    pub at_s: f64,
}

impl Residual {
    fn record(&mut self, lhs: f64, rhs: f64, s: f64) {
        let res = (lhs - rhs).abs() / 1f64.max(lhs.abs()).max(rhs.abs());
        if res > self.max || res.is_nan() {
            self.max = res;
            self.at_s = s;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `∇_1 u = κ_p ḡ(λ∂_r, e_1)`.
    pub grad_u: Residual,
    /// `∇_1 Φ = ḡ(λ∂_r, e_1)`.
    pub grad_phi: Residual,
    /// `∇_1∇_1 Φ = λ' − u κ_p`.
    pub hess_phi_tangent: Residual,
    /// `∇_o∇_o Φ = λ' − u κ_o`.
    pub hess_phi_orbit: Residual,
    /// `ℒu = ḡ(λ∂_r, ∇F) + F^{ij} R̄_{νjli} ḡ(λ∂_r, e_l) + λ'F − u F^{ij} h_{il} h_{jl}`.
    pub lu: Residual,
    /// `∇_1 h_oo − ∇_o h_1o = R̄_{νoo1}`.
    pub codazzi: Residual,
    pub samples_used: usize,
}

impl IdentityResiduals {
    pub fn entries(&self) -> [(&'static str, Residual); 6] {
        [
            ("grad_u", self.grad_u),
            ("grad_phi", self.grad_phi),
            ("hess_phi_tangent", self.hess_phi_tangent),
            ("hess_phi_orbit", self.hess_phi_orbit),
            ("lu", self.lu),
            ("codazzi", self.codazzi),
        ]
    }

    pub fn max(&self) -> f64 {
        self.entries().iter().map(|(_, r)| r.max).fold(0.0, f64::max)
    }
}

pub fn verify_identities(surface: &RotationalSurface, f: &CurvatureFunction) -> Result<IdentityResiduals> {
    verify_identities_with(surface, f, &IdentityOptions::default())
}

/// First and second arclength derivatives at one sample, from five-point
/// stencils with a coarse-grid consistency check.
struct Stencil {
    fine: [usize; 5],
    coarse: [usize; 5],
    weights: Weights,
    v: f64,
    v_t: f64,
    s: f64,
    tol: f64,
}

enum Weights {
    Uniform(f64),
    General { fine: Vec<Vec<f64>>, coarse: Vec<Vec<f64>> },
}

impl Stencil {
    fn new(x: &[f64], uniform: Option<f64>, i: usize, v: [f64; 2], s: f64, tol: f64) -> Self {
        let fine = [i - 2, i - 1, i, i + 1, i + 2];
        let coarse = [i - 4, i - 2, i, i + 2, i + 4];
        let nodes = |idx: &[usize; 5]| idx.iter().map(|&j| x[j]).collect::<Vec<_>>();
        let weights = match uniform {
            Some(h) => Weights::Uniform(h),
            None => Weights::General {
                fine: fornberg_weights(x[i], &nodes(&fine), 2),
                coarse: fornberg_weights(x[i], &nodes(&coarse), 2),
            },
        };
        Stencil {
            weights,
            fine,
            coarse,
            v: v[0],
            v_t: v[1],
            s,
            tol,
        }
    }

    fn apply(&self, values: &[f64], name: &str) -> Result<(f64, f64)> {
        let dot = |w: &[f64], idx: &[usize; 5]| -> f64 { w.iter().zip(idx).map(|(c, &j)| c * values[j]).sum() };
        let at = |idx: &[usize; 5]| idx.map(|j| values[j]);
        let (f1, f2, c1, c2) = match &self.weights {
            Weights::Uniform(h) => {
                let [a, b, c, d, e] = at(&self.fine);
                let [p, q, _, r, t] = at(&self.coarse);
                (
                    d1_central4(a, b, d, e, *h),
                    d2_central4(a, b, c, d, e, *h),
                    d1_central4(p, q, r, t, 2.0 * h),
                    d2_central4(p, q, c, r, t, 2.0 * h),
                )
            }
            Weights::General { fine, coarse } => (
                dot(&fine[1], &self.fine),
                dot(&fine[2], &self.fine),
                dot(&coarse[1], &self.coarse),
                dot(&coarse[2], &self.coarse),
            ),
        };
        for (fine, coarse, order) in [(f1, c1, "'"), (f2, c2, "''")] {
            let gap = (fine - coarse).abs() / 1f64.max(fine.abs());
            if !(gap <= self.tol) {
                return Err(Error::ResolutionError { quantity: format!("{name}{order}"), s: self.s, estimate: gap });
            }
        }
        let d1 = f1 / self.v;
        let d2 = (f2 - self.v_t / self.v * f1) / (self.v * self.v);
        Ok((d1, d2))
    }
}

pub fn verify_identities_with(
    surface: &RotationalSurface,
    f: &CurvatureFunction,
    opts: &IdentityOptions,
) -> Result<IdentityResiduals> {
    let n = surface.n();
    if f.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.n() });
    }
    let ambient = surface.ambient();
    let samples = surface.samples();
    let m = samples.len();

    let u: Vec<f64> = samples.iter().map(|g| g.u).collect();
    let phi = samples.iter().map(|g| ambient.phi(g.r)).collect::<Result<Vec<_>>>()?;
    let kappa_o: Vec<f64> = samples.iter().map(|g| g.kappa_o).collect();
    let mut fval = Vec::with_capacity(m);
    let mut fgrad = Vec::with_capacity(m);
    for g in samples {
        let (v, d) = f.value_and_gradient(&g.kappa_vector(n)?)?;
        fval.push(v);
        fgrad.push(d);
    }

    let mut out = IdentityResiduals {
        grad_u: Residual::default(),
        grad_phi: Residual::default(),
        hess_phi_tangent: Residual::default(),
        hess_phi_orbit: Residual::default(),
        lu: Residual::default(),
        codazzi: Residual::default(),
        samples_used: 0,
    };
    let uniform = match surface.curve() {
        ProfileCurve::Parametric(p) => {
            let t = p.grid();
            Some((t[t.len() - 1] - t[0]) / (t.len() - 1) as f64)
        }
        ProfileCurve::Sampled(_) => None,
    };
    let nm1 = (n - 1) as f64;
    for i in 4..m.saturating_sub(4) {
        let g = &samples[i];
        if g.w < opts.axis_eps {
            continue;
        }
        let st = Stencil::new(surface.param(), uniform, i, surface.speed()[i], g.s, opts.richardson_tol);
        let (u_s, u_ss) = st.apply(&u, "u")?;
        let (phi_s, phi_ss) = st.apply(&phi, "phi")?;
        let (f_s, _) = st.apply(&fval, "F")?;
        let (ko_s, _) = st.apply(&kappa_o, "kappa_o")?;

        let l = ambient.lambda_jet(g.r);
        let lr1 = l.v * g.r_1;
        let wr = g.w_prime / g.w;
        let (fp, fo) = (fgrad[i][0], fgrad[i][1]);

        out.grad_u.record(u_s, g.kappa_p * lr1, g.s);
        out.grad_phi.record(phi_s, lr1, g.s);
        out.hess_phi_tangent.record(phi_ss, l.d1 - g.u * g.kappa_p, g.s);
        out.hess_phi_orbit.record(wr * phi_s, l.d1 - g.u * g.kappa_o, g.s);

        let lu = fp * u_ss + nm1 * fo * wr * u_s;
        let rbar = ambient.rbar_contract(g.r, &g.r_tan(n), g.r_nu, &fgrad[i])?;
        let quad = fp * g.kappa_p * g.kappa_p + nm1 * fo * g.kappa_o * g.kappa_o;
        out.lu.record(lu, lr1 * f_s + rbar + l.d1 * fval[i] - g.u * quad, g.s);

        let coeff = ambient.curvature_coeff(g.r)?;
        out.codazzi.record(ko_s - wr * (g.kappa_p - g.kappa_o), coeff * g.r_1 * g.r_nu, g.s);
        out.samples_used += 1;
    }
    if out.samples_used == 0 {
        return Err(Error::InvalidParameter("no interior off-axis samples to test".into()));
    }
    Ok(out)
}
