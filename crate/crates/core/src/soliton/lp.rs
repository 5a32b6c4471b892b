//! Term-by-term decomposition of `ℒP = F^{ij}∇_i∇_j P` along a soliton
//! profile.
//!
//! On a soliton
//! `ℒP = λ'(Σf^i − 1) + u^{(α+1)/α}(Σf^iκ_i² − F²) − u^{1/α} R̄(F)
//!       + (1/α) ḡ(λ∂_r, ∇log u) − (1/α) u^{(α+1)/α} F^{ij}∇_i log u ∇_j log u`,
//! where `R̄(F) = F^{ij}R̄_{νjli} ḡ(λ∂_r, e_l)`. The left side is evaluated
//! independently by difference quotients of `P` along the profile.

use serde::{Deserialize, Serialize};

use super::shoot::{integrate_to, integrate_uniform, sample_from_state, ShootingTrace, StepControl, TraceSample};
use super::SolitonProblem;
use crate::error::{Error, Result};
use crate::numeric::fornberg_weights;
use crate::symfunc::{check_condition_v, FunctionKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LpOptions {
    /// Initial arclength spacing of the difference stencil; halved until the
    /// quotients meet `richardson_tol`, down to `h_min`.
    pub h: f64,
    pub h_min: f64,
    /// Target relative error of the step-`h` quotients, estimated as
    /// `|D_h − D_{2h}| / 15` plus the rounding bound of the stencil.
    pub richardson_tol: f64,
    /// Largest error estimate accepted when no spacing meets the target;
    /// the spacing with the smallest estimate is then used.
    pub accept_tol: f64,
    /// Largest fixed step used across the stencil.
    pub substep: f64,
    /// Integration settings for the stencil points.
    pub control: StepControl,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { h: 1e-2, h_min: 1e-10, richardson_tol: 1e-7, accept_tol: 1e-5, substep: 1e-3, control: StepControl::default() }
    }
}

/// The `F = H` identity
/// `ΔP − (n/α) ḡ(∇P, ∇log u) = u^{(α+1)/α}(|h|² − nH²) − u^{1/α} Ric̄(ν, λ∂_r^T) + ((n−1)/α) u^{(α+1)/α}|∇log u|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCurvatureTerms {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// `((n−1)/α) u^{(α+1)/α}|∇log u|²`.
    pub lower_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpTerms {
    pub s: f64,
    /// Stencil spacing that resolved the difference quotients.
    pub h: f64,
    /// Relative error estimate of the quotients at `h`.
    pub quotient_error: f64,
    pub p: f64,
    pub dp: f64,
    pub ddp: f64,
    /// `λ'(Σf^i − 1)`.
    pub t_trace: f64,
    /// `u^{(α+1)/α}(Σf^iκ_i² − F²)`.
    pub t_quad: f64,
    /// `−u^{1/α} F^{ij}R̄_{νjli}ḡ(λ∂_r, e_l)`.
    pub t_curv: f64,
    /// `(1/α) ḡ(λ∂_r, ∇log u)`.
    pub t_grad1: f64,
    /// `−(1/α) u^{(α+1)/α} F^{ij}∇_i log u ∇_j log u`.
    pub t_grad2: f64,
    /// `ℒP` from difference quotients.
    pub lhs_fd: f64,
    pub term_sum: f64,
    /// `|lhs_fd − term_sum| / (Σ|terms| + 1)`.
    pub residual: f64,
    /// `ℒP + (1/α) u^{-(α+1)/α} ḡ(λ∂_r, ∇P) − (1/α) F^{ij}∇_i log u ∇_j P`.
    pub drift_adjusted: f64,
    /// `drift_adjusted` with `ℒP` replaced by the term sum; free of difference-quotient noise in `P''`.
    pub drift_adjusted_terms: f64,
    pub mean_convex: bool,
    pub convex: bool,
    /// Whether the margin inequalities on `f` hold at this point.
    pub condition_v: bool,
    pub mean_curvature: Option<MeanCurvatureTerms>,
}

impl LpTerms {
    pub fn terms(&self) -> [f64; 5] {
        [self.t_trace, self.t_quad, self.t_curv, self.t_grad1, self.t_grad2]
    }
}

pub fn lp_decompose(prob: &SolitonProblem, trace: &ShootingTrace, s: f64) -> Result<LpTerms> {
    lp_decompose_with(prob, trace, s, &LpOptions::default())
}

pub fn lp_decompose_with(prob: &SolitonProblem, trace: &ShootingTrace, s: f64, opts: &LpOptions) -> Result<LpTerms> {
    if !(opts.h > 0.0 && opts.h_min > 0.0 && opts.h_min <= opts.h) {
        return Err(Error::InvalidParameter(format!("need 0 < h_min <= h, got h = {}, h_min = {}", opts.h, opts.h_min)));
    }
    let states: Vec<_> = trace.samples.iter().filter(|t| t.geom.theta > 0.0).collect();
    let (first, last) = match (states.first(), states.last()) {
        (Some(a), Some(b)) => (a.geom.s, b.geom.s),
        _ => return Err(Error::InvalidParameter("trace has no integrated states".into())),
    };
    let mut h = opts.h;
    let mut best: Option<(LpTerms, &'static str)> = None;
    // Spacings h, h/2, h/4, ... with the last one clamped to exactly h_min.
    // Stencils shift inward near either end of the trace.
    loop {
        if let Some(m) = stencil_offset(s, h, first, last) {
            let (terms, worst) = decompose_at(prob, &states, s, h, m, opts)?;
            if terms.quotient_error <= opts.richardson_tol {
                return Ok(terms);
            }
            if best.as_ref().is_none_or(|(b, _)| terms.quotient_error < b.quotient_error) {
                best = Some((terms, worst));
            }
        }
        if h <= opts.h_min {
            break;
        }
        h = (0.5 * h).max(opts.h_min);
    }
    match best {
        Some((terms, _)) if terms.quotient_error <= opts.accept_tol => Ok(terms),
        Some((terms, worst)) => {
            Err(Error::ResolutionError { quantity: worst.into(), s, estimate: terms.quotient_error })
        }
        None => Err(Error::InvalidParameter(format!(
            "s = {s} needs a trace span of {} around it, have [{first}, {last}]",
            8.0 * opts.h_min
        ))),
    }
}

/// Index of `s` within a nine-node stencil of spacing `h` on `[first, last]`,
/// as central as the trace allows.
fn stencil_offset(s: f64, h: f64, first: f64, last: f64) -> Option<usize> {
    let lo = ((s + 8.0 * h - last) / h).ceil().max(0.0);
    let hi = ((s - first) / h).floor().min(8.0);
    (lo <= hi).then(|| 4f64.clamp(lo, hi) as usize)
}

fn decompose_at(
    prob: &SolitonProblem,
    states: &[&TraceSample],
    s: f64,
    h: f64,
    m: usize,
    opts: &LpOptions,
) -> Result<(LpTerms, &'static str)> {
    // Node m sits at s; `first` only absorbs rounding in s − m h.
    let a = (s - m as f64 * h).max(states[0].geom.s);
    let anchor = states.iter().rev().find(|t| t.geom.s <= a).expect("stencil start lies on the trace");
    let y0 = [anchor.geom.r, anchor.geom.theta, anchor.phi];
    let (ya, pta) = integrate_to(prob, &opts.control, anchor.geom.s, y0, anchor.geom.kappa_p, &[a])?[0];
    let pts = integrate_uniform(prob, ya, pta.kappa_p, h, 8, opts.substep)?;
    let p = pts.iter().map(|(y, pt)| prob.p_value(y[0], pt.u)).collect::<Result<Vec<_>>>()?;

    // Fine: the five nodes around s at spacing h. Coarse: every other node, spacing 2h.
    let x: Vec<f64> = (0..9).map(|j| j as f64 * h).collect();
    let x0 = m as f64 * h;
    let i0 = m.saturating_sub(2).min(4);
    let fine_idx: Vec<usize> = (i0..i0 + 5).collect();
    let coarse_idx: Vec<usize> = (0..9).step_by(2).collect();
    let apply = |idx: &[usize]| {
        let nodes: Vec<f64> = idx.iter().map(|&j| x[j]).collect();
        let w = fornberg_weights(x0, &nodes, 2);
        let d = |k: usize| idx.iter().zip(&w[k]).map(|(&j, wj)| wj * p[j]).sum::<f64>();
        let noise = |k: usize| f64::EPSILON * idx.iter().zip(&w[k]).map(|(&j, wj)| (wj * p[j]).abs()).sum::<f64>();
        [(d(1), noise(1)), (d(2), noise(2))]
    };
    let fine = apply(&fine_idx);
    let coarse = apply(&coarse_idx);
    let mut quotient_error = 0.0;
    let mut worst = "P'";
    for (name, (f, noise), (c, _)) in [("P'", fine[0], coarse[0]), ("P''", fine[1], coarse[1])] {
        let gap = ((f - c).abs() / 15.0 + noise) / f.abs().max(1.0);
        // NaN propagates as unresolved.
        if !(gap <= quotient_error) {
            quotient_error = if gap.is_nan() { f64::INFINITY } else { gap };
            worst = name;
        }
    }
    let (dp, ddp) = (fine[0].0, fine[1].0);

    let (y, pt) = pts[m];
    let g = sample_from_state(prob, s, &y, &pt)?.geom;
    let n = prob.n;
    let nm1 = (n - 1) as f64;
    let alpha = prob.alpha;
    let kappa = g.kappa_vector(n)?;
    let (fval, grad) = prob.f.value_and_gradient(&kappa)?;
    let (fp, fo) = (grad[0], grad[1]);
    let amb = &prob.ambient;
    let l = amb.lambda_jet(g.r);
    let u = g.u;
    let u_pow = prob.u_pow(u);
    let u_root = u.powf(1.0 / alpha);

    let trace_sum: f64 = grad.iter().sum();
    let quad = fp * g.kappa_p * g.kappa_p + nm1 * fo * g.kappa_o * g.kappa_o;
    let rbar = amb.rbar_contract(g.r, &g.r_tan(n), g.r_nu, &grad)?;
    let lr1 = l.v * g.r_1;
    let dlog_u = g.kappa_p * lr1 / u;

    let t_trace = l.d1 * (trace_sum - 1.0);
    let t_quad = u_pow * (quad - fval * fval);
    let t_curv = -u_root * rbar;
    let t_grad1 = lr1 * dlog_u / alpha;
    let t_grad2 = -u_pow * fp * dlog_u * dlog_u / alpha;
    let wr = g.w_prime / g.w;
    let lhs_fd = fp * ddp + nm1 * fo * wr * dp;
    let terms = [t_trace, t_quad, t_curv, t_grad1, t_grad2];
    let term_sum: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum::<f64>() + 1.0;
    let drift = lr1 * dp / (alpha * u_pow) - fp * dlog_u * dp / alpha;
    let drift_adjusted = lhs_fd + drift;
    let drift_adjusted_terms = term_sum + drift;

    let mean_curvature = matches!(prob.f.kind(), FunctionKind::HkRoot { k: 1 })
        .then(|| -> Result<MeanCurvatureTerms> {
            let lap = ddp + nm1 * wr * dp;
            let lhs = lap - n as f64 / alpha * dp * dlog_u;
            let sum_k = g.kappa_p + nm1 * g.kappa_o;
            let traceless = g.kappa_p * g.kappa_p + nm1 * g.kappa_o * g.kappa_o - sum_k * sum_k / n as f64;
            let ric = amb.ricci_normal_tangent(g.r, &g.r_tan(n), g.r_nu)?;
            let lower_bound = nm1 / alpha * u_pow * dlog_u * dlog_u;
            let parts = [u_pow * traceless, -u_root * ric, lower_bound];
            let rhs: f64 = parts.iter().sum();
            let scale = parts.iter().map(|t| t.abs()).sum::<f64>() + lhs.abs() + 1.0;
            Ok(MeanCurvatureTerms { lhs, rhs, residual: (lhs - rhs).abs() / scale, lower_bound })
        })
        .transpose()?;

    let terms = LpTerms {
        s,
        h,
        quotient_error,
        p: prob.p_value(y[0], pt.u)?,
        dp,
        ddp,
        t_trace,
        t_quad,
        t_curv,
        t_grad1,
        t_grad2,
        lhs_fd,
        term_sum,
        residual: (lhs_fd - term_sum).abs() / scale,
        drift_adjusted,
        drift_adjusted_terms,
        mean_convex: g.kappa_p + nm1 * g.kappa_o > 0.0,
        convex: g.kappa_p > 0.0 && g.kappa_o > 0.0,
        condition_v: check_condition_v(&prob.f, &kappa, 1e-12).map(|r| r.pass).unwrap_or(false),
        mean_curvature,
    };
    Ok((terms, worst))
}
