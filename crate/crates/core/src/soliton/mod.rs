//! Rotational solitons `F^{-α} = ḡ(λ∂_r, ν)`: slices, shooting from the
//! axis, the auxiliary function `P = Φ − (α/(α+1)) u^{(α+1)/α}` and the
//! decomposition of `ℒP`.
//!
//! The profile is integrated in arclength with state `(r, θ, φ)`, where
//! `φ = ψ + θ − π/2` is the tangent angle `ψ` corrected by the rotation of
//! the slice frame; `φ` starts at `0` on the axis `θ = 0` and equals the
//! polar angle of the opposite axis at a smooth closure. The profile
//! curvature `κ_p` is not a state variable: at every evaluation it is
//! recovered from `f(κ_p, κ_o, …, κ_o) = u^{-1/α}`.

mod lp;
mod ode;
mod scan;
mod shoot;
mod trace_io;

use serde::Serialize;

pub use lp::{lp_decompose, lp_decompose_with, LpOptions, LpTerms, MeanCurvatureTerms};
pub use scan::{scan, ScanRow, ScanTable};
pub use shoot::{shoot, AxisSide, Classification, Event, ShootingTrace, StepControl, TraceSample};
pub use trace_io::{read_trace_json, write_scan_csv, write_scan_json, write_trace_csv, write_trace_json};

use crate::ambient::WarpedAmbient;
use crate::error::{Error, Result};
use crate::numeric::{linspace, newton_bisect};
use crate::rotgeo::GeometrySample;
use crate::symfunc::{CurvatureFunction, KappaVector};

/// Number of cells in the sign-change search of [`slice_solve`].
pub const SLICE_GRID: usize = 1000;
/// Residual bound for polished slice radii.
pub const SLICE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SolitonProblem {
    pub ambient: WarpedAmbient,
    pub n: usize,
    pub f: CurvatureFunction,
    pub alpha: f64,
}

impl SolitonProblem {
    pub fn new(ambient: WarpedAmbient, n: usize, f: CurvatureFunction, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        if f.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.n() });
        }
        Ok(SolitonProblem { ambient, n, f, alpha })
    }

    /// `u^{(α+1)/α}`.
    pub(crate) fn u_pow(&self, u: f64) -> f64 {
        u.powf((self.alpha + 1.0) / self.alpha)
    }

    /// `P` at radius `r` with support `u`.
    pub fn p_value(&self, r: f64, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::NonpositiveSupport { u });
        }
        Ok(self.ambient.phi(r)? - self.alpha / (self.alpha + 1.0) * self.u_pow(u))
    }

    /// The profile curvature `κ_p` with `f(κ_p, κ_o, …, κ_o) = target`,
    /// searched along the section of the cone of `f`.
    pub(crate) fn solve_kappa_p(&self, kappa_o: f64, target: f64, guess: f64) -> std::result::Result<f64, String> {
        let n = self.n;
        let f = &self.f;
        let point = |x: f64| {
            let mut v = vec![kappa_o; n];
            v[0] = x;
            v
        };
        let inside = |x: f64| KappaVector::new(point(x)).map(|k| f.cone().contains(&k)).unwrap_or(false);
        let value = |x: f64| f.raw(&point(x), false).0 - target;
        let scale = 1.0 + target.abs() + kappa_o.abs();

        let start = if guess.is_finite() { guess } else { target };
        let mut x_in = start;
        let mut d = scale;
        let mut tries = 0;
        while !inside(x_in) {
            x_in = start.abs() + d;
            d *= 2.0;
            tries += 1;
            if tries > 80 {
                return Err(format!("cone section empty for kappa_o = {kappa_o}"));
            }
        }
        let g_in = value(x_in);
        let (lo, hi) = if g_in < 0.0 {
            let mut hi = x_in;
            let mut d = scale;
            let mut tries = 0;
            while value(hi) <= 0.0 {
                hi = x_in + d;
                d *= 2.0;
                tries += 1;
                if tries > 80 {
                    return Err(format!("f stays below {target} on the cone section (kappa_o = {kappa_o})"));
                }
            }
            (x_in, hi)
        } else if g_in > 0.0 {
            let mut lo = x_in;
            let mut d = scale;
            let mut found = false;
            for _ in 0..80 {
                let trial = x_in - d;
                if inside(trial) {
                    lo = trial;
                    if value(lo) < 0.0 {
                        found = true;
                        break;
                    }
                    d *= 2.0;
                } else {
                    // approach the boundary of the section from inside
                    let mut out = trial;
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + out);
                        if inside(mid) {
                            lo = mid;
                            if value(lo) < 0.0 {
                                found = true;
                                break;
                            }
                        } else {
                            out = mid;
                        }
                    }
                    break;
                }
            }
            if !found {
                return Err(format!(
                    "f exceeds {target} on the whole cone section (kappa_o = {kappa_o})"
                ));
            }
            (lo, x_in)
        } else {
            return Ok(x_in);
        };
        let fd = |x: f64| {
            let (v, g) = f.raw(&point(x), true);
            (v - target, g.map_or(f64::NAN, |g| g[0]))
        };
        Ok(newton_bisect(fd, lo, hi, start.clamp(lo, hi), 1e-16))
    }

    /// Derivative of the state `(r, θ, φ)` in arclength.
    pub(crate) fn rhs(&self, y: &[f64; 3], guess: f64) -> std::result::Result<([f64; 3], Point), Halt> {
        let [r, theta, phi] = *y;
        if !(r > 0.0 && r < self.ambient.r_max()) {
            return Err(Halt::Domain { r });
        }
        if !(theta > 0.0 && theta < self.ambient.theta_max()) {
            return Err(Halt::Axis { theta });
        }
        let psi = phi - theta + std::f64::consts::FRAC_PI_2;
        let l = self.ambient.lambda_jet(r);
        let (sn, cs) = self.ambient.fiber_sn(theta);
        let (sp, cp) = psi.sin_cos();
        let w = l.v * sn;
        let u = l.v * sp;
        if !(u > 0.0) {
            return Err(Halt::Support { u });
        }
        let target = u.powf(-1.0 / self.alpha);
        let kappa_o = l.d1 / l.v * sp - cp * cs / w;
        let kappa_p = self.solve_kappa_p(kappa_o, target, guess).map_err(Halt::Bracket)?;
        let dtheta = sp / l.v;
        let dy = [cp, dtheta, dtheta + kappa_p - l.d1 / l.v * sp];
        Ok((dy, Point { psi, kappa_p, kappa_o, u, f: target, w }))
    }
}

/// Curvature data at an evaluation point of the profile ODE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Point {
    pub psi: f64,
    pub kappa_p: f64,
    pub kappa_o: f64,
    pub u: f64,
    pub f: f64,
    pub w: f64,
}

/// Why the right-hand side cannot be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Halt {
    Domain { r: f64 },
    Axis { theta: f64 },
    Support { u: f64 },
    Bracket(String),
}

/// `P = Φ − (α/(α+1)) u^{(α+1)/α}` at a sample.
pub fn p_eval(prob: &SolitonProblem, sample: &GeometrySample) -> Result<f64> {
    prob.p_value(sample.r, sample.u)
}

/// Radii `r0` in `bracket` whose slices solve the soliton equation, i.e.
/// roots of `g(r) = (λ'/λ)^{-α} − λ`.
pub fn slice_solve(prob: &SolitonProblem, bracket: (f64, f64)) -> Result<Vec<f64>> {
    let (lo, hi) = bracket;
    let amb = &prob.ambient;
    if !(lo > 0.0 && hi > lo && hi < amb.r_max()) {
        return Err(Error::InvalidParameter(format!(
            "bracket [{lo}, {hi}] must satisfy 0 < lo < hi < {}",
            amb.r_max()
        )));
    }
    let g = |r: f64| {
        let l = amb.lambda_jet(r);
        (l.d1 / l.v).powf(-prob.alpha) - l.v
    };
    let grid = linspace(lo, hi, SLICE_GRID + 1);
    for &r in &grid {
        let l = amb.lambda_jet(r);
        if !(l.d1 > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda' is not positive at r = {r}")));
        }
    }
    let values: Vec<f64> = grid.iter().map(|&r| g(r)).collect();
    if values.iter().zip(&grid).all(|(v, r)| v.abs() <= SLICE_TOL * (1.0 + amb.lambda(*r))) {
        return Err(Error::DegenerateFamily { lo, hi });
    }
    let mut roots = Vec::new();
    for j in 0..SLICE_GRID {
        let (a, b) = (grid[j], grid[j + 1]);
        let (ga, gb) = (values[j], values[j + 1]);
        if ga == 0.0 {
            roots.push(a);
        } else if ga * gb < 0.0 {
            roots.push(polish(&g, a, b, ga));
        }
    }
    if values[SLICE_GRID] == 0.0 {
        roots.push(hi);
    }
    if roots.is_empty() {
        return Err(Error::NoRoot { lo, hi });
    }
    Ok(roots)
}

/// Bisection to machine resolution on a sign-change cell.
fn polish(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    if g(a).abs() <= g(b).abs() { a } else { b }
}

/// Sign certificate for an empty slice bracket: `g` has one sign on the
/// search grid and on a ten times finer grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmptyBracket {
    pub lo: f64,
    pub hi: f64,
    pub max_g: f64,
    pub min_g: f64,
}

/// Certifies that `g` keeps one strict sign on `bracket`, sampled at ten
/// times the resolution of [`slice_solve`].
pub fn certify_empty(prob: &SolitonProblem, bracket: (f64, f64)) -> Result<EmptyBracket> {
    let amb = &prob.ambient;
    let (lo, hi) = bracket;
    let mut max_g = f64::NEG_INFINITY;
    let mut min_g = f64::INFINITY;
    for r in linspace(lo, hi, 10 * SLICE_GRID + 1) {
        let l = amb.lambda_jet(r);
        let v = (l.d1 / l.v).powf(-prob.alpha) - l.v;
        max_g = max_g.max(v);
        min_g = min_g.min(v);
    }
    if max_g < 0.0 || min_g > 0.0 {
        Ok(EmptyBracket { lo, hi, max_g, min_g })
    } else {
        Err(Error::InvalidParameter(format!("g changes sign or vanishes on [{lo}, {hi}]")))
    }
}

#[cfg(test)]
mod tests;
