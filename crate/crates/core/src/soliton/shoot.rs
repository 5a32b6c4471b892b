//! Shooting from the axis `θ = 0`.

use serde::{Deserialize, Serialize};

use super::ode::{step, step_factor};
use super::{Halt, Point, SolitonProblem};
use crate::error::{Error, Result};
use crate::rotgeo::GeometrySample;

/// Tolerances and limits of the profile integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// Arclength of the Taylor step off the axis.
    pub taylor_step: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Steps are capped at this fraction of the current orbit radius.
    pub axis_fraction: f64,
    pub max_length: f64,
    pub max_steps: usize,
    /// Orbit radius at which the profile counts as having reached the axis.
    pub w_close: f64,
    /// Allowed deviation of `φ` from its smooth-closure value.
    pub phi_tol: f64,
    pub kappa_max: f64,
    pub speed_max: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-12,
            atol: 1e-12,
            taylor_step: 1e-4,
            h_init: 1e-4,
            h_min: 1e-14,
            h_max: 0.05,
            axis_fraction: 0.5,
            max_length: 100.0,
            max_steps: 1_000_000,
            w_close: 1e-6,
            phi_tol: 1e-4,
            kappa_max: 1e8,
            speed_max: 1e8,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("taylor_step", self.taylor_step),
            ("h_init", self.h_init),
            ("h_min", self.h_min),
            ("h_max", self.h_max),
            ("axis_fraction", self.axis_fraction),
            ("max_length", self.max_length),
            ("w_close", self.w_close),
            ("phi_tol", self.phi_tol),
            ("kappa_max", self.kappa_max),
            ("speed_max", self.speed_max),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.h_min > self.h_max || self.axis_fraction >= 1.0 {
            return Err(Error::InvalidParameter("need h_min <= h_max and axis_fraction < 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisSide {
    /// The axis `θ = 0` the profile started from.
    Start,
    /// The opposite axis `θ = θ_max`.
    End,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    AxisReached { s: f64, side: AxisSide, phi_error: f64, smooth: bool },
    SupportVanishes { s: f64, u: f64 },
    SpeedBlowup { s: f64, f: f64 },
    CurvatureBlowup { s: f64, kappa_p: f64, kappa_o: f64 },
    DomainExit { s: f64, r: f64 },
    LengthLimit { s: f64 },
    StepLimit { s: f64, steps: usize },
    StepFailure { s: f64, h: f64 },
    RootBracketFailure { s: f64, detail: String },
}

impl Event {
    pub fn name(&self) -> &'static str {
        match self {
            Event::AxisReached { .. } => "axis_reached",
            Event::SupportVanishes { .. } => "support_vanishes",
            Event::SpeedBlowup { .. } => "speed_blowup",
            Event::CurvatureBlowup { .. } => "curvature_blowup",
            Event::DomainExit { .. } => "domain_exit",
            Event::LengthLimit { .. } => "length_limit",
            Event::StepLimit { .. } => "step_limit",
            Event::StepFailure { .. } => "step_failure",
            Event::RootBracketFailure { .. } => "root_bracket_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Classification {
    Closed,
    NotClosed { reason: String },
}

impl Classification {
    pub fn is_closed(&self) -> bool {
        matches!(self, Classification::Closed)
    }

    pub fn label(&self) -> &str {
        match self {
            Classification::Closed => "closed",
            Classification::NotClosed { reason } => reason,
        }
    }
}

/// One accepted point of an integrated profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub geom: GeometrySample,
    pub phi: f64,
    /// `F = u^{-1/α}` as imposed by the equation.
    pub f: f64,
    pub p: f64,
    /// `|F(κ)^{-α} − u| / max(1, u)` recomputed from the stored curvatures.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingTrace {
    pub start_r: f64,
    pub samples: Vec<TraceSample>,
    pub events: Vec<Event>,
    pub classification: Classification,
    /// Smallest distance of a sample from the smooth-closure conditions,
    /// `sqrt((W/λ(start_r))² + (φ − θ_max)²)`.
    pub closure_defect: f64,
    pub max_residual: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl ShootingTrace {
    pub fn terminal_event(&self) -> Option<&Event> {
        self.events.last()
    }

    /// Whether `H > 0` (normalized mean curvature) at every sample.
    pub fn mean_convex(&self, n: usize) -> bool {
        self.samples.iter().all(|t| t.geom.kappa_p + (n - 1) as f64 * t.geom.kappa_o > 0.0)
    }

    pub fn convex(&self) -> bool {
        self.samples.iter().all(|t| t.geom.kappa_p > 0.0 && t.geom.kappa_o > 0.0)
    }
}

/// Integrates the soliton profile from the axis point at radius `start_r`.
pub fn shoot(prob: &SolitonProblem, start_r: f64, ctrl: &StepControl) -> Result<ShootingTrace> {
    ctrl.validate()?;
    let amb = &prob.ambient;
    if !(start_r > 0.0 && start_r < amb.r_max()) {
        return Err(Error::DomainError { r: start_r, r_max: amb.r_max() });
    }
    let l0 = amb.lambda_jet(start_r);
    let kappa0 = l0.v.powf(-1.0 / prob.alpha);
    let a = kappa0 - l0.d1 / l0.v;
    let h0 = ctrl.taylor_step;
    let y0 = [start_r - 0.5 * a * h0 * h0, h0 / l0.v, a * h0 + h0 / l0.v];

    let (k0, p0) = prob.rhs(&y0, kappa0).map_err(|halt| match halt {
        Halt::Bracket(d) => Error::RootBracketFailure(d),
        Halt::Support { u } => Error::NonpositiveSupport { u },
        Halt::Domain { r } => Error::DomainError { r, r_max: amb.r_max() },
        Halt::Axis { theta } => Error::InvalidParameter(format!("Taylor step left the axis chart (theta = {theta})")),
    })?;

    let axis_point = GeometrySample::from_frame(amb, 0.0, start_r, 0.0, std::f64::consts::FRAC_PI_2, kappa0, 1.0)?;
    let mut samples = vec![make_sample(prob, axis_point, 0.0, kappa0)?];
    samples.push(sample_from_state(prob, h0, &y0, &p0)?);

    let theta_max = amb.theta_max();
    let mut s = h0;
    let mut y = y0;
    let mut k = k0;
    let mut point = p0;
    let mut h = ctrl.h_init;
    let mut steps = 0usize;
    let mut events = Vec::new();

    loop {
        let mut h_try = h.min(ctrl.h_max).min(ctrl.axis_fraction * point.w).min(ctrl.max_length - s);
        if steps >= ctrl.max_steps {
            events.push(Event::StepLimit { s, steps });
            break;
        }
        let guess = point.kappa_p;
        let mut f = |_s: f64, y: &[f64; 3]| prob.rhs(y, guess);
        let outcome = loop {
            if h_try < ctrl.h_min {
                break None;
            }
            match step(&mut f, s, &y, &k, h_try, ctrl.rtol, ctrl.atol) {
                Ok(t) if t.err <= 1.0 => break Some(Ok((t, h_try))),
                Ok(t) => h_try *= step_factor(t.err).min(0.5),
                Err(halt) => {
                    h_try *= 0.25;
                    if h_try < ctrl.h_min {
                        break Some(Err(halt));
                    }
                }
            }
        };
        let (trial, h_used) = match outcome {
            Some(Ok(v)) => v,
            Some(Err(halt)) => {
                events.push(halt_event(halt, s, &y, &point, theta_max, ctrl));
                break;
            }
            None => {
                events.push(Event::StepFailure { s, h: h_try });
                break;
            }
        };
        steps += 1;
        s += h_used;
        y = trial.y;
        k = trial.k_last;
        point = trial.data_last;
        samples.push(sample_from_state(prob, s, &y, &point)?);
        h = h_used * step_factor(trial.err);

        if point.w <= ctrl.w_close {
            events.push(axis_event(s, &y, theta_max, ctrl));
            break;
        }
        if point.kappa_p.abs() > ctrl.kappa_max || point.kappa_o.abs() > ctrl.kappa_max {
            events.push(Event::CurvatureBlowup { s, kappa_p: point.kappa_p, kappa_o: point.kappa_o });
            break;
        }
        if point.f > ctrl.speed_max || point.f < 1.0 / ctrl.speed_max {
            events.push(Event::SpeedBlowup { s, f: point.f });
            break;
        }
        if s >= ctrl.max_length {
            events.push(Event::LengthLimit { s });
            break;
        }
    }

    let classification = match events.last() {
        Some(Event::AxisReached { side: AxisSide::End, smooth: true, .. }) => Classification::Closed,
        Some(e) => Classification::NotClosed { reason: e.name().to_string() },
        None => Classification::NotClosed { reason: "no_event".into() },
    };
    let lam0 = l0.v;
    let closure_defect = samples
        .iter()
        .map(|t| ((t.geom.w / lam0).powi(2) + (t.phi - theta_max).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min);
    let fold = |g: fn(&TraceSample) -> f64| {
        samples.iter().map(g).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (r_min, r_max) = fold(|t| t.geom.r);
    let (p_min, p_max) = fold(|t| t.p);
    let max_residual = samples.iter().map(|t| t.residual).fold(0.0, f64::max);
    Ok(ShootingTrace {
        start_r,
        samples,
        events,
        classification,
        closure_defect,
        max_residual,
        r_min,
        r_max,
        p_min,
        p_max,
    })
}

fn axis_event(s: f64, y: &[f64; 3], theta_max: f64, ctrl: &StepControl) -> Event {
    let side = if y[1] > 0.5 * theta_max.min(std::f64::consts::PI) { AxisSide::End } else { AxisSide::Start };
    let target = match side {
        AxisSide::End => theta_max,
        AxisSide::Start => -std::f64::consts::PI,
    };
    let phi_error = y[2] - target;
    Event::AxisReached { s, side, phi_error, smooth: phi_error.abs() <= ctrl.phi_tol }
}

fn halt_event(halt: Halt, s: f64, y: &[f64; 3], point: &Point, theta_max: f64, ctrl: &StepControl) -> Event {
    match halt {
        Halt::Domain { r } => Event::DomainExit { s, r },
        Halt::Axis { .. } => axis_event(s, y, theta_max, ctrl),
        Halt::Support { .. } => Event::SupportVanishes { s, u: point.u },
        Halt::Bracket(detail) => Event::RootBracketFailure { s, detail },
    }
}

fn make_sample(prob: &SolitonProblem, geom: GeometrySample, phi: f64, f: f64) -> Result<TraceSample> {
    let p = prob.p_value(geom.r, geom.u)?;
    let residual = match geom.kappa_vector(prob.n).and_then(|k| prob.f.value(&k)) {
        Ok(fv) => (fv.powf(-prob.alpha) - geom.u).abs() / geom.u.max(1.0),
        Err(_) => f64::INFINITY,
    };
    Ok(TraceSample { geom, phi, f, p, residual })
}

pub(crate) fn sample_from_state(prob: &SolitonProblem, s: f64, y: &[f64; 3], point: &Point) -> Result<TraceSample> {
    let mut geom = GeometrySample::from_frame(&prob.ambient, s, y[0], y[1], point.psi, point.kappa_p, 1.0)?;
    // the orbit curvature used by the equation, also inside the axis band
    geom.kappa_o = point.kappa_o;
    make_sample(prob, geom, y[2], point.f)
}

/// Re-integrates from `(s0, y0)` and returns the state and curvature data
/// at each of the increasing arclengths `targets`, landing on them exactly.
pub(crate) fn integrate_to(
    prob: &SolitonProblem,
    ctrl: &StepControl,
    s0: f64,
    y0: [f64; 3],
    kappa_guess: f64,
    targets: &[f64],
) -> Result<Vec<([f64; 3], Point)>> {
    let halt_err = |h: Halt| match h {
        Halt::Bracket(d) => Error::RootBracketFailure(d),
        Halt::Support { u } => Error::NonpositiveSupport { u },
        Halt::Domain { r } => Error::DomainError { r, r_max: prob.ambient.r_max() },
        Halt::Axis { theta } => Error::InvalidParameter(format!("re-integration reached the axis (theta = {theta})")),
    };
    let (mut k, mut point) = prob.rhs(&y0, kappa_guess).map_err(halt_err)?;
    let mut s = s0;
    let mut y = y0;
    let mut h = ctrl.h_init.max(1e-3).min(ctrl.h_max);
    let mut out = Vec::with_capacity(targets.len());
    for &target in targets {
        if target < s {
            return Err(Error::InvalidParameter(format!("target s = {target} precedes {s}")));
        }
        while s < target {
            let remaining = target - s;
            let last = h >= remaining;
            let h_try = if last { remaining } else { h };
            let guess = point.kappa_p;
            let mut f = |_s: f64, y: &[f64; 3]| prob.rhs(y, guess);
            let t = step(&mut f, s, &y, &k, h_try, ctrl.rtol, ctrl.atol).map_err(halt_err)?;
            if t.err <= 1.0 {
                s = if last { target } else { s + h_try };
                y = t.y;
                k = t.k_last;
                point = t.data_last;
                if !last {
                    h = (h_try * step_factor(t.err)).min(ctrl.h_max);
                }
            } else {
                h = h_try * step_factor(t.err).min(0.5);
                if h < ctrl.h_min {
                    return Err(Error::StepFailure { s });
                }
            }
        }
        out.push((y, point));
    }
    Ok(out)
}

/// Fixed-step continuation from `(s0, y0)` sampled at `s0 + j·spacing` for
/// `j = 0..=count`. Every interval takes the same number of substeps, so
/// the discretization error varies smoothly between samples.
pub(crate) fn integrate_uniform(
    prob: &SolitonProblem,
    y0: [f64; 3],
    kappa_guess: f64,
    spacing: f64,
    count: usize,
    max_substep: f64,
) -> Result<Vec<([f64; 3], Point)>> {
    let halt_err = |h: Halt| match h {
        Halt::Bracket(d) => Error::RootBracketFailure(d),
        Halt::Support { u } => Error::NonpositiveSupport { u },
        Halt::Domain { r } => Error::DomainError { r, r_max: prob.ambient.r_max() },
        Halt::Axis { theta } => Error::InvalidParameter(format!("re-integration reached the axis (theta = {theta})")),
    };
    let sub = (spacing / max_substep).ceil().max(1.0) as usize;
    let dh = spacing / sub as f64;
    let (mut k, mut point) = prob.rhs(&y0, kappa_guess).map_err(halt_err)?;
    let mut y = y0;
    let mut out = Vec::with_capacity(count + 1);
    out.push((y, point));
    for _ in 0..count {
        for _ in 0..sub {
            let guess = point.kappa_p;
            let mut f = |_s: f64, y: &[f64; 3]| prob.rhs(y, guess);
            let t = step(&mut f, 0.0, &y, &k, dh, 1.0, 1.0).map_err(halt_err)?;
            y = t.y;
            k = t.k_last;
            point = t.data_last;
        }
        out.push((y, point));
    }
    Ok(out)
}
