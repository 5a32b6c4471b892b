//! Subcommand bodies. Each returns an [`Outcome`]; configuration problems
//! surface as `Err` and map to exit code 2.

use std::fs::File;
use std::io::BufReader;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{RunConfig, ScanExpectation, SliceExpectation, SurfaceSpec};
use crate::error::{Error, Result};
use crate::rotgeo::{self, verify_identities_with, IdentityOptions, RotationalSurface};
use crate::soliton::{
    certify_empty, lp_decompose, scan, shoot, slice_solve, write_scan_csv, write_trace_csv, SolitonProblem,
};
use crate::symfunc::sampling::ConeSampler;
use crate::symfunc::{check_condition_v, cone_member_with_margin, ConeSpec, KappaVector};

/// Result of one subcommand.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    /// Name of the property being checked.
    pub check: &'static str,
    pub pass: bool,
    pub result: Value,
    /// Plot-ready table for `--format csv`.
    pub csv: Vec<u8>,
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::Format(e.to_string()))
}

fn join(x: &[f64]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

fn problem(cfg: &RunConfig) -> Result<SolitonProblem> {
    SolitonProblem::new(cfg.ambient.build()?, cfg.n, cfg.function()?, cfg.alpha)
}

fn all_cones(n: usize) -> Vec<ConeSpec> {
    let mut out: Vec<ConeSpec> = (1..=n).filter_map(|k| ConeSpec::gamma_k(n, k).ok()).collect();
    out.extend((1..n).filter_map(|k| ConeSpec::gamma_tilde_k(n, k).ok()));
    out.push(ConeSpec::gamma_plus(n));
    out
}

pub fn check_cone(cfg: &RunConfig) -> Result<Outcome> {
    let sec = cfg.check_cone.clone().unwrap_or_default();
    let mut points = sec.kappa.iter().map(|k| KappaVector::new(k.clone())).collect::<Result<Vec<_>>>()?;
    if let Some(s) = &sec.sample {
        let cone = s.cone.build(cfg.n)?;
        points.extend(ConeSampler::new(cone, s.half_width, cfg.seed).sample(s.count)?);
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("check-cone needs 'kappa' points or a 'sample' block".into()));
    }
    let mut pass = true;
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for (idx, kappa) in points.iter().enumerate() {
        let n = kappa.n();
        let mut cones = Vec::new();
        for cone in all_cones(n) {
            let m = cone_member_with_margin(&cone, kappa, sec.margin);
            rows.push(vec![
                idx.to_string(),
                join(kappa.as_slice()),
                cone.to_string(),
                m.inside.to_string(),
                m.witness.map(|w| w.to_string()).unwrap_or_default(),
            ]);
            cones.push(json!({ "cone": cone.to_string(), "inside": m.inside, "witness": m.witness }));
        }
        let mut expectations = Vec::new();
        for e in &sec.expect {
            let cone = e.cone_ref().build(n)?;
            let inside = cone_member_with_margin(&cone, kappa, sec.margin).inside;
            pass &= inside == e.inside;
            expectations.push(json!({
                "cone": cone.to_string(),
                "expected": e.inside,
                "actual": inside,
                "met": inside == e.inside,
            }));
        }
        reports.push(json!({ "kappa": kappa.as_slice(), "cones": cones, "expectations": expectations }));
    }
    Ok(Outcome {
        command: "check-cone",
        check: "cone membership",
        pass,
        result: json!({ "margin": sec.margin, "points": reports }),
        csv: csv_table(&["index", "kappa", "cone", "inside", "witness"], rows)?,
    })
}

pub fn check_condition(cfg: &RunConfig) -> Result<Outcome> {
    let sec = cfg.check_condition.clone().unwrap_or_default();
    if !(sec.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", sec.tol)));
    }
    let f = cfg.function()?;
    let mut points = sec.kappa.iter().map(|k| KappaVector::new(k.clone())).collect::<Result<Vec<_>>>()?;
    if sec.samples > 0 {
        points.extend(ConeSampler::new(*f.cone(), sec.half_width, cfg.seed).sample(sec.samples)?);
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("check-condition needs 'kappa' points or 'samples'".into()));
    }
    let (mut worst_s1, mut worst_s2, mut worst_margin) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for (idx, kappa) in points.iter().enumerate() {
        match check_condition_v(&f, kappa, sec.tol) {
            Ok(rep) => {
                worst_s1 = worst_s1.min(rep.s1);
                worst_s2 = worst_s2.min(rep.s2);
                worst_margin = worst_margin.min(rep.worst_margin());
                rows.push(vec![
                    idx.to_string(),
                    join(kappa.as_slice()),
                    rep.pass.to_string(),
                    rep.s1.to_string(),
                    rep.s2.to_string(),
                    join(&rep.margins),
                    String::new(),
                ]);
                if !rep.pass {
                    failures.push(json!({ "index": idx, "kappa": kappa.as_slice(), "report": rep }));
                }
            }
            Err(e) => {
                rows.push(vec![
                    idx.to_string(),
                    join(kappa.as_slice()),
                    "false".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    e.to_string(),
                ]);
                failures.push(json!({ "index": idx, "kappa": kappa.as_slice(), "error": e.to_string() }));
            }
        }
    }
    let all_pass = failures.is_empty();
    Ok(Outcome {
        command: "check-condition",
        check: "structural inequalities on the speed",
        pass: all_pass == sec.expect_pass,
        result: json!({
            "function": f.to_string(),
            "tol": sec.tol,
            "points": points.len(),
            "failed": failures.len(),
            "worst_s1": worst_s1,
            "worst_s2": worst_s2,
            "worst_margin": worst_margin,
            "expect_pass": sec.expect_pass,
            "failures": failures,
        }),
        csv: csv_table(&["index", "kappa", "pass", "s1", "s2", "margins", "error"], rows)?,
    })
}

fn load_surface(cfg: &RunConfig, spec: &SurfaceSpec) -> Result<RotationalSurface> {
    match spec {
        SurfaceSpec::Csv { path } => {
            rotgeo::read_csv(BufReader::new(File::open(path)?), cfg.ambient.build()?, cfg.n)
        }
        SurfaceSpec::Json { path } => rotgeo::read_json(BufReader::new(File::open(path)?)),
        other => {
            let curve = other.curve()?.expect("analytic surface kinds build a curve");
            RotationalSurface::new(cfg.ambient.build()?, cfg.n, curve)
        }
    }
}

pub fn verify_identities(cfg: &RunConfig) -> Result<Outcome> {
    let sec = cfg
        .verify
        .clone()
        .ok_or_else(|| Error::InvalidParameter("verify-identities needs a [verify] section".into()))?;
    if sec.surface.is_none() && sec.trace.is_none() {
        return Err(Error::InvalidParameter("[verify] needs 'surface' or 'trace'".into()));
    }
    let f = cfg.function()?;
    let mut pass = true;
    let mut result = serde_json::Map::new();
    let mut rows = Vec::new();

    if let Some(spec) = &sec.surface {
        let surface = load_surface(cfg, spec)?;
        if surface.n() != f.n() {
            return Err(Error::DimensionMismatch { expected: surface.n(), got: f.n() });
        }
        let entry = match verify_identities_with(&surface, &f, &IdentityOptions::default()) {
            Ok(res) => {
                let ok = res.max() <= sec.tol;
                pass &= ok;
                for (name, r) in res.entries() {
                    rows.push(vec!["surface".into(), name.into(), r.at_s.to_string(), r.max.to_string()]);
                }
                json!({ "tol": sec.tol, "pass": ok, "residuals": res, "max": res.max() })
            }
            Err(e) => {
                pass = false;
                json!({ "tol": sec.tol, "pass": false, "error": e.to_string() })
            }
        };
        result.insert("surface".into(), entry);
    }

    if let Some(tc) = &sec.trace {
        let prob = problem(cfg)?;
        tc.control.validate()?;
        let entry = match shoot(&prob, tc.start_r, &tc.control) {
            Ok(trace) => {
                let end = trace.samples.last().map_or(0.0, |x| x.geom.s);
                let mut points = Vec::new();
                let mut ok = true;
                for j in 1..=tc.points {
                    let s = end * j as f64 / (tc.points + 1) as f64;
                    match lp_decompose(&prob, &trace, s) {
                        Ok(lp) => {
                            let h_ok = lp.mean_curvature.is_none_or(|m| m.residual <= tc.tol);
                            ok &= lp.residual <= tc.tol && h_ok;
                            rows.push(vec!["trace".into(), "lp".into(), s.to_string(), lp.residual.to_string()]);
                            points.push(to_value(&lp));
                        }
                        Err(e) => {
                            ok = false;
                            points.push(json!({ "s": s, "error": e.to_string() }));
                        }
                    }
                }
                pass &= ok;
                json!({
                    "start_r": tc.start_r,
                    "tol": tc.tol,
                    "pass": ok,
                    "classification": trace.classification,
                    "points": points,
                })
            }
            Err(e) => {
                pass = false;
                json!({ "start_r": tc.start_r, "pass": false, "error": e.to_string() })
            }
        };
        result.insert("trace".into(), entry);
    }

    Ok(Outcome {
        command: "verify-identities",
        check: "rotational geometry identities and the P-operator decomposition",
        pass,
        result: Value::Object(result),
        csv: csv_table(&["source", "identity", "s", "residual"], rows)?,
    })
}

pub fn slice(cfg: &RunConfig) -> Result<Outcome> {
    let sec = cfg
        .slice
        .clone()
        .ok_or_else(|| Error::InvalidParameter("slice needs a [slice] section".into()))?;
    if !(sec.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", sec.tol)));
    }
    let prob = problem(cfg)?;
    let bracket = (sec.bracket[0], sec.bracket[1]);
    let (pass, result, rows) = match slice_solve(&prob, bracket) {
        Ok(roots) => {
            let near = sec.expect_r0.is_none_or(|r| roots.iter().any(|x| (x - r).abs() <= sec.tol));
            let pass = sec.expect != Some(SliceExpectation::Empty) && near;
            let rows = roots.iter().map(|r| vec![r.to_string()]).collect();
            (pass, json!({ "status": "roots", "roots": roots }), rows)
        }
        Err(Error::NoRoot { .. }) => {
            let cert = certify_empty(&prob, bracket)?;
            let pass = sec.expect != Some(SliceExpectation::Root) && sec.expect_r0.is_none();
            (pass, json!({ "status": "empty", "certificate": cert }), Vec::new())
        }
        Err(e @ Error::DegenerateFamily { .. }) => {
            let pass = sec.expect.is_none() && sec.expect_r0.is_none();
            (pass, json!({ "status": "degenerate", "detail": e.to_string() }), Vec::new())
        }
        Err(e @ (Error::DomainError { .. } | Error::InvalidParameter(_))) => return Err(e),
        Err(e) => (false, json!({ "status": "error", "error": e.to_string() }), Vec::new()),
    };
    Ok(Outcome {
        command: "slice",
        check: "slice solutions",
        pass,
        result: json!({ "bracket": sec.bracket, "outcome": result }),
        csv: csv_table(&["r0"], rows)?,
    })
}

pub fn shoot_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let sec = cfg
        .shoot
        .clone()
        .ok_or_else(|| Error::InvalidParameter("shoot needs a [shoot] section or --start-r".into()))?;
    sec.control.validate()?;
    let prob = problem(cfg)?;
    let trace = shoot(&prob, sec.start_r, &sec.control)?;
    let closed = trace.classification.is_closed();
    let mut csv = Vec::new();
    write_trace_csv(&trace, &mut csv)?;
    Ok(Outcome {
        command: "shoot",
        check: "profile closure",
        pass: sec.expect_closed.is_none_or(|e| e == closed),
        result: json!({ "start_r": sec.start_r, "expect_closed": sec.expect_closed, "trace": trace }),
        csv,
    })
}

pub fn scan_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let sec = cfg
        .scan
        .clone()
        .ok_or_else(|| Error::InvalidParameter("scan needs a [scan] section".into()))?;
    sec.control.validate()?;
    let prob = problem(cfg)?;
    let grid = sec.points()?;
    let table = scan(&prob, &grid, &sec.control);
    let closed: Vec<f64> = table.closed().map(|r| r.start_r).collect();
    let mut pass = match &sec.expect {
        None => true,
        Some(ScanExpectation::AllClosed) => closed.len() == table.rows.len(),
        Some(ScanExpectation::NoneClosed) => closed.is_empty(),
        Some(ScanExpectation::ClosedNear { target, tol }) => {
            table.rows.iter().all(|r| r.closed == ((r.start_r - target).abs() <= *tol))
        }
    };
    let radius_error = table
        .closed()
        .map(|r| (r.r_max - r.start_r).abs().max((r.r_min - r.start_r).abs()))
        .fold(0.0, f64::max);
    if let Some(tol) = sec.radius_tol {
        pass &= radius_error <= tol;
    }
    let mut csv = Vec::new();
    write_scan_csv(&table, &mut csv)?;
    Ok(Outcome {
        command: "scan",
        check: "closure over a grid of start radii",
        pass,
        result: json!({
            "points": table.rows.len(),
            "closed": closed,
            "expect": sec.expect,
            "radius_error": radius_error,
            "table": table,
        }),
        csv,
    })
}

/// Runs every section present in the configuration.
pub fn report(cfg: &RunConfig) -> Result<Outcome> {
    let mut outcomes = Vec::new();
    if cfg.check_cone.is_some() {
        outcomes.push(check_cone(cfg)?);
    }
    if cfg.check_condition.is_some() {
        outcomes.push(check_condition(cfg)?);
    }
    if cfg.verify.is_some() {
        outcomes.push(verify_identities(cfg)?);
    }
    if cfg.slice.is_some() {
        outcomes.push(slice(cfg)?);
    }
    if cfg.shoot.is_some() {
        outcomes.push(shoot_cmd(cfg)?);
    }
    if cfg.scan.is_some() {
        outcomes.push(scan_cmd(cfg)?);
    }
    if outcomes.is_empty() {
        return Err(Error::InvalidParameter("report found no sections to run".into()));
    }
    let pass = outcomes.iter().all(|o| o.pass);
    let rows = outcomes.iter().map(|o| vec![o.command.to_string(), o.check.to_string(), o.pass.to_string()]);
    let csv = csv_table(&["command", "check", "pass"], rows)?;
    let checks: Vec<Value> = outcomes
        .into_iter()
        .map(|o| json!({ "command": o.command, "check": o.check, "pass": o.pass, "result": o.result }))
        .collect();
    Ok(Outcome { command: "report", check: "all configured checks", pass, result: json!({ "checks": checks }), csv })
}
