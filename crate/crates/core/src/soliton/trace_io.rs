//! Trace and scan export.

use std::io::{Read, Write};

use serde::Serialize;

use super::scan::ScanTable;
use super::shoot::ShootingTrace;
use crate::error::Result;

#[derive(Serialize)]
struct TraceRow {
    s: f64,
    r: f64,
    theta: f64,
    phi: f64,
    kappa_p: f64,
    kappa_o: f64,
    u: f64,
    f: f64,
    p: f64,
    residual: f64,
}

/// CSV with columns `s, r, theta, phi, kappa_p, kappa_o, u, f, p, residual`.
pub fn write_trace_csv(trace: &ShootingTrace, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for t in &trace.samples {
        let g = &t.geom;
        w.serialize(TraceRow {
            s: g.s,
            r: g.r,
            theta: g.theta,
            phi: t.phi,
            kappa_p: g.kappa_p,
            kappa_o: g.kappa_o,
            u: g.u,
            f: t.f,
            p: t.p,
            residual: t.residual,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_json(trace: &ShootingTrace, out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(out, trace)?;
    Ok(())
}

pub fn read_trace_json(input: impl Read) -> Result<ShootingTrace> {
    Ok(serde_json::from_reader(input)?)
}

pub fn write_scan_csv(table: &ScanTable, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &table.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_scan_json(table: &ScanTable, out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(out, table)?;
    Ok(())
}
