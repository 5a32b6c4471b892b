//! Profile import and export. CSV carries the columns `s, r, theta, dr,
//! dtheta`; JSON additionally records the ambient, dimension and
//! orientation.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{ProfileCurve, RotationalSurface, SampledCurve};
use crate::ambient::{AmbientSpec, WarpedAmbient};
use crate::error::Result;

/// One row of an exported profile; derivatives are with respect to
/// arclength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub s: f64,
    pub r: f64,
    pub theta: f64,
    pub dr: f64,
    pub dtheta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub ambient: AmbientSpec,
    pub n: usize,
    pub orientation: f64,
    pub samples: Vec<CurveRow>,
}

fn rows(surface: &RotationalSurface) -> Vec<CurveRow> {
    let amb = surface.ambient();
    surface
        .samples()
        .iter()
        .map(|g| CurveRow {
            s: g.s,
            r: g.r,
            theta: g.theta,
            dr: g.r_1,
            dtheta: surface.orientation() * g.r_nu / amb.lambda(g.r),
        })
        .collect()
}

fn curve_from_rows(rows: &[CurveRow]) -> Result<ProfileCurve> {
    ProfileCurve::sampled(SampledCurve {
        s: rows.iter().map(|x| x.s).collect(),
        r: rows.iter().map(|x| x.r).collect(),
        theta: rows.iter().map(|x| x.theta).collect(),
        dr: rows.iter().map(|x| x.dr).collect(),
        dtheta: rows.iter().map(|x| x.dtheta).collect(),
    })
}

pub fn write_csv(surface: &RotationalSurface, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows(surface) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV profile; ambient and dimension are supplied by the caller.
pub fn read_csv(input: impl Read, ambient: WarpedAmbient, n: usize) -> Result<RotationalSurface> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<CurveRow>, _>>()?;
    RotationalSurface::new(ambient, n, curve_from_rows(&rows)?)
}

pub fn write_json(surface: &RotationalSurface, out: impl Write) -> Result<()> {
    let file = SurfaceFile {
        ambient: AmbientSpec::describe(surface.ambient()),
        n: surface.n(),
        orientation: surface.orientation(),
        samples: rows(surface),
    };
    serde_json::to_writer_pretty(out, &file)?;
    Ok(())
}

pub fn read_json(input: impl Read) -> Result<RotationalSurface> {
    let file: SurfaceFile = serde_json::from_reader(input)?;
    let ambient = file.ambient.build()?;
    RotationalSurface::with_orientation(ambient, file.n, curve_from_rows(&file.samples)?, file.orientation)
}
