//! Trajectory CSV: `s,x,y,z,heading_deg[,kappa,grade]`, one row per station.
//! Heading is in degrees, counter-clockwise from the +x axis.

use std::io::{Read, Write};
use std::path::Path;

use super::{Trajectory, TrajectoryStation};
use crate::error::{Error, Location, Result};
use crate::geom::Point;

const BASE_COLUMNS: [&str; 5] = ["s", "x", "y", "z", "heading_deg"];

pub fn read_trajectory_csv(path: &Path) -> Result<Trajectory> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_trajectory_csv(file, path)
}

/// Parses trajectory CSV from any reader; `origin` is only used in error messages.
pub fn parse_trajectory_csv<R: Read>(reader: R, origin: &Path) -> Result<Trajectory> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::format(origin, Location::Line(1), e.to_string()))?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    let with_geometry = match names.as_slice() {
        n if n == BASE_COLUMNS => false,
        [a, b, c, d, e, "kappa", "grade"] if [*a, *b, *c, *d, *e] == BASE_COLUMNS => true,
        _ => {
            return Err(Error::format(
                origin,
                Location::Line(1),
                format!(
                    "expected header `s,x,y,z,heading_deg[,kappa,grade]`, found `{}`",
                    names.join(",")
                ),
            ))
        }
    };

    let mut stations = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::format(origin, Location::Line(line), e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| -> Result<f64> {
            let raw = record.get(i).unwrap_or("");
            raw.parse::<f64>().map_err(|_| {
                Error::format(
                    origin,
                    Location::Line(line),
                    format!("column `{}`: cannot parse `{raw}` as a number", names[i]),
                )
            })
        };
        let mut st = TrajectoryStation::new(
            field(0)?,
            Point::new(field(1)?, field(2)?, field(3)?),
            field(4)?.to_radians(),
        );
        if with_geometry {
            st.kappa = Some(field(5)?);
            st.grade = Some(field(6)?);
        }
        stations.push(st);
    }
    Trajectory::new(stations)
}

pub fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    write_to(traj, &mut out).map_err(|e| Error::io(path, e))?;
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn write_to(traj: &Trajectory, out: &mut impl Write) -> std::io::Result<()> {
    let geometry = traj.has_geometry();
    if geometry {
        writeln!(out, "s,x,y,z,heading_deg,kappa,grade")?;
    } else {
        writeln!(out, "s,x,y,z,heading_deg")?;
    }
    for st in traj.stations() {
        let p = st.position;
        write!(out, "{},{},{},{},{}", st.s, p.x, p.y, p.z, st.heading_deg())?;
        if let (true, Some(k), Some(g)) = (geometry, st.kappa, st.grade) {
            write!(out, ",{k},{g}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}
