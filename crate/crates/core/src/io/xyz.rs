use std::io::Write;
use std::path::Path;

use crate::cloud::ScanCloud;
use crate::error::{Error, Location, Result};
use crate::geom::Point;

/// Parses `x,y,z[,profile_id]` rows. A leading header row is detected and skipped.
pub fn parse_xyz_csv(bytes: &[u8], origin: &Path) -> Result<ScanCloud> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::format(origin, Location::ByteOffset(e.valid_up_to() as u64), "invalid UTF-8"))?;
    let mut points = Vec::new();
    let mut profiles: Vec<u32> = Vec::new();
    let mut columns: Option<usize> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx as u64 + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if columns.is_none() && fields[0].parse::<f64>().is_err() {
            let ok = fields.len() >= 3
                && fields[..3] == ["x", "y", "z"]
                && (fields.len() == 3 || (fields.len() == 4 && fields[3] == "profile_id"));
            if !ok {
                return Err(Error::format(
                    origin,
                    Location::Line(lineno),
                    format!("expected header `x,y,z[,profile_id]`, found `{line}`"),
                ));
            }
            columns = Some(fields.len());
            continue;
        }
        let expected = *columns.get_or_insert(fields.len());
        if fields.len() != expected || !(3..=4).contains(&fields.len()) {
            return Err(Error::format(
                origin,
                Location::Line(lineno),
                format!("expected {expected} fields, found {}", fields.len()),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i].parse::<f64>().map_err(|_| {
                Error::format(origin, Location::Line(lineno), format!("cannot parse `{}`", fields[i]))
            })
        };
        points.push(Point::new(num(0)?, num(1)?, num(2)?));
        if expected == 4 {
            let pid = fields[3].parse::<u32>().map_err(|_| {
                Error::format(
                    origin,
                    Location::Line(lineno),
                    format!("profile_id `{}` is not a nonnegative integer", fields[3]),
                )
            })?;
            profiles.push(pid);
        }
    }
    let profile_ids = (columns == Some(4)).then_some(profiles);
    ScanCloud::new(points, profile_ids)
}

pub fn write_xyz_csv(cloud: &ScanCloud, out: &mut impl Write) -> std::io::Result<()> {
    match &cloud.profile_ids {
        Some(ids) => {
            writeln!(out, "x,y,z,profile_id")?;
            for (p, id) in cloud.points.iter().zip(ids) {
                writeln!(out, "{},{},{},{}", p.x, p.y, p.z, id)?;
            }
        }
        None => {
            writeln!(out, "x,y,z")?;
            for p in &cloud.points {
                writeln!(out, "{},{},{}", p.x, p.y, p.z)?;
            }
        }
    }
    Ok(())
}
