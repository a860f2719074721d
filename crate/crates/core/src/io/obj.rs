use std::io::Write;
use std::path::Path;

use crate::error::{Error, Location, Result};
use crate::geom::Point;
use crate::mesh::SceneMesh;

/// Parses `v` and `f` records; texture/normal references (`a/b/c`) and negative
/// indices are accepted. Other records are ignored.
pub fn parse_obj(bytes: &[u8], origin: &Path) -> Result<(Vec<Point>, Vec<Vec<u32>>)> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::format(origin, Location::ByteOffset(e.valid_up_to() as u64), "invalid UTF-8"))?;
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx as u64 + 1;
        let bad = |msg: String| Error::format(origin, Location::Line(lineno), msg);
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let c: Vec<f64> = tokens
                    .take(3)
                    .map(|t| t.parse::<f64>().map_err(|_| bad(format!("bad coordinate `{t}`"))))
                    .collect::<Result<_>>()?;
                if c.len() != 3 {
                    return Err(bad("vertex needs 3 coordinates".into()));
                }
                vertices.push(Point::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let mut face = Vec::new();
                for t in tokens {
                    let head = t.split('/').next().unwrap_or("");
                    let i: i64 = head.parse().map_err(|_| bad(format!("bad face index `{t}`")))?;
                    let resolved = if i > 0 {
                        i - 1
                    } else {
                        vertices.len() as i64 + i
                    };
                    if resolved < 0 || resolved >= vertices.len() as i64 {
                        return Err(bad(format!("face index {i} out of range")));
                    }
                    face.push(resolved as u32);
                }
                if face.len() < 3 {
                    return Err(bad("face needs at least 3 vertices".into()));
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

pub fn write_obj(mesh: &SceneMesh, out: &mut impl Write) -> std::io::Result<()> {
    for v in &mesh.vertices {
        writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
    }
    for t in &mesh.triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}
