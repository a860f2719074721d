//! File formats: point clouds (XYZ CSV, PLY), meshes (PLY, OBJ).

mod obj;
mod ply;
mod xyz;

pub use obj::{parse_obj, write_obj};
pub use ply::{parse_ply, write_ply, PlyData};
pub use xyz::{parse_xyz_csv, write_xyz_csv};

use std::path::Path;

use crate::cloud::ScanCloud;
use crate::error::{Error, Result};
use crate::mesh::SceneMesh;

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Reads a cloud from `.ply`, or from XYZ CSV for any other extension.
pub fn read_cloud(path: &Path) -> Result<ScanCloud> {
    let bytes = read_bytes(path)?;
    if extension(path) == "ply" {
        let data = parse_ply(&bytes, path)?;
        ScanCloud::new(data.vertices, data.profile_ids)
    } else {
        parse_xyz_csv(&bytes, path)
    }
}

pub fn write_cloud(cloud: &ScanCloud, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    write_xyz_csv(cloud, &mut out).map_err(|e| Error::io(path, e))?;
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a mesh from `.ply` or `.obj`.
pub fn read_mesh(path: &Path) -> Result<SceneMesh> {
    let bytes = read_bytes(path)?;
    let (vertices, faces) = match extension(path).as_str() {
        "ply" => {
            let d = parse_ply(&bytes, path)?;
            (d.vertices, d.faces)
        }
        "obj" => parse_obj(&bytes, path)?,
        other => {
            return Err(Error::param(
                "mesh",
                format!("unsupported mesh extension `{other}` (expected ply or obj)"),
            ))
        }
    };
    let mut triangles = Vec::with_capacity(faces.len());
    for f in faces {
        for k in 1..f.len().saturating_sub(1) {
            triangles.push([f[0], f[k], f[k + 1]]);
        }
    }
    let mut mesh = SceneMesh {
        vertices,
        triangles,
        provenance: None,
    };
    mesh.remove_degenerate();
    mesh.validate()?;
    Ok(mesh)
}

/// Writes a mesh as binary little-endian `.ply` or as `.obj`.
pub fn write_mesh(mesh: &SceneMesh, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    match extension(path).as_str() {
        "ply" => write_ply(mesh, &mut out),
        "obj" => write_obj(mesh, &mut out),
        other => {
            return Err(Error::param(
                "out",
                format!("unsupported mesh extension `{other}` (expected ply or obj)"),
            ))
        }
    }
    .map_err(|e| Error::io(path, e))?;
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn mesh() -> SceneMesh {
        SceneMesh::new(
            vec![
                Point::new(0.0, 0.0, 0.0),
                Point::new(1.5, 0.0, 0.25),
                Point::new(1.0, 1.0, -0.5),
                Point::new(0.0, 1.0, 3.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn mesh_roundtrip_ply_and_obj() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["m.ply", "m.obj"] {
            let p = dir.path().join(name);
            write_mesh(&mesh(), &p).unwrap();
            let back = read_mesh(&p).unwrap();
            assert_eq!(back.vertices, mesh().vertices, "{name}");
            assert_eq!(back.triangles, mesh().triangles, "{name}");
        }
    }

    #[test]
    fn unknown_mesh_extension() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_mesh(&mesh(), &dir.path().join("m.stl")).is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            read_cloud(Path::new("/nonexistent/cloud.csv")),
            Err(Error::Io { .. })
        ));
    }
}
