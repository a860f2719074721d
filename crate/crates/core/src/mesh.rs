use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{triangle_area, Point};

/// Triangles smaller than this are dropped as degenerate.
pub const MIN_TRIANGLE_AREA: f64 = 1e-10;

/// Triangulated road-environment model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SceneMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[u32; 3]>,
    /// Source region per triangle, when known.
    pub provenance: Option<Vec<u32>>,
}

impl SceneMesh {
    pub fn new(vertices: Vec<Point>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let mesh = SceneMesh {
            vertices,
            triangles,
            provenance: None,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle(&self, i: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[i];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if let Some(i) = self.vertices.iter().position(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::Ingestion(format!("vertex {i} has a non-finite coordinate")));
        }
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v as usize >= n) {
                return Err(Error::Ingestion(format!(
                    "triangle {i} references a vertex out of range ({n} vertices)"
                )));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Ingestion(format!("triangle {i} repeats a vertex")));
            }
            let [a, b, c] = self.triangle(i);
            if triangle_area(&a, &b, &c) <= MIN_TRIANGLE_AREA {
                return Err(Error::Ingestion(format!("triangle {i} is degenerate")));
            }
        }
        if let Some(p) = &self.provenance {
            if p.len() != self.triangles.len() {
                return Err(Error::Ingestion(
                    "provenance length differs from triangle count".into(),
                ));
            }
        }
        Ok(())
    }

    /// Drops triangles that repeat a vertex or fall below the minimum area.
    pub fn remove_degenerate(&mut self) {
        let keep: Vec<bool> = (0..self.triangles.len())
            .map(|i| {
                let t = self.triangles[i];
                if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                    return false;
                }
                let [a, b, c] = self.triangle(i);
                triangle_area(&a, &b, &c) > MIN_TRIANGLE_AREA
            })
            .collect();
        let mut k = keep.iter();
        self.triangles.retain(|_| *k.next().unwrap());
        if let Some(p) = &mut self.provenance {
            let mut k = keep.iter();
            p.retain(|_| *k.next().unwrap());
        }
    }

    /// Appends `other`, tagging its triangles with `region`.
    pub fn append(&mut self, other: &SceneMesh, region: u32) {
        let had = self.triangles.len();
        let offset = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles
            .extend(other.triangles.iter().map(|t| t.map(|v| v + offset)));
        let prov = self.provenance.get_or_insert_with(|| vec![u32::MAX; had]);
        prov.extend(std::iter::repeat(region).take(other.triangles.len()));
    }

    /// Uniform triangle subsampling down to at most `budget` triangles; unused
    /// vertices are dropped and the rest renumbered in order.
    pub fn subsample(&self, budget: usize) -> SceneMesh {
        let n = self.triangles.len();
        let picked: Vec<usize> = if n <= budget {
            (0..n).collect()
        } else if budget == 0 {
            Vec::new()
        } else {
            (0..budget).map(|k| k * n / budget).collect()
        };
        let mut remap = vec![u32::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        let mut triangles = Vec::with_capacity(picked.len());
        for &i in &picked {
            let t = self.triangles[i].map(|v| {
                let slot = &mut remap[v as usize];
                if *slot == u32::MAX {
                    *slot = vertices.len() as u32;
                    vertices.push(self.vertices[v as usize]);
                }
                *slot
            });
            triangles.push(t);
        }
        let provenance = self
            .provenance
            .as_ref()
            .map(|p| picked.iter().map(|&i| p[i]).collect());
        SceneMesh {
            vertices,
            triangles,
            provenance,
        }
    }

    /// Flattened arrays for JSON transport.
    pub fn to_arrays(&self) -> MeshArrays {
        MeshArrays {
            vertices: self.vertices.iter().flat_map(|p| [p.x, p.y, p.z]).collect(),
            indices: self.triangles.iter().flatten().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshArrays {
    pub vertices: Vec<f64>,
    pub indices: Vec<u32>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> SceneMesh {
        SceneMesh::new(
            vec![
                Point::new(0.0, 0.0, 0.0),
                Point::new(1.0, 0.0, 0.0),
                Point::new(1.0, 1.0, 0.0),
                Point::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_indices_and_degenerates() {
        let v = vec![Point::origin(), Point::new(1.0, 0.0, 0.0), Point::new(2.0, 0.0, 0.0)];
        assert!(SceneMesh::new(v.clone(), vec![[0, 1, 5]]).is_err());
        assert!(SceneMesh::new(v.clone(), vec![[0, 0, 1]]).is_err());
        assert!(SceneMesh::new(v, vec![[0, 1, 2]]).is_err());
    }

    #[test]
    fn subsample_respects_budget() {
        let m = quad();
        assert_eq!(m.subsample(10).triangle_count(), 2);
        let s = m.subsample(1);
        assert_eq!(s.triangle_count(), 1);
        assert_eq!(s.vertices.len(), 3);
        s.validate().unwrap();
        assert!(m.subsample(0).is_empty());
    }

    #[test]
    fn append_offsets_indices() {
        let mut m = quad();
        m.append(&quad(), 7);
        assert_eq!(m.triangles[2], [4, 5, 6]);
        assert_eq!(m.provenance.as_ref().unwrap(), &vec![u32::MAX, u32::MAX, 7, 7]);
        m.validate().unwrap();
    }
}
