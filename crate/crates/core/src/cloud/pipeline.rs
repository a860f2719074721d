//! decimate -> remove_overhead -> extract_planes -> per-region ball pivoting.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ransac::{extract_planes, PlaneParams};
use super::{decimate_profiles, remove_overhead, triangulate_bpa, ScanCloud};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::{Point, Vector};
use crate::mesh::SceneMesh;
use crate::road::Trajectory;

/// Provenance tag of triangles built from points outside every plane region.
pub const UNMODELED_REGION: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Keep every k-th point of each scanner profile.
    pub keep_every: usize,
    /// Lateral reach of the artefact corridor around the trajectory (m).
    pub overhead_half_width: f64,
    /// Height above the road beyond which corridor points are dropped (m).
    pub overhead_clearance: f64,
    pub planes: PlaneParams,
    /// Grid cell (m) used to thin region inliers and leftover points before
    /// triangulation.
    pub thin_cell: f64,
    pub ball_radius: f64,
    pub triangulate_unmodeled: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            keep_every: 4,
            overhead_half_width: 3.5,
            overhead_clearance: 0.3,
            planes: PlaneParams::default(),
            thin_cell: 0.4,
            ball_radius: 0.6,
            triangulate_unmodeled: true,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.keep_every < 1 {
            return Err(Error::param("keep_every", "must be at least 1"));
        }
        if !(self.thin_cell > 0.0) {
            return Err(Error::param("thin_cell", "must be positive"));
        }
        if !(self.ball_radius > 0.0) {
            return Err(Error::param("ball_radius", "must be positive"));
        }
        self.planes.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub inliers: usize,
    pub triangulated_points: usize,
    pub triangles: usize,
    pub rms: f64,
    pub normal: [f64; 3],
    pub offset: f64,
}

/// Per-stage counts of a [`build_scene`] run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub input_points: usize,
    pub decimated_points: usize,
    pub overhead_removed_points: usize,
    pub filtered_points: usize,
    pub planar_points: usize,
    pub unmodeled_points: usize,
    pub regions: Vec<RegionSummary>,
    pub unmodeled_triangles: usize,
    pub triangles: usize,
    pub vertices: usize,
    /// Triangles expected from meshing the raw cloud (two per input point).
    pub raw_triangle_estimate: usize,
    /// `raw_triangle_estimate / triangles`; absent when no triangle was produced.
    pub reduction_factor: Option<f64>,
}

/// One representative per cell of a regular grid in the plane spanned by `u`, `v`:
/// the point closest to its cell centre. Output order follows the cell keys.
fn thin_planar(points: &[Point], indices: &[usize], normal: &Vector, cell: f64) -> Vec<usize> {
    let helper = if normal.x.abs() <= normal.y.abs() && normal.x.abs() <= normal.z.abs() {
        Vector::x()
    } else if normal.y.abs() <= normal.z.abs() {
        Vector::y()
    } else {
        Vector::z()
    };
    let u = normal.cross(&helper).normalize();
    let v = normal.cross(&u);
    thin_by_key(indices, |i| {
        let p = points[i].coords;
        let (a, b) = (p.dot(&u) / cell, p.dot(&v) / cell);
        let key = [a.floor() as i64, b.floor() as i64, 0];
        let d = (a - a.floor() - 0.5).powi(2) + (b - b.floor() - 0.5).powi(2);
        (key, d)
    })
}

fn thin_voxel(points: &[Point], indices: &[usize], cell: f64) -> Vec<usize> {
    thin_by_key(indices, |i| {
        let s = points[i].coords / cell;
        let f = s.map(f64::floor);
        let key = [f.x as i64, f.y as i64, f.z as i64];
        (key, (s - f - Vector::repeat(0.5)).norm_squared())
    })
}

fn thin_by_key(indices: &[usize], keyed: impl Fn(usize) -> ([i64; 3], f64)) -> Vec<usize> {
    let mut best: BTreeMap<[i64; 3], (f64, usize)> = BTreeMap::new();
    for &i in indices {
        let (key, d) = keyed(i);
        best.entry(key)
            .and_modify(|e| {
                if d < e.0 || (d == e.0 && i < e.1) {
                    *e = (d, i);
                }
            })
            .or_insert((d, i));
    }
    best.into_values().map(|(_, i)| i).collect()
}

/// Runs the full cloud-to-mesh pipeline.
pub fn build_scene(
    cloud: &ScanCloud,
    traj: &Trajectory,
    config: &PipelineConfig,
    exec: Execution,
) -> Result<(SceneMesh, PipelineReport)> {
    config.validate()?;
    let decimated = decimate_profiles(cloud, config.keep_every)?;
    let filtered = remove_overhead(
        &decimated,
        traj,
        config.overhead_half_width,
        config.overhead_clearance,
        exec,
    )?;
    let pts = &filtered.points;
    let extraction = extract_planes(pts, &config.planes, exec)?;

    struct Job {
        indices: Vec<usize>,
        region: u32,
    }
    let mut jobs: Vec<Job> = extraction
        .regions
        .iter()
        .enumerate()
        .map(|(r, region)| Job {
            indices: thin_planar(pts, &region.inlier_indices, &region.plane.normal, config.thin_cell),
            region: r as u32,
        })
        .collect();
    if config.triangulate_unmodeled && !extraction.unmodeled.is_empty() {
        jobs.push(Job {
            indices: thin_voxel(pts, &extraction.unmodeled, config.thin_cell),
            region: UNMODELED_REGION,
        });
    }

    let meshes = exec.map(&jobs, |job| {
        let sub: Vec<Point> = job.indices.iter().map(|&i| pts[i]).collect();
        triangulate_bpa(&sub, config.ball_radius)
    });

    let mut mesh = SceneMesh {
        provenance: Some(Vec::new()),
        ..SceneMesh::default()
    };
    let mut region_triangles = vec![0usize; extraction.regions.len()];
    let mut region_points = vec![0usize; extraction.regions.len()];
    let mut unmodeled_triangles = 0;
    for (job, part) in jobs.iter().zip(meshes) {
        let part = compact(part?);
        if job.region == UNMODELED_REGION {
            unmodeled_triangles = part.triangle_count();
        } else {
            region_triangles[job.region as usize] = part.triangle_count();
            region_points[job.region as usize] = job.indices.len();
        }
        mesh.append(&part, job.region);
    }

    let triangles = mesh.triangle_count();
    let raw_triangle_estimate = 2 * cloud.len();
    let report = PipelineReport {
        input_points: cloud.len(),
        decimated_points: decimated.len(),
        overhead_removed_points: decimated.len() - filtered.len(),
        filtered_points: filtered.len(),
        planar_points: extraction.regions.iter().map(|r| r.inlier_indices.len()).sum(),
        unmodeled_points: extraction.unmodeled.len(),
        regions: extraction
            .regions
            .iter()
            .enumerate()
            .map(|(r, region)| RegionSummary {
                inliers: region.inlier_indices.len(),
                triangulated_points: region_points[r],
                triangles: region_triangles[r],
                rms: region.rms,
                normal: region.plane.normal.into(),
                offset: region.plane.offset,
            })
            .collect(),
        unmodeled_triangles,
        triangles,
        vertices: mesh.vertices.len(),
        raw_triangle_estimate,
        reduction_factor: (triangles > 0).then(|| raw_triangle_estimate as f64 / triangles as f64),
    };
    Ok((mesh, report))
}

/// Drops vertices no triangle references.
fn compact(mesh: SceneMesh) -> SceneMesh {
    mesh.subsample(usize::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_cloud_gives_empty_mesh_and_zero_counts() {
        let traj = Trajectory::from_positions(&[Point::origin(), Point::new(10.0, 0.0, 0.0)]).unwrap();
        let (mesh, report) =
            build_scene(&ScanCloud::default(), &traj, &PipelineConfig::default(), Execution::Sequential).unwrap();
        assert!(mesh.is_empty());
        assert_eq!(report.input_points, 0);
        assert_eq!(report.triangles, 0);
        assert_eq!(report.reduction_factor, None);
    }

    #[test]
    fn thinning_keeps_one_point_per_cell() {
        let pts: Vec<Point> = (0..100)
            .flat_map(|i| (0..10).map(move |j| Point::new(0.05 + i as f64 * 0.1, 0.05 + j as f64 * 0.1, 0.0)))
            .collect();
        let all: Vec<usize> = (0..pts.len()).collect();
        let kept = thin_planar(&pts, &all, &Vector::z(), 0.5);
        assert_eq!(kept.len(), 20 * 2);
        let kept = thin_voxel(&pts, &all, 0.5);
        assert_eq!(kept.len(), 20 * 2);
    }

    #[test]
    fn invalid_config_rejected() {
        let traj = Trajectory::from_positions(&[Point::origin(), Point::new(10.0, 0.0, 0.0)]).unwrap();
        let cfg = PipelineConfig {
            keep_every: 0,
            ..PipelineConfig::default()
        };
        assert!(build_scene(&ScanCloud::default(), &traj, &cfg, Execution::Sequential).is_err());
    }
}
