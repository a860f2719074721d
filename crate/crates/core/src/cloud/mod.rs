//! From raw mobile-mapping points to a simplified, artefact-filtered mesh.

mod bpa;
pub(crate) mod grid;
mod pipeline;
mod ransac;

pub use bpa::{edge_manifold_violations, triangulate_bpa};
pub use pipeline::{build_scene, PipelineConfig, PipelineReport, RegionSummary};
pub use ransac::{extract_planes, fit_plane, Plane, PlaneExtraction, PlaneParams, PlaneRegion};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::Point;
use crate::road::Trajectory;

/// LIDAR points with optional per-point scanline (profile) index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScanCloud {
    pub points: Vec<Point>,
    pub profile_ids: Option<Vec<u32>>,
    pub intensity: Option<Vec<f32>>,
}

impl ScanCloud {
    pub fn new(points: Vec<Point>, profile_ids: Option<Vec<u32>>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::Ingestion(format!("point {i} has a non-finite coordinate")));
        }
        if let Some(ids) = &profile_ids {
            if ids.len() != points.len() {
                return Err(Error::Ingestion(format!(
                    "{} profile ids for {} points",
                    ids.len(),
                    points.len()
                )));
            }
        }
        Ok(ScanCloud {
            points,
            profile_ids,
            intensity: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Subset in the given index order, carrying attributes along.
    pub fn select(&self, indices: &[usize]) -> ScanCloud {
        ScanCloud {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            profile_ids: self
                .profile_ids
                .as_ref()
                .map(|ids| indices.iter().map(|&i| ids[i]).collect()),
            intensity: self
                .intensity
                .as_ref()
                .map(|v| indices.iter().map(|&i| v[i]).collect()),
        }
    }

    /// Concatenates `other`; profile ids are kept only if both sides carry them.
    pub fn extend(&mut self, other: &ScanCloud) {
        self.points.extend_from_slice(&other.points);
        self.profile_ids = match (self.profile_ids.take(), &other.profile_ids) {
            (Some(mut a), Some(b)) => {
                a.extend_from_slice(b);
                Some(a)
            }
            _ => None,
        };
        self.intensity = match (self.intensity.take(), &other.intensity) {
            (Some(mut a), Some(b)) => {
                a.extend_from_slice(b);
                Some(a)
            }
            _ => None,
        };
    }
}

/// Keeps in-profile positions `0, k, 2k, ...` of every profile, in acquisition
/// order. Without profile ids the whole cloud is one profile.
pub fn decimate_profiles(cloud: &ScanCloud, keep_every: usize) -> Result<ScanCloud> {
    if keep_every < 1 {
        return Err(Error::param("keep_every", "must be at least 1"));
    }
    let keep: Vec<usize> = match &cloud.profile_ids {
        Some(ids) => {
            let mut seen: HashMap<u32, usize> = HashMap::new();
            (0..cloud.len())
                .filter(|&i| {
                    let n = seen.entry(ids[i]).or_insert(0);
                    let pos = *n;
                    *n += 1;
                    pos % keep_every == 0
                })
                .collect()
        }
        None => (0..cloud.len()).step_by(keep_every).collect(),
    };
    Ok(cloud.select(&keep))
}

/// Horizontal segment index over a trajectory polyline.
struct CorridorIndex<'a> {
    traj: &'a Trajectory,
    cell: f64,
    cells: HashMap<(i64, i64), Vec<u32>>,
}

impl<'a> CorridorIndex<'a> {
    fn new(traj: &'a Trajectory, reach: f64) -> Self {
        let st = traj.stations();
        let seg_len = st
            .windows(2)
            .map(|w| crate::geom::horizontal_distance(&w[0].position, &w[1].position))
            .fold(0.0, f64::max);
        let cell = reach.max(seg_len).max(1e-3);
        let mut cells: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, w) in st.windows(2).enumerate() {
            let (a, b) = (w[0].position, w[1].position);
            let x0 = ((a.x.min(b.x) - reach) / cell).floor() as i64;
            let x1 = ((a.x.max(b.x) + reach) / cell).floor() as i64;
            let y0 = ((a.y.min(b.y) - reach) / cell).floor() as i64;
            let y1 = ((a.y.max(b.y) + reach) / cell).floor() as i64;
            for x in x0..=x1 {
                for y in y0..=y1 {
                    cells.entry((x, y)).or_default().push(i as u32);
                }
            }
        }
        CorridorIndex { traj, cell, cells }
    }

    /// Horizontal distance to the nearest polyline point and the road height there.
    fn nearest(&self, p: &Point) -> Option<(f64, f64)> {
        let k = ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64);
        let segs = self.cells.get(&k)?;
        let st = self.traj.stations();
        let mut best: Option<(f64, f64)> = None;
        for &i in segs {
            let (a, b) = (st[i as usize].position, st[i as usize + 1].position);
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            let len2 = dx * dx + dy * dy;
            let t = if len2 > 0.0 {
                (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let (qx, qy) = (a.x + t * dx, a.y + t * dy);
            let d = (p.x - qx).hypot(p.y - qy);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, a.z + t * (b.z - a.z)));
            }
        }
        best
    }
}

/// Marks points lying over the carriageway (horizontal distance to the path at most
/// `half_width`) and more than `clearance` above the local road height.
pub fn overhead_mask(
    cloud: &ScanCloud,
    traj: &Trajectory,
    half_width: f64,
    clearance: f64,
    exec: Execution,
) -> Result<Vec<bool>> {
    if !(half_width > 0.0) {
        return Err(Error::param("half_width", "must be positive"));
    }
    if !(clearance > 0.0) {
        return Err(Error::param("clearance", "must be positive"));
    }
    let index = CorridorIndex::new(traj, half_width);
    Ok(exec.map(&cloud.points, |p| match index.nearest(p) {
        Some((d, road_z)) => d <= half_width && p.z - road_z > clearance,
        None => false,
    }))
}

/// Drops vehicle-like artefacts above the carriageway; see [`overhead_mask`].
pub fn remove_overhead(
    cloud: &ScanCloud,
    traj: &Trajectory,
    half_width: f64,
    clearance: f64,
    exec: Execution,
) -> Result<ScanCloud> {
    let mask = overhead_mask(cloud, traj, half_width, clearance, exec)?;
    let keep: Vec<usize> = (0..cloud.len()).filter(|&i| !mask[i]).collect();
    Ok(cloud.select(&keep))
}
