use std::collections::HashMap;

use crate::geom::Point;

/// Uniform hash grid over a point slice for fixed-radius and k-nearest queries.
pub(crate) struct SpatialGrid<'a> {
    points: &'a [Point],
    cell: f64,
    cells: HashMap<[i64; 3], Vec<u32>>,
    len: usize,
}

impl<'a> SpatialGrid<'a> {
    pub fn new(points: &'a [Point], cell: f64) -> Self {
        Self::with_subset(points, cell, 0..points.len())
    }

    /// Indexes only the given point indices.
    pub fn with_subset(points: &'a [Point], cell: f64, subset: impl IntoIterator<Item = usize>) -> Self {
        let mut cells: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
        let mut len = 0;
        for i in subset {
            cells.entry(key(&points[i], cell)).or_default().push(i as u32);
            len += 1;
        }
        SpatialGrid {
            points,
            cell,
            cells,
            len,
        }
    }

    pub fn points(&self) -> &'a [Point] {
        self.points
    }

    /// Calls `f(index, squared_distance)` for every indexed point within `radius` of `p`.
    pub fn for_each_within(&self, p: &Point, radius: f64, mut f: impl FnMut(u32, f64)) {
        let r2 = radius * radius;
        let lo = key(&(p - nalgebra::Vector3::repeat(radius)), self.cell);
        let hi = key(&(p + nalgebra::Vector3::repeat(radius)), self.cell);
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    if let Some(bucket) = self.cells.get(&[x, y, z]) {
                        for &i in bucket {
                            let d2 = (self.points[i as usize] - p).norm_squared();
                            if d2 <= r2 {
                                f(i, d2);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Indices within `radius`, sorted by distance then index.
    pub fn within_sorted(&self, p: &Point, radius: f64) -> Vec<(u32, f64)> {
        let mut out = Vec::new();
        self.for_each_within(p, radius, |i, d2| out.push((i, d2)));
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        out
    }

    /// Distances to the `k` nearest indexed points other than `exclude`.
    pub fn k_nearest_distances(&self, p: &Point, k: usize, exclude: u32) -> Vec<f64> {
        if self.cells.is_empty() || k == 0 {
            return Vec::new();
        }
        let mut radius = self.cell;
        loop {
            let mut found: Vec<f64> = Vec::new();
            self.for_each_within(p, radius, |i, d2| {
                if i != exclude {
                    found.push(d2);
                }
            });
            let total = self.len - 1;
            if found.len() >= k || found.len() >= total || radius > 1e6 * self.cell {
                found.sort_by(f64::total_cmp);
                found.truncate(k);
                return found.into_iter().map(f64::sqrt).collect();
            }
            radius *= 2.0;
        }
    }
}

fn key(p: &Point, cell: f64) -> [i64; 3] {
    [
        (p.x / cell).floor() as i64,
        (p.y / cell).floor() as i64,
        (p.z / cell).floor() as i64,
    ]
}

/// Mean distance to the six nearest neighbours over a deterministic subsample of
/// at most 2000 points; `None` for fewer than two points.
pub(crate) fn mean_spacing(points: &[Point], subset: &[usize]) -> Option<f64> {
    if subset.len() < 2 {
        return None;
    }
    let bbox = crate::geom::Aabb::from_points(subset.iter().map(|&i| &points[i]));
    let e = bbox.extent();
    let volume_cell = (e.x.max(1e-3) * e.y.max(1e-3) * e.z.max(1e-3) / subset.len() as f64).cbrt();
    let area_cell = {
        let mut s = [e.x, e.y, e.z];
        s.sort_by(f64::total_cmp);
        (s[1].max(1e-3) * s[2].max(1e-3) / subset.len() as f64).sqrt()
    };
    let cell = volume_cell.min(area_cell).max(1e-6) * 2.0;
    let grid = SpatialGrid::with_subset(points, cell, subset.iter().copied());
    let stride = (subset.len() / 2000).max(1);
    let mut sum = 0.0;
    let mut count = 0usize;
    for &i in subset.iter().step_by(stride) {
        for d in grid.k_nearest_distances(&points[i], 6, i as u32) {
            sum += d;
            count += 1;
        }
    }
    (count > 0).then(|| sum / count as f64)
}
