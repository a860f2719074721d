//! Seeded RANSAC plane extraction with connectivity splitting (region growing).

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::{mean_spacing, SpatialGrid};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::{Point, Vector};

/// `normal . p = offset` for points on the plane; `normal` has unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub normal: Vector,
    pub offset: f64,
}

impl Plane {
    pub fn through(a: &Point, b: &Point, c: &Point) -> Option<Plane> {
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        let scale = (b - a).norm() * (c - a).norm();
        if len <= 1e-12 * scale || len == 0.0 {
            return None;
        }
        let normal = n / len;
        Some(Plane {
            normal,
            offset: normal.dot(&a.coords),
        })
    }

    pub fn distance(&self, p: &Point) -> f64 {
        (self.normal.dot(&p.coords) - self.offset).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneRegion {
    pub plane: Plane,
    pub inlier_indices: Vec<usize>,
    /// Root-mean-square point-to-plane distance of the inliers.
    pub rms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlaneExtraction {
    pub regions: Vec<PlaneRegion>,
    /// Points not assigned to any region, ascending.
    pub unmodeled: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlaneParams {
    /// Inlier distance tolerance (m).
    pub dist_tol: f64,
    pub min_inliers: usize,
    /// Neighbour radius for connectivity; `None` uses four times the mean spacing.
    pub connect_radius: Option<f64>,
    pub max_planes: usize,
    /// Hypotheses drawn per accepted plane.
    pub iterations: usize,
    pub seed: u64,
}

impl Default for PlaneParams {
    fn default() -> Self {
        PlaneParams {
            dist_tol: 0.05,
            min_inliers: 50,
            connect_radius: None,
            max_planes: 64,
            iterations: 500,
            seed: 42,
        }
    }
}

impl PlaneParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dist_tol > 0.0) {
            return Err(Error::param("dist_tol", "must be positive"));
        }
        if self.min_inliers < 3 {
            return Err(Error::param("min_inliers", "must be at least 3"));
        }
        if let Some(r) = self.connect_radius {
            if !(r > 0.0) {
                return Err(Error::param("connect_radius", "must be positive"));
            }
        }
        if self.iterations == 0 {
            return Err(Error::param("iterations", "must be at least 1"));
        }
        Ok(())
    }
}

/// Least-squares plane through the given points and its rms residual.
pub fn fit_plane(points: &[Point], indices: &[usize]) -> Option<(Plane, f64)> {
    if indices.len() < 3 {
        return None;
    }
    let n = indices.len() as f64;
    let centroid = indices
        .iter()
        .fold(Vector::zeros(), |acc, &i| acc + points[i].coords)
        / n;
    let mut cov = Matrix3::zeros();
    for &i in indices {
        let d = points[i].coords - centroid;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let (k, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let normal: Vector = eig.eigenvectors.column(k).into_owned().normalize();
    if !normal.iter().all(|c| c.is_finite()) {
        return None;
    }
    let plane = Plane {
        normal,
        offset: normal.dot(&centroid),
    };
    Some((plane, rms(points, indices, &plane)))
}

fn rms(points: &[Point], indices: &[usize], plane: &Plane) -> f64 {
    if indices.is_empty() {
        return 0.0;
    }
    let ss: f64 = indices.iter().map(|&i| plane.distance(&points[i]).powi(2)).sum();
    (ss / indices.len() as f64).sqrt()
}

#[derive(Clone, Copy)]
struct Score {
    inliers: usize,
    sq_sum: f64,
    index: usize,
}

impl Score {
    fn rms(&self) -> f64 {
        if self.inliers == 0 {
            f64::INFINITY
        } else {
            (self.sq_sum / self.inliers as f64).sqrt()
        }
    }

    /// Most inliers, then lowest rms, then lowest hypothesis index.
    fn better_than(&self, other: &Score) -> bool {
        self.inliers
            .cmp(&other.inliers)
            .then_with(|| other.rms().total_cmp(&self.rms()))
            .then_with(|| other.index.cmp(&self.index))
            .is_gt()
    }
}

/// Repeatedly fits the best RANSAC plane to the remaining points, splits its
/// inliers into connected components, and turns every component with at least
/// `min_inliers` points into a region, until `max_planes` regions exist or no
/// hypothesis reaches `min_inliers`.
pub fn extract_planes(points: &[Point], params: &PlaneParams, exec: Execution) -> Result<PlaneExtraction> {
    params.validate()?;
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let connect_radius = match params.connect_radius {
        Some(r) => r,
        None => match mean_spacing(points, &remaining) {
            Some(s) => 4.0 * s,
            None => return Ok(PlaneExtraction {
                regions: Vec::new(),
                unmodeled: remaining,
            }),
        },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut regions = Vec::new();
    let mut unmodeled = Vec::new();
    let tol = params.dist_tol;

    while regions.len() < params.max_planes && remaining.len() >= params.min_inliers {
        let hypotheses: Vec<Option<Plane>> = (0..params.iterations)
            .map(|_| {
                let n = remaining.len();
                let a = rng.gen_range(0..n);
                let mut b = rng.gen_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                let mut c = rng.gen_range(0..n - 2);
                for taken in [a.min(b), a.max(b)] {
                    if c >= taken {
                        c += 1;
                    }
                }
                Plane::through(&points[remaining[a]], &points[remaining[b]], &points[remaining[c]])
            })
            .collect();

        let scores = exec.map_range(hypotheses.len(), |h| {
            let mut s = Score {
                inliers: 0,
                sq_sum: 0.0,
                index: h,
            };
            if let Some(plane) = &hypotheses[h] {
                for &i in &remaining {
                    let d = plane.distance(&points[i]);
                    if d <= tol {
                        s.inliers += 1;
                        s.sq_sum += d * d;
                    }
                }
            }
            s
        });
        let best = scores
            .iter()
            .copied()
            .reduce(|a, b| if b.better_than(&a) { b } else { a })
            .expect("at least one hypothesis");
        if best.inliers < params.min_inliers {
            break;
        }
        let mut plane = hypotheses[best.index].expect("scored hypothesis has a plane");
        let mut inliers: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| plane.distance(&points[i]) <= tol)
            .collect();
        if let Some((refit, _)) = fit_plane(points, &inliers) {
            let refit_inliers: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| refit.distance(&points[i]) <= tol)
                .collect();
            if refit_inliers.len() >= inliers.len() {
                plane = refit;
                inliers = refit_inliers;
            }
        }

        for component in connected_components(points, &inliers, connect_radius) {
            if component.len() < params.min_inliers || regions.len() >= params.max_planes {
                unmodeled.extend_from_slice(&component);
                continue;
            }
            let (region_plane, region_rms) = match fit_plane(points, &component) {
                Some((p, r)) if component.iter().all(|&i| p.distance(&points[i]) <= tol) => (p, r),
                _ => (plane, rms(points, &component, &plane)),
            };
            regions.push(PlaneRegion {
                plane: region_plane,
                inlier_indices: component,
                rms: region_rms,
            });
        }
        let mut taken = vec![false; points.len()];
        for &i in &inliers {
            taken[i] = true;
        }
        remaining.retain(|&i| !taken[i]);
    }

    unmodeled.extend_from_slice(&remaining);
    unmodeled.sort_unstable();
    Ok(PlaneExtraction { regions, unmodeled })
}

/// Components of the fixed-radius neighbour graph over `subset`, each sorted
/// ascending, ordered by their smallest index.
fn connected_components(points: &[Point], subset: &[usize], radius: f64) -> Vec<Vec<usize>> {
    let grid = SpatialGrid::with_subset(points, radius, subset.iter().copied());
    let mut label = std::collections::HashMap::with_capacity(subset.len());
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    let mut components = Vec::new();
    for &start in &sorted {
        if label.contains_key(&start) {
            continue;
        }
        let id = components.len();
        label.insert(start, id);
        let mut members = vec![start];
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            grid.for_each_within(&points[i], radius, |j, _| {
                let j = j as usize;
                if let std::collections::hash_map::Entry::Vacant(e) = label.entry(j) {
                    e.insert(id);
                    members.push(j);
                    queue.push_back(j);
                }
            });
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_patch(x0: f64, nx: usize, ny: usize, step: f64) -> Vec<Point> {
        (0..nx)
            .flat_map(|i| (0..ny).map(move |j| Point::new(x0 + i as f64 * step, j as f64 * step, 0.0)))
            .collect()
    }

    #[test]
    fn exact_plane_single_region() {
        let pts = flat_patch(0.0, 40, 25, 0.25);
        assert_eq!(pts.len(), 1000);
        let params = PlaneParams {
            dist_tol: 0.01,
            ..PlaneParams::default()
        };
        let out = extract_planes(&pts, &params, Execution::Sequential).unwrap();
        assert_eq!(out.regions.len(), 1);
        assert_eq!(out.regions[0].inlier_indices.len(), 1000);
        assert!(out.regions[0].rms < 1e-12);
        assert!(out.unmodeled.is_empty());
        assert!((out.regions[0].plane.normal.z.abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gap_splits_coplanar_patches() {
        let mut pts = flat_patch(0.0, 21, 21, 0.5);
        pts.extend(flat_patch(60.0, 21, 21, 0.5));
        let params = PlaneParams {
            dist_tol: 0.01,
            connect_radius: Some(1.0),
            ..PlaneParams::default()
        };
        let out = extract_planes(&pts, &params, Execution::Parallel).unwrap();
        assert_eq!(out.regions.len(), 2);
        assert_eq!(out.regions[0].inlier_indices.len(), 441);
        assert_eq!(out.regions[1].inlier_indices.len(), 441);
        let (a, b) = (out.regions[0].plane, out.regions[1].plane);
        assert!((a.normal.dot(&b.normal).abs() - 1.0).abs() < 1e-9);
        assert!((a.offset.abs() - b.offset.abs()).abs() < 1e-9);
    }

    #[test]
    fn sparse_random_points_yield_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<Point> = (0..100)
            .map(|_| Point::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)))
            .collect();
        let params = PlaneParams {
            min_inliers: 200,
            ..PlaneParams::default()
        };
        let out = extract_planes(&pts, &params, Execution::Sequential).unwrap();
        assert!(out.regions.is_empty());
        assert_eq!(out.unmodeled.len(), 100);
    }

    #[test]
    fn two_planes_and_determinism() {
        let mut pts = flat_patch(0.0, 30, 30, 0.3);
        // vertical wall x = 12
        pts.extend((0..30).flat_map(|j| (0..10).map(move |k| Point::new(12.0, j as f64 * 0.3, 0.2 + k as f64 * 0.3))));
        let params = PlaneParams {
            dist_tol: 0.02,
            connect_radius: Some(1.0),
            min_inliers: 30,
            ..PlaneParams::default()
        };
        let a = extract_planes(&pts, &params, Execution::Sequential).unwrap();
        let b = extract_planes(&pts, &params, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.regions.len(), 2);
        for r in &a.regions {
            for &i in &r.inlier_indices {
                assert!(r.plane.distance(&pts[i]) <= params.dist_tol);
            }
            assert!(r.rms <= params.dist_tol);
        }
    }

    #[test]
    fn bad_params() {
        let p = PlaneParams {
            min_inliers: 2,
            ..PlaneParams::default()
        };
        assert!(extract_planes(&[], &p, Execution::Sequential).is_err());
        let p = PlaneParams {
            dist_tol: 0.0,
            ..PlaneParams::default()
        };
        assert!(extract_planes(&[], &p, Execution::Sequential).is_err());
    }
}
