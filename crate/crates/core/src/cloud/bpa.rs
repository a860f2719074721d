//! Ball-pivoting surface reconstruction.
//!
//! A ball of radius `rho` is dropped onto three points to form a seed triangle
//! whose ball holds no other point, then rolled around every boundary edge of the
//! growing front. The first point it touches closes a new triangle. Winding is not
//! made consistent: the output only has to occlude.

use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::TAU;

use super::grid::SpatialGrid;
use crate::error::{Error, Result};
use crate::geom::{Point, Vector};
use crate::mesh::SceneMesh;

/// Angles below this count as "touching before the ball moved".
const ANGLE_EPS: f64 = 1e-7;
/// A new triangle folding back onto the old one across the pivot edge, at a
/// dihedral angle below 45 degrees, is refused.
const MAX_FOLD_COS: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Seed search looks at this many nearest candidates around each point.
const SEED_NEIGHBOURS: usize = 24;

type EdgeKey = (u32, u32);

fn edge_key(a: u32, b: u32) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

struct FrontEdge {
    a: u32,
    b: u32,
    opposite: u32,
    center: Point,
}

/// Circumcentre and circumradius of a triangle, `None` when degenerate.
fn circumcircle(a: &Point, b: &Point, c: &Point) -> Option<(Point, f64, Vector)> {
    let ab = b - a;
    let ac = c - a;
    let n = ab.cross(&ac);
    let n2 = n.norm_squared();
    if n2 <= 1e-24 * ab.norm_squared() * ac.norm_squared() || n2 == 0.0 {
        return None;
    }
    let offset = (n.cross(&ab) * ac.norm_squared() + ac.cross(&n) * ab.norm_squared()) / (2.0 * n2);
    let center = a + offset;
    Some((center, offset.norm(), n / n2.sqrt()))
}

/// The two centres of balls of radius `rho` touching `a`, `b`, `c`.
fn ball_centers(a: &Point, b: &Point, c: &Point, rho: f64) -> Option<[Point; 2]> {
    let (cc, r, n) = circumcircle(a, b, c)?;
    let h2 = rho * rho - r * r;
    if h2 < 0.0 {
        return None;
    }
    let h = h2.sqrt();
    Some([cc + n * h, cc - n * h])
}

struct Pivoter<'a> {
    grid: SpatialGrid<'a>,
    rho: f64,
    used: Vec<bool>,
    edge_count: HashMap<EdgeKey, u8>,
    faces: HashSet<[u32; 3]>,
    triangles: Vec<[u32; 3]>,
    front: VecDeque<FrontEdge>,
}

impl<'a> Pivoter<'a> {
    fn pts(&self) -> &'a [Point] {
        self.grid.points()
    }

    fn ball_is_empty(&self, center: &Point, skip: [u32; 3]) -> bool {
        let limit = self.rho * (1.0 - 1e-7);
        let mut empty = true;
        self.grid.for_each_within(center, limit, |i, _| {
            if !skip.contains(&i) {
                empty = false;
            }
        });
        empty
    }

    fn count(&self, a: u32, b: u32) -> u8 {
        self.edge_count.get(&edge_key(a, b)).copied().unwrap_or(0)
    }

    fn admissible(&self, a: u32, b: u32, c: u32) -> bool {
        let mut key = [a, b, c];
        key.sort_unstable();
        !self.faces.contains(&key) && self.count(a, b) < 2 && self.count(b, c) < 2 && self.count(a, c) < 2
    }

    /// Records triangle `(a, b, c)` whose ball sits at `center`, pushing edges that
    /// are still open onto the front.
    fn add_triangle(&mut self, a: u32, b: u32, c: u32, center: Point) {
        let mut key = [a, b, c];
        key.sort_unstable();
        self.faces.insert(key);
        self.triangles.push([a, b, c]);
        for v in [a, b, c] {
            self.used[v as usize] = true;
        }
        for (x, y, opp) in [(a, b, c), (b, c, a), (c, a, b)] {
            let n = self.edge_count.entry(edge_key(x, y)).or_insert(0);
            *n += 1;
            if *n == 1 {
                self.front.push_back(FrontEdge {
                    a: x,
                    b: y,
                    opposite: opp,
                    center,
                });
            }
        }
    }

    fn find_seed(&self, i: u32) -> Option<([u32; 3], Point)> {
        let pts = self.pts();
        let p = pts[i as usize];
        let neighbours: Vec<u32> = self
            .grid
            .within_sorted(&p, 2.0 * self.rho)
            .into_iter()
            .map(|(j, _)| j)
            .filter(|&j| j != i && !self.used[j as usize])
            .take(SEED_NEIGHBOURS)
            .collect();
        for (x, &j) in neighbours.iter().enumerate() {
            for &k in &neighbours[x + 1..] {
                let (pj, pk) = (pts[j as usize], pts[k as usize]);
                let Some(centers) = ball_centers(&p, &pj, &pk, self.rho) else {
                    continue;
                };
                let normal = (pj - p).cross(&(pk - p));
                // prefer the ball resting on the upper side of the triangle
                let up = if normal.z.abs() > 1e-9 * normal.norm() {
                    normal.z
                } else if normal.x.abs() > 1e-9 * normal.norm() {
                    normal.x
                } else {
                    normal.y
                };
                let order = if (centers[0] - centers[1]).dot(&normal) * up >= 0.0 {
                    [0, 1]
                } else {
                    [1, 0]
                };
                for o in order {
                    if self.ball_is_empty(&centers[o], [i, j, k]) {
                        return Some(([i, j, k], centers[o]));
                    }
                }
            }
        }
        None
    }

    /// Rolls the ball around `edge` and returns the first point it touches with the
    /// resulting ball centre.
    fn pivot(&self, edge: &FrontEdge) -> Option<(u32, Point)> {
        let pts = self.pts();
        let (pa, pb) = (pts[edge.a as usize], pts[edge.b as usize]);
        let mid = nalgebra::center(&pa, &pb);
        let axis = (pb - pa).normalize();
        let u0 = edge.center - mid;
        let opp = pts[edge.opposite as usize];
        let inward = opp - mid;
        let outward = -(inward - axis * axis.dot(&inward));
        let outward = outward.try_normalize(1e-15)?;
        let spin = if axis.dot(&u0.cross(&outward)) >= 0.0 { axis } else { -axis };

        let reach = (self.rho * self.rho - (pb - pa).norm_squared() / 4.0).max(0.0).sqrt() + self.rho;
        let mut candidates: Vec<(f64, f64, u32, Point)> = Vec::new();
        self.grid.for_each_within(&mid, reach, |x, d2| {
            if x == edge.a || x == edge.b || x == edge.opposite {
                return;
            }
            let px = pts[x as usize];
            let side = px - mid;
            let side = side - axis * axis.dot(&side);
            if let Some(side) = side.try_normalize(1e-15) {
                if side.dot(&-outward) > MAX_FOLD_COS {
                    return;
                }
            }
            let Some(centers) = ball_centers(&pa, &pb, &px, self.rho) else {
                return;
            };
            for c in centers {
                let v = c - mid;
                let mut angle = spin.dot(&u0.cross(&v)).atan2(u0.dot(&v));
                if angle < 0.0 {
                    angle += TAU;
                }
                if angle > TAU - ANGLE_EPS {
                    angle = 0.0;
                }
                if angle < ANGLE_EPS && (px - mid).dot(&outward) <= 0.0 {
                    continue;
                }
                candidates.push((angle, d2, x, c));
            }
        });
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
        candidates
            .into_iter()
            .find(|&(_, _, x, c)| self.ball_is_empty(&c, [edge.a, edge.b, x]))
            .map(|(_, _, x, c)| (x, c))
    }

    fn expand_front(&mut self) {
        while let Some(edge) = self.front.pop_front() {
            if self.count(edge.a, edge.b) >= 2 {
                continue;
            }
            if let Some((x, center)) = self.pivot(&edge) {
                if self.admissible(edge.a, edge.b, x) {
                    self.add_triangle(edge.b, edge.a, x, center);
                }
            }
        }
    }
}

/// Reconstructs a mesh over `points` with a ball of radius `rho`. Fewer than three
/// points, or points too sparse for any ball, give an empty mesh. Every output
/// vertex is one of the input points, in input order.
pub fn triangulate_bpa(points: &[Point], rho: f64) -> Result<SceneMesh> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::param("ball_radius", "must be positive"));
    }
    if points.len() < 3 {
        return Ok(SceneMesh::default());
    }
    let mut pivoter = Pivoter {
        grid: SpatialGrid::new(points, 2.0 * rho),
        rho,
        used: vec![false; points.len()],
        edge_count: HashMap::new(),
        faces: HashSet::new(),
        triangles: Vec::new(),
        front: VecDeque::new(),
    };
    for i in 0..points.len() as u32 {
        if pivoter.used[i as usize] {
            continue;
        }
        if let Some(([a, b, c], center)) = pivoter.find_seed(i) {
            pivoter.add_triangle(a, b, c, center);
            pivoter.expand_front();
        }
    }
    let mut mesh = SceneMesh {
        vertices: points.to_vec(),
        triangles: pivoter.triangles,
        provenance: None,
    };
    mesh.remove_degenerate();
    Ok(mesh)
}

/// Number of undirected edges shared by more than two triangles.
pub fn edge_manifold_violations(mesh: &SceneMesh) -> usize {
    let mut counts: HashMap<EdgeKey, usize> = HashMap::new();
    for t in &mesh.triangles {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            *counts.entry(edge_key(a, b)).or_insert(0) += 1;
        }
    }
    counts.values().filter(|&&c| c > 2).count()
}
