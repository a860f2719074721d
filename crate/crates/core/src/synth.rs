//! Synthetic corridors with closed-form sight distances, plus small fixtures.
//!
//! Every generator returns the scene both as a mesh (for engine tests) and as a
//! point cloud with one profile per cross-section row (for end-to-end runs).

use serde::Serialize;

use crate::cloud::ScanCloud;
use crate::error::{Error, Result};
use crate::geom::{Point, Vector};
use crate::mesh::SceneMesh;
use crate::road::{Trajectory, TrajectoryStation};

#[derive(Debug, Clone)]
pub struct Corridor {
    pub mesh: SceneMesh,
    pub cloud: ScanCloud,
    pub trajectory: Trajectory,
}

/// Grid of `rows x cols` points, row-major, plus its two-triangles-per-cell mesh.
struct Grid {
    points: Vec<Point>,
    rows: usize,
    cols: usize,
}

impl Grid {
    fn new(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Point) -> Self {
        let mut points = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                points.push(f(r, c));
            }
        }
        Grid { points, rows, cols }
    }

    fn triangles(&self, offset: u32) -> Vec<[u32; 3]> {
        let id = |r: usize, c: usize| offset + (r * self.cols + c) as u32;
        let mut tris = Vec::with_capacity(2 * (self.rows - 1) * (self.cols - 1));
        for r in 0..self.rows - 1 {
            for c in 0..self.cols - 1 {
                let (a, b, cc, d) = (id(r, c), id(r + 1, c), id(r + 1, c + 1), id(r, c + 1));
                tris.push([a, b, cc]);
                tris.push([a, cc, d]);
            }
        }
        tris
    }
}

/// Mesh of all grids, and a cloud whose profile id is the grid row.
fn assemble(grids: &[Grid]) -> Result<(SceneMesh, ScanCloud)> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for g in grids {
        triangles.extend(g.triangles(vertices.len() as u32));
        vertices.extend_from_slice(&g.points);
    }
    let rows = grids.iter().map(|g| g.rows).max().unwrap_or(0);
    let mut points = Vec::with_capacity(vertices.len());
    let mut ids = Vec::with_capacity(vertices.len());
    for r in 0..rows {
        for g in grids.iter().filter(|g| r < g.rows) {
            points.extend_from_slice(&g.points[r * g.cols..(r + 1) * g.cols]);
            ids.extend(std::iter::repeat(r as u32).take(g.cols));
        }
    }
    Ok((SceneMesh::new(vertices, triangles)?, ScanCloud::new(points, Some(ids))?))
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, "must be positive"))
    }
}

/// Number of grid lines covering `extent` at roughly `spacing`.
fn lines(extent: f64, spacing: f64) -> usize {
    ((extent / spacing).round() as usize).max(1) + 1
}

/// Flat straight road along +x from the origin, trajectory on the centre line.
pub fn gen_straight(length: f64, width: f64, spacing: f64) -> Result<Corridor> {
    positive("length", length)?;
    positive("width", width)?;
    positive("spacing", spacing)?;
    let rows = lines(length, spacing);
    let cols = lines(width, spacing);
    let x = |r: usize| length * r as f64 / (rows - 1) as f64;
    let road = Grid::new(rows, cols, |r, c| {
        Point::new(x(r), -width / 2.0 + width * c as f64 / (cols - 1) as f64, 0.0)
    });
    let (mesh, cloud) = assemble(&[road])?;
    let stations = (0..rows)
        .map(|r| with_geometry(TrajectoryStation::new(x(r), Point::new(x(r), 0.0, 0.0), 0.0), 0.0, 0.0))
        .collect();
    Ok(Corridor {
        mesh,
        cloud,
        trajectory: Trajectory::new(stations)?,
    })
}

fn with_geometry(mut st: TrajectoryStation, kappa: f64, grade: f64) -> TrajectoryStation {
    st.kappa = Some(kappa);
    st.grade = Some(grade);
    st
}

/// Crest sight distance: the sight line from eye height `h1` grazes the
/// parabolic summit on its way to a target at height `h2`.
pub fn crest_oracle(vertical_radius: f64, h1: f64, h2: f64) -> f64 {
    (2.0 * vertical_radius).sqrt() * (h1.sqrt() + h2.sqrt())
}

#[derive(Debug, Clone)]
pub struct CrestCorridor {
    pub corridor: Corridor,
    pub vertical_radius: f64,
    /// Abscissa of the summit (x = 0).
    pub summit_s: f64,
}

impl CrestCorridor {
    pub fn oracle(&self, h1: f64, h2: f64) -> f64 {
        crest_oracle(self.vertical_radius, h1, h2)
    }

    /// Abscissa of the trajectory point above `x`.
    pub fn s_at_x(&self, x: f64) -> f64 {
        let stations = self.corridor.trajectory.stations();
        let i = stations.partition_point(|st| st.position.x <= x).clamp(1, stations.len() - 1);
        let (a, b) = (&stations[i - 1], &stations[i]);
        a.s + (b.s - a.s) * (x - a.position.x) / (b.position.x - a.position.x)
    }
}

/// Road surface `z = -x^2 / (2 R_v)` for `x` in `[-length/2, length/2]`.
pub fn gen_crest(vertical_radius: f64, length: f64, width: f64, spacing: f64) -> Result<CrestCorridor> {
    positive("vertical_radius", vertical_radius)?;
    positive("length", length)?;
    positive("width", width)?;
    positive("spacing", spacing)?;
    let rows = lines(length, spacing);
    let cols = lines(width, spacing);
    let x = |r: usize| -length / 2.0 + length * r as f64 / (rows - 1) as f64;
    let z = |x: f64| -x * x / (2.0 * vertical_radius);
    let max_grade = length / 2.0 / vertical_radius;
    if max_grade >= crate::road::MAX_ABS_GRADE {
        return Err(Error::param(
            "length",
            format!("end grade {max_grade:.3} is implausibly steep for this vertical radius"),
        ));
    }
    let road = Grid::new(rows, cols, |r, c| {
        let xr = x(r);
        Point::new(xr, -width / 2.0 + width * c as f64 / (cols - 1) as f64, z(xr))
    });
    let (mesh, cloud) = assemble(&[road])?;
    let mut s = 0.0;
    let mut stations = Vec::with_capacity(rows);
    let mut prev: Option<Point> = None;
    for r in 0..rows {
        let p = Point::new(x(r), 0.0, z(x(r)));
        if let Some(q) = prev {
            s += (p - q).norm();
        }
        prev = Some(p);
        stations.push(with_geometry(TrajectoryStation::new(s, p, 0.0), 0.0, -p.x / vertical_radius));
    }
    let trajectory = Trajectory::new(stations)?;
    let mut crest = CrestCorridor {
        corridor: Corridor {
            mesh,
            cloud,
            trajectory,
        },
        vertical_radius,
        summit_s: 0.0,
    };
    crest.summit_s = crest.s_at_x(0.0);
    Ok(crest)
}

/// Horizontal sight distance along an arc of radius `radius` with an obstruction
/// `offset` inside the curve: the arc length whose chord grazes the obstruction.
pub fn bend_oracle(radius: f64, offset: f64) -> f64 {
    2.0 * radius * (1.0 - offset / radius).acos()
}

/// Arc length from an eye on radius `radius` to a target on radius
/// `target_radius` when the sight line grazes a wall at `radius - offset`.
pub fn bend_oracle_to_radius(radius: f64, offset: f64, target_radius: f64) -> f64 {
    let c = radius - offset;
    radius * ((c / radius).acos() + (c / target_radius).acos())
}

#[derive(Debug, Clone)]
pub struct BendCorridor {
    pub corridor: Corridor,
    pub radius: f64,
    pub wall_offset: f64,
}

impl BendCorridor {
    pub fn oracle(&self) -> f64 {
        bend_oracle(self.radius, self.wall_offset)
    }
}

/// Left-hand circular bend of radius `radius` starting at the origin heading +x,
/// with a continuous vertical wall `wall_offset` inside the curve.
pub fn gen_bend_wall(
    radius: f64,
    wall_offset: f64,
    wall_height: f64,
    arc_length: f64,
    width: f64,
    spacing: f64,
) -> Result<BendCorridor> {
    positive("radius", radius)?;
    positive("m", wall_offset)?;
    positive("wall_height", wall_height)?;
    positive("arc_length", arc_length)?;
    positive("width", width)?;
    positive("spacing", spacing)?;
    if wall_offset >= radius {
        return Err(Error::param("m", format!("wall offset {wall_offset} must be below the radius {radius}")));
    }
    if width / 2.0 >= radius {
        return Err(Error::param("width", "half width must be below the radius"));
    }
    let rows = lines(arc_length, spacing);
    let cols = lines(width, spacing);
    let levels = lines(wall_height, spacing);
    let centre = Point::new(0.0, radius, 0.0);
    let phi = |r: usize| arc_length * r as f64 / (rows - 1) as f64 / radius;
    let at = |phi: f64, rho: f64, z: f64| centre + Vector::new(phi.sin(), -phi.cos(), 0.0) * rho + Vector::z() * z;
    let road = Grid::new(rows, cols, |r, c| {
        at(phi(r), radius - width / 2.0 + width * c as f64 / (cols - 1) as f64, 0.0)
    });
    let wall = Grid::new(rows, levels, |r, k| {
        at(phi(r), radius - wall_offset, wall_height * k as f64 / (levels - 1) as f64)
    });
    let (mesh, cloud) = assemble(&[road, wall])?;
    let stations = (0..rows)
        .map(|r| {
            let p = phi(r);
            with_geometry(TrajectoryStation::new(radius * p, at(p, radius, 0.0), p), 1.0 / radius, 0.0)
        })
        .collect();
    Ok(BendCorridor {
        corridor: Corridor {
            mesh,
            cloud,
            trajectory: Trajectory::new(stations)?,
        },
        radius,
        wall_offset,
    })
}

/// Points on the surface of a box floating above the road, standing in for a
/// vehicle scanned in the oncoming lane.
pub fn hovering_box_cloud(
    centre: Point,
    length: f64,
    width: f64,
    bottom: f64,
    top: f64,
    spacing: f64,
) -> Result<ScanCloud> {
    positive("length", length)?;
    positive("width", width)?;
    positive("spacing", spacing)?;
    if !(top > bottom && bottom >= 0.0) {
        return Err(Error::param("top", "box must span a positive height above the road"));
    }
    let (nx, ny, nz) = (lines(length, spacing), lines(width, spacing), lines(top - bottom, spacing));
    let p = |i: usize, j: usize, k: usize| {
        Point::new(
            centre.x - length / 2.0 + length * i as f64 / (nx - 1) as f64,
            centre.y - width / 2.0 + width * j as f64 / (ny - 1) as f64,
            centre.z + bottom + (top - bottom) * k as f64 / (nz - 1) as f64,
        )
    };
    let mut points = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let on_surface = i == 0 || i == nx - 1 || j == 0 || j == ny - 1 || k == 0 || k == nz - 1;
                if on_surface {
                    points.push(p(i, j, k));
                }
            }
        }
    }
    ScanCloud::new(points, None)
}

/// Box-fraction test bed: 100 m flat straight road, eye at `s = 0`, a wall
/// across the road at x = 25 and the target box's rear face at x = 50.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WallFixture {
    pub wall_x: f64,
    pub target_d: f64,
    pub wall_height: f64,
}

impl WallFixture {
    pub const WALL_X: f64 = 25.0;
    pub const TARGET_D: f64 = 50.0;

    pub fn new(wall_height: f64) -> Self {
        WallFixture {
            wall_x: Self::WALL_X,
            target_d: Self::TARGET_D,
            wall_height,
        }
    }

    /// Wall height leaving the top `fraction` of a rear face of height
    /// `box_height` visible from eye height `eye_height`.
    pub fn for_visible_fraction(fraction: f64, eye_height: f64, box_height: f64) -> Self {
        let shadow = box_height * (1.0 - fraction);
        Self::new(eye_height + (shadow - eye_height) * Self::WALL_X / Self::TARGET_D)
    }

    pub fn build(&self) -> Result<(SceneMesh, Trajectory)> {
        positive("wall_height", self.wall_height)?;
        let road = gen_straight(100.0, 7.0, 1.0)?;
        let wall = Grid::new(2, 2, |r, c| Point::new(self.wall_x, -20.0 + 40.0 * c as f64, self.wall_height * r as f64));
        let mut mesh = road.mesh;
        let offset = mesh.vertices.len() as u32;
        mesh.vertices.extend_from_slice(&wall.points);
        mesh.triangles.extend(wall.triangles(offset));
        mesh.validate()?;
        Ok((mesh, road.trajectory))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn straight_counts() {
        let c = gen_straight(100.0, 7.0, 1.0).unwrap();
        assert_eq!(c.cloud.len(), 101 * 8);
        let ids = c.cloud.profile_ids.as_ref().unwrap();
        let mut distinct = ids.clone();
        distinct.dedup();
        assert_eq!(distinct.len(), 101);
        assert_eq!(c.mesh.triangle_count(), 2 * 100 * 7);
        assert_eq!((c.trajectory.s_start(), c.trajectory.s_end()), (0.0, 100.0));
        assert!(c.trajectory.has_geometry());
    }

    #[test]
    fn crest_oracle_values() {
        assert_abs_diff_eq!(crest_oracle(2000.0, 1.0, 0.6), 112.24, epsilon = 0.005);
        assert_abs_diff_eq!(crest_oracle(2000.0, 1.0, 0.0), 4000f64.sqrt(), epsilon = 1e-12);
    }

    /// Shortest horizontal eye-to-target distance at which the crest profile
    /// rises above the straight sight line, by dense sampling.
    fn crest_brute_force(rv: f64, x_eye: f64, h1: f64, h2: f64) -> f64 {
        let z = |x: f64| -x * x / (2.0 * rv);
        let blocked = |d: f64| {
            let (ze, zt) = (z(x_eye) + h1, z(x_eye + d) + h2);
            (1..2000).any(|k| {
                let t = k as f64 / 2000.0;
                z(x_eye + t * d) > ze + t * (zt - ze)
            })
        };
        let mut d = 0.0;
        while !blocked(d + 0.01) {
            d += 0.01;
        }
        d
    }

    #[test]
    fn crest_oracle_matches_brute_force() {
        for x_eye in [-100.0, -50.0, 0.0, 30.0] {
            let bf = crest_brute_force(2000.0, x_eye, 1.0, 0.6);
            assert!((bf - 112.24).abs() < 0.05, "x_eye {x_eye}: {bf}");
        }
        assert!((crest_brute_force(2000.0, -20.0, 1.0, 0.0) - 63.25).abs() < 0.05);
    }

    #[test]
    fn bend_oracle_values() {
        assert_abs_diff_eq!(bend_oracle(200.0, 4.0), 400.0 * 0.98f64.acos(), epsilon = 1e-12);
        assert_abs_diff_eq!(bend_oracle(200.0, 4.0), 80.134, epsilon = 0.001);
        assert_abs_diff_eq!(bend_oracle(200.0, 4.0), (8.0f64 * 200.0 * 4.0).sqrt(), epsilon = 0.2);
        assert_abs_diff_eq!(bend_oracle(500.0, 2.0), 89.5, epsilon = 0.05);
        assert_abs_diff_eq!(bend_oracle_to_radius(200.0, 4.0, 200.0), bend_oracle(200.0, 4.0), epsilon = 1e-9);
    }

    /// Longest arc from the eye at angle 0 on radius `r` to a target on radius
    /// `rt` whose chord stays outside the wall circle, by sampling the chord.
    fn bend_brute_force(r: f64, m: f64, rt: f64) -> f64 {
        let c = r - m;
        let clear = |phi: f64| {
            let (ax, ay) = (r, 0.0);
            let (bx, by) = (rt * phi.cos(), rt * phi.sin());
            (0..=2000).all(|k| {
                let t = k as f64 / 2000.0;
                (ax + t * (bx - ax)).hypot(ay + t * (by - ay)) >= c
            })
        };
        let mut arc = 0.0;
        while clear((arc + 0.01) / r) {
            arc += 0.01;
        }
        arc
    }

    #[test]
    fn bend_oracle_matches_brute_force() {
        assert!((bend_brute_force(200.0, 4.0, 200.0) - bend_oracle(200.0, 4.0)).abs() < 0.05);
        assert!((bend_brute_force(500.0, 2.0, 500.0) - bend_oracle(500.0, 2.0)).abs() < 0.05);
        let outer = bend_brute_force(200.0, 4.0, 200.6);
        assert!((outer - bend_oracle_to_radius(200.0, 4.0, 200.6)).abs() < 0.05);
    }

    #[test]
    fn crest_geometry() {
        let c = gen_crest(2000.0, 600.0, 7.0, 1.0).unwrap();
        let t = &c.corridor.trajectory;
        assert_eq!(t.len(), 601);
        // 3D arc length from x = -300 to the summit
        let rv: f64 = 2000.0;
        let arc = 0.5 * (300.0 * (1.0 + (300.0 / rv).powi(2)).sqrt() + rv * (300.0 / rv).asinh());
        assert!((c.summit_s - arc).abs() < 0.01, "{} vs {arc}", c.summit_s);
        let summit = t.position_at(c.summit_s).unwrap();
        assert!(summit.x.abs() < 1e-9 && summit.z.abs() < 1e-9);
        assert!(gen_crest(100.0, 600.0, 7.0, 1.0).is_err());
    }

    #[test]
    fn bend_geometry() {
        let b = gen_bend_wall(200.0, 4.0, 3.0, 300.0, 7.0, 1.0).unwrap();
        let t = &b.corridor.trajectory;
        assert_abs_diff_eq!(t.s_end(), 300.0, epsilon = 1e-9);
        for st in t.stations() {
            assert_abs_diff_eq!((st.position - Point::new(0.0, 200.0, 0.0)).norm(), 200.0, epsilon = 1e-9);
        }
        assert!(gen_bend_wall(200.0, 300.0, 3.0, 300.0, 7.0, 1.0).is_err());
        assert!(gen_bend_wall(200.0, 200.0, 3.0, 300.0, 7.0, 1.0).is_err());
    }

    #[test]
    fn hovering_box_is_hollow() {
        let c = hovering_box_cloud(Point::origin(), 4.0, 2.0, 0.5, 2.0, 0.5).unwrap();
        // 9 x 5 x 4 lattice minus its 7 x 3 x 2 interior
        assert_eq!(c.len(), 9 * 5 * 4 - 7 * 3 * 2);
        assert!(c.points.iter().all(|p| p.z >= 0.5));
    }

    #[test]
    fn half_occlusion_wall_height() {
        let f = WallFixture::for_visible_fraction(0.5, 1.0, 1.3);
        assert_abs_diff_eq!(f.wall_height, 0.825, epsilon = 1e-12);
        let (mesh, traj) = f.build().unwrap();
        assert_eq!(mesh.triangle_count(), 2 * 100 * 7 + 2);
        assert_eq!(traj.s_end(), 100.0);
    }
}
