//! Trajectory representation, resampling, curvature/grade estimation and target
//! placement along the lane axis.

mod csv;

pub use self::csv::{read_trajectory_csv, parse_trajectory_csv, write_trajectory_csv};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{horizontal_distance, Point, Vector};

/// Window used to re-estimate curvature and grade after resampling, unless twice
/// the step is larger.
pub const DEFAULT_GEOMETRY_WINDOW: f64 = 20.0;

/// Grades at or beyond this magnitude are rejected as implausible.
pub const MAX_ABS_GRADE: f64 = 0.5;

const S_TOL: f64 = 1e-9;

/// One pose sample of the recorded path.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStation {
    /// Curvilinear abscissa (m).
    pub s: f64,
    pub position: Point,
    /// Horizontal unit tangent.
    pub heading: Vector,
    /// Signed horizontal curvature (1/m), positive for a left turn.
    pub kappa: Option<f64>,
    /// Longitudinal slope, rise over run.
    pub grade: Option<f64>,
}

impl TrajectoryStation {
    pub fn new(s: f64, position: Point, heading_rad: f64) -> Self {
        TrajectoryStation {
            s,
            position,
            heading: heading_from_angle(heading_rad),
            kappa: None,
            grade: None,
        }
    }

    /// Heading as an angle in degrees, counter-clockwise from the +x axis.
    pub fn heading_deg(&self) -> f64 {
        self.heading.y.atan2(self.heading.x).to_degrees()
    }
}

pub fn heading_from_angle(rad: f64) -> Vector {
    Vector::new(rad.cos(), rad.sin(), 0.0)
}

/// Driver eye placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObserverSpec {
    /// Height above the lane-axis road surface (m).
    pub eye_height: f64,
}

impl Default for ObserverSpec {
    fn default() -> Self {
        ObserverSpec { eye_height: 1.0 }
    }
}

impl ObserverSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.eye_height > 0.0) {
            return Err(Error::param("eye_height", "must be positive"));
        }
        Ok(())
    }
}

/// A placed target: base point on the lane axis (raised by the requested height)
/// and the local horizontal heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetPose {
    pub s: f64,
    pub position: Point,
    pub heading: Vector,
}

/// Ordered, validated sequence of stations. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    stations: Vec<TrajectoryStation>,
    lane_offset: f64,
}

impl Trajectory {
    pub fn new(stations: Vec<TrajectoryStation>) -> Result<Self> {
        validate_stations(&stations)?;
        Ok(Trajectory {
            stations,
            lane_offset: 0.0,
        })
    }

    /// Builds a trajectory from raw positions: `s` is the cumulative 3D polyline
    /// length, headings come from central differences, curvature and grade are left
    /// empty.
    pub fn from_positions(points: &[Point]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Ingestion(format!(
                "a trajectory needs at least 2 stations, got {}",
                points.len()
            )));
        }
        let mut s = 0.0;
        let mut stations = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                s += (p - points[i - 1]).norm();
            }
            let (a, b) = match i {
                0 => (points[0], points[1]),
                _ if i + 1 == points.len() => (points[i - 1], points[i]),
                _ => (points[i - 1], points[i + 1]),
            };
            let h = Vector::new(b.x - a.x, b.y - a.y, 0.0);
            let norm = h.norm();
            if norm <= 0.0 {
                return Err(Error::Ingestion(format!(
                    "no horizontal direction at station {i}"
                )));
            }
            stations.push(TrajectoryStation {
                s,
                position: *p,
                heading: h / norm,
                kappa: None,
                grade: None,
            });
        }
        Trajectory::new(stations)
    }

    /// Lateral offset (m, positive to the left) of the lane axis from the recorded path.
    pub fn with_lane_offset(mut self, lane_offset: f64) -> Result<Self> {
        if !lane_offset.is_finite() {
            return Err(Error::param("lane_offset", "must be finite"));
        }
        self.lane_offset = lane_offset;
        Ok(self)
    }

    pub fn lane_offset(&self) -> f64 {
        self.lane_offset
    }

    pub fn stations(&self) -> &[TrajectoryStation] {
        &self.stations
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    pub fn s_start(&self) -> f64 {
        self.stations[0].s
    }

    pub fn s_end(&self) -> f64 {
        self.stations[self.stations.len() - 1].s
    }

    pub fn length(&self) -> f64 {
        self.s_end() - self.s_start()
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.s_start() - S_TOL && s <= self.s_end() + S_TOL
    }

    /// True when every station carries curvature and grade.
    pub fn has_geometry(&self) -> bool {
        self.stations
            .iter()
            .all(|st| st.kappa.is_some() && st.grade.is_some())
    }

    fn out_of_range(&self, s: f64) -> Error {
        Error::OutOfRange {
            s,
            start: self.s_start(),
            end: self.s_end(),
        }
    }

    /// Segment index `i` and local parameter `t` such that `s` lies between
    /// stations `i` and `i + 1`.
    fn locate(&self, s: f64) -> Result<(usize, f64)> {
        if !s.is_finite() || !self.contains(s) {
            return Err(self.out_of_range(s));
        }
        let n = self.stations.len();
        let upper = self.stations.partition_point(|st| st.s <= s);
        let i = upper.clamp(1, n - 1) - 1;
        let (s0, s1) = (self.stations[i].s, self.stations[i + 1].s);
        let t = ((s - s0) / (s1 - s0)).clamp(0.0, 1.0);
        Ok((i, t))
    }

    /// Point of the recorded path at abscissa `s`.
    pub fn position_at(&self, s: f64) -> Result<Point> {
        let (i, t) = self.locate(s)?;
        let a = self.stations[i].position;
        if t == 0.0 {
            return Ok(a);
        }
        let b = self.stations[i + 1].position;
        if t == 1.0 {
            return Ok(b);
        }
        Ok(a + (b - a) * t)
    }

    /// Interpolated horizontal heading at `s`.
    pub fn heading_at(&self, s: f64) -> Result<Vector> {
        let (i, t) = self.locate(s)?;
        let a = self.stations[i].heading;
        let b = self.stations[i + 1].heading;
        let h = a * (1.0 - t) + b * t;
        let norm = h.norm();
        Ok(if norm > 1e-12 { h / norm } else { a })
    }

    /// Interpolated `(kappa, grade)` at `s`; `None` when attributes are missing.
    pub fn attributes_at(&self, s: f64) -> Result<Option<(f64, f64)>> {
        let (i, t) = self.locate(s)?;
        let (a, b) = (&self.stations[i], &self.stations[i + 1]);
        Ok(match (a.kappa, a.grade, b.kappa, b.grade) {
            (Some(ka), Some(ga), Some(kb), Some(gb)) => {
                Some((ka + (kb - ka) * t, ga + (gb - ga) * t))
            }
            _ => None,
        })
    }

    /// Road-surface point on the lane axis at `s`.
    pub fn lane_point_at(&self, s: f64) -> Result<Point> {
        let p = self.position_at(s)?;
        if self.lane_offset == 0.0 {
            return Ok(p);
        }
        let h = self.heading_at(s)?;
        Ok(p + Vector::new(-h.y, h.x, 0.0) * self.lane_offset)
    }

    /// Driver eye position at station `s`.
    pub fn eye_at(&self, s: f64, observer: &ObserverSpec) -> Result<Point> {
        Ok(self.lane_point_at(s)? + Vector::z() * observer.eye_height)
    }

    /// Places a target at curvilinear distance `d` ahead of `s0` on the lane axis,
    /// raised by `height` and oriented along the local heading.
    pub fn place_target(&self, s0: f64, d: f64, height: f64) -> Result<TargetPose> {
        if !(d >= 0.0) {
            return Err(Error::param("d", "target distance must be nonnegative"));
        }
        if !self.contains(s0) {
            return Err(self.out_of_range(s0));
        }
        let s = s0 + d;
        let base = self.lane_point_at(s)?;
        Ok(TargetPose {
            s,
            position: base + Vector::z() * height,
            heading: self.heading_at(s)?,
        })
    }

    /// Resamples at a fixed step from the first station. Positions are linearly
    /// interpolated along the polyline, headings interpolated, and curvature/grade
    /// re-estimated with a window of `max(DEFAULT_GEOMETRY_WINDOW, 2 * step)`.
    pub fn resample(&self, step: f64) -> Result<Trajectory> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::param("step", "must be positive"));
        }
        let stations = self.resampled_stations(step)?;
        let out = Trajectory {
            stations,
            lane_offset: self.lane_offset,
        };
        if out.len() < 3 {
            return Ok(out.with_endpoint_geometry());
        }
        out.estimate_geometry(DEFAULT_GEOMETRY_WINDOW.max(2.0 * step))
    }

    fn resampled_stations(&self, step: f64) -> Result<Vec<TrajectoryStation>> {
        let s0 = self.s_start();
        let count = ((self.length() / step) * (1.0 + 1e-12)).floor() as usize + 1;
        (0..count)
            .map(|k| {
                let s = (s0 + k as f64 * step).min(self.s_end());
                Ok(TrajectoryStation {
                    s,
                    position: self.position_at(s)?,
                    heading: self.heading_at(s)?,
                    kappa: None,
                    grade: None,
                })
            })
            .collect()
    }

    fn with_endpoint_geometry(mut self) -> Trajectory {
        let a = self.stations[0].position;
        let b = self.stations[self.stations.len() - 1].position;
        let run = horizontal_distance(&a, &b);
        let grade = if run > 0.0 { (b.z - a.z) / run } else { 0.0 };
        for st in &mut self.stations {
            st.kappa = Some(0.0);
            st.grade = Some(grade);
        }
        self
    }

    /// Fills curvature and grade.
    ///
    /// At each station whose window `[s - w/2, s + w/2]` fits inside the trajectory,
    /// curvature comes from the circle through the horizontally projected points at
    /// both window ends and the station itself, and grade from rise over horizontal
    /// run between the window ends. Other stations copy the nearest such estimate.
    pub fn estimate_geometry(&self, window: f64) -> Result<Trajectory> {
        let n = self.stations.len();
        if n < 3 {
            return Err(Error::param(
                "trajectory",
                format!("curvature estimation needs at least 3 stations, got {n}"),
            ));
        }
        let spacing = self.length() / (n - 1) as f64;
        if !(window >= 2.0 * spacing * (1.0 - 1e-9)) {
            return Err(Error::param(
                "window",
                format!("{window} m is below twice the mean station spacing ({spacing:.3} m)"),
            ));
        }
        let half = window / 2.0;
        let (s0, s1) = (self.s_start(), self.s_end());

        let mut estimates: Vec<Option<(f64, f64)>> = Vec::with_capacity(n);
        for st in &self.stations {
            if st.s - half >= s0 - S_TOL && st.s + half <= s1 + S_TOL {
                let a = self.position_at((st.s - half).max(s0))?;
                let b = self.position_at((st.s + half).min(s1))?;
                estimates.push(Some(window_estimate(&a, &st.position, &b)));
            } else {
                estimates.push(None);
            }
        }

        let fallback = if estimates.iter().all(Option::is_none) {
            let mid = self.position_at(0.5 * (s0 + s1))?;
            Some(window_estimate(
                &self.stations[0].position,
                &mid,
                &self.stations[n - 1].position,
            ))
        } else {
            None
        };

        let interior: Vec<usize> = (0..n).filter(|&i| estimates[i].is_some()).collect();
        let mut stations = self.stations.clone();
        for (i, st) in stations.iter_mut().enumerate() {
            let (kappa, grade) = match (estimates[i], fallback) {
                (Some(e), _) => e,
                (None, Some(f)) => f,
                (None, None) => {
                    let nearest = interior
                        .iter()
                        .copied()
                        .min_by(|&a, &b| {
                            let da = (self.stations[a].s - self.stations[i].s).abs();
                            let db = (self.stations[b].s - self.stations[i].s).abs();
                            da.total_cmp(&db)
                        })
                        .expect("at least one interior station");
                    estimates[nearest].expect("interior estimate")
                }
            };
            if grade.abs() >= MAX_ABS_GRADE {
                return Err(Error::Ingestion(format!(
                    "estimated grade {grade:.3} at s = {:.3} exceeds the sanity bound",
                    st.s
                )));
            }
            st.kappa = Some(kappa);
            st.grade = Some(grade);
        }
        Ok(Trajectory {
            stations,
            lane_offset: self.lane_offset,
        })
    }
}

/// `(kappa, grade)` from the window start, centre and end points.
fn window_estimate(a: &Point, m: &Point, b: &Point) -> (f64, f64) {
    let run = horizontal_distance(a, b);
    let grade = if run > 0.0 { (b.z - a.z) / run } else { 0.0 };
    (signed_curvature(a, m, b), grade)
}

/// Signed curvature of the circle through three points projected onto the xy
/// plane; positive when `a -> m -> b` turns left. Collinear input gives 0.
pub fn signed_curvature(a: &Point, m: &Point, b: &Point) -> f64 {
    let (ux, uy) = (m.x - a.x, m.y - a.y);
    let (vx, vy) = (b.x - m.x, b.y - m.y);
    let cross = ux * vy - uy * vx;
    let lu = ux.hypot(uy);
    let lv = vx.hypot(vy);
    let lw = (b.x - a.x).hypot(b.y - a.y);
    let denom = lu * lv * lw;
    if denom <= 0.0 || cross.abs() <= 1e-12 * lu * lv {
        return 0.0;
    }
    2.0 * cross / denom
}

fn validate_stations(stations: &[TrajectoryStation]) -> Result<()> {
    if stations.len() < 2 {
        return Err(Error::Ingestion(format!(
            "a trajectory needs at least 2 stations, got {}",
            stations.len()
        )));
    }
    for (i, st) in stations.iter().enumerate() {
        let finite = st.s.is_finite()
            && st.position.iter().all(|c| c.is_finite())
            && st.heading.iter().all(|c| c.is_finite());
        if !finite {
            return Err(Error::Ingestion(format!("non-finite value at station {i}")));
        }
        if st.s < 0.0 {
            return Err(Error::Ingestion(format!("negative abscissa at station {i}")));
        }
        if i > 0 && st.s <= stations[i - 1].s {
            return Err(Error::Ingestion(format!(
                "abscissa not strictly increasing at station {i} (s = {})",
                st.s
            )));
        }
        if (st.heading.norm() - 1.0).abs() > 1e-9 || st.heading.z != 0.0 {
            return Err(Error::Ingestion(format!(
                "heading at station {i} is not a horizontal unit vector"
            )));
        }
        if let Some(g) = st.grade {
            if !g.is_finite() || g.abs() >= MAX_ABS_GRADE {
                return Err(Error::Ingestion(format!(
                    "grade {g} at station {i} exceeds the sanity bound"
                )));
            }
        }
        if let Some(k) = st.kappa {
            if !k.is_finite() {
                return Err(Error::Ingestion(format!("non-finite curvature at station {i}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn straight(length: f64, step: f64) -> Trajectory {
        let n = (length / step).round() as usize;
        let pts: Vec<Point> = (0..=n)
            .map(|i| Point::new(i as f64 * step, 0.0, 0.0))
            .collect();
        Trajectory::from_positions(&pts).unwrap()
    }

    fn circle(radius: f64, arc: f64, step: f64) -> Trajectory {
        let n = (arc / step).round() as usize;
        let pts: Vec<Point> = (0..=n)
            .map(|i| {
                let a = i as f64 * step / radius;
                Point::new(radius * a.sin(), radius * (1.0 - a.cos()), 0.0)
            })
            .collect();
        Trajectory::from_positions(&pts).unwrap()
    }

    #[test]
    fn resample_straight_uniform() {
        let t = straight(100.0, 0.5).resample(10.0).unwrap();
        let s: Vec<f64> = t.stations().iter().map(|st| st.s).collect();
        assert_eq!(s.len(), 11);
        for (k, v) in s.iter().enumerate() {
            assert_abs_diff_eq!(*v, 10.0 * k as f64, epsilon = 1e-9);
        }
    }

    #[test]
    fn resample_at_native_spacing_is_identity() {
        let t = straight(50.0, 5.0);
        let r = t.resample(5.0).unwrap();
        assert_eq!(r.len(), t.len());
        for (a, b) in t.stations().iter().zip(r.stations()) {
            assert_abs_diff_eq!((a.position - b.position).norm(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn resample_quarter_circle_stays_on_circle() {
        let r = 50.0;
        let quarter = std::f64::consts::FRAC_PI_2 * r;
        let t = circle(r, quarter, 0.05).resample(5.0).unwrap();
        let centre = Point::new(0.0, r, 0.0);
        for st in t.stations() {
            assert!(((st.position - centre).norm() - r).abs() <= 0.01);
        }
    }

    #[test]
    fn resample_rejects_bad_step() {
        assert!(matches!(
            straight(10.0, 1.0).resample(0.0),
            Err(Error::Parameter { name: "step", .. })
        ));
    }

    #[test]
    fn single_station_is_rejected() {
        assert!(matches!(
            Trajectory::from_positions(&[Point::origin()]),
            Err(Error::Ingestion(_))
        ));
    }

    #[test]
    fn straight_flat_geometry_is_zero() {
        let t = straight(100.0, 1.0).estimate_geometry(10.0).unwrap();
        for st in t.stations() {
            assert_eq!(st.kappa, Some(0.0));
            assert_eq!(st.grade, Some(0.0));
        }
    }

    #[test]
    fn circle_curvature_matches_radius() {
        let t = circle(100.0, 150.0, 0.5).estimate_geometry(20.0).unwrap();
        for st in t.stations() {
            let k = st.kappa.unwrap();
            assert!((k - 0.01).abs() <= 0.01 * 0.05, "kappa {k}");
        }
    }

    #[test]
    fn right_turn_is_negative() {
        let pts: Vec<Point> = (0..=100)
            .map(|i| {
                let a = i as f64 / 100.0;
                Point::new(100.0 * a.sin(), -100.0 * (1.0 - a.cos()), 0.0)
            })
            .collect();
        let t = Trajectory::from_positions(&pts)
            .unwrap()
            .estimate_geometry(10.0)
            .unwrap();
        assert!(t.stations()[50].kappa.unwrap() < 0.0);
    }

    #[test]
    fn ramp_grade() {
        let pts: Vec<Point> = (0..=100)
            .map(|i| Point::new(i as f64, 0.0, 0.05 * i as f64))
            .collect();
        let t = Trajectory::from_positions(&pts)
            .unwrap()
            .estimate_geometry(10.0)
            .unwrap();
        for st in t.stations() {
            assert_abs_diff_eq!(st.grade.unwrap(), 0.05, epsilon = 1e-6);
        }
    }

    #[test]
    fn window_too_small_is_rejected() {
        assert!(straight(10.0, 1.0).estimate_geometry(1.0).is_err());
    }

    #[test]
    fn steep_grade_rejected() {
        let pts: Vec<Point> = (0..=10)
            .map(|i| Point::new(i as f64, 0.0, 0.8 * i as f64))
            .collect();
        let t = Trajectory::from_positions(&pts).unwrap();
        assert!(matches!(t.estimate_geometry(4.0), Err(Error::Ingestion(_))));
    }

    #[test]
    fn place_target_zero_distance() {
        let t = straight(100.0, 1.0);
        let p = t.place_target(30.0, 0.0, 0.6).unwrap();
        assert_abs_diff_eq!((p.position - Point::new(30.0, 0.0, 0.6)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn place_target_straight() {
        let t = straight(200.0, 1.0);
        let p = t.place_target(0.0, 100.0, 0.0).unwrap();
        assert_abs_diff_eq!((p.position - Point::new(100.0, 0.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.heading.x, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn place_target_on_circle_uses_arc_length() {
        let r = 200.0;
        let t = circle(r, 300.0, 0.1);
        let eye = t.position_at(0.0).unwrap();
        let p = t.place_target(0.0, 80.0, 0.0).unwrap();
        let chord = (p.position - eye).norm();
        let expected = 2.0 * r * (80.0 / (2.0 * r)).sin();
        assert_abs_diff_eq!(expected, 79.468, epsilon = 0.001);
        assert!((chord - expected).abs() < 1e-3, "chord {chord}");
        assert!(chord < 80.0);
    }

    #[test]
    fn place_target_out_of_range() {
        let t = straight(100.0, 1.0);
        assert!(matches!(
            t.place_target(50.0, 60.0, 0.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn lane_offset_shifts_left() {
        let t = straight(10.0, 1.0).with_lane_offset(1.5).unwrap();
        let p = t.lane_point_at(5.0).unwrap();
        assert_abs_diff_eq!(p.y, 1.5, epsilon = 1e-12);
    }

    fn rotate(t: &Trajectory, angle: f64) -> Trajectory {
        let (c, s) = (angle.cos(), angle.sin());
        let pts: Vec<Point> = t
            .stations()
            .iter()
            .map(|st| {
                let p = st.position;
                Point::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z)
            })
            .collect();
        Trajectory::from_positions(&pts).unwrap()
    }

    fn wiggly(seed_amp: f64, freq: f64) -> Trajectory {
        let pts: Vec<Point> = (0..=200)
            .map(|i| {
                let x = i as f64;
                Point::new(x, seed_amp * (freq * x).sin(), 0.02 * x + 0.5 * (0.01 * x).sin())
            })
            .collect();
        Trajectory::from_positions(&pts).unwrap()
    }

    proptest! {
        #[test]
        fn resample_is_idempotent(step in 0.7f64..15.0, amp in 0.0f64..20.0, freq in 0.001f64..0.05) {
            let t = wiggly(amp, freq);
            let once = t.resample(step).unwrap();
            let twice = once.resample(step).unwrap();
            prop_assert_eq!(once.len(), twice.len());
            for (a, b) in once.stations().iter().zip(twice.stations()) {
                prop_assert!((a.s - b.s).abs() <= 1e-9);
                prop_assert!((a.position - b.position).norm() <= 1e-9);
                prop_assert!((a.kappa.unwrap() - b.kappa.unwrap()).abs() <= 1e-9);
                prop_assert!((a.grade.unwrap() - b.grade.unwrap()).abs() <= 1e-9);
            }
        }

        #[test]
        fn geometry_invariant_under_rotation(angle in -3.1f64..3.1, amp in 0.0f64..20.0, freq in 0.001f64..0.05) {
            let t = wiggly(amp, freq);
            let a = t.estimate_geometry(12.0).unwrap();
            let b = rotate(&t, angle).estimate_geometry(12.0).unwrap();
            for (x, y) in a.stations().iter().zip(b.stations()) {
                prop_assert!((x.kappa.unwrap() - y.kappa.unwrap()).abs() <= 1e-9);
                prop_assert!((x.grade.unwrap() - y.grade.unwrap()).abs() <= 1e-9);
            }
        }

        #[test]
        fn resampled_chords_close_to_step(step in 1.0f64..10.0, amp in 0.0f64..10.0, freq in 0.001f64..0.03) {
            let r = wiggly(amp, freq).resample(step).unwrap();
            for w in r.stations().windows(2) {
                let ds = w[1].s - w[0].s;
                let chord = (w[1].position - w[0].position).norm();
                prop_assert!((chord - ds).abs() <= 0.1 * ds);
                prop_assert!((w[0].heading.norm() - 1.0).abs() <= 1e-9);
            }
        }

        #[test]
        fn straight_target_horizontal_distance_is_d(s0 in 0.0f64..100.0, d in 0.0f64..100.0, h in 0.0f64..2.0) {
            let t = straight(200.0, 2.0);
            let eye = t.eye_at(s0, &ObserverSpec::default()).unwrap();
            let p = t.place_target(s0, d, h).unwrap();
            prop_assert!((horizontal_distance(&eye, &p.position) - d).abs() <= 1e-9);
        }
    }
}
