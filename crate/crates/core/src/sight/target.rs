use serde::{Deserialize, Serialize};

use super::OcclusionIndex;
use crate::error::{Error, Result};
use crate::geom::{Point, Vector};
use crate::road::TargetPose;

/// Conventional target placed on the lane axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSpec {
    /// Two rear lamps side by side; visible when at least one is.
    PointPair {
        #[serde(default = "default_lamp_height")]
        lamp_height: f64,
        #[serde(default = "default_lamp_separation")]
        lamp_separation: f64,
    },
    /// Vehicle-sized box standing on the road, rear face at the target distance.
    Box {
        #[serde(default = "default_box_width")]
        width: f64,
        #[serde(default = "default_box_length")]
        length: f64,
        #[serde(default = "default_box_height")]
        height: f64,
        /// Minimum visible fraction of the front-facing surface.
        #[serde(default = "default_threshold")]
        threshold: f64,
    },
}

fn default_lamp_height() -> f64 {
    0.6
}
fn default_lamp_separation() -> f64 {
    1.2
}
fn default_box_width() -> f64 {
    1.5
}
fn default_box_length() -> f64 {
    4.0
}
fn default_box_height() -> f64 {
    1.3
}
fn default_threshold() -> f64 {
    0.05
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec::point_pair()
    }
}

impl TargetSpec {
    pub fn point_pair() -> Self {
        TargetSpec::PointPair {
            lamp_height: default_lamp_height(),
            lamp_separation: default_lamp_separation(),
        }
    }

    pub fn vehicle_box() -> Self {
        TargetSpec::Box {
            width: default_box_width(),
            length: default_box_length(),
            height: default_box_height(),
            threshold: default_threshold(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, "must be positive"))
            }
        };
        match *self {
            TargetSpec::PointPair {
                lamp_height,
                lamp_separation,
            } => {
                positive("lamp_height", lamp_height)?;
                positive("lamp_separation", lamp_separation)
            }
            TargetSpec::Box {
                width,
                length,
                height,
                threshold,
            } => {
                positive("width", width)?;
                positive("length", length)?;
                positive("height", height)?;
                if !(threshold > 0.0 && threshold < 1.0) {
                    return Err(Error::param("threshold", "must lie strictly between 0 and 1"));
                }
                Ok(())
            }
        }
    }

    /// Box dimensions, when this is a box target.
    pub fn box_dims(&self) -> Option<BoxDims> {
        match *self {
            TargetSpec::Box {
                width,
                length,
                height,
                ..
            } => Some(BoxDims {
                width,
                length,
                height,
            }),
            TargetSpec::PointPair { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxDims {
    pub width: f64,
    pub length: f64,
    pub height: f64,
}

impl Default for BoxDims {
    fn default() -> Self {
        BoxDims {
            width: default_box_width(),
            length: default_box_length(),
            height: default_box_height(),
        }
    }
}

/// Left (index 0) and right lamp positions for a pose placed at lamp height.
pub fn lamp_positions(pose: &TargetPose, separation: f64) -> [Point; 2] {
    let left = Vector::new(-pose.heading.y, pose.heading.x, 0.0) * (separation / 2.0);
    [pose.position + left, pose.position - left]
}

pub fn point_pair_visible(index: &OcclusionIndex, eye: &Point, lamps: &[Point; 2]) -> Result<bool> {
    for lamp in lamps {
        if index.segment_clear(eye, lamp)? {
            return Ok(true);
        }
    }
    Ok(false)
}

struct Face {
    centre: Point,
    normal: Vector,
    u: Vector,
    v: Vector,
    size_u: f64,
    size_v: f64,
}

/// Samples per axis: an even count giving at least `sqrt(density)` per metre.
fn samples_along(size: f64, density: f64) -> usize {
    2 * ((size * density.sqrt() / 2.0 - 1e-9).ceil().max(1.0) as usize)
}

fn box_faces(base: &TargetPose, dims: &BoxDims) -> [Face; 6] {
    let f = base.heading;
    let l = Vector::new(-f.y, f.x, 0.0);
    let z = Vector::z();
    let c = base.position + f * (dims.length / 2.0) + z * (dims.height / 2.0);
    let face = |normal: Vector, half: f64, u: Vector, size_u: f64, v: Vector, size_v: f64| Face {
        centre: c + normal * half,
        normal,
        u,
        v,
        size_u,
        size_v,
    };
    [
        face(-f, dims.length / 2.0, l, dims.width, z, dims.height),
        face(f, dims.length / 2.0, l, dims.width, z, dims.height),
        face(l, dims.width / 2.0, f, dims.length, z, dims.height),
        face(-l, dims.width / 2.0, f, dims.length, z, dims.height),
        face(z, dims.height / 2.0, f, dims.length, l, dims.width),
        face(-z, dims.height / 2.0, f, dims.length, l, dims.width),
    ]
}

/// Regular-grid sample points on the box faces whose outward normal points
/// towards `eye`. `base` is the centre of the rear bottom edge.
pub fn box_front_samples(eye: &Point, base: &TargetPose, dims: &BoxDims, density: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for face in box_faces(base, dims) {
        if face.normal.dot(&(eye - face.centre)) <= 0.0 {
            continue;
        }
        let nu = samples_along(face.size_u, density);
        let nv = samples_along(face.size_v, density);
        for j in 0..nv {
            let b = ((j as f64 + 0.5) / nv as f64 - 0.5) * face.size_v;
            for i in 0..nu {
                let a = ((i as f64 + 0.5) / nu as f64 - 0.5) * face.size_u;
                out.push(face.centre + face.u * a + face.v * b);
            }
        }
    }
    out
}

fn eye_inside(eye: &Point, base: &TargetPose, dims: &BoxDims) -> bool {
    let f = base.heading;
    let l = Vector::new(-f.y, f.x, 0.0);
    let r = eye - base.position;
    let (x, y, z) = (r.dot(&f), r.dot(&l), r.z);
    (0.0..=dims.length).contains(&x) && y.abs() <= dims.width / 2.0 && (0.0..=dims.height).contains(&z)
}

/// Fraction of the front-facing box surface seen from `eye`, estimated on a
/// regular grid of about `density` samples per square metre. The target itself
/// is not an occluder.
pub fn box_visible_fraction(
    index: &OcclusionIndex,
    eye: &Point,
    base: &TargetPose,
    dims: &BoxDims,
    density: f64,
) -> Result<f64> {
    if !(density >= 1.0) || !density.is_finite() {
        return Err(Error::param("density", "must be at least 1 sample per square metre"));
    }
    if eye_inside(eye, base, dims) {
        return Ok(1.0);
    }
    let samples = box_front_samples(eye, base, dims, density);
    if samples.is_empty() {
        return Ok(1.0);
    }
    let mut clear = 0usize;
    for p in &samples {
        if index.segment_clear(eye, p)? {
            clear += 1;
        }
    }
    Ok(clear as f64 / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pose_at(x: f64) -> TargetPose {
        TargetPose {
            s: x,
            position: Point::new(x, 0.0, 0.0),
            heading: Vector::x(),
        }
    }

    fn wall(x: f64, top: f64) -> OcclusionIndex {
        let a = Point::new(x, -20.0, 0.0);
        let b = Point::new(x, 20.0, 0.0);
        let c = Point::new(x, 20.0, top);
        let d = Point::new(x, -20.0, top);
        OcclusionIndex::from_triangles(vec![[a, b, c], [a, c, d]])
    }

    #[test]
    fn even_sample_counts() {
        assert_eq!(samples_along(1.3, 64.0), 12);
        assert_eq!(samples_along(1.5, 64.0), 12);
        assert_eq!(samples_along(4.0, 64.0), 32);
        assert_eq!(samples_along(0.01, 1.0), 2);
    }

    #[test]
    fn only_rear_face_seen_from_low_eye_behind() {
        let eye = Point::new(0.0, 0.0, 1.0);
        let s = box_front_samples(&eye, &pose_at(50.0), &BoxDims::default(), 64.0);
        assert_eq!(s.len(), 144);
        assert!(s.iter().all(|p| (p.x - 50.0).abs() < 1e-12));
    }

    #[test]
    fn top_face_seen_from_high_eye() {
        let eye = Point::new(0.0, 0.0, 3.0);
        let s = box_front_samples(&eye, &pose_at(50.0), &BoxDims::default(), 64.0);
        assert_eq!(s.len(), 144 + 12 * 32);
    }

    #[test]
    fn fraction_extremes() {
        let eye = Point::new(0.0, 0.0, 1.0);
        let dims = BoxDims::default();
        let open = OcclusionIndex::default();
        assert_eq!(box_visible_fraction(&open, &eye, &pose_at(50.0), &dims, 64.0).unwrap(), 1.0);
        let full = wall(25.0, 5.0);
        assert_eq!(box_visible_fraction(&full, &eye, &pose_at(50.0), &dims, 64.0).unwrap(), 0.0);
    }

    #[test]
    fn half_occlusion_is_exact_on_even_grid() {
        // sight line from (0, 1.0) to (50, 0.65) crosses x = 25 at 0.825
        let eye = Point::new(0.0, 0.0, 1.0);
        let idx = wall(25.0, 0.825);
        for density in [64.0, 128.0, 256.0] {
            let f = box_visible_fraction(&idx, &eye, &pose_at(50.0), &BoxDims::default(), density).unwrap();
            assert!((f - 0.5).abs() <= 0.02, "density {density}: {f}");
        }
    }

    #[test]
    fn eye_inside_box_counts_as_visible() {
        let eye = Point::new(51.0, 0.0, 1.0);
        let idx = wall(50.5, 5.0);
        assert_eq!(
            box_visible_fraction(&idx, &eye, &pose_at(50.0), &BoxDims::default(), 64.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn bad_density_rejected() {
        let eye = Point::new(0.0, 0.0, 1.0);
        assert!(box_visible_fraction(&OcclusionIndex::default(), &eye, &pose_at(5.0), &BoxDims::default(), 0.5).is_err());
    }

    #[test]
    fn one_clear_lamp_suffices() {
        // small panel hides only the left lamp
        let y = 0.6;
        let tri = vec![
            [Point::new(10.0, y - 0.2, 0.0), Point::new(10.0, y + 0.2, 0.0), Point::new(10.0, y, 2.0)],
        ];
        let idx = OcclusionIndex::from_triangles(tri);
        let eye = Point::new(0.0, 0.0, 0.6);
        let pose = TargetPose {
            s: 20.0,
            position: Point::new(20.0, 0.0, 0.6),
            heading: Vector::x(),
        };
        let lamps = lamp_positions(&pose, 2.4);
        assert!(!idx.segment_clear(&eye, &lamps[0]).unwrap());
        assert!(idx.segment_clear(&eye, &lamps[1]).unwrap());
        assert!(point_pair_visible(&idx, &eye, &lamps).unwrap());
        let both = wall(10.0, 5.0);
        assert!(!point_pair_visible(&both, &eye, &lamps).unwrap());
        assert!(point_pair_visible(&OcclusionIndex::default(), &eye, &lamps).unwrap());
    }

    #[test]
    fn target_spec_json_defaults() {
        let t: TargetSpec = serde_json::from_str(r#"{"kind":"box"}"#).unwrap();
        assert_eq!(t, TargetSpec::vehicle_box());
        let p: TargetSpec = serde_json::from_str(r#"{"kind":"point_pair","lamp_height":0.5}"#).unwrap();
        assert_eq!(
            p,
            TargetSpec::PointPair {
                lamp_height: 0.5,
                lamp_separation: 1.2
            }
        );
        assert!(TargetSpec::Box { width: 1.0, length: 1.0, height: 1.0, threshold: 1.0 }.validate().is_err());
    }
}
