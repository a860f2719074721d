//! Required sight distance: an operating speed modulated by curvature and grade,
//! turned into a stopping distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::road::Trajectory;
use crate::sight::VisibilityProfile;

/// Braking is deemed infeasible when friction plus grade does not exceed this.
pub const MIN_BRAKING_MARGIN: f64 = 0.05;

/// Default `|kappa| -> multiplier` table. Configuration, to be replaced by the
/// road agency's own law.
pub const DEFAULT_SPEED_LAW: [[f64; 2]; 7] = [
    [0.0, 1.0],
    [0.001, 0.97],
    [0.002, 0.92],
    [0.005, 0.8],
    [0.01, 0.65],
    [0.02, 0.5],
    [0.05, 0.35],
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandParams {
    /// Operating speed on a straight flat road (m/s).
    pub base_v85: f64,
    #[serde(default = "default_reaction_time")]
    pub reaction_time: f64,
    /// Longitudinal friction on a wet surface.
    #[serde(default = "default_friction")]
    pub friction: f64,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
    /// `[|kappa|, multiplier]` knots, ascending in `|kappa|`.
    #[serde(default = "default_speed_law")]
    pub speed_law: Vec<[f64; 2]>,
    /// `[grade, multiplier]` knots, ascending in grade.
    #[serde(default = "default_grade_law")]
    pub grade_speed_law: Vec<[f64; 2]>,
}

fn default_reaction_time() -> f64 {
    2.0
}
fn default_friction() -> f64 {
    0.4
}
fn default_gravity() -> f64 {
    9.81
}
fn default_speed_law() -> Vec<[f64; 2]> {
    DEFAULT_SPEED_LAW.to_vec()
}
fn default_grade_law() -> Vec<[f64; 2]> {
    vec![[0.0, 1.0]]
}

impl DemandParams {
    pub fn new(base_v85: f64) -> Self {
        DemandParams {
            base_v85,
            reaction_time: default_reaction_time(),
            friction: default_friction(),
            gravity: default_gravity(),
            speed_law: default_speed_law(),
            grade_speed_law: default_grade_law(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base_v85 > 0.0 && self.base_v85.is_finite()) {
            return Err(Error::param("base_v85", "must be positive"));
        }
        if !(self.reaction_time >= 0.0 && self.reaction_time.is_finite()) {
            return Err(Error::param("reaction_time", "must be nonnegative"));
        }
        if !(self.friction > 0.0 && self.friction <= 1.0) {
            return Err(Error::param("friction", "must lie in (0, 1]"));
        }
        if !(self.gravity > 0.0 && self.gravity.is_finite()) {
            return Err(Error::param("gravity", "must be positive"));
        }
        validate_table("speed_law", &self.speed_law)?;
        if self.speed_law[0] != [0.0, 1.0] {
            return Err(Error::param("speed_law", "must start with the knot [0, 1]"));
        }
        if self.speed_law.windows(2).any(|w| w[1][1] > w[0][1]) {
            return Err(Error::param("speed_law", "multipliers must not increase with curvature"));
        }
        validate_table("grade_speed_law", &self.grade_speed_law)
    }
}

fn validate_table(name: &'static str, table: &[[f64; 2]]) -> Result<()> {
    if table.is_empty() {
        return Err(Error::param(name, "needs at least one knot"));
    }
    if table.iter().any(|k| !k[0].is_finite() || !(k[1] > 0.0 && k[1] <= 1.0)) {
        return Err(Error::param(name, "multipliers must lie in (0, 1]"));
    }
    if table.windows(2).any(|w| w[1][0] <= w[0][0]) {
        return Err(Error::param(name, "knots must be strictly ascending"));
    }
    Ok(())
}

/// Piecewise-linear lookup, constant beyond the end knots.
fn interpolate(table: &[[f64; 2]], x: f64) -> f64 {
    let first = table[0];
    let last = table[table.len() - 1];
    if x <= first[0] {
        return first[1];
    }
    if x >= last[0] {
        return last[1];
    }
    let i = table.partition_point(|k| k[0] <= x);
    let (a, b) = (table[i - 1], table[i]);
    a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])
}

pub fn v85_speed(kappa: f64, grade: f64, p: &DemandParams) -> f64 {
    let m = interpolate(&p.speed_law, kappa.abs()) * interpolate(&p.grade_speed_law, grade);
    p.base_v85 * m.clamp(f64::MIN_POSITIVE, 1.0)
}

/// Reaction distance plus braking distance on grade `grade` (uphill positive).
pub fn stopping_distance(v: f64, grade: f64, p: &DemandParams) -> Result<f64> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::param("v", "speed must be nonnegative"));
    }
    let margin = p.friction + grade;
    if !(margin > MIN_BRAKING_MARGIN) {
        return Err(Error::InfeasibleBraking { margin });
    }
    Ok(v * p.reaction_time + v * v / (2.0 * p.gravity * margin))
}

/// `None` when braking is infeasible at that grade.
pub fn required_distance(kappa: f64, grade: f64, p: &DemandParams) -> Result<Option<f64>> {
    match stopping_distance(v85_speed(kappa, grade, p), grade, p) {
        Ok(d) => Ok(Some(d)),
        Err(Error::InfeasibleBraking { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationDemand {
    pub s: f64,
    pub v85: f64,
    pub required_d: Option<f64>,
}

/// Required distance at every trajectory station.
pub fn required_profile(traj: &Trajectory, p: &DemandParams) -> Result<Vec<StationDemand>> {
    p.validate()?;
    traj.stations()
        .iter()
        .map(|st| {
            let (Some(kappa), Some(grade)) = (st.kappa, st.grade) else {
                return Err(Error::MissingGeometry);
            };
            Ok(StationDemand {
                s: st.s,
                v85: v85_speed(kappa, grade, p),
                required_d: required_distance(kappa, grade, p)?,
            })
        })
        .collect()
}

/// Fills the required distance of every profile station from the trajectory
/// attributes interpolated at its abscissa.
pub fn fill_required(profile: &mut VisibilityProfile, traj: &Trajectory, p: &DemandParams) -> Result<()> {
    p.validate()?;
    for st in &mut profile.stations {
        let (kappa, grade) = traj.attributes_at(st.s)?.ok_or(Error::MissingGeometry)?;
        st.set_required(required_distance(kappa, grade, p)?);
    }
    Ok(())
}
