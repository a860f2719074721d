use serde::{Deserialize, Serialize};

use super::profile::{ProfileStation, SweepMode, VisibilityProfile};
use super::target::{box_visible_fraction, lamp_positions, point_pair_visible, BoxDims, TargetSpec};
use super::OcclusionIndex;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::road::{ObserverSpec, Trajectory};

/// Fixed distances checked by default (m).
pub const DEFAULT_DISTANCES: [f64; 9] = [50.0, 65.0, 85.0, 105.0, 130.0, 160.0, 200.0, 250.0, 280.0];

pub const DEFAULT_CAP: f64 = 400.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub station_step: f64,
    pub search_step: f64,
    pub cap: f64,
    pub mode: SweepMode,
    pub distances: Vec<f64>,
    pub target: TargetSpec,
    pub observer: ObserverSpec,
    /// Box surface samples per square metre.
    pub density: f64,
    pub execution: Execution,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            station_step: 5.0,
            search_step: 5.0,
            cap: DEFAULT_CAP,
            mode: SweepMode::Max,
            distances: DEFAULT_DISTANCES.to_vec(),
            target: TargetSpec::default(),
            observer: ObserverSpec::default(),
            density: 64.0,
            execution: Execution::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("station_step", self.station_step), ("search_step", self.search_step)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive"));
            }
        }
        if !(self.cap > self.search_step && self.cap.is_finite()) {
            return Err(Error::param("cap", "must exceed search_step"));
        }
        if !(self.density >= 1.0 && self.density.is_finite()) {
            return Err(Error::param("density", "must be at least 1 sample per square metre"));
        }
        if self.mode == SweepMode::Fixed {
            if self.distances.is_empty() {
                return Err(Error::param("distances", "fixed mode needs at least one distance"));
            }
            if self.distances.iter().any(|&d| !(d > 0.0 && d <= self.cap)) {
                return Err(Error::param("distances", "each distance must lie in (0, cap]"));
            }
            if self.distances.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::param("distances", "must be strictly increasing"));
            }
        }
        self.target.validate()?;
        self.observer.validate()
    }
}

/// Everything a single visibility query needs.
#[derive(Debug, Clone, Copy)]
pub struct SightContext<'a> {
    pub index: &'a OcclusionIndex,
    pub traj: &'a Trajectory,
    pub observer: ObserverSpec,
    pub target: TargetSpec,
    pub density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VisibilityCheck {
    pub visible: bool,
    pub in_range: bool,
    /// Visible fraction, for box targets.
    pub fraction: Option<f64>,
}

impl VisibilityCheck {
    const OUT_OF_RANGE: VisibilityCheck = VisibilityCheck {
        visible: false,
        in_range: false,
        fraction: None,
    };
}

impl<'a> SightContext<'a> {
    pub fn new(index: &'a OcclusionIndex, traj: &'a Trajectory, config: &SweepConfig) -> Self {
        SightContext {
            index,
            traj,
            observer: config.observer,
            target: config.target,
            density: config.density,
        }
    }

    pub fn in_range(&self, s: f64, d: f64) -> bool {
        s.is_finite() && d.is_finite() && d > 0.0 && self.traj.contains(s) && self.traj.contains(s + d)
    }

    /// Places the eye at `s` and the target `d` ahead, and applies the target's
    /// visibility rule. Out-of-range placements are reported, not raised.
    pub fn check(&self, s: f64, d: f64) -> Result<VisibilityCheck> {
        if !self.in_range(s, d) {
            return Ok(VisibilityCheck::OUT_OF_RANGE);
        }
        let eye = self.traj.eye_at(s, &self.observer)?;
        match self.target {
            TargetSpec::PointPair {
                lamp_height,
                lamp_separation,
            } => {
                let pose = self.traj.place_target(s, d, lamp_height)?;
                let visible = point_pair_visible(self.index, &eye, &lamp_positions(&pose, lamp_separation))?;
                Ok(VisibilityCheck {
                    visible,
                    in_range: true,
                    fraction: None,
                })
            }
            TargetSpec::Box {
                width,
                length,
                height,
                threshold,
            } => {
                let dims = BoxDims { width, length, height };
                let fraction = self.fraction_for(s, d, &dims)?;
                Ok(VisibilityCheck {
                    visible: fraction >= threshold,
                    in_range: true,
                    fraction: Some(fraction),
                })
            }
        }
    }

    /// Visible fraction of a box of `dims` placed `d` ahead of `s`, whatever the
    /// configured target. `None` when out of range.
    pub fn box_fraction(&self, s: f64, d: f64, dims: &BoxDims) -> Result<Option<f64>> {
        if !self.in_range(s, d) {
            return Ok(None);
        }
        self.fraction_for(s, d, dims).map(Some)
    }

    fn fraction_for(&self, s: f64, d: f64, dims: &BoxDims) -> Result<f64> {
        let eye = self.traj.eye_at(s, &self.observer)?;
        let base = self.traj.place_target(s, d, 0.0)?;
        box_visible_fraction(self.index, &eye, &base, dims, self.density)
    }
}

pub fn target_visible_at(ctx: &SightContext<'_>, s: f64, d: f64) -> Result<bool> {
    Ok(ctx.check(s, d)?.visible)
}

/// Walks the target away in `step` increments and returns the last distance
/// before the first invisible one; `cap` if the target is still visible there.
/// Visibility regained past an occlusion is not looked for.
pub fn max_visibility_distance(ctx: &SightContext<'_>, s: f64, step: f64, cap: f64) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param("search_step", "must be positive"));
    }
    if !(cap > 0.0 && cap.is_finite()) {
        return Err(Error::param("cap", "must be positive"));
    }
    let mut last = 0.0;
    let mut k = 1u64;
    loop {
        let d = k as f64 * step;
        if d >= cap * (1.0 - 1e-12) {
            break;
        }
        if !target_visible_at(ctx, s, d)? {
            return Ok(last);
        }
        last = d;
        k += 1;
    }
    Ok(if target_visible_at(ctx, s, cap)? { cap } else { last })
}

/// Station abscissae `s_start + k * step` within the trajectory.
pub fn station_grid(traj: &Trajectory, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param("station_step", "must be positive"));
    }
    let n = (traj.length() / step * (1.0 + 1e-12)).floor() as usize + 1;
    Ok((0..n).map(|k| traj.s_start() + k as f64 * step).collect())
}

/// Applies the configured mode at every station. In fixed mode the available
/// distance is the largest configured distance below which every check passed.
pub fn sweep(
    index: &OcclusionIndex,
    traj: &Trajectory,
    stations: &[f64],
    config: &SweepConfig,
) -> Result<VisibilityProfile> {
    config.validate()?;
    let ctx = SightContext::new(index, traj, config);
    let rows: Vec<Result<ProfileStation>> = config.execution.map(stations, |&s| match config.mode {
        SweepMode::Max => {
            let d = max_visibility_distance(&ctx, s, config.search_step, config.cap)?;
            Ok(ProfileStation::new(s, d, Vec::new()))
        }
        SweepMode::Fixed => {
            let flags = config
                .distances
                .iter()
                .map(|&d| target_visible_at(&ctx, s, d))
                .collect::<Result<Vec<bool>>>()?;
            let prefix = flags.iter().take_while(|&&v| v).count();
            let available = if prefix == 0 { 0.0 } else { config.distances[prefix - 1] };
            Ok(ProfileStation::new(s, available, flags))
        }
    });
    Ok(VisibilityProfile {
        mode: config.mode,
        cap: config.cap,
        distances: match config.mode {
            SweepMode::Fixed => config.distances.clone(),
            SweepMode::Max => Vec::new(),
        },
        stations: rows.into_iter().collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn straight(len: f64) -> Trajectory {
        Trajectory::from_positions(&[Point::new(0.0, 0.0, 0.0), Point::new(len, 0.0, 0.0)]).unwrap()
    }

    fn wall(x: f64) -> OcclusionIndex {
        let a = Point::new(x, -20.0, 0.0);
        let b = Point::new(x, 20.0, 0.0);
        let c = Point::new(x, 20.0, 10.0);
        let d = Point::new(x, -20.0, 10.0);
        OcclusionIndex::from_triangles(vec![[a, b, c], [a, c, d]])
    }

    #[test]
    fn open_road_reaches_cap_then_runs_out() {
        let traj = straight(1000.0);
        let idx = OcclusionIndex::default();
        let ctx = SightContext::new(&idx, &traj, &SweepConfig::default());
        assert_eq!(max_visibility_distance(&ctx, 0.0, 5.0, 400.0).unwrap(), 400.0);
        assert_eq!(max_visibility_distance(&ctx, 800.0, 5.0, 400.0).unwrap(), 200.0);
        assert_eq!(max_visibility_distance(&ctx, 1000.0, 5.0, 400.0).unwrap(), 0.0);
        // cap off the grid
        assert_eq!(max_visibility_distance(&ctx, 0.0, 7.0, 400.0).unwrap(), 400.0);
        assert_eq!(max_visibility_distance(&ctx, 700.0, 7.0, 400.0).unwrap(), 294.0);
    }

    #[test]
    fn first_invisible_semantics() {
        let traj = straight(1000.0);
        let idx = wall(100.5);
        let ctx = SightContext::new(&idx, &traj, &SweepConfig::default());
        assert_eq!(max_visibility_distance(&ctx, 0.0, 1.0, 400.0).unwrap(), 100.0);
        assert_eq!(max_visibility_distance(&ctx, 98.0, 5.0, 400.0).unwrap(), 0.0);
        assert!(!target_visible_at(&ctx, 0.0, 150.0).unwrap());
    }

    #[test]
    fn out_of_range_is_flagged() {
        let traj = straight(100.0);
        let idx = OcclusionIndex::default();
        let ctx = SightContext::new(&idx, &traj, &SweepConfig::default());
        let c = ctx.check(50.0, 60.0).unwrap();
        assert!(!c.in_range && !c.visible);
        assert!(!ctx.check(-1.0, 10.0).unwrap().in_range);
        assert!(ctx.check(0.0, 100.0).unwrap().visible);
    }

    #[test]
    fn fixed_mode_prefix_rule() {
        let traj = straight(1000.0);
        let idx = wall(100.0);
        let config = SweepConfig {
            mode: SweepMode::Fixed,
            ..SweepConfig::default()
        };
        let p = sweep(&idx, &traj, &[0.0, 10.0, 500.0], &config).unwrap();
        assert_eq!(p.stations[0].visible_at, vec![true, true, true, false, false, false, false, false, false]);
        assert_eq!(p.stations[0].available_d, 85.0);
        assert_eq!(p.stations[1].available_d, 85.0);
        assert_eq!(p.stations[2].available_d, 280.0);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let traj = straight(600.0);
        let idx = wall(300.0);
        let stations = station_grid(&traj, 5.0).unwrap();
        let mut config = SweepConfig::default();
        config.execution = Execution::Sequential;
        let a = sweep(&idx, &traj, &stations, &config).unwrap();
        config.execution = Execution::Parallel;
        let b = sweep(&idx, &traj, &stations, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 121);
    }

    #[test]
    fn empty_station_list() {
        let traj = straight(10.0);
        let p = sweep(&OcclusionIndex::default(), &traj, &[], &SweepConfig::default()).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn config_validation() {
        let mut c = SweepConfig::default();
        c.cap = 5.0;
        assert!(c.validate().is_err());
        let mut c = SweepConfig::default();
        c.mode = SweepMode::Fixed;
        c.distances = vec![50.0, 40.0];
        assert!(c.validate().is_err());
        c.distances = vec![];
        assert!(c.validate().is_err());
        let c: SweepConfig = serde_json::from_str(r#"{"mode":"fixed","cap":300}"#).unwrap();
        assert_eq!(c.distances, DEFAULT_DISTANCES.to_vec());
        assert!(c.validate().is_ok());
    }
}
