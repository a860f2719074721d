//! Occlusion queries against the scene mesh and sight-distance sweeps.

mod index;
mod profile;
mod sweep;
mod target;

pub use index::{BvhNode, NodeKind, OcclusionIndex, ENDPOINT_GUARD, LEAF_SIZE};
pub use profile::{distance_label, ProfileStation, SweepMode, VisibilityProfile};
pub use sweep::{
    max_visibility_distance, station_grid, sweep, target_visible_at, SightContext, SweepConfig,
    VisibilityCheck, DEFAULT_CAP, DEFAULT_DISTANCES,
};
pub use target::{
    box_front_samples, box_visible_fraction, lamp_positions, point_pair_visible, BoxDims, TargetSpec,
};
