//! Road-corridor sight-distance diagnostics.
//!
//! A mobile-mapping point cloud is simplified into a triangle mesh
//! ([`cloud::build_scene`]); along a recorded trajectory the engine then measures
//! the available sight distance to conventional targets ([`sight`]) and compares it
//! with the stopping distance a driver needs ([`demand`]), flagging deficits
//! ([`diagnosis`]). [`synth`] generates corridors with closed-form sight distances.

pub mod cloud;
pub mod config;
pub mod demand;
pub mod diagnosis;
pub mod error;
pub mod exec;
pub mod geom;
pub mod io;
pub mod mesh;
pub mod road;
pub mod sight;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Execution;
