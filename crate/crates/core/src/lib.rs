//! Toolkit for an appearance-free visual tracking challenge.
//!
//! The challenge videos are 32x32 pixel clips in which identical white dots
//! follow constrained random walks. A target dot starts inside a red marker;
//! the binary label says whether that dot (positive) or a distractor
//! (negative) ends inside the blue finish marker. Because every dot looks the
//! same, the only way to solve a clip is to trace motion across frames.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`trajgen`] — bounded random-walk trajectories with speed scaling.
//! - [`scene`] — labeled sample composition and frame rasterization.
//! - [`dataio`] — binary shard format, manifests, PNG export.
//! - [`flow`] — TV-L1 dense optical flow and the flow-channel encoding.
//! - [`tracker`] — motion-continuity oracle that classifies samples from
//!   pixels alone.
//! - [`harness`] — dataset grids, accuracy scoring, sweep reports.

pub mod config;
pub mod dataio;
pub mod flow;
pub mod harness;
pub mod rng;
pub mod scene;
pub mod tracker;
pub mod trajgen;

pub use config::{Fold, GenConfig, Label, Layout};
pub use scene::VideoSample;
pub use trajgen::{Point, Trajectory};
