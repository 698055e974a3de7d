//! Deterministic clash-free sequencing for prefabricated wall sites.
//!
//! The engine plans panel moves on a node grid with A*, schedules whole-site
//! disassembly with a queue that defers blocked walls, derives assembly
//! plans by exact reversal, validates plans with an independent sampled
//! continuous-collision sweep, and expands assembly plans into construction
//! event scripts. A benchmark harness measures planning time across grid
//! resolutions and wall counts.

pub mod bench;
pub mod export;
pub mod generator;
pub mod geometry;
pub mod grid;
pub mod planner;
pub mod scene;
pub mod scripting;
pub mod verifier;

pub use geometry::{Footprint, OrientedRect, Point, Pose};
pub use grid::{BlockedMask, Grid};
pub use planner::{Direction, MovePlan, Plan};
pub use scene::Scene;
