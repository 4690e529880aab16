//! Deterministic engine for online packing of irregular voxelized 3D shapes.
//!
//! The crate is organized as a pipeline:
//!
//! * [`gridgeom`] — 2D grid geometry: erosion, region growing, contour
//!   tracing, polygon simplification, and an empirical tightness oracle.
//! * [`shapelib`] — voxel shapes, cube rotations, stable poses, pose
//!   deduplication, and problem-sequence emission.
//! * [`packenv`] — the container environment: heightmap state, landing
//!   altitudes, placement, rewards.
//! * [`candgen`] — candidate placement generation from altitude-map regions.
//! * [`policies`] — packing heuristics (FF, BLBF, MTPE, HM, random) behind a
//!   common policy interface.
//! * [`learner`] — a dueling double-DQN ranker over candidates, with replay,
//!   async actor/learner training, and a deterministic interleaved mode.
//! * [`buffered`] — a K-slot buffer in front of the stream, with ordering
//!   policies for choosing which buffered item to pack next.
//! * [`bench`] — experiment runner, metrics, and report emission.
//!
//! Everything is deterministic given a seed: shapes, problem sequences,
//! policies, and the interleaved training mode reproduce bit-identical
//! results run to run.

pub mod bench;
pub mod buffered;
pub mod candgen;
pub mod gridgeom;
pub mod learner;
pub mod packenv;
pub mod policies;
pub mod shapelib;

#[cfg(test)]
pub(crate) mod testutil;
