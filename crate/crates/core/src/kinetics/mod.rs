//! Particle kinetics: world state, neighbor search, and the per-step update.

mod checkpoint;
mod grid;
mod step;
mod vec2;
mod world;

pub use checkpoint::{CheckpointError, CHECKPOINT_VERSION};
pub use grid::SpatialGrid;
pub use step::separation_term;
pub use vec2::{distance_nonwrapping, Vec2};
pub use world::{uniform_point, wrap_coord, Carried, KineticsConfig, Particle, World, WorldError};
