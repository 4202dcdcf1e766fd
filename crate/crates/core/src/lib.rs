//! Heterogeneous self-organizing particle swarms.
//!
//! - [`params`], [`recipe`], [`rng`]: kinetic parameter sets, the recipe
//!   genome and its text codec, seeded random streams.
//! - [`kinetics`]: the world, uniform-grid neighbor search and the kinetic step.
//! - [`eco`]: automated ecological evolution (transmission, competition,
//!   mutation, perturbations).
//! - [`interactive`]: human-steered evolution sessions.
//! - [`metrics`]: snapshot rendering, exploration and structuredness.
//! - [`designs`]: bundled example recipes for designed initial conditions.

pub mod designs;
pub mod eco;
pub mod interactive;
pub mod kinetics;
pub mod metrics;
pub mod params;
pub mod recipe;
pub mod rng;

pub use kinetics::{Particle, Vec2, World};
pub use params::KineticParams;
pub use recipe::{parse_recipe, random_recipe, serialize_recipe, Recipe, RecipeEntry, RecipeError};
pub use rng::SimRng;
