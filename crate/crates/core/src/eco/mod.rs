//! Automated eco-evolution: active/passive particles, recipe transmission on
//! collision, competition, mutation, and environmental perturbations.

mod collision;
mod compete;
mod config;
mod init;
mod mutation;
mod perturb;
mod sim;
#[cfg(test)]
pub(crate) mod tests_support;

pub use collision::{detect_collisions, resolve_collision, CollisionOutcome, ContextProbe};
pub use compete::{compete, is_behind, CompetitorContext, Winner};
pub use config::{
    CollisionMode, Competition, Condition, ConfigError, EcoConfig, MutationRates, PerturbationSchedule,
};
pub use init::{make_initial_world, InitError, InitialKind, WorldSpec};
pub use mutation::{
    differentiate, mutate_recipe, mutate_recipe_traced, point_mutate, MutationEvent, DELETION_RATE,
    DUPLICATION_RATE, POINT_MUTATION_RATE, POINT_MUTATION_SIGMA,
};
pub use perturb::{apply_perturbation, draw_perturbation, Perturbation};
pub use sim::{spontaneous_updates, EcoSim, SpontaneousReport, StepReport};
