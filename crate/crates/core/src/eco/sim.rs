//! One ecological time step: kinetics, collisions, spontaneous events, perturbations.

use std::sync::Arc;

use rand::Rng;

use super::collision::{detect_collisions, resolve_collision, CollisionOutcome};
use super::config::EcoConfig;
use super::mutation::{differentiate, mutate_recipe};
use super::perturb::{apply_perturbation, draw_perturbation, Perturbation};
use crate::kinetics::{Carried, World};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    pub collisions: usize,
    pub transmissions: usize,
    pub transmission_mutations: usize,
    pub redifferentiations: usize,
    pub spontaneous_mutations: usize,
    pub perturbation: Option<Perturbation>,
}

/// Counts from one pass of spontaneous updates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpontaneousReport {
    pub redifferentiations: usize,
    pub mutations: usize,
}

/// Every active particle, in id order: re-differentiates with probability
/// `r`, then with probability `p_s` mutates its own copy of its recipe
/// (keeping its type index when still valid).
pub fn spontaneous_updates(world: &mut World, config: &EcoConfig) -> SpontaneousReport {
    let mut report = SpontaneousReport::default();
    let (particles, rng) = world.parts_mut();
    for p in particles.iter_mut() {
        let Some(carried) = p.carried.as_mut() else {
            continue;
        };
        if rng.random_bool(config.redifferentiation) {
            carried.type_index = differentiate(&carried.recipe, rng);
            report.redifferentiations += 1;
        }
        if rng.random_bool(config.mutation.spontaneous) {
            let recipe = Arc::new(mutate_recipe(&carried.recipe, rng, config.add_rate));
            let type_index = if carried.type_index < recipe.len() {
                carried.type_index
            } else {
                differentiate(&recipe, rng)
            };
            *carried = Carried::new(recipe, type_index);
            report.mutations += 1;
        }
    }
    report
}

/// A world evolving under an [`EcoConfig`].
#[derive(Debug, Clone)]
pub struct EcoSim {
    world: World,
    config: EcoConfig,
}

impl EcoSim {
    pub fn new(world: World, config: EcoConfig) -> Self {
        let world = world.with_kinetics(config.kinetics);
        Self { world, config }
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn world_mut(&mut self) -> &mut World {
        &mut self.world
    }

    pub fn config(&self) -> &EcoConfig {
        &self.config
    }

    pub fn time(&self) -> u64 {
        self.world.time()
    }

    pub fn into_world(self) -> World {
        self.world
    }

    pub fn step(&mut self) -> StepReport {
        let mut report = StepReport::default();
        self.world.step_kinetics();

        let side = self.world.side();
        let pairs = detect_collisions(self.world.particles(), side, &self.config);
        report.collisions = pairs.len();
        if !pairs.is_empty() {
            let grid = self.world.full_grid();
            let (particles, rng) = self.world.parts_mut();
            for pair in pairs {
                if let CollisionOutcome::Transmitted { mutated, .. } =
                    resolve_collision(particles, pair, &grid, &self.config, rng)
                {
                    report.transmissions += 1;
                    report.transmission_mutations += mutated as usize;
                }
            }
        }

        let s = spontaneous_updates(&mut self.world, &self.config);
        report.redifferentiations = s.redifferentiations;
        report.spontaneous_mutations = s.mutations;

        if self.config.perturbation.is_due(self.world.time()) {
            let ev = draw_perturbation(&self.config.perturbation, side, self.world.rng_mut());
            apply_perturbation(&mut self.world, &ev);
            report.perturbation = Some(ev);
        }
        report
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }
}
