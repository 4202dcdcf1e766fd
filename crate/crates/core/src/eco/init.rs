//! Initial conditions for ecological runs.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinetics::{uniform_point, Particle, Vec2, World};
use crate::recipe::{random_recipe, Recipe};
use crate::rng::SimRng;

/// Geometry and population of an ecological run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldSpec {
    pub side: f64,
    pub particles: usize,
    /// Active particles in the random initial condition.
    pub random_active: usize,
}

impl Default for WorldSpec {
    fn default() -> Self {
        Self {
            side: 5000.0,
            particles: 10_000,
            random_active: 100,
        }
    }
}

impl WorldSpec {
    /// Same density of initially active particles (1%) at another scale.
    pub fn scaled(side: f64, particles: usize) -> Self {
        Self {
            side,
            particles,
            random_active: (particles / 100).max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialKind {
    /// Scattered actives, each with its own random one-type recipe.
    Random,
    /// A single active particle carrying a designed recipe at the center.
    Designed(Option<Arc<Recipe>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InitError {
    #[error("designed initial condition requires a recipe")]
    MissingRecipe,
    #[error("world needs at least {needed} particles, spec has {got}")]
    TooFewParticles { needed: usize, got: usize },
}

/// Builds the starting world. Active particles take the lowest ids.
pub fn make_initial_world(kind: &InitialKind, spec: &WorldSpec, seed: u64) -> Result<World, InitError> {
    let mut rng = SimRng::new(seed ^ 0x1A17_1A17);
    let side = spec.side;
    let mut particles = Vec::with_capacity(spec.particles);
    match kind {
        InitialKind::Random => {
            if spec.particles < spec.random_active {
                return Err(InitError::TooFewParticles {
                    needed: spec.random_active,
                    got: spec.particles,
                });
            }
            for _ in 0..spec.random_active {
                let pos = uniform_point(&mut rng, side);
                let recipe = Arc::new(random_recipe(&mut rng, 1, 1));
                particles.push(Particle::active(pos, Vec2::ZERO, recipe, 0));
            }
        }
        InitialKind::Designed(recipe) => {
            let recipe = recipe.clone().ok_or(InitError::MissingRecipe)?;
            if spec.particles < 1 {
                return Err(InitError::TooFewParticles { needed: 1, got: 0 });
            }
            let center = Vec2::new(side / 2.0, side / 2.0);
            let k = super::mutation::differentiate(&recipe, &mut rng);
            particles.push(Particle::active(center, Vec2::ZERO, recipe, k));
        }
    }
    while particles.len() < spec.particles {
        particles.push(Particle::passive(uniform_point(&mut rng, side)));
    }
    Ok(World::new(side, particles, seed).expect("positions generated in bounds"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recipe::parse_recipe;

    #[test]
    fn random_condition_counts() {
        let w = make_initial_world(&InitialKind::Random, &WorldSpec::default(), 1).unwrap();
        assert_eq!(w.len(), 10_000);
        assert_eq!(w.active_count(), 100);
        for p in w.particles().iter().filter(|p| p.is_active()) {
            let c = p.carried.as_ref().unwrap();
            assert_eq!((c.recipe.len(), c.type_index), (1, 0));
        }
    }

    #[test]
    fn designed_condition_places_one_active_at_center() {
        let r = Arc::new(parse_recipe("3 * (50, 2, 4, 0.3, 0.5, 20, 0.1, 0.7)").unwrap());
        let w = make_initial_world(&InitialKind::Designed(Some(r)), &WorldSpec::default(), 1).unwrap();
        assert_eq!(w.len(), 10_000);
        assert_eq!(w.active_count(), 1);
        assert_eq!(w.particles()[0].pos, Vec2::new(2500.0, 2500.0));
    }

    #[test]
    fn designed_without_recipe_fails() {
        assert_eq!(
            make_initial_world(&InitialKind::Designed(None), &WorldSpec::default(), 1).unwrap_err(),
            InitError::MissingRecipe
        );
    }
}
