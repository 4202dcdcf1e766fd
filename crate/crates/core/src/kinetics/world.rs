use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grid::SpatialGrid;
use super::vec2::Vec2;
use crate::params::{KineticParams, MAX_PERCEPTION};
use crate::recipe::Recipe;
use crate::rng::SimRng;

/// Recipe carried by an active particle and the entry it differentiated into.
#[derive(Debug, Clone, PartialEq)]
pub struct Carried {
    pub recipe: Arc<Recipe>,
    pub type_index: usize,
}

impl Carried {
    pub fn new(recipe: Arc<Recipe>, type_index: usize) -> Self {
        assert!(type_index < recipe.len(), "type index out of range");
        Self { recipe, type_index }
    }

    pub fn params(&self) -> &KineticParams {
        self.recipe.params(self.type_index)
    }

    /// Same recipe and same differentiated entry.
    pub fn same_type_as(&self, other: &Carried) -> bool {
        self.type_index == other.type_index
            && (Arc::ptr_eq(&self.recipe, &other.recipe) || self.recipe == other.recipe)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub pos: Vec2,
    pub vel: Vec2,
    /// `Some` iff the particle is active.
    pub carried: Option<Carried>,
}

impl Particle {
    pub fn passive(pos: Vec2) -> Self {
        Self {
            pos,
            vel: Vec2::ZERO,
            carried: None,
        }
    }

    pub fn active(pos: Vec2, vel: Vec2, recipe: Arc<Recipe>, type_index: usize) -> Self {
        Self {
            pos,
            vel,
            carried: Some(Carried::new(recipe, type_index)),
        }
    }

    pub fn is_active(&self) -> bool {
        self.carried.is_some()
    }

    pub fn params(&self) -> Option<&KineticParams> {
        self.carried.as_ref().map(Carried::params)
    }

    /// Drops the recipe and stops the particle.
    pub fn deactivate(&mut self) {
        self.carried = None;
        self.vel = Vec2::ZERO;
    }
}

/// Tunables of the kinetic update that are not part of any recipe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KineticsConfig {
    /// Half-width of the uniform acceleration drawn when a particle has no neighbors.
    pub stray_accel: f64,
    /// Half-width of the uniform kick added with probability c4.
    pub random_kick: f64,
    /// Pairs closer than this get a random-direction repulsion instead of `1/d`.
    pub min_separation: f64,
}

impl Default for KineticsConfig {
    fn default() -> Self {
        Self {
            stray_accel: 0.5,
            random_kick: 5.0,
            min_separation: 0.001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorldError {
    #[error("side length must be positive and finite")]
    BadSide,
    #[error("particle {0} lies outside [0, L)^2")]
    OutOfBounds(usize),
    #[error("passive particle {0} has nonzero velocity")]
    MovingPassive(usize),
}

/// Bounded square space holding a particle population.
#[derive(Debug, Clone)]
pub struct World {
    pub(crate) side: f64,
    pub(crate) particles: Vec<Particle>,
    pub(crate) rng: SimRng,
    pub(crate) kinetic_seed: u64,
    pub(crate) t: u64,
    pub(crate) kinetics: KineticsConfig,
}

impl World {
    pub fn new(side: f64, particles: Vec<Particle>, seed: u64) -> Result<Self, WorldError> {
        if !(side.is_finite() && side > 0.0) {
            return Err(WorldError::BadSide);
        }
        for (i, p) in particles.iter().enumerate() {
            let inside = |v: f64| (0.0..side).contains(&v);
            if !(inside(p.pos.x) && inside(p.pos.y)) {
                return Err(WorldError::OutOfBounds(i));
            }
            if !p.is_active() && p.vel != Vec2::ZERO {
                return Err(WorldError::MovingPassive(i));
            }
        }
        let mut rng = SimRng::new(seed);
        let kinetic_seed = rng.fork_seed();
        Ok(Self {
            side,
            particles,
            rng,
            kinetic_seed,
            t: 0,
            kinetics: KineticsConfig::default(),
        })
    }

    /// A stand-alone swarm: every particle active, `count` particles per
    /// recipe entry, placed uniformly at rest.
    pub fn from_recipe(recipe: Arc<Recipe>, side: f64, seed: u64) -> Self {
        let mut placement = SimRng::new(seed ^ 0x5EED_0F_5A4A);
        let mut particles = Vec::with_capacity(recipe.total_count() as usize);
        for (k, e) in recipe.entries().iter().enumerate() {
            for _ in 0..e.count {
                let pos = uniform_point(&mut placement, side);
                particles.push(Particle::active(pos, Vec2::ZERO, recipe.clone(), k));
            }
        }
        Self::new(side, particles, seed).expect("placement is in bounds")
    }

    pub fn with_kinetics(mut self, kinetics: KineticsConfig) -> Self {
        self.kinetics = kinetics;
        self
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn seed(&self) -> u64 {
        self.rng.seed()
    }

    pub fn kinetics(&self) -> &KineticsConfig {
        &self.kinetics
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn particles_mut(&mut self) -> &mut [Particle] {
        &mut self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn active_count(&self) -> usize {
        self.particles.iter().filter(|p| p.is_active()).count()
    }

    pub fn rng_mut(&mut self) -> &mut SimRng {
        &mut self.rng
    }

    /// Split borrow for eco operations that need both.
    pub fn parts_mut(&mut self) -> (&mut [Particle], &mut SimRng) {
        (&mut self.particles, &mut self.rng)
    }

    /// Grid over every particle with cell size equal to the largest perception radius.
    pub fn full_grid(&self) -> SpatialGrid {
        SpatialGrid::build(
            self.side,
            MAX_PERCEPTION,
            self.particles.iter().map(|p| p.pos).enumerate(),
        )
    }

    pub fn active_grid(&self, cell: f64) -> SpatialGrid {
        SpatialGrid::build(
            self.side,
            cell,
            self.particles
                .iter()
                .enumerate()
                .filter(|(_, p)| p.is_active())
                .map(|(i, p)| (i, p.pos)),
        )
    }

    /// Ids of all other particles strictly within `radius` of particle `i`,
    /// by non-wrapping distance, sorted ascending.
    pub fn neighbors(&self, i: usize, radius: f64) -> Vec<usize> {
        assert!(radius > 0.0 && radius <= MAX_PERCEPTION, "radius must be in (0, 300]");
        self.full_grid().within(self.particles[i].pos, radius, Some(i))
    }

    /// O(N) reference scan; same contract as [`World::neighbors`].
    pub fn neighbors_brute_force(&self, i: usize, radius: f64) -> Vec<usize> {
        let p = self.particles[i].pos;
        (0..self.particles.len())
            .filter(|&j| j != i && (self.particles[j].pos - p).norm() < radius)
            .collect()
    }

    pub fn wrap(&self, p: Vec2) -> Vec2 {
        Vec2::new(wrap_coord(p.x, self.side), wrap_coord(p.y, self.side))
    }

    /// Appends a particle, wrapping its position into the space.
    pub fn push(&mut self, mut p: Particle) {
        p.pos = self.wrap(p.pos);
        if !p.is_active() {
            p.vel = Vec2::ZERO;
        }
        self.particles.push(p);
    }
}

/// Maps `x` into `[0, side)`.
pub fn wrap_coord(x: f64, side: f64) -> f64 {
    let w = x.rem_euclid(side);
    if w >= side {
        0.0
    } else {
        w
    }
}

pub fn uniform_point<R: Rng + ?Sized>(rng: &mut R, side: f64) -> Vec2 {
    let x = wrap_coord(rng.random::<f64>() * side, side);
    let y = wrap_coord(rng.random::<f64>() * side, side);
    Vec2::new(x, y)
}
