use std::fmt;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::log::{OpRecord, Operator};
use crate::eco::point_mutate;
use crate::kinetics::World;
use crate::recipe::{random_recipe, Recipe, RecipeEntry};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TileId(pub u64);

impl fmt::Display for TileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Narrow (generation-based) or hyperinteractive evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Niec,
    Hiec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    /// Side length of each tile's square space.
    pub tile_side: f64,
    /// Particles in a freshly generated random tile.
    pub tile_population: u32,
    /// Tiles per generation in NIEC mode.
    pub generation_size: usize,
    /// Per-parameter perturbation probability of `mutate`.
    pub mutation_rate: f64,
    /// Gaussian σ of a parameter perturbation, as a fraction of its range.
    pub mutation_sigma: f64,
    /// Counts are scaled by a factor uniform in `[1 - j, 1 + j]`.
    pub count_jitter: f64,
    /// Largest number of types in a random tile.
    pub max_random_types: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            tile_side: 300.0,
            tile_population: 200,
            generation_size: 6,
            mutation_rate: 0.1,
            mutation_sigma: 0.1,
            count_jitter: 0.2,
            max_random_types: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stamp {
    /// Milliseconds since the Unix epoch.
    pub wall_ms: u64,
    /// Session step counter at creation.
    pub step: u64,
}

/// One independently simulated swarm on screen.
#[derive(Debug, Clone)]
pub struct SwarmTile {
    pub id: TileId,
    pub recipe: Arc<Recipe>,
    pub world: World,
    pub created_at: Stamp,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("unknown tile {0}")]
    UnknownTile(TileId),
    #[error("cannot mix tile {0} with itself")]
    SelfMix(TileId),
    #[error("operation requires {expected:?} mode")]
    WrongMode { expected: Mode },
    #[error("select one or two tiles, got {0}")]
    SelectionSize(usize),
    #[error("tile {0} selected twice")]
    DuplicateSelection(TileId),
}

pub struct Session {
    mode: Mode,
    config: SessionConfig,
    seed: u64,
    initial_tiles: usize,
    tiles: Vec<SwarmTile>,
    rng: SimRng,
    history: Vec<OpRecord>,
    next_id: u64,
    step: u64,
    generation: u64,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Point-perturbs every parameter and jitters every count.
pub fn mutate_swarm_recipe<R: Rng + ?Sized>(recipe: &Recipe, config: &SessionConfig, rng: &mut R) -> Recipe {
    let entries = recipe
        .entries()
        .iter()
        .map(|e| {
            let (params, _) = point_mutate(&e.params, rng, config.mutation_rate, config.mutation_sigma);
            let j = config.count_jitter;
            let factor = (1.0 - j) + 2.0 * j * rng.random::<f64>();
            let count = ((e.count as f64 * factor).round() as u32).max(1);
            RecipeEntry { count, params }
        })
        .collect();
    Recipe::new(entries).expect("non-empty")
}

/// Physical mixing: both entry lists, each count halved (rounded up).
pub fn mix_recipes(a: &Recipe, b: &Recipe) -> Recipe {
    let entries = a
        .entries()
        .iter()
        .chain(b.entries())
        .map(|e| RecipeEntry {
            count: e.count.div_ceil(2).max(1),
            params: e.params,
        })
        .collect();
    Recipe::new(entries).expect("non-empty")
}

/// Random recipe with 1..=max_types types whose counts sum to `population`.
pub fn random_swarm_recipe<R: Rng + ?Sized>(config: &SessionConfig, rng: &mut R) -> Recipe {
    let population = config.tile_population.max(1) as usize;
    let n = rng.random_range(1..=config.max_random_types.max(1)).min(population);
    let base = random_recipe(rng, n, 1);
    let (q, r) = (population / n, population % n);
    let entries = base
        .entries()
        .iter()
        .enumerate()
        .map(|(k, e)| RecipeEntry {
            count: (q + usize::from(k < r)) as u32,
            params: e.params,
        })
        .collect();
    Recipe::new(entries).expect("non-empty")
}

impl Session {
    /// A session seeded with `initial_tiles` random tiles.
    pub fn new(mode: Mode, config: SessionConfig, seed: u64, initial_tiles: usize) -> Self {
        let mut s = Self {
            mode,
            config,
            seed,
            initial_tiles,
            tiles: Vec::new(),
            rng: SimRng::new(seed),
            history: Vec::new(),
            next_id: 0,
            step: 0,
            generation: 0,
        };
        for _ in 0..initial_tiles {
            let recipe = random_swarm_recipe(&s.config, &mut s.rng);
            s.spawn(Arc::new(recipe));
        }
        s
    }

    /// Rebuilds a session from its seed and operator log.
    pub fn replay(mode: Mode, config: SessionConfig, seed: u64, initial_tiles: usize, log: &[OpRecord]) -> Result<Self, SessionError> {
        let mut s = Self::new(mode, config, seed, initial_tiles);
        for rec in log {
            s.apply(&rec.op)?;
        }
        Ok(s)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn initial_tiles(&self) -> usize {
        self.initial_tiles
    }

    pub fn tiles(&self) -> &[SwarmTile] {
        &self.tiles
    }

    pub fn tile(&self, id: TileId) -> Result<&SwarmTile, SessionError> {
        self.tiles
            .iter()
            .find(|t| t.id == id)
            .ok_or(SessionError::UnknownTile(id))
    }

    pub fn history(&self) -> &[OpRecord] {
        &self.history
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn rng_draws(&self) -> u64 {
        self.rng.draws()
    }

    fn spawn(&mut self, recipe: Arc<Recipe>) -> TileId {
        let id = TileId(self.next_id);
        self.next_id += 1;
        let world_seed = self.rng.fork_seed();
        let world = World::from_recipe(recipe.clone(), self.config.tile_side, world_seed);
        self.tiles.push(SwarmTile {
            id,
            recipe,
            world,
            created_at: Stamp {
                wall_ms: now_ms(),
                step: self.step,
            },
        });
        id
    }

    fn require(&self, mode: Mode) -> Result<(), SessionError> {
        if self.mode == mode {
            Ok(())
        } else {
            Err(SessionError::WrongMode { expected: mode })
        }
    }

    /// Applies one operator and logs it. Returns ids of created tiles.
    pub fn apply(&mut self, op: &Operator) -> Result<Vec<TileId>, SessionError> {
        let created = match op {
            Operator::Mutate { tile } => vec![self.mutate_tile(*tile)?],
            Operator::Mix { a, b } => vec![self.mix_tiles(*a, *b)?],
            Operator::Replicate { tile } => vec![self.replicate_tile(*tile)?],
            Operator::Kill { tile } => {
                self.kill_tile(*tile)?;
                vec![]
            }
            Operator::Random => vec![self.random_tile()?],
            Operator::NiecSelect { tiles } => self.niec_generation(tiles)?,
        };
        self.history.push(OpRecord {
            wall_ms: now_ms(),
            step: self.step,
            op: op.clone(),
            created: created.clone(),
            rng_draws: self.rng.draws(),
        });
        Ok(created)
    }

    fn mutate_tile(&mut self, id: TileId) -> Result<TileId, SessionError> {
        self.require(Mode::Hiec)?;
        let src = self.tile(id)?.recipe.clone();
        let recipe = mutate_swarm_recipe(&src, &self.config, &mut self.rng);
        Ok(self.spawn(Arc::new(recipe)))
    }

    fn mix_tiles(&mut self, a: TileId, b: TileId) -> Result<TileId, SessionError> {
        self.require(Mode::Hiec)?;
        if a == b {
            return Err(SessionError::SelfMix(a));
        }
        let recipe = mix_recipes(&self.tile(a)?.recipe, &self.tile(b)?.recipe);
        Ok(self.spawn(Arc::new(recipe)))
    }

    fn replicate_tile(&mut self, id: TileId) -> Result<TileId, SessionError> {
        self.require(Mode::Hiec)?;
        let recipe = self.tile(id)?.recipe.clone();
        Ok(self.spawn(recipe))
    }

    fn kill_tile(&mut self, id: TileId) -> Result<(), SessionError> {
        self.require(Mode::Hiec)?;
        let idx = self
            .tiles
            .iter()
            .position(|t| t.id == id)
            .ok_or(SessionError::UnknownTile(id))?;
        self.tiles.remove(idx);
        Ok(())
    }

    fn random_tile(&mut self) -> Result<TileId, SessionError> {
        self.require(Mode::Hiec)?;
        let recipe = random_swarm_recipe(&self.config, &mut self.rng);
        Ok(self.spawn(Arc::new(recipe)))
    }

    /// Next generation from one or two selected tiles; everything else is discarded.
    fn niec_generation(&mut self, selected: &[TileId]) -> Result<Vec<TileId>, SessionError> {
        self.require(Mode::Niec)?;
        if selected.is_empty() || selected.len() > 2 {
            return Err(SessionError::SelectionSize(selected.len()));
        }
        if selected.len() == 2 && selected[0] == selected[1] {
            return Err(SessionError::DuplicateSelection(selected[0]));
        }
        for &id in selected {
            self.tile(id)?;
        }
        let k = self.config.generation_size.max(selected.len());
        let kept: Vec<SwarmTile> = selected
            .iter()
            .map(|&id| self.tile(id).cloned().expect("checked"))
            .collect();
        let parents: Vec<Arc<Recipe>> = kept.iter().map(|t| t.recipe.clone()).collect();
        self.tiles = kept;
        let mut created = Vec::with_capacity(k - selected.len());
        for _ in selected.len()..k {
            let recipe = match parents.as_slice() {
                [one] => mutate_swarm_recipe(one, &self.config, &mut self.rng),
                [a, b] => {
                    let mixed = mix_recipes(a, b);
                    mutate_swarm_recipe(&mixed, &self.config, &mut self.rng)
                }
                _ => unreachable!(),
            };
            created.push(self.spawn(Arc::new(recipe)));
        }
        self.generation += 1;
        Ok(created)
    }

    /// Advances every tile's world by `steps` kinetic steps.
    pub fn step_tiles(&mut self, steps: u64) {
        self.tiles.par_iter_mut().for_each(|t| {
            for _ in 0..steps {
                t.world.step_kinetics();
            }
        });
        self.step += steps;
    }
}
