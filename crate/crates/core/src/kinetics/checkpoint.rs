//! Versioned text checkpoint of a [`World`].
//!
//! ```text
//! swarmchem-checkpoint 1
//! side <L> t <t> seed <seed> kinetic_seed <k>
//! rng <stream> <word_pos> <draws>
//! kinetics <stray_accel> <random_kick> <min_separation>
//! recipes <n>
//! recipe <lines>
//! <recipe text, <lines> lines>
//! particles <n>
//! <x> <y> <vx> <vy> <recipe idx | -> <type idx | ->
//! ```
//!
//! Floats are written as shortest round-trip decimals, so a save/load cycle
//! is bit-exact. Recipe sharing is preserved.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use super::vec2::Vec2;
use super::world::{Carried, KineticsConfig, Particle, World};
use crate::recipe::{parse_recipe, Recipe};
use crate::rng::{RngSnapshot, SimRng};

pub const CHECKPOINT_MAGIC: &str = "swarmchem-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("invalid world: {0}")]
    World(#[from] super::world::WorldError),
}

impl World {
    pub fn to_checkpoint(&self) -> String {
        let mut out = String::new();
        let snap = self.rng.snapshot();
        writeln!(out, "{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}").unwrap();
        writeln!(
            out,
            "side {} t {} seed {} kinetic_seed {}",
            self.side, self.t, snap.seed, self.kinetic_seed
        )
        .unwrap();
        writeln!(out, "rng {} {} {}", snap.stream, snap.word_pos, snap.draws).unwrap();
        let k = &self.kinetics;
        writeln!(out, "kinetics {} {} {}", k.stray_accel, k.random_kick, k.min_separation).unwrap();

        let mut index: HashMap<*const Recipe, usize> = HashMap::new();
        let mut table: Vec<&Arc<Recipe>> = Vec::new();
        for p in &self.particles {
            if let Some(c) = &p.carried {
                index.entry(Arc::as_ptr(&c.recipe)).or_insert_with(|| {
                    table.push(&c.recipe);
                    table.len() - 1
                });
            }
        }
        writeln!(out, "recipes {}", table.len()).unwrap();
        for r in &table {
            writeln!(out, "recipe {}", r.len()).unwrap();
            writeln!(out, "{r}").unwrap();
        }
        writeln!(out, "particles {}", self.particles.len()).unwrap();
        for p in &self.particles {
            write!(out, "{} {} {} {}", p.pos.x, p.pos.y, p.vel.x, p.vel.y).unwrap();
            match &p.carried {
                Some(c) => writeln!(out, " {} {}", index[&Arc::as_ptr(&c.recipe)], c.type_index),
                None => writeln!(out, " - -"),
            }
            .unwrap();
        }
        out
    }

    pub fn from_checkpoint(text: &str) -> Result<World, CheckpointError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| CheckpointError::Syntax {
                line: 0,
                reason: format!("unexpected end of input, expected {what}"),
            })
        };

        let (ln, header) = next("header")?;
        let mut h = header.split_whitespace();
        if h.next() != Some(CHECKPOINT_MAGIC) {
            return Err(syntax(ln, "missing checkpoint magic"));
        }
        let version: u32 = parse_tok(h.next(), ln)?;
        if version != CHECKPOINT_VERSION {
            return Err(CheckpointError::Version(version));
        }

        let (ln, line) = next("world line")?;
        let f = keyed_fields(line, &["side", "t", "seed", "kinetic_seed"], ln)?;
        let side: f64 = parse_tok(Some(f[0]), ln)?;
        let t: u64 = parse_tok(Some(f[1]), ln)?;
        let seed: u64 = parse_tok(Some(f[2]), ln)?;
        let kinetic_seed: u64 = parse_tok(Some(f[3]), ln)?;

        let (ln, line) = next("rng line")?;
        let f = prefixed(line, "rng", 3, ln)?;
        let snap = RngSnapshot {
            seed,
            stream: parse_tok(Some(f[0]), ln)?,
            word_pos: parse_tok(Some(f[1]), ln)?,
            draws: parse_tok(Some(f[2]), ln)?,
        };

        let (ln, line) = next("kinetics line")?;
        let f = prefixed(line, "kinetics", 3, ln)?;
        let kinetics = KineticsConfig {
            stray_accel: parse_tok(Some(f[0]), ln)?,
            random_kick: parse_tok(Some(f[1]), ln)?,
            min_separation: parse_tok(Some(f[2]), ln)?,
        };

        let (ln, line) = next("recipe table")?;
        let n_recipes: usize = parse_tok(Some(prefixed(line, "recipes", 1, ln)?[0]), ln)?;
        let mut recipes = Vec::with_capacity(n_recipes);
        for _ in 0..n_recipes {
            let (ln, line) = next("recipe")?;
            let n_lines: usize = parse_tok(Some(prefixed(line, "recipe", 1, ln)?[0]), ln)?;
            let mut body = String::new();
            for _ in 0..n_lines {
                body.push_str(next("recipe line")?.1);
                body.push('\n');
            }
            let r = parse_recipe(&body).map_err(|e| syntax(ln, &e.to_string()))?;
            recipes.push(Arc::new(r));
        }

        let (ln, line) = next("particle table")?;
        let n: usize = parse_tok(Some(prefixed(line, "particles", 1, ln)?[0]), ln)?;
        let mut particles = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, line) = next("particle")?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                return Err(syntax(ln, "particle record needs 6 fields"));
            }
            let pos = Vec2::new(parse_tok(Some(f[0]), ln)?, parse_tok(Some(f[1]), ln)?);
            let vel = Vec2::new(parse_tok(Some(f[2]), ln)?, parse_tok(Some(f[3]), ln)?);
            let carried = match (f[4], f[5]) {
                ("-", "-") => None,
                (ri, ti) => {
                    let ri: usize = parse_tok(Some(ri), ln)?;
                    let ti: usize = parse_tok(Some(ti), ln)?;
                    let recipe = recipes
                        .get(ri)
                        .ok_or_else(|| syntax(ln, "recipe index out of range"))?
                        .clone();
                    if ti >= recipe.len() {
                        return Err(syntax(ln, "type index out of range"));
                    }
                    Some(Carried::new(recipe, ti))
                }
            };
            particles.push(Particle { pos, vel, carried });
        }

        let mut world = World::new(side, particles, seed)?;
        world.rng = SimRng::restore(snap);
        world.kinetic_seed = kinetic_seed;
        world.t = t;
        world.kinetics = kinetics;
        Ok(world)
    }
}

fn syntax(line: usize, reason: &str) -> CheckpointError {
    CheckpointError::Syntax {
        line,
        reason: reason.to_string(),
    }
}

fn parse_tok<T: std::str::FromStr>(tok: Option<&str>, line: usize) -> Result<T, CheckpointError> {
    let tok = tok.ok_or_else(|| syntax(line, "missing field"))?;
    tok.parse()
        .map_err(|_| syntax(line, &format!("cannot parse `{tok}`")))
}

fn prefixed<'a>(line: &'a str, key: &str, n: usize, ln: usize) -> Result<Vec<&'a str>, CheckpointError> {
    let mut it = line.split_whitespace();
    if it.next() != Some(key) {
        return Err(syntax(ln, &format!("expected `{key}`")));
    }
    let rest: Vec<&str> = it.collect();
    if rest.len() != n {
        return Err(syntax(ln, &format!("`{key}` takes {n} fields")));
    }
    Ok(rest)
}

fn keyed_fields<'a>(line: &'a str, keys: &[&str], ln: usize) -> Result<Vec<&'a str>, CheckpointError> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != keys.len() * 2 {
        return Err(syntax(ln, "wrong field count"));
    }
    keys.iter()
        .enumerate()
        .map(|(k, key)| {
            if toks[2 * k] == *key {
                Ok(toks[2 * k + 1])
            } else {
                Err(syntax(ln, &format!("expected `{key}`")))
            }
        })
        .collect()
}
