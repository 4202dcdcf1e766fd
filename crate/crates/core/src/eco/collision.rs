//! Collision detection and recipe transmission.

use std::sync::Arc;

use rand::Rng;

use super::compete::{compete, CompetitorContext, Winner};
use super::config::{CollisionMode, Competition, EcoConfig};
use super::mutation::{differentiate, mutate_recipe};
use crate::kinetics::{Carried, Particle, SpatialGrid};
use crate::params::MAX_PERCEPTION;

/// Perception radius used by the original detector: the particle's own `R`,
/// or `passive_perception` for passive particles.
fn detector_radius(p: &Particle, passive_perception: f64) -> f64 {
    p.params().map_or(passive_perception, |k| k.perception)
}

fn threshold(a: &Particle, b: &Particle, config: &EcoConfig) -> f64 {
    match config.collision {
        CollisionMode::Revised => config.collision_radius,
        CollisionMode::Original => {
            0.2 * detector_radius(a, config.passive_perception)
                .max(detector_radius(b, config.passive_perception))
        }
    }
}

/// Colliding pairs `(i, j)` with `i < j` and at least one active member.
/// Each particle occurs in at most one pair; pairs are claimed greedily in
/// lexicographic id order.
pub fn detect_collisions(particles: &[Particle], side: f64, config: &EcoConfig) -> Vec<(usize, usize)> {
    let reach = match config.collision {
        CollisionMode::Revised => config.collision_radius,
        CollisionMode::Original => 0.2 * MAX_PERCEPTION.max(config.passive_perception),
    };
    let grid = SpatialGrid::build(side, reach, particles.iter().map(|p| p.pos).enumerate());
    let mut pairs = Vec::new();
    for (i, a) in particles.iter().enumerate() {
        grid.for_each_candidate(a.pos, reach, |j, pos_j| {
            if j <= i {
                return;
            }
            let b = &particles[j];
            if !a.is_active() && !b.is_active() {
                return;
            }
            if (a.pos - pos_j).norm() < threshold(a, b, config) {
                pairs.push((i, j));
            }
        });
    }
    pairs.sort_unstable();
    let mut used = vec![false; particles.len()];
    pairs.retain(|&(i, j)| {
        if used[i] || used[j] {
            false
        } else {
            used[i] = true;
            used[j] = true;
            true
        }
    });
    pairs
}

/// Builds competitor contexts from the live population.
pub struct ContextProbe<'a> {
    particles: &'a [Particle],
    /// Grid over all particles with cell size [`MAX_PERCEPTION`].
    grid: &'a SpatialGrid,
    majority_radius: f64,
}

impl<'a> ContextProbe<'a> {
    pub fn new(particles: &'a [Particle], grid: &'a SpatialGrid, majority_radius: f64) -> Self {
        Self {
            particles,
            grid,
            majority_radius,
        }
    }

    /// Context for active particle `i`, computing only what `rule` reads.
    pub fn context(&self, i: usize, rule: Competition) -> CompetitorContext {
        let p = &self.particles[i];
        let carried = p.carried.as_ref().expect("competitors are active");
        let mut ctx = CompetitorContext {
            pos: p.pos,
            vel: p.vel,
            recipe_len: carried.recipe.len(),
            ..Default::default()
        };
        let needs_count = matches!(
            rule,
            Competition::Majority
                | Competition::MajorityProbabilistic
                | Competition::RecipeLengthThenMajority
                | Competition::RecipeLengthTimesMajority
        );
        if needs_count {
            ctx.same_type_nearby = self.count(i, self.majority_radius).0;
        }
        if rule == Competition::MajorityRelative {
            let (same, all) = self.count(i, carried.params().perception);
            ctx.relative_density = if all == 0 { 0.0 } else { same as f64 / all as f64 };
        }
        ctx
    }

    /// (same-type count, all-particle count) strictly within `radius` of `i`.
    fn count(&self, i: usize, radius: f64) -> (usize, usize) {
        let p = &self.particles[i];
        let own = *p.params().expect("active");
        let r2 = radius * radius;
        let (mut same, mut all) = (0, 0);
        self.grid.for_each_candidate(p.pos, radius.min(MAX_PERCEPTION), |j, pos| {
            if j != i && (pos - p.pos).norm_sq() < r2 {
                all += 1;
                if self.particles[j].params() == Some(&own) {
                    same += 1;
                }
            }
        });
        (same, all)
    }
}

/// What happened when a collided pair was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionOutcome {
    /// Recipe copied from `source` to `target`.
    Transmitted { source: usize, target: usize, mutated: bool },
    /// Both active and of the same type.
    SameType,
    /// Neither particle carries a recipe.
    Inert,
}

/// Applies transmission rules to one collided pair.
pub fn resolve_collision<R: Rng + ?Sized>(
    particles: &mut [Particle],
    pair: (usize, usize),
    grid: &SpatialGrid,
    config: &EcoConfig,
    rng: &mut R,
) -> CollisionOutcome {
    let (a, b) = pair;
    let (source, target) = match (particles[a].is_active(), particles[b].is_active()) {
        (false, false) => return CollisionOutcome::Inert,
        (true, false) => (a, b),
        (false, true) => (b, a),
        (true, true) => {
            let (ca, cb) = (particles[a].carried.as_ref(), particles[b].carried.as_ref());
            if ca.unwrap().same_type_as(cb.unwrap()) {
                return CollisionOutcome::SameType;
            }
            let probe = ContextProbe::new(particles, grid, config.majority_radius);
            let (xa, xb) = (probe.context(a, config.competition), probe.context(b, config.competition));
            match compete(&xa, &xb, config.competition, rng) {
                Winner::First => (a, b),
                Winner::Second => (b, a),
            }
        }
    };
    let recipe = particles[source].carried.as_ref().unwrap().recipe.clone();
    let mutated = rng.random_bool(config.mutation.transmission);
    let recipe = if mutated {
        Arc::new(mutate_recipe(&recipe, rng, config.add_rate))
    } else {
        recipe
    };
    let type_index = differentiate(&recipe, rng);
    particles[target].carried = Some(Carried::new(recipe, type_index));
    CollisionOutcome::Transmitted {
        source,
        target,
        mutated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eco::config::MutationRates;
    use crate::kinetics::Vec2;
    use crate::params::KineticParams;
    use crate::recipe::Recipe;
    use crate::rng::SimRng;

    fn recipe_with_r(r: f64) -> Arc<Recipe> {
        Arc::new(Recipe::single(
            1,
            KineticParams::clamped([r, 1.0, 2.0, 0.1, 0.1, 1.0, 0.0, 0.5]),
        ))
    }

    fn active(x: f64, y: f64, r: &Arc<Recipe>) -> Particle {
        Particle::active(Vec2::new(x, y), Vec2::ZERO, r.clone(), 0)
    }

    fn revised() -> EcoConfig {
        EcoConfig {
            collision: CollisionMode::Revised,
            ..EcoConfig::default()
        }
    }

    fn original() -> EcoConfig {
        EcoConfig {
            collision: CollisionMode::Original,
            ..EcoConfig::default()
        }
    }

    #[test]
    fn revised_threshold() {
        let r = recipe_with_r(50.0);
        let near = vec![active(100.0, 100.0, &r), Particle::passive(Vec2::new(105.0, 100.0))];
        assert_eq!(detect_collisions(&near, 500.0, &revised()), vec![(0, 1)]);
        let far = vec![active(100.0, 100.0, &r), Particle::passive(Vec2::new(115.0, 100.0))];
        assert!(detect_collisions(&far, 500.0, &revised()).is_empty());
    }

    #[test]
    fn original_threshold_depends_on_perception() {
        let big = recipe_with_r(300.0);
        let small = recipe_with_r(20.0);
        let ps = vec![active(100.0, 100.0, &big), active(150.0, 100.0, &small)];
        assert_eq!(detect_collisions(&ps, 500.0, &original()), vec![(0, 1)]);
        assert!(detect_collisions(&ps, 500.0, &revised()).is_empty());
        // passive counts as R = 10 → threshold 2 against a small-R particle
        let tiny = recipe_with_r(5.0);
        let ps = vec![active(100.0, 100.0, &tiny), Particle::passive(Vec2::new(101.5, 100.0))];
        assert_eq!(detect_collisions(&ps, 500.0, &original()).len(), 1);
        let ps = vec![active(100.0, 100.0, &tiny), Particle::passive(Vec2::new(102.5, 100.0))];
        assert!(detect_collisions(&ps, 500.0, &original()).is_empty());
    }

    #[test]
    fn lone_and_passive_only_worlds_have_no_pairs() {
        let r = recipe_with_r(50.0);
        assert!(detect_collisions(&[active(1.0, 1.0, &r)], 10.0, &revised()).is_empty());
        let ps = vec![Particle::passive(Vec2::new(1.0, 1.0)), Particle::passive(Vec2::new(1.5, 1.0))];
        assert!(detect_collisions(&ps, 10.0, &revised()).is_empty());
    }

    #[test]
    fn each_particle_in_at_most_one_pair() {
        let r = recipe_with_r(50.0);
        let ps = vec![
            active(100.0, 100.0, &r),
            Particle::passive(Vec2::new(103.0, 100.0)),
            Particle::passive(Vec2::new(97.0, 100.0)),
            Particle::passive(Vec2::new(106.0, 100.0)),
        ];
        // (0,1) claimed first; (0,2) blocked; (1,3) blocked; (2,3) passive-only
        assert_eq!(detect_collisions(&ps, 500.0, &revised()), vec![(0, 1)]);
    }

    #[test]
    fn active_recruits_passive() {
        let r = recipe_with_r(50.0);
        let mut ps = vec![Particle::passive(Vec2::new(103.0, 100.0)), active(100.0, 100.0, &r)];
        let cfg = EcoConfig {
            mutation: MutationRates { transmission: 0.0, spontaneous: 0.0 },
            ..revised()
        };
        let grid = SpatialGrid::build(500.0, MAX_PERCEPTION, ps.iter().map(|p| p.pos).enumerate());
        let out = resolve_collision(&mut ps, (0, 1), &grid, &cfg, &mut SimRng::new(1));
        assert_eq!(out, CollisionOutcome::Transmitted { source: 1, target: 0, mutated: false });
        assert!(ps[0].is_active());
        assert_eq!(*ps[0].carried.as_ref().unwrap().recipe, *r);
    }

    #[test]
    fn same_type_actives_do_not_transmit() {
        let r = recipe_with_r(50.0);
        let mut ps = vec![active(100.0, 100.0, &r), active(103.0, 100.0, &r)];
        let before = ps.clone();
        let grid = SpatialGrid::build(500.0, MAX_PERCEPTION, ps.iter().map(|p| p.pos).enumerate());
        let out = resolve_collision(&mut ps, (0, 1), &grid, &revised(), &mut SimRng::new(1));
        assert_eq!(out, CollisionOutcome::SameType);
        assert_eq!(ps, before);
    }

    #[test]
    fn faster_particle_is_source() {
        let (ra, rb) = (recipe_with_r(50.0), recipe_with_r(60.0));
        let mut ps = vec![
            Particle::active(Vec2::new(100.0, 100.0), Vec2::new(3.0, 0.0), ra, 0),
            Particle::active(Vec2::new(103.0, 100.0), Vec2::new(0.0, 5.0), rb.clone(), 0),
        ];
        let cfg = EcoConfig {
            competition: Competition::Faster,
            mutation: MutationRates { transmission: 0.0, spontaneous: 0.0 },
            ..revised()
        };
        let grid = SpatialGrid::build(500.0, MAX_PERCEPTION, ps.iter().map(|p| p.pos).enumerate());
        let out = resolve_collision(&mut ps, (0, 1), &grid, &cfg, &mut SimRng::new(1));
        assert_eq!(out, CollisionOutcome::Transmitted { source: 1, target: 0, mutated: false });
        assert_eq!(*ps[0].carried.as_ref().unwrap().recipe, *rb);
    }

    #[test]
    fn relative_density_uses_own_perception() {
        let same = recipe_with_r(20.0);
        let other = recipe_with_r(100.0);
        let ps = vec![
            active(100.0, 100.0, &same),
            active(110.0, 100.0, &same),
            Particle::passive(Vec2::new(100.0, 110.0)),
            active(150.0, 100.0, &other),
        ];
        let grid = SpatialGrid::build(500.0, MAX_PERCEPTION, ps.iter().map(|p| p.pos).enumerate());
        let probe = ContextProbe::new(&ps, &grid, 30.0);
        // particle 0 (R=20): sees 1 (same) and 2 (passive) → 1/2
        assert_eq!(probe.context(0, Competition::MajorityRelative).relative_density, 0.5);
        // particle 3 (R=100): sees 0, 1, 2; none of its type → 0
        assert_eq!(probe.context(3, Competition::MajorityRelative).relative_density, 0.0);
        assert_eq!(probe.context(0, Competition::Majority).same_type_nearby, 1);
    }
}
