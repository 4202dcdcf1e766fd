//! Exogenous environmental perturbations.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::PerturbationSchedule;
use crate::kinetics::{uniform_point, Vec2, World};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    /// Every particle inside the disc becomes passive and loses its recipe.
    DeactivateDisc { center: Vec2, radius: f64 },
    /// `fraction` of all particles are moved to uniform random positions.
    Scatter { fraction: f64 },
}

/// Picks an event kind uniformly and draws its location.
pub fn draw_perturbation<R: Rng + ?Sized>(schedule: &PerturbationSchedule, side: f64, rng: &mut R) -> Perturbation {
    if rng.random_bool(0.5) {
        Perturbation::DeactivateDisc {
            center: uniform_point(rng, side),
            radius: schedule.disc_radius_fraction * side,
        }
    } else {
        Perturbation::Scatter {
            fraction: schedule.scatter_fraction,
        }
    }
}

/// Applies `event`; returns how many particles it touched. Never changes the
/// particle count.
pub fn apply_perturbation(world: &mut World, event: &Perturbation) -> usize {
    let side = world.side();
    match *event {
        Perturbation::DeactivateDisc { center, radius } => {
            let r2 = radius * radius;
            let mut hit = 0;
            for p in world.particles_mut() {
                if (p.pos - center).norm_sq() <= r2 {
                    p.deactivate();
                    hit += 1;
                }
            }
            hit
        }
        Perturbation::Scatter { fraction } => {
            let n = world.len();
            let k = ((fraction.clamp(0.0, 1.0) * n as f64).round() as usize).min(n);
            if k == 0 {
                return 0;
            }
            let (particles, rng) = world.parts_mut();
            let chosen = sample(rng, n, k).into_vec();
            let mut chosen = chosen;
            chosen.sort_unstable();
            for i in chosen {
                particles[i].pos = uniform_point(rng, side);
            }
            k
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eco::init::{make_initial_world, InitialKind, WorldSpec};

    fn world() -> World {
        make_initial_world(&InitialKind::Random, &WorldSpec::default(), 5).unwrap()
    }

    #[test]
    fn disc_covering_everything_deactivates_all() {
        let mut w = world();
        let ev = Perturbation::DeactivateDisc {
            center: Vec2::new(2500.0, 2500.0),
            radius: 10_000.0,
        };
        assert_eq!(apply_perturbation(&mut w, &ev), 10_000);
        assert_eq!(w.active_count(), 0);
        assert!(w.particles().iter().all(|p| p.vel == Vec2::ZERO));
        assert_eq!(w.len(), 10_000);
    }

    #[test]
    fn zero_scatter_is_identity() {
        let mut w = world();
        let before = w.to_checkpoint();
        assert_eq!(apply_perturbation(&mut w, &Perturbation::Scatter { fraction: 0.0 }), 0);
        assert_eq!(w.to_checkpoint(), before);
    }

    #[test]
    fn scatter_conserves_population() {
        let mut w = world();
        let active = w.active_count();
        assert_eq!(apply_perturbation(&mut w, &Perturbation::Scatter { fraction: 0.25 }), 2500);
        assert_eq!(w.len(), 10_000);
        assert_eq!(w.active_count(), active);
        let side = w.side();
        assert!(w.particles().iter().all(|p| p.pos.x < side && p.pos.y < side));
    }
}
