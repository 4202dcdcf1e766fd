//! Synchronous kinetic update.
//!
//! Each active particle with parameters `P` and active neighbor set `N`
//! (strictly within `P.R`, non-wrapping distance):
//!
//! 1. `N` empty: acceleration is uniform in `[-stray, stray]^2`.
//! 2. otherwise `a = c1 (mean pos_N - pos) + c2 (mean vel_N - vel)
//!    + c3 Σ (pos - pos_j) / |pos - pos_j|^2`, plus, with probability `c4`,
//!    a uniform kick in `[-kick, kick]^2`.
//! 3. `v' = v + a`, rescaled to `Vm` if faster.
//! 4. `v'' = c5 Vn v'/|v'| + (1 - c5) v'` (random heading if `v' = 0`),
//!    then capped at `Vm` again.
//! 5. `pos += v''`, wrapped into `[0, L)`.
//!
//! Forces read only the pre-step state. Random draws come from a stream keyed
//! by `(seed, t, particle id)`, so the parallel map is deterministic.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;

use super::vec2::Vec2;
use super::world::{wrap_coord, World};
use crate::params::{KineticParams, MAX_PERCEPTION};
use crate::rng::keyed_stream;

/// Below this many active particles the update runs serially.
const PARALLEL_THRESHOLD: usize = 512;

impl World {
    /// Advances every active particle by one time step.
    pub fn step_kinetics(&mut self) {
        let active: Vec<usize> = self
            .particles
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_active())
            .map(|(i, _)| i)
            .collect();
        if active.is_empty() {
            self.t += 1;
            return;
        }
        let grid = self.active_grid(MAX_PERCEPTION);
        let this = &*self;
        let update = |&i: &usize| -> (Vec2, Vec2) {
            let p = &this.particles[i];
            let params = *p.params().expect("active");
            let mut rng = keyed_stream(this.kinetic_seed, this.t, i as u64);

            let r2 = params.perception * params.perception;
            let mut n = 0usize;
            let mut sum_pos = Vec2::ZERO;
            let mut sum_vel = Vec2::ZERO;
            let mut sep = Vec2::ZERO;
            let min_sep = this.kinetics.min_separation;
            grid.for_each_candidate(p.pos, params.perception, |j, pos_j| {
                if j == i {
                    return;
                }
                let d = p.pos - pos_j;
                let d2 = d.norm_sq();
                if d2 < r2 {
                    n += 1;
                    sum_pos += pos_j;
                    sum_vel += this.particles[j].vel;
                    if d2.sqrt() < min_sep {
                        sep += Vec2::from_angle(rng.random::<f64>() * TAU) / min_sep;
                    } else {
                        sep += d / d2;
                    }
                }
            });
            let accel = if n == 0 {
                let s = this.kinetics.stray_accel;
                Vec2::new(symmetric(&mut rng, s), symmetric(&mut rng, s))
            } else {
                let inv = 1.0 / n as f64;
                let mut a = (sum_pos * inv - p.pos) * params.cohesion
                    + (sum_vel * inv - p.vel) * params.alignment
                    + sep * params.separation;
                if rng.random_bool(params.randomness) {
                    let k = this.kinetics.random_kick;
                    a += Vec2::new(symmetric(&mut rng, k), symmetric(&mut rng, k));
                }
                a
            };
            let vel = propel(p.vel + accel, &params, &mut rng);
            let pos = Vec2::new(
                wrap_coord(p.pos.x + vel.x, this.side),
                wrap_coord(p.pos.y + vel.y, this.side),
            );
            (pos, vel)
        };
        let updates: Vec<(Vec2, Vec2)> = if active.len() >= PARALLEL_THRESHOLD {
            active.par_iter().map(update).collect()
        } else {
            active.iter().map(update).collect()
        };
        for (&i, (pos, vel)) in active.iter().zip(updates) {
            let p = &mut self.particles[i];
            p.pos = pos;
            p.vel = vel;
        }
        self.t += 1;
    }
}

fn symmetric<R: Rng + ?Sized>(rng: &mut R, half_width: f64) -> f64 {
    (rng.random::<f64>() * 2.0 - 1.0) * half_width
}

/// Speed cap, self-propulsion toward the normal speed, and the final cap.
pub(crate) fn propel<R: Rng + ?Sized>(v: Vec2, params: &KineticParams, rng: &mut R) -> Vec2 {
    let vm = params.max_speed;
    let mut v = cap(v, vm);
    let speed = v.norm();
    let heading = if speed > 0.0 {
        v / speed
    } else if params.self_propulsion > 0.0 {
        Vec2::from_angle(rng.random::<f64>() * TAU)
    } else {
        Vec2::ZERO
    };
    let c5 = params.self_propulsion;
    v = heading * (c5 * params.normal_speed) + v * (1.0 - c5);
    // Vn may exceed Vm; the speed cap is the stronger guarantee.
    cap(v, vm)
}

fn cap(v: Vec2, max: f64) -> Vec2 {
    let s = v.norm();
    if s > max {
        if max > 0.0 {
            v * (max / s)
        } else {
            Vec2::ZERO
        }
    } else {
        v
    }
}

/// Separation contribution of one neighbor at offset `d = pos_i - pos_j`
/// (before multiplying by c3). Exposed for the distance-monotonicity check.
pub fn separation_term(d: Vec2) -> Vec2 {
    d / d.norm_sq()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::kinetics::world::Particle;
    use crate::recipe::Recipe;
    use crate::rng::SimRng;

    fn params(v: [f64; 8]) -> Arc<Recipe> {
        Arc::new(Recipe::single(1, KineticParams::clamped(v)))
    }

    #[test]
    fn isolated_particle_with_full_propulsion_reaches_normal_speed() {
        // R=0, Vn=5, Vm=10, c4=0, c5=1
        let r = params([0.0, 5.0, 10.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let mut w = World::new(
            1000.0,
            vec![Particle::active(Vec2::new(500.0, 500.0), Vec2::ZERO, r, 0)],
            3,
        )
        .unwrap();
        for _ in 0..50 {
            w.step_kinetics();
            let s = w.particles()[0].vel.norm();
            assert!((s - 5.0).abs() < 1e-9, "speed {s}");
        }
    }

    #[test]
    fn cohesion_pulls_pair_together() {
        // Vm large, c1 only, no propulsion
        let r = params([100.0, 0.0, 40.0, 0.2, 0.0, 0.0, 0.0, 0.0]);
        let mut w = World::new(
            1000.0,
            vec![
                Particle::active(Vec2::new(400.0, 500.0), Vec2::ZERO, r.clone(), 0),
                Particle::active(Vec2::new(450.0, 530.0), Vec2::ZERO, r, 0),
            ],
            3,
        )
        .unwrap();
        let (a0, b0) = (w.particles()[0].pos, w.particles()[1].pos);
        w.step_kinetics();
        let (va, vb) = (w.particles()[0].vel, w.particles()[1].vel);
        let line = b0 - a0;
        let cross = |u: Vec2, v: Vec2| u.x * v.y - u.y * v.x;
        assert!(va.dot(line) > 0.0 && vb.dot(line) < 0.0);
        assert!(cross(va, line).abs() < 1e-9 && cross(vb, line).abs() < 1e-9);
        assert!((va + vb).norm() < 1e-9);
    }

    #[test]
    fn inert_pair_moves_ballistically_and_wraps() {
        let r = params([50.0, 0.0, 10.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let v = Vec2::new(1.0, 0.0);
        let mut w = World::new(
            5000.0,
            vec![
                Particle::active(Vec2::new(4999.5, 0.0), v, r.clone(), 0),
                Particle::active(Vec2::new(4999.5, 10.0), v, r, 0),
            ],
            3,
        )
        .unwrap();
        w.step_kinetics();
        assert_eq!(w.particles()[0].pos, Vec2::new(0.5, 0.0));
        assert_eq!(w.particles()[1].pos, Vec2::new(0.5, 10.0));
        for _ in 0..100 {
            w.step_kinetics();
            assert_eq!(w.particles()[0].vel, v);
        }
    }

    #[test]
    fn passive_particles_never_move() {
        let r = params([300.0, 10.0, 20.0, 1.0, 1.0, 100.0, 0.5, 0.5]);
        let mut w = World::new(
            100.0,
            vec![
                Particle::active(Vec2::new(50.0, 50.0), Vec2::ZERO, r, 0),
                Particle::passive(Vec2::new(52.0, 50.0)),
            ],
            3,
        )
        .unwrap();
        for _ in 0..20 {
            w.step_kinetics();
        }
        assert_eq!(w.particles()[1].pos, Vec2::new(52.0, 50.0));
        assert_eq!(w.particles()[1].vel, Vec2::ZERO);
    }

    #[test]
    fn separation_weakens_with_distance() {
        let mut last = f64::INFINITY;
        for k in 1..200 {
            let m = separation_term(Vec2::new(0.37 * k as f64, 0.11 * k as f64)).norm();
            assert!(m < last);
            last = m;
        }
    }

    #[test]
    fn propel_respects_cap_even_when_normal_exceeds_max() {
        let p = KineticParams::clamped([10.0, 20.0, 5.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let v = propel(Vec2::new(3.0, 4.0), &p, &mut SimRng::new(1));
        assert!((v.norm() - 5.0).abs() < 1e-12);
        let v0 = propel(Vec2::ZERO, &p, &mut SimRng::new(1));
        assert!((v0.norm() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_particles_get_bounded_repulsion() {
        let r = params([50.0, 0.0, 40.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let mut w = World::new(
            100.0,
            vec![
                Particle::active(Vec2::new(50.0, 50.0), Vec2::ZERO, r.clone(), 0),
                Particle::active(Vec2::new(50.0, 50.0), Vec2::ZERO, r, 0),
            ],
            3,
        )
        .unwrap();
        w.step_kinetics();
        for p in w.particles() {
            assert!(p.vel.norm().is_finite());
            assert!(p.vel.norm() <= 40.0 + 1e-9);
        }
    }
}
