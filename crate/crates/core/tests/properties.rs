use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use swarmchem::eco::{
    make_initial_world, mutate_recipe, CollisionMode, Competition, EcoConfig, EcoSim, InitialKind, MutationRates,
    PerturbationSchedule, WorldSpec,
};
use swarmchem::interactive::{Mode, Operator, Session, SessionConfig};
use swarmchem::metrics::{
    exploration_series, sample_distance_histogram, structuredness, type_color, SnapshotBitmap,
};
use swarmchem::{random_recipe, KineticParams, Recipe, RecipeEntry, SimRng, World};

fn arb_recipe() -> impl Strategy<Value = Recipe> {
    let entry = (1u32..1000, proptest::array::uniform8(-10.0f64..400.0)).prop_map(|(count, v)| RecipeEntry {
        count,
        params: KineticParams::clamped(v),
    });
    proptest::collection::vec(entry, 1..6).prop_map(|e| Recipe::new(e).unwrap())
}

fn arb_competition() -> impl Strategy<Value = Competition> {
    (0..Competition::ALL.len()).prop_map(|k| Competition::ALL[k])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kinetic_steps_keep_speed_cap_and_wrap(seed in any::<u64>(), types in 1usize..4, count in 5u32..30, side in 80.0f64..500.0) {
        let mut rng = SimRng::new(seed);
        let recipe = Arc::new(random_recipe(&mut rng, types, count));
        let mut world = World::from_recipe(recipe, side, seed);
        let n = world.len();
        for _ in 0..25 {
            world.step_kinetics();
            prop_assert_eq!(world.len(), n);
            for p in world.particles() {
                prop_assert!(p.pos.x >= 0.0 && p.pos.x < side && p.pos.y >= 0.0 && p.pos.y < side);
                let vm = p.params().unwrap().max_speed;
                prop_assert!(p.vel.norm() <= vm + 1e-9);
            }
        }
    }

    #[test]
    fn eco_steps_conserve_particles_and_recipes(
        seed in any::<u64>(),
        competition in arb_competition(),
        original in any::<bool>(),
        interval in 5u64..40,
    ) {
        let spec = WorldSpec { side: 300.0, particles: 120, random_active: 30 };
        let world = make_initial_world(&InitialKind::Random, &spec, seed).unwrap();
        let config = EcoConfig {
            competition,
            collision: if original { CollisionMode::Original } else { CollisionMode::Revised },
            mutation: MutationRates { transmission: 0.3, spontaneous: 0.01 },
            perturbation: PerturbationSchedule::every(interval),
            add_rate: 0.5,
            ..EcoConfig::default()
        };
        let mut sim = EcoSim::new(world, config);
        for _ in 0..40 {
            sim.step();
            prop_assert_eq!(sim.world().len(), 120);
            for c in sim.world().particles().iter().filter_map(|p| p.carried.as_ref()) {
                prop_assert!(!c.recipe.entries().is_empty());
                prop_assert!(c.type_index < c.recipe.len());
            }
        }
    }

    #[test]
    fn mutation_keeps_recipes_valid(r in arb_recipe(), seed in any::<u64>(), add_rate in 0.0f64..=1.0) {
        let mut rng = SimRng::new(seed);
        let mut cur = r;
        for _ in 0..20 {
            cur = mutate_recipe(&cur, &mut rng, add_rate);
            prop_assert!(!cur.entries().is_empty());
            prop_assert!(cur.entries().iter().all(|e| e.count >= 1 && e.params.is_within_bounds()));
        }
    }

    #[test]
    fn session_replay_and_tile_accounting(seed in any::<u64>(), ops in proptest::collection::vec((0u8..5, any::<u16>(), any::<u16>()), 1..25)) {
        let config = SessionConfig { tile_population: 20, tile_side: 100.0, ..SessionConfig::default() };
        let mut s = Session::new(Mode::Hiec, config, seed, 4);
        let (mut adds, mut kills) = (0usize, 0usize);
        for (kind, x, y) in ops {
            let ids: Vec<_> = s.tiles().iter().map(|t| t.id).collect();
            let pick = |k: u16| ids[k as usize % ids.len()];
            let op = match (kind, ids.is_empty()) {
                (_, true) | (4, _) => Operator::Random,
                (0, _) => Operator::Mutate { tile: pick(x) },
                (1, _) => Operator::Mix { a: pick(x), b: pick(y) },
                (2, _) => Operator::Replicate { tile: pick(x) },
                _ => Operator::Kill { tile: pick(x) },
            };
            if let Ok(created) = s.apply(&op) {
                adds += created.len();
                kills += matches!(op, Operator::Kill { .. }) as usize;
            }
            prop_assert_eq!(s.tiles().len(), 4 + adds - kills);
        }
        let replayed = Session::replay(Mode::Hiec, config, seed, 4, s.history()).unwrap();
        prop_assert_eq!(replayed.tiles().len(), s.tiles().len());
        for (a, b) in replayed.tiles().iter().zip(s.tiles()) {
            prop_assert_eq!(a.id, b.id);
            prop_assert_eq!(&a.recipe, &b.recipe);
        }
    }

    #[test]
    fn exploration_total_is_union_size(frames in proptest::collection::vec(proptest::collection::vec(0u8..12, 0..8), 1..10)) {
        let color = |k: u8| [k.wrapping_mul(20).wrapping_add(1), 200, k];
        let bitmaps: Vec<SnapshotBitmap> = frames
            .iter()
            .enumerate()
            .map(|(s, ks)| {
                let mut b = SnapshotBitmap::blank(16, 16, s as u64);
                for (i, &k) in ks.iter().enumerate() {
                    b.set(i as u32, 3, color(k));
                }
                b
            })
            .collect();
        let union: HashSet<u8> = frames.iter().flatten().copied().collect();
        prop_assert_eq!(exploration_series(&bitmaps).iter().sum::<u64>(), union.len() as u64);
    }

    #[test]
    fn distance_histograms_are_normalized(pixels in proptest::collection::vec((0u32..200, 0u32..150), 2..200), seed in any::<u64>()) {
        let mut rng = SimRng::new(seed);
        let h = sample_distance_histogram(&pixels, 200, 150, 5_000, &mut rng).unwrap();
        prop_assert!((h.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(h.probabilities.iter().all(|&p| p >= 0.0));
    }
}

#[test]
fn structuredness_grows_as_particles_gather() {
    let mut rng = SimRng::new(11);
    let color = type_color(&random_recipe(&mut rng, 1, 1).entries()[0].params);
    let n = 2000;
    let scattered: Vec<(u32, u32)> = (0..n).map(|_| (rng.random_range(0..500), rng.random_range(0..500))).collect();
    let mut values = Vec::new();
    for f in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let gathered = (f * n as f64) as usize;
        let mut b = SnapshotBitmap::blank(500, 500, 0);
        for (k, &(x, y)) in scattered.iter().enumerate() {
            let (x, y) = if k < gathered { (230 + (k % 40) as u32, 230 + (k / 40 % 40) as u32) } else { (x, y) };
            b.set(x, y, color);
        }
        values.push(structuredness(&b).unwrap());
    }
    assert!(values.windows(2).all(|w| w[1] >= w[0]), "{values:?}");
    assert!(values[4] > 1.0 && values[0] < 0.01, "{values:?}");
}

#[test]
fn mutation_free_run_stays_monomorphic() {
    let recipe = Arc::new(swarmchem::designs::by_name("rotary").unwrap());
    let spec = WorldSpec::scaled(400.0, 200);
    let world = make_initial_world(&InitialKind::Designed(Some(recipe)), &spec, 3).unwrap();
    let config = EcoConfig {
        mutation: MutationRates { transmission: 0.0, spontaneous: 0.0 },
        add_rate: 0.5,
        ..EcoConfig::default()
    };
    let mut sim = EcoSim::new(world, config);
    for _ in 0..300 {
        sim.step();
        let distinct: HashSet<String> = sim
            .world()
            .particles()
            .iter()
            .filter_map(|p| p.carried.as_ref().map(|c| c.recipe.to_text()))
            .collect();
        assert!(distinct.len() <= 1);
    }
}

fn mean_recipe_length(world: &World) -> f64 {
    let lens: Vec<usize> = world.particles().iter().filter_map(|p| p.carried.as_ref().map(|c| c.recipe.len())).collect();
    lens.iter().sum::<usize>() as f64 / lens.len().max(1) as f64
}

#[test]
fn recipe_length_competition_accumulates_entries() {
    let spec = WorldSpec {
        side: 400.0,
        particles: 200,
        random_active: 40,
    };
    let config = EcoConfig {
        competition: Competition::RecipeLength,
        mutation: MutationRates::HIGH,
        add_rate: 0.5,
        ..EcoConfig::default()
    };
    // averaged over seeds, sampled every 200 steps
    let mut series = vec![0.0; 6];
    let seeds = 3;
    for seed in 0..seeds {
        let world = make_initial_world(&InitialKind::Random, &spec, seed).unwrap();
        let mut sim = EcoSim::new(world, config.clone());
        series[0] += mean_recipe_length(sim.world()) / seeds as f64;
        for slot in series.iter_mut().skip(1) {
            sim.run(200);
            *slot += mean_recipe_length(sim.world()) / seeds as f64;
        }
    }
    assert!(series.windows(2).all(|w| w[1] >= w[0] - 0.05), "{series:?}");
    assert!(series[5] > series[0], "{series:?}");
}
