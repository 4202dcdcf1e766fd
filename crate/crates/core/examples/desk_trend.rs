//! Desk-scale runs: prints mean new colors per snapshot and the
//! structuredness series (every 1,000 steps) for each condition and seed.
//!
//! usage: desk_trend [steps] [init] [conditions,...]

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use swarmchem::designs;
use swarmchem::eco::{make_initial_world, Condition, EcoSim, InitialKind, WorldSpec};
use swarmchem::metrics::{exploration_series, render, structuredness};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let steps: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let init = args.get(2).cloned().unwrap_or_else(|| "random".into());
    let conditions: Vec<Condition> = match args.get(3) {
        Some(list) => list.split(',').map(|c| c.parse().unwrap()).collect(),
        None => Condition::ALL.to_vec(),
    };
    let kind = match init.as_str() {
        "random" => InitialKind::Random,
        name => InitialKind::Designed(Some(Arc::new(designs::by_name(name).expect("design")))),
    };
    let jobs: Vec<(Condition, u64)> = conditions
        .iter()
        .flat_map(|&c| (1..=5).map(move |s| (c, s)))
        .collect();
    let t0 = Instant::now();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(cond, seed)| {
            let world = make_initial_world(&kind, &WorldSpec::scaled(1500.0, 1000), seed).unwrap();
            let mut sim = EcoSim::new(world, cond.config());
            let mut snaps = vec![render(sim.world())];
            while sim.time() < steps {
                sim.step();
                if sim.time() % 500 == 0 {
                    snaps.push(render(sim.world()));
                }
            }
            let explo = exploration_series(&snaps);
            let kl: Vec<f64> = snaps.iter().map(|b| structuredness(b).unwrap_or(0.0)).collect();
            (cond, seed, explo, kl, sim.world().active_count())
        })
        .collect();
    for (cond, seed, explo, kl, active) in &results {
        let mean_e = explo[1..].iter().sum::<u64>() as f64 / (explo.len() - 1) as f64;
        let ks: Vec<String> = kl.iter().step_by(2).map(|k| format!("{k:.2}")).collect();
        println!("{cond:14} seed {seed} active {active:4} explo {mean_e:6.2} kl {}", ks.join(" "));
    }
    eprintln!("elapsed {:?}", t0.elapsed());
}
