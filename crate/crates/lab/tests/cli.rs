use std::path::Path;
use std::process::Command;

use swarmchem::eco::{CollisionMode, Condition, MutationRates};
use swarmchem_lab::manifest::MANIFEST_FILE;
use swarmchem_lab::{run, RunConfig, RunManifest, RunOptions};

const SMALL: &str = r#"
preset = "revised-high"
resolution = 100
[world]
side = 400.0
particles = 120
random_active = 6
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_swarmchem"))
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn cli_run(config: &Path, seed: u64, steps: u64, snap_every: u64, out: &Path) {
    let status = bin()
        .args(["run", "--config"])
        .arg(config)
        .args(["--seed", &seed.to_string(), "--steps", &steps.to_string()])
        .args(["--snap-every", &snap_every.to_string(), "--out"])
        .arg(out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
}

#[test]
fn zero_steps_yields_initial_snapshot_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("r");
    cli_run(&cfg, 3, 0, 500, &out);
    let m = RunManifest::load(&out).unwrap();
    assert_eq!(m.snapshots, vec!["snapshots/snap_0.ppm"]);
    assert_eq!((m.start_step, m.end_step), (0, 0));
    assert!(out.join("snapshots/snap_0.ppm").exists());
    let csv = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn same_seed_and_config_give_identical_snapshots() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    cli_run(&cfg, 11, 300, 100, &a);
    cli_run(&cfg, 11, 300, 100, &b);
    let m = RunManifest::load(&a).unwrap();
    assert_eq!(m.snapshots.len(), 4);
    for s in &m.snapshots {
        assert_eq!(std::fs::read(a.join(s)).unwrap(), std::fs::read(b.join(s)).unwrap(), "{s}");
    }
    assert_eq!(
        std::fs::read(a.join("metrics.csv")).unwrap(),
        std::fs::read(b.join("metrics.csv")).unwrap()
    );
}

#[test]
fn different_seeds_differ() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    cli_run(&cfg, 1, 50, 50, &a);
    cli_run(&cfg, 2, 50, 50, &b);
    assert_ne!(
        std::fs::read(a.join("snapshots/snap_50.ppm")).unwrap(),
        std::fs::read(b.join("snapshots/snap_50.ppm")).unwrap()
    );
}

#[test]
fn revised_high_preset_resolves() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("r");
    cli_run(&cfg, 0, 0, 500, &out);
    let m = RunManifest::load(&out).unwrap();
    assert_eq!(m.condition, "revised-high");
    assert_eq!(m.config.eco.collision, CollisionMode::Revised);
    assert_eq!(m.config.eco.mutation, MutationRates::HIGH);
    assert_eq!(m.config.eco.perturbation.interval, Some(2000));
    assert_eq!(m.config.eco, Condition::RevisedHigh.config());
}

#[test]
fn manifest_and_seed_reproduce_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let recipe = tmp.path().join("pair.txt");
    std::fs::write(&recipe, "30 * (60.0, 5.0, 10.0, 0.8, 0.3, 30.0, 0.05, 0.5)\n20 * (90.0, 8.0, 14.0, 0.4, 0.7, 20.0, 0.1, 0.8)\n").unwrap();
    let mut cfg = RunConfig::from_toml(SMALL).unwrap();
    cfg.init = format!("file:{}", recipe.display()).parse().unwrap();
    let first = tmp.path().join("first");
    let m = run(&cfg, &RunOptions { snap_every: 100, ..RunOptions::new(5, 200) }, &first).unwrap();
    // the original recipe file is gone; the manifest alone must suffice
    std::fs::remove_file(&recipe).unwrap();

    let again = tmp.path().join("again");
    std::fs::create_dir_all(&again).unwrap();
    let loaded = RunManifest::load(&first).unwrap();
    let cfg2 = loaded.replay_config(&again).unwrap();
    let opts = RunOptions {
        snap_every: loaded.snapshot_interval,
        ..RunOptions::new(loaded.seed, loaded.end_step)
    };
    run(&cfg2, &opts, &again).unwrap();
    for s in &m.snapshots {
        assert_eq!(std::fs::read(first.join(s)).unwrap(), std::fs::read(again.join(s)).unwrap());
    }
    assert_eq!(
        std::fs::read(first.join("final.checkpoint")).unwrap(),
        std::fs::read(again.join("final.checkpoint")).unwrap()
    );
}

#[test]
fn manifest_is_written_last() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = RunConfig::from_toml(SMALL).unwrap();
    let out = tmp.path().join("r");
    run(&cfg, &RunOptions { snap_every: 25, ..RunOptions::new(1, 50) }, &out).unwrap();
    let mtime = |p: &Path| std::fs::metadata(p).unwrap().modified().unwrap();
    let manifest_time = mtime(&out.join(MANIFEST_FILE));
    for entry in walk(&out) {
        assert!(mtime(&entry) <= manifest_time, "{} newer than manifest", entry.display());
    }
    assert!(!out.join("manifest.json.tmp").exists());
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn metrics_command_matches_run_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("r");
    cli_run(&cfg, 4, 100, 50, &out);
    let res = bin().args(["metrics", "--snapshots"]).arg(out.join("snapshots")).output().unwrap();
    assert!(res.status.success());
    let expected = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(String::from_utf8(res.stdout).unwrap(), expected);
    assert!(expected.starts_with("step,new_colors,kl_divergence\n"));
}

#[test]
fn bad_config_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "preset = \"sideways\"\n");
    let res = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--steps", "0", "--out"])
        .arg(tmp.path().join("r"))
        .output()
        .unwrap();
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("sideways"));
}

#[test]
fn unwritable_output_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = RunConfig::from_toml(SMALL).unwrap();
    assert!(run(&cfg, &RunOptions::new(0, 0), &blocker.join("sub")).is_err());
}
